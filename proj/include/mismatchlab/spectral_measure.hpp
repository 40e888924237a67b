#pragma once

#include <functional>

namespace mismatchlab {

/// A compactly supported probability measure with a Lebesgue density, and its
/// Hilbert (Stieltjes) transform H(z) = int dmu(t) / (z - t) off the support.
///
/// Instances are immutable and may be shared between threads.
class SpectralMeasure {
public:
    using Function = std::function<double(double)>;

    /// Measure with a numerically given density. The Hilbert transform and the
    /// mean are computed by quadrature. Throws InvalidParameter when the density
    /// is negative at a probe point or does not integrate to 1 within 1e-8.
    SpectralMeasure(double support_min, double support_max, Function density);

    /// Measure with a closed-form Hilbert transform. `hilbert` must accept the
    /// support edges themselves and return the one-sided limits there.
    SpectralMeasure(double support_min, double support_max, Function density, Function hilbert);

    double support_min() const { return support_min_; }
    double support_max() const { return support_max_; }

    double density(double t) const;

    /// H(z) for z <= support_min or z >= support_max (edges as one-sided
    /// limits, possibly infinite). Throws OutOfRange inside the support.
    double hilbert(double z) const;

    /// lim H(z) as z -> support_min from below.
    double h_min() const { return h_min_; }
    /// lim H(z) as z -> support_max from above.
    double h_max() const { return h_max_; }

    double mean() const { return mean_; }

    /// int f(t) dmu(t) with the substitution t = c + r sin(phi), which removes
    /// square-root behaviour of the density at the edges.
    double expect(const Function& f) const;

    /// Quadrature of the density over the support.
    double total_mass() const;

private:
    void finish_construction();
    double hilbert_by_quadrature(double z) const;

    double support_min_;
    double support_max_;
    Function density_;
    Function hilbert_;
    double h_min_ = 0.0;
    double h_max_ = 0.0;
    double mean_ = 0.0;
};

/// Semicircle law on [-2, 2]: density sqrt(4 - t^2) / (2 pi),
/// H(z) = (z - sign(z) sqrt(z^2 - 4)) / 2.
const SpectralMeasure& semicircle_measure();

/// R(z) = H^{-1}(z) - 1/z for z in [h_min, h_max], by monotone bisection of H
/// outside the support. R(0) is the mean of the measure. Throws OutOfRange for
/// z outside [h_min, h_max].
double r_transform(const SpectralMeasure& measure, double z);

}  // namespace mismatchlab
