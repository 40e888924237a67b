#include "mismatchlab/spectral_measure.hpp"

#include "mismatchlab/errors.hpp"
#include "mismatchlab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mismatchlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QuadratureConfig measure_quadrature() {
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-13;
    return cfg;
}

}  // namespace

SpectralMeasure::SpectralMeasure(double support_min, double support_max, Function density)
    : support_min_(support_min), support_max_(support_max), density_(std::move(density)) {
    finish_construction();
}

SpectralMeasure::SpectralMeasure(double support_min, double support_max, Function density, Function hilbert)
    : support_min_(support_min), support_max_(support_max), density_(std::move(density)),
      hilbert_(std::move(hilbert)) {
    finish_construction();
}

void SpectralMeasure::finish_construction() {
    require(std::isfinite(support_min_) && std::isfinite(support_max_) && support_min_ < support_max_,
            "spectral measure support must be a finite nonempty interval");
    require(static_cast<bool>(density_), "spectral measure needs a density");

    for (int i = 0; i <= 64; ++i) {
        const double t = support_min_ + (support_max_ - support_min_) * i / 64.0;
        require(density_(t) >= 0.0, "spectral density must be nonnegative");
    }
    const double mass = total_mass();
    if (std::abs(mass - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "spectral density integrates to " << mass << ", not 1";
        throw InvalidParameter(os.str());
    }
    mean_ = expect([](double t) { return t; });

    if (hilbert_) {
        h_min_ = hilbert_(support_min_);
        h_max_ = hilbert_(support_max_);
    } else {
        // A density that is positive at an edge makes H diverge logarithmically there.
        h_min_ = density_(support_min_) > 0.0 ? -kInf : hilbert_by_quadrature(support_min_);
        h_max_ = density_(support_max_) > 0.0 ? kInf : hilbert_by_quadrature(support_max_);
    }
}

double SpectralMeasure::density(double t) const {
    if (t < support_min_ || t > support_max_) return 0.0;
    return density_(t);
}

double SpectralMeasure::expect(const Function& f) const {
    const double centre = 0.5 * (support_min_ + support_max_);
    const double radius = 0.5 * (support_max_ - support_min_);
    const auto integrand = [&](double phi) {
        const double t = centre + radius * std::sin(phi);
        return density_(t) * f(t) * radius * std::cos(phi);
    };
    // Tanh-sinh never samples the endpoints, so f may have an integrable
    // singularity at an edge (ln(t_max - t) in the spherical-integral limit).
    const double half_pi = 0.5 * std::numbers::pi;
    return integrate_endpoint_singular(integrand, -half_pi, half_pi, measure_quadrature()).value;
}

double SpectralMeasure::total_mass() const {
    return expect([](double) { return 1.0; });
}

double SpectralMeasure::hilbert_by_quadrature(double z) const {
    // Tanh-sinh copes with the 1/sqrt singularity when z sits on an edge.
    const auto integrand = [&](double t) { return density_(t) / (z - t); };
    return integrate_endpoint_singular(integrand, support_min_, support_max_, measure_quadrature()).value;
}

double SpectralMeasure::hilbert(double z) const {
    if (z > support_min_ && z < support_max_) {
        std::ostringstream os;
        os << "Hilbert transform undefined inside the support: z = " << z;
        throw OutOfRange(os.str());
    }
    if (z == support_min_) return h_min_;
    if (z == support_max_) return h_max_;
    if (hilbert_) return hilbert_(z);
    return hilbert_by_quadrature(z);
}

const SpectralMeasure& semicircle_measure() {
    static const SpectralMeasure measure(
        -2.0, 2.0,
        [](double t) {
            const double q = 4.0 - t * t;
            return q > 0.0 ? std::sqrt(q) / (2.0 * std::numbers::pi) : 0.0;
        },
        [](double z) {
            // 2 / (z + sign(z) sqrt(z^2 - 4)) avoids cancellation for large |z|
            const double q = std::max(z * z - 4.0, 0.0);
            return 2.0 / (z + std::copysign(std::sqrt(q), z));
        });
    return measure;
}

double r_transform(const SpectralMeasure& measure, double z) {
    if (!(z >= measure.h_min() && z <= measure.h_max())) {
        std::ostringstream os;
        os << "R-transform argument " << z << " outside [" << measure.h_min() << ", " << measure.h_max() << "]";
        throw OutOfRange(os.str());
    }
    // Inverting H near z = 0 means locating a point near 1/z; the subtraction
    // would lose every digit, so the analytic limit is used there.
    if (std::abs(z) < 1e-9) return measure.mean();

    if (z == measure.h_max()) return measure.support_max() - 1.0 / z;
    if (z == measure.h_min()) return measure.support_min() - 1.0 / z;

    // H decreases from h_max to 0 on (support_max, inf) and from 0 to h_min
    // on (-inf, support_min), so bisection on either side converges.
    const bool right = z > 0.0;
    const double edge = right ? measure.support_max() : measure.support_min();
    const double dir = right ? 1.0 : -1.0;
    const double eps = 1e-12;

    double near = edge + dir * eps;
    double span = 1.0;
    double far = edge + dir * span;
    // Grow until H(far) has passed z.
    while ((right ? measure.hilbert(far) > z : measure.hilbert(far) < z)) {
        near = far;
        span *= 2.0;
        far = edge + dir * span;
        if (span > 1e300) throw OutOfRange("failed to bracket the inverse Hilbert transform");
    }
    // Invariant: H(near) beyond z (larger magnitude), H(far) short of it.
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (near + far);
        if (mid == near || mid == far) break;
        const double h = measure.hilbert(mid);
        if (right ? h > z : h < z) {
            near = mid;
        } else {
            far = mid;
        }
    }
    const double x = 0.5 * (near + far);
    return x - 1.0 / z;
}

}  // namespace mismatchlab
