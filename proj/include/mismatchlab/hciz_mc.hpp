#pragma once

#include "mismatchlab/estimate.hpp"
#include "mismatchlab/rng.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mismatchlab {

/// How sphere points are drawn for the rank-one spherical integral.
enum class SphereProposal {
    /// Angular central Gaussian tuned to the finite-n saddle point, with
    /// importance weights back to the uniform measure.
    Tilted,
    /// Normalised standard Gaussian vectors. Exact but useless once the
    /// integrand concentrates away from the typical u (roughly 2 theta > 0.5
    /// at n = 500).
    Uniform,
};

/// Monte Carlo estimate of (1/n) ln E_u exp(n theta sum_i gamma_i u_i^2), u uniform
/// on the unit sphere in n dimensions.
///
/// The standard normal draws are made once and reused for every theta, so
/// estimates at nearby thetas share their noise (common random numbers); this
/// keeps a radial integral over theta smooth.
class SphericalIntegralEstimator {
public:
    SphericalIntegralEstimator(std::span<const double> eigvals, std::size_t samples, const RngSpec& rng);

    std::size_t dimension() const { return gamma_.size(); }
    std::size_t samples() const { return samples_; }

    /// (1/n) ln I_n with a jackknife error. theta = 0 gives exactly {0, 0}.
    Estimate estimate(double theta, SphereProposal proposal = SphereProposal::Tilted) const;

    /// Importance log-weights, one per sample, whose log-mean-exp is ln I_n.
    std::vector<double> log_weights(double theta, SphereProposal proposal) const;

private:
    std::vector<double> gamma_;
    std::size_t samples_;
    std::vector<double> normals_;  // samples_ x n, row-major
};

/// Saddle-point shift w > max_i 2 theta gamma_i solving (1/n) sum_i 1/(w - 2 theta gamma_i) = 1.
double tilt_shift(std::span<const double> eigvals, double theta);

/// One-shot helper. Throws DegenerateInput for n < 2 and InvalidParameter
/// when samples < 1000.
Estimate hciz_rank1_mc(std::span<const double> eigvals, double theta, std::size_t samples, const RngSpec& rng,
                       SphereProposal proposal = SphereProposal::Tilted);

}  // namespace mismatchlab
