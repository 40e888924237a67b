#pragma once

#include "mismatchlab/params.hpp"
#include "mismatchlab/quadrature.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mismatchlab {

/// Integral over lambda in [0, inf) of matched_snr_mse - mmse, minus
/// 4 * kl_gaussian(sigma, sigma'). Vanishes up to quadrature error.
///
/// The half line is mapped to [0, 1) by lambda = t / (1 - t); the integrand
/// decays like 1/lambda^2 so the transformed integrand stays bounded. The
/// kinks at lambda = 1/(sigma^2 sigma'^2), 1/sigma'^4 and 1/sigma^4 are passed
/// as breakpoints.
double sum_rule_residual(double sigma, double sigma_p, const QuadratureConfig& quad = {});

/// Default finite-difference step for identity_residual().
double default_identity_step(const ProblemParams& p);

/// Residual of the free-energy/MSE differential identity
///
///   d f/d lambda' + (2 - sqrt(lambda/lambda')) sqrt(lambda/lambda') d f/d lambda + sigma^4/4 - MSE/4
///
/// with the partials of asymptotic_free_energy() taken by central differences
/// of step h. O(h^2) at interior points. Throws BoundaryProximity when any
/// point within 10 h of p (in lambda or lambda') lies in another region.
double identity_residual(const ProblemParams& p, double h);

/// Largest branch disagreement found on the three region boundaries.
struct ContinuityReport {
    std::size_t points = 0;
    double max_mse_gap = 0.0;          ///< |branch difference| / max(1, |value|)
    double max_free_energy_gap = 0.0;  ///< same, for the free energy
};

/// Draws `points` parameter sets spread evenly over the A/C, A/B and B/C
/// boundaries (sigma, sigma' log-uniform in [0.3, 3]) and compares the two
/// adjacent branches of the MSE and of the free energy at each.
ContinuityReport boundary_continuity(std::size_t points, std::uint64_t seed);

/// `count` parameter sets inside regions A and B (alternating), at least
/// 10 h_max away from every boundary, with sigma, sigma' in [0.5, 2] and
/// lambda, lambda' in [0.5, 5] log-uniform.
std::vector<ProblemParams> identity_test_points(std::size_t count, std::uint64_t seed, double h_max = 1e-4);

/// max |identity_residual(p, h)| over `points`.
double identity_max_residual(std::span<const ProblemParams> points, double h);

}  // namespace mismatchlab
