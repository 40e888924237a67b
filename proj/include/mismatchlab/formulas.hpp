#pragma once

#include "mismatchlab/params.hpp"

#include <cmath>

namespace mismatchlab {

/// Region of (sigma, sigma', lambda, lambda'). On a boundary shared by two
/// regions the first match in the order A, B, C wins.
Region classify_region(const ProblemParams& p);

/// The branch expression of the asymptotic MSE for `r`, evaluated at `p`
/// regardless of whether `p` lies in `r`. Used to check continuity across
/// boundaries; callers normally want asymptotic_mse().
double mse_branch(Region r, const ProblemParams& p);

/// Same as mse_branch() for the asymptotic free energy.
double free_energy_branch(Region r, const ProblemParams& p);

/// Large-n limit of the mismatched matrix MSE.
double asymptotic_mse(const ProblemParams& p);

/// Large-n limit of the mismatched free energy; exactly 0 in region C.
double asymptotic_free_energy(const ProblemParams& p);

/// Bayes-optimal matrix MMSE: sigma^4 below the threshold lambda = 1/sigma^4,
/// 2/lambda - 1/(lambda^2 sigma^4) above it.
double mmse(double sigma, double lambda);

/// Asymptotic MSE when the statistician uses the true SNR (lambda' = lambda).
/// Evaluated from its own piecewise closed form, which must agree with
/// asymptotic_mse(sigma, sigma', lambda, lambda).
double matched_snr_mse(double sigma, double sigma_p, double lambda);

/// D_KL(N(0, sigma^2) || N(0, sigma'^2)).
double kl_gaussian(double sigma, double sigma_p);

namespace detail {

// Informative-branch MSE, templated so that it can be evaluated at complex
// arguments for complex-step differentiation.
template <typename T>
T informative_mse(T sigma, T sigma_p, T lambda, T lambda_p) {
    using std::sqrt;
    const T s2 = sigma * sigma;
    const T sp2 = sigma_p * sigma_p;
    const T ratio = sqrt(lambda / lambda_p);
    const T root = sqrt(lambda * lambda_p);
    // square plus a term vanishing on the B|C boundary; the expanded sum cancels there
    const T lead = s2 * (T(1.0) - ratio) + T(1.0) / (lambda_p * sp2);
    return lead * lead + T(2.0) / root * (T(1.0) - T(1.0) / (root * s2 * sp2));
}

}  // namespace detail

}  // namespace mismatchlab
