#pragma once

#include <functional>
#include <span>

namespace mismatchlab {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    unsigned max_depth = 30;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  ///< estimated absolute error, summed over pieces
};

/// Adaptive 15-point Gauss-Kronrod integration of f over [a, b], split at the
/// given interior breakpoints (kinks of a piecewise integrand). Breakpoints
/// outside (a, b) are ignored. Throws QuadratureNonconvergence when the error
/// estimate exceeds max(abs_tol, rel_tol * integral of |f|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints = {}, const QuadratureConfig& cfg = {});

/// Tanh-sinh integration over [a, b]; suited to integrands with integrable
/// endpoint singularities. Same error contract as integrate().
QuadratureResult integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                             const QuadratureConfig& cfg = {});

}  // namespace mismatchlab
