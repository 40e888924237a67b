#pragma once

#include "mismatchlab/params.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mismatchlab {

/// The three loci drawn in the (sigma', lambda') plane at fixed (sigma, lambda).
enum class CurveKind {
    PhaseBoundary,   ///< edge of the uninformative region C
    MseEqualsPrior,  ///< MSE = sigma^4 inside the informative region
    MseEqualsMmse,   ///< MSE = MMSE(sigma, lambda)
};

enum class SweepAxis { SigmaP, LambdaP };

struct CurveSpec {
    CurveKind kind = CurveKind::PhaseBoundary;
    double sigma = 1.0;
    double lambda = 1.0;
    SweepAxis sweep_axis = SweepAxis::SigmaP;
};

struct CurvePoint {
    double sigma_p = 0.0;
    double lambda_p = 0.0;
};

/// Search window for the coordinate that is solved for.
struct CurveSearch {
    double lo = 1e-12;
    double hi = 1e6;
    std::size_t scan_points = 2000;  ///< log-spaced bracketing scan
    double rel_tol = 1e-10;          ///< bisection stops at this relative bracket width
};

std::string_view curve_name(CurveKind kind);

/// All points of the curve on the line `sweep_axis = sweep_value`, found by a
/// log-spaced scan followed by bisection. Throws NoRoot when no bracket exists
/// in the search window.
///
/// MseEqualsMmse touches MSE >= MMSE from above, so there is no sign change to
/// bracket; the scan brackets sign changes of dMSE/d(other axis) instead and a
/// stationary point is kept when its MSE matches the MMSE to 1e-9.
std::vector<CurvePoint> curve_points_at(const CurveSpec& spec, double sweep_value, const CurveSearch& search = {});

/// curve_points_at() over a grid of sweep values; grid values without a root
/// contribute nothing.
std::vector<CurvePoint> phase_curve(const CurveSpec& spec, std::span<const double> sweep_values,
                                    const CurveSearch& search = {});

}  // namespace mismatchlab
