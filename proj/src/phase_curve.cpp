#include "mismatchlab/phase_curve.hpp"

#include "mismatchlab/errors.hpp"
#include "mismatchlab/formulas.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

namespace mismatchlab {

std::string_view curve_name(CurveKind kind) {
    switch (kind) {
        case CurveKind::PhaseBoundary: return "phase_boundary";
        case CurveKind::MseEqualsPrior: return "mse_equals_prior";
        case CurveKind::MseEqualsMmse: return "mse_equals_mmse";
    }
    return "unknown";
}

namespace {

ProblemParams params_at(const CurveSpec& spec, double sweep, double other) {
    if (spec.sweep_axis == SweepAxis::SigmaP) return {spec.sigma, sweep, spec.lambda, other};
    return {spec.sigma, other, spec.lambda, sweep};
}

CurvePoint point_at(const CurveSpec& spec, double sweep, double other) {
    const ProblemParams p = params_at(spec, sweep, other);
    return {p.sigma_p, p.lambda_p};
}

// Bisection on a bracket [a, b] with g(a), g(b) of opposite signs.
double bisect(const std::function<double(double)>& g, double a, double b, double rel_tol) {
    double ga = g(a);
    for (int it = 0; it < 200 && (b - a) > rel_tol * std::abs(b); ++it) {
        const double mid = 0.5 * (a + b);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> log_scan(double lo, double hi, std::size_t count) {
    std::vector<double> ys(count);
    const double ratio = std::log(hi / lo);
    for (std::size_t i = 0; i < count; ++i) {
        ys[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    ys.front() = lo;
    ys.back() = hi;
    return ys;
}

// lambda sigma^4 lambda' sigma'^4 - 1 (or lambda' sigma'^4 - 1 below the
// true-SNR threshold); increasing in both sigma' and lambda'.
double boundary_gap(const CurveSpec& spec, const ProblemParams& p) {
    const double ls4 = spec.lambda * std::pow(spec.sigma, 4);
    const double lps4 = p.lambda_p * std::pow(p.sigma_p, 4);
    return ls4 >= 1.0 ? ls4 * lps4 - 1.0 : lps4 - 1.0;
}

// Location of the B/C boundary on the solved-for axis.
double informative_start(const CurveSpec& spec, double sweep) {
    const double ls4 = spec.lambda * std::pow(spec.sigma, 4);
    if (spec.sweep_axis == SweepAxis::SigmaP) return 1.0 / (ls4 * std::pow(sweep, 4));
    return std::pow(1.0 / (ls4 * sweep), 0.25);
}

// d MSE_B / d(other axis) by complex-step differentiation.
double informative_mse_slope(const CurveSpec& spec, double sweep, double other) {
    using C = std::complex<double>;
    const double step = 1e-20 * other;
    const C y(other, step);
    C value;
    if (spec.sweep_axis == SweepAxis::SigmaP) {
        value = detail::informative_mse<C>(C(spec.sigma), C(sweep), C(spec.lambda), y);
    } else {
        value = detail::informative_mse<C>(C(spec.sigma), y, C(spec.lambda), C(sweep));
    }
    return value.imag() / step;
}

}  // namespace

std::vector<CurvePoint> curve_points_at(const CurveSpec& spec, double sweep_value, const CurveSearch& search) {
    require(spec.sigma > 0.0 && spec.lambda >= 0.0, "curve spec needs sigma > 0 and lambda >= 0");
    require(sweep_value > 0.0 && std::isfinite(sweep_value), "sweep value must be positive");
    require(search.lo > 0.0 && search.hi > search.lo && search.scan_points >= 2, "invalid search window");

    std::vector<CurvePoint> out;
    const double ls4 = spec.lambda * std::pow(spec.sigma, 4);

    if (spec.kind == CurveKind::PhaseBoundary) {
        const auto g = [&](double y) { return boundary_gap(spec, params_at(spec, sweep_value, y)); };
        const double glo = g(search.lo);
        const double ghi = g(search.hi);
        if (glo == 0.0) {
            out.push_back(point_at(spec, sweep_value, search.lo));
        } else if ((glo < 0.0) != (ghi < 0.0) || ghi == 0.0) {
            out.push_back(point_at(spec, sweep_value, bisect(g, search.lo, search.hi, search.rel_tol)));
        }
    } else if (ls4 >= 1.0) {
        const double start = informative_start(spec, sweep_value) * (1.0 + 1e-9);
        const double lo = std::max(search.lo, start);
        if (lo < search.hi) {
            const double s4 = std::pow(spec.sigma, 4);
            const double target = spec.kind == CurveKind::MseEqualsPrior ? s4 : mmse(spec.sigma, spec.lambda);
            const auto mse_b = [&](double y) {
                return mse_branch(Region::B_Informative, params_at(spec, sweep_value, y));
            };
            std::function<double(double)> g;
            if (spec.kind == CurveKind::MseEqualsPrior) {
                g = [&](double y) { return mse_b(y) - target; };
            } else {
                g = [&](double y) { return informative_mse_slope(spec, sweep_value, y); };
            }

            const std::vector<double> ys = log_scan(lo, search.hi, search.scan_points);
            double prev = g(ys[0]);
            for (std::size_t i = 1; i < ys.size(); ++i) {
                const double cur = g(ys[i]);
                const bool crossing = spec.kind == CurveKind::MseEqualsPrior
                                          ? (prev < 0.0) != (cur < 0.0) || cur == 0.0
                                          : prev < 0.0 && cur >= 0.0;
                if (crossing) {
                    const double root = cur == 0.0 ? ys[i] : bisect(g, ys[i - 1], ys[i], search.rel_tol);
                    const bool keep = spec.kind == CurveKind::MseEqualsPrior
                                      || std::abs(mse_b(root) - target) <= 1e-9 * std::max(1.0, target);
                    if (keep) out.push_back(point_at(spec, sweep_value, root));
                }
                prev = cur;
            }
        }
    }

    if (out.empty()) {
        std::ostringstream os;
        os << curve_name(spec.kind) << ": no root at sweep value " << sweep_value << " in ["
           << search.lo << ", " << search.hi << "]";
        throw NoRoot(os.str());
    }
    return out;
}

std::vector<CurvePoint> phase_curve(const CurveSpec& spec, std::span<const double> sweep_values,
                                    const CurveSearch& search) {
    std::vector<CurvePoint> out;
    for (double x : sweep_values) {
        try {
            const auto pts = curve_points_at(spec, x, search);
            out.insert(out.end(), pts.begin(), pts.end());
        } catch (const NoRoot&) {
        }
    }
    return out;
}

}  // namespace mismatchlab
