#include "mismatchlab/quadrature.hpp"

#include "mismatchlab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace mismatchlab {

namespace {

void check_converged(double error, double l1, const QuadratureConfig& cfg, double a, double b) {
    const double allowed = std::max(cfg.abs_tol, cfg.rel_tol * l1);
    if (!(error <= allowed)) {
        std::ostringstream os;
        os << "quadrature on [" << a << ", " << b << "] did not converge: error estimate " << error
           << " > " << allowed;
        throw QuadratureNonconvergence(os.str());
    }
}

struct Panel {
    double value = 0.0;
    double error = 0.0;
    double l1 = 0.0;
};

Panel kronrod15(const std::function<double(double)>& f, double lo, double hi) {
    Panel p;
    p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    return p;
}

// Bisects until each panel meets its share of the absolute budget or the
// relative target. Boost's own recursion measures tolerance against |value|
// only and so never stops on an integrand that integrates to zero.
Panel refine(const std::function<double(double)>& f, double lo, double hi, const Panel& whole, unsigned depth,
             double budget, double rel_tol) {
    if (depth == 0 || whole.error <= std::max(budget, rel_tol * std::abs(whole.value))) return whole;
    const double mid = 0.5 * (lo + hi);
    const Panel left = refine(f, lo, mid, kronrod15(f, lo, mid), depth - 1, budget / 2.0, rel_tol);
    const Panel right = refine(f, mid, hi, kronrod15(f, mid, hi), depth - 1, budget / 2.0, rel_tol);
    return {left.value + right.value, left.error + right.error, left.l1 + right.l1};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints, const QuadratureConfig& cfg) {
    require(std::isfinite(a) && std::isfinite(b) && a <= b, "integration limits must be finite and ordered");

    std::vector<double> knots{a};
    for (double x : breakpoints) {
        if (x > a && x < b) knots.push_back(x);
    }
    std::sort(knots.begin() + 1, knots.end());
    knots.push_back(b);

    std::vector<Panel> coarse;
    double l1_coarse = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        coarse.push_back(knots[i + 1] > knots[i] ? kronrod15(f, knots[i], knots[i + 1]) : Panel{});
        l1_coarse += coarse.back().l1;
    }
    const double budget = std::max(cfg.abs_tol, cfg.rel_tol * l1_coarse);

    QuadratureResult total;
    double l1_total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i];
        const double hi = knots[i + 1];
        if (!(hi > lo)) continue;
        const Panel p = refine(f, lo, hi, coarse[i], cfg.max_depth, budget * (hi - lo) / (b - a), cfg.rel_tol);
        total.value += p.value;
        total.error += p.error;
        l1_total += p.l1;
    }
    check_converged(total.error, l1_total, cfg, a, b);
    return total;
}

QuadratureResult integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                             const QuadratureConfig& cfg) {
    require(std::isfinite(a) && std::isfinite(b) && a < b, "integration limits must be finite and ordered");
    boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    const double value = integrator.integrate(f, a, b, cfg.rel_tol, &error, &l1, &levels);
    check_converged(error, l1, cfg, a, b);
    return {value, error};
}

}  // namespace mismatchlab
