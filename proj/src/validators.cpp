#include "mismatchlab/validators.hpp"

#include "mismatchlab/errors.hpp"
#include "mismatchlab/formulas.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace mismatchlab {

double sum_rule_residual(double sigma, double sigma_p, const QuadratureConfig& quad) {
    const double kl = kl_gaussian(sigma, sigma_p);
    const double s2 = sigma * sigma;
    const double sp2 = sigma_p * sigma_p;

    const auto to_t = [](double lambda) { return lambda / (1.0 + lambda); };
    const std::array<double, 3> kinks{to_t(1.0 / (s2 * sp2)), to_t(1.0 / (sp2 * sp2)), to_t(1.0 / (s2 * s2))};

    const auto integrand = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double one_minus = 1.0 - t;
        const double lambda = t / one_minus;
        const double gap = matched_snr_mse(sigma, sigma_p, lambda) - mmse(sigma, lambda);
        return gap / (one_minus * one_minus);
    };

    const QuadratureResult r = integrate(integrand, 0.0, 1.0, kinks, quad);
    return r.value - 4.0 * kl;
}

double default_identity_step(const ProblemParams& p) {
    return 1e-4 * std::max({1.0, p.lambda, p.lambda_p});
}

double identity_residual(const ProblemParams& p, double h) {
    validate(p);
    require(std::isfinite(h) && h > 0.0, "finite-difference step must be positive");

    const Region region = classify_region(p);
    const double reach = 10.0 * h;
    if (p.lambda - reach <= 0.0 || p.lambda_p - reach <= 0.0) {
        throw BoundaryProximity("finite-difference stencil leaves the positive quadrant");
    }
    for (double dl : {-reach, reach}) {
        for (double dlp : {-reach, 0.0, reach}) {
            ProblemParams q = p;
            q.lambda += dl;
            q.lambda_p += dlp;
            ProblemParams r = p;
            r.lambda_p += dl;
            if (classify_region(q) != region || classify_region(r) != region) {
                throw BoundaryProximity("finite-difference stencil straddles a region boundary");
            }
        }
    }

    const auto f = [](ProblemParams q) { return asymptotic_free_energy(q); };
    ProblemParams lp_hi = p, lp_lo = p, l_hi = p, l_lo = p;
    lp_hi.lambda_p += h;
    lp_lo.lambda_p -= h;
    l_hi.lambda += h;
    l_lo.lambda -= h;
    const double df_dlp = (f(lp_hi) - f(lp_lo)) / (2.0 * h);
    const double df_dl = (f(l_hi) - f(l_lo)) / (2.0 * h);

    const double ratio = std::sqrt(p.lambda / p.lambda_p);
    const double s4 = std::pow(p.sigma, 4);
    return df_dlp + (2.0 - ratio) * ratio * df_dl + s4 / 4.0 - asymptotic_mse(p) / 4.0;
}

ContinuityReport boundary_continuity(std::size_t points, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> log_scale(std::log(0.3), std::log(3.0));
    std::uniform_real_distribution<double> log_factor(std::log(1e-2), std::log(1e2));

    const auto rel_gap = [](double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); };

    ContinuityReport report;
    report.points = points;
    for (std::size_t k = 0; k < points; ++k) {
        ProblemParams p;
        p.sigma = std::exp(log_scale(engine));
        p.sigma_p = std::exp(log_scale(engine));
        const double s4 = std::pow(p.sigma, 4);
        const double sp4 = std::pow(p.sigma_p, 4);
        // u = lambda sigma^4 and w = lambda' sigma'^4 pinned to a boundary
        const double f = std::exp(log_factor(engine));
        Region left{};
        Region right{};
        switch (k % 3) {
            case 0:  // A | C: u <= 1, w = 1
                p.lambda = std::min(f, 1.0) / s4;
                p.lambda_p = 1.0 / sp4;
                left = Region::A_LowTrueHighAssumed;
                right = Region::C_Uninformative;
                break;
            case 1:  // A | B: u = 1, w >= 1
                p.lambda = 1.0 / s4;
                p.lambda_p = std::max(f, 1.0) / sp4;
                left = Region::A_LowTrueHighAssumed;
                right = Region::B_Informative;
                break;
            default:  // B | C: u >= 1, u w = 1
                p.lambda = std::max(f, 1.0) / s4;
                p.lambda_p = 1.0 / (std::max(f, 1.0) * sp4);
                left = Region::B_Informative;
                right = Region::C_Uninformative;
                break;
        }
        report.max_mse_gap = std::max(report.max_mse_gap, rel_gap(mse_branch(left, p), mse_branch(right, p)));
        report.max_free_energy_gap =
            std::max(report.max_free_energy_gap, rel_gap(free_energy_branch(left, p), free_energy_branch(right, p)));
    }
    return report;
}

std::vector<ProblemParams> identity_test_points(std::size_t count, std::uint64_t seed, double h_max) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> log_sigma(std::log(0.5), std::log(2.0));
    std::uniform_real_distribution<double> log_lambda(std::log(0.5), std::log(5.0));
    std::vector<ProblemParams> out;
    std::size_t attempts = 0;
    while (out.size() < count) {
        require(++attempts < 1000000, "could not place identity test points");
        const ProblemParams p{std::exp(log_sigma(engine)), std::exp(log_sigma(engine)), std::exp(log_lambda(engine)),
                              std::exp(log_lambda(engine))};
        const Region want = out.size() % 2 == 0 ? Region::A_LowTrueHighAssumed : Region::B_Informative;
        if (classify_region(p) != want) continue;
        try {
            identity_residual(p, h_max);
        } catch (const BoundaryProximity&) {
            continue;
        }
        out.push_back(p);
    }
    return out;
}

double identity_max_residual(std::span<const ProblemParams> points, double h) {
    double worst = 0.0;
    for (const ProblemParams& p : points) worst = std::max(worst, std::abs(identity_residual(p, h)));
    return worst;
}

}  // namespace mismatchlab
