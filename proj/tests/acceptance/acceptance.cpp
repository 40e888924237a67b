// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "mismatchlab/errors.hpp"
#include "mismatchlab/estimate.hpp"
#include "mismatchlab/experiments.hpp"
#include "mismatchlab/formulas.hpp"
#include "mismatchlab/hciz_mc.hpp"
#include "mismatchlab/linalg.hpp"
#include "mismatchlab/parallel.hpp"
#include "mismatchlab/phase_curve.hpp"
#include "mismatchlab/posterior.hpp"
#include "mismatchlab/spherical_integral.hpp"
#include "mismatchlab/spiked.hpp"
#include "mismatchlab/validators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace mismatchlab;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool ok = o.passed && in_time;
    if (!ok) ++failures;
    std::printf("%s C%d %s: %s; %.3f s (budget %g s%s)\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
                budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
}

double nearest_lambda_p(const std::vector<CurvePoint>& pts, double target) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const CurvePoint& c : pts) {
        if (!(std::abs(c.lambda_p - target) >= std::abs(best - target))) best = c.lambda_p;
    }
    return best;
}

}  // namespace

int main() {
    criterion(1, "matched MMSE value", 1e-3, [] {
        const double v = asymptotic_mse({1.0, 1.0, 2.0, 2.0});
        return Outcome{v == 0.75, fmt("asymptotic_mse(1,1,2,2) = %.17g", v)};
    });

    criterion(2, "curve asymptotes", 1.0, [] {
        const double mmse_lp =
            nearest_lambda_p(curve_points_at({CurveKind::MseEqualsMmse, 1.0, 2.0, SweepAxis::SigmaP}, 1e4), 8.0);
        const double prior_lp =
            nearest_lambda_p(curve_points_at({CurveKind::MseEqualsPrior, 1.0, 2.0, SweepAxis::SigmaP}, 1e4), 2.0);
        const bool ok = std::abs(mmse_lp - 8.0) < 1e-3 && std::abs(prior_lp - 2.0) < 1e-3;
        return Outcome{ok, fmt("at sigma'=1e4: MSE=MMSE at lambda'=%.9g, MSE=sigma^4 at lambda'=%.9g (tol 1e-3)",
                               mmse_lp, prior_lp)};
    });

    criterion(3, "boundary continuity", 1.0, [] {
        const ContinuityReport r = boundary_continuity(1000, 1);
        const double gap = std::max(r.max_mse_gap, r.max_free_energy_gap);
        return Outcome{r.points == 1000 && gap <= 1e-12,
                       fmt("%zu points, max gap mse %.3g, free energy %.3g (tol 1e-12)", r.points, r.max_mse_gap,
                           r.max_free_energy_gap)};
    });

    criterion(4, "free-energy/MSE identity", 1.0, [] {
        const auto pts = identity_test_points(20, 1, 1e-4);
        const double r1 = identity_max_residual(pts, 1e-4);
        const double r2 = identity_max_residual(pts, 5e-5);
        const double r3 = identity_max_residual(pts, 2.5e-5);
        const double q1 = r1 / r2;
        const double q2 = r2 / r3;
        // second order: each halving divides the error by about 4
        const bool ok = pts.size() == 20 && r1 < 1e-6 && q1 >= 3.0 && q2 >= 3.0;
        return Outcome{ok, fmt("max residual %.3g at h=1e-4 (tol 1e-6), halving ratios %.2f, %.2f (need >= 3)", r1,
                               q1, q2)};
    });

    criterion(5, "sum rule", 5.0, [] {
        double worst = 0.0;
        for (const auto& [s, sp] : {std::pair{1.0, 2.0}, {2.0, 1.0}, {1.0, 0.5}, {1.5, 1.5}}) {
            // relative to 4 KL, absolute where KL vanishes
            const double scale = std::max(4.0 * kl_gaussian(s, sp), 1.0);
            worst = std::max(worst, std::abs(sum_rule_residual(s, sp)) / scale);
        }
        return Outcome{worst < 1e-4, fmt("worst relative residual %.3g (tol 1e-4)", worst)};
    });

    criterion(6, "matched-SNR consistency", 5.0, [] {
        double worst = 0.0;
        const auto axis = [](double lo, double hi, int i) { return lo * std::pow(hi / lo, i / 49.0); };
        for (int i = 0; i < 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                for (int k = 0; k < 50; ++k) {
                    const double s = axis(0.2, 5.0, i);
                    const double sp = axis(0.2, 5.0, j);
                    const double l = axis(0.01, 100.0, k);
                    const double a = matched_snr_mse(s, sp, l);
                    const double b = asymptotic_mse({s, sp, l, l});
                    worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
                }
            }
        }
        return Outcome{worst <= 1e-12, fmt("125000 points, max relative gap %.3g (tol 1e-12)", worst)};
    });

    criterion(7, "spherical integral vs large-n limit", 120.0, [] {
        // Averaged over independent instances: a single instance carries an
        // O(1e-2) edge fluctuation at 2 theta >= 1.5.
        constexpr std::size_t kInstances = 4;
        const std::vector<double> two_theta{0.25, 0.5, 1.5, 2.0};
        std::vector<std::vector<double>> est(kInstances, std::vector<double>(two_theta.size()));
        parallel_for(kInstances, [&](std::size_t k) {
            const RngSpec rng{7, k};
            const auto inst = sample_instance(500, 1.0, 0.0, rng, Spectrum::ValuesOnly);
            const SphericalIntegralEstimator e(inst.normalized_eigvals(), 20000, rng.substream(1));
            for (std::size_t j = 0; j < two_theta.size(); ++j) est[k][j] = e.estimate(two_theta[j] / 2.0).mean();
        });
        double worst = 0.0;
        std::string detail;
        for (std::size_t j = 0; j < two_theta.size(); ++j) {
            double mean = 0.0;
            for (std::size_t k = 0; k < kInstances; ++k) mean += est[k][j] / kInstances;
            const double limit = gm_limit(GMInput::from_measure(semicircle_measure(), two_theta[j] / 2.0));
            worst = std::max(worst, std::abs(mean - limit));
            detail += fmt("2theta=%g: %.5f vs %.5f; ", two_theta[j], mean, limit);
        }
        return Outcome{worst < 2e-2, detail + fmt("max deviation %.4f (tol 2e-2)", worst)};
    });

    criterion(8, "top eigenvalue edge", 300.0, [] {
        constexpr std::size_t kTrials = 50;
        double worst = 0.0;
        std::string detail;
        for (const double strength : {0.5, 2.0}) {
            std::vector<double> tops(kTrials);
            parallel_for(kTrials, [&](std::size_t t) {
                const auto inst = sample_instance(1000, 1.0, strength * strength, {8, t}, Spectrum::ValuesOnly);
                tops[t] = inst.eigvals.front() / std::sqrt(1000.0);
            });
            const Estimate e = estimate_mean(tops);
            const double target = deformed_edge(strength).gamma_max;
            worst = std::max(worst, std::abs(e.mean() - target));
            detail += fmt("strength %g: mean %.4f +- %.4f vs %.4f; ", strength, e.mean(), e.std_error(), target);
        }
        return Outcome{worst <= 0.1, detail + fmt("max deviation %.4f (tol 0.1)", worst)};
    });

    criterion(9, "finite-n MSE", 1800.0, [] {
        const std::pair<const char*, ProblemParams> points[] = {
            {"matched", {1.0, 1.0, 2.0, 2.0}},
            {"region C", {1.0, 1.0, 0.25, 0.25}},
            {"region B mismatched", {1.0, 1.0, 2.0, 4.0}},
        };
        bool ok = true;
        std::string detail;
        for (const auto& [name, p] : points) {
            ChainConfig cfg;
            cfg.rng = {9, 0};
            const MseReport r = mse_experiment(p, 400, 16, cfg);
            const double tol = std::max(3.0 * r.mse.std_error(), 0.05);
            const bool pass = std::abs(r.mse.mean() - r.asymptotic) <= tol;
            ok = ok && pass;
            detail += fmt("%s%s %.4f +- %.4f vs %.4f (tol %.4f)", detail.empty() ? "" : "; ", name, r.mse.mean(), r.mse.std_error(), r.asymptotic,
                          tol);
        }
        return Outcome{ok, detail};
    });

    criterion(10, "posterior sampler vs quadrature", 120.0, [] {
        bool ok = true;
        double worst_z = 0.0;
        for (std::size_t n : {2u, 3u}) {
            const auto inst = sample_instance(n, 1.0, 4.0, {10, n});
            const PosteriorSpec spec{inst, 1.0, 3.0};
            const SymmetricMatrix exact = small_n_quadrature(spec);
            ChainConfig cfg;
            cfg.n_samples = 8000;
            cfg.rng = {10, 100 + n};
            const auto mc = posterior_mean_outer(spec, cfg);
            const SymmetricMatrix outer = mc.outer();
            const SymmetricMatrix se = mc.outer_std_errors();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    const double z = std::abs(outer(i, j) - exact(i, j)) / se(i, j);
                    worst_z = std::max(worst_z, z);
                    ok = ok && z <= 3.0;
                }
            }
        }

        const auto inst = sample_instance(10, 1.0, 2.0, {10, 10});
        const PosteriorSpec spec{inst, 1.3, 1.7};
        std::mt19937_64 gen(10);
        std::normal_distribution<double> normal;
        double worst_grad = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x(10);
            double norm = 0.0;
            for (double& v : x) {
                v = 2.0 * normal(gen);
                norm += v * v;
            }
            const double h = 1e-6 * (1.0 + std::sqrt(norm));
            const LogDensity at = log_posterior_grad(spec, x);
            for (std::size_t i = 0; i < x.size(); ++i) {
                auto up = x;
                auto down = x;
                up[i] += h;
                down[i] -= h;
                const double fd =
                    (log_posterior_grad(spec, up).value - log_posterior_grad(spec, down).value) / (2.0 * h);
                worst_grad = std::max(worst_grad, std::abs(fd - at.grad[i]) / std::max(1.0, std::abs(at.grad[i])));
            }
        }
        ok = ok && worst_grad < 1e-6;
        return Outcome{ok, fmt("max |MCMC - quadrature| = %.2f std errors (tol 3), gradient relative error %.3g "
                               "(tol 1e-6)",
                               worst_z, worst_grad)};
    });

    criterion(11, "finite-n free energy", 900.0, [] {
        const std::pair<const char*, ProblemParams> points[] = {
            {"A", {1.0, 1.0, 0.5, 4.0}},
            {"B", {1.0, 1.0, 2.0, 2.0}},
            {"C", {1.0, 1.0, 0.5, 0.5}},
        };
        bool ok = true;
        std::string detail;
        for (const auto& [name, p] : points) {
            const Estimate e = free_energy_experiment(p, 400, 16, {11, 0});
            const double target = asymptotic_free_energy(p);
            const bool pass = std::abs(e.mean() - target) <= 0.02;
            ok = ok && pass;
            detail += fmt("%s %.4f +- %.4f vs %.4f; ", name, e.mean(), e.std_error(), target);
        }
        return Outcome{ok, detail + "tol 0.02"};
    });

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
