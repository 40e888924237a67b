#include "mismatchlab/experiments.hpp"

#include "mismatchlab/errors.hpp"
#include "mismatchlab/formulas.hpp"
#include "mismatchlab/parallel.hpp"
#include "mismatchlab/spiked.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mismatchlab {

namespace {

constexpr std::uint64_t kChainTag = 0x636861696e73ULL;
constexpr std::uint64_t kSphereTag = 0x737068657265ULL;

double diagonal_error(const SpikedInstance& inst, const PosteriorMoments& moments) {
    const auto& m = moments.second_moments();
    const std::size_t n = inst.n;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto qi = inst.eigvecs.row(i);
        double xx = 0.0;
        for (std::size_t k = 0; k < n; ++k) xx += qi[k] * qi[k] * m[k];
        const double d = inst.signal[i] * inst.signal[i] - xx;
        sum += d * d;
    }
    const double nd = static_cast<double>(n);
    return sum / (nd * nd);
}

}  // namespace

std::string to_json(const MseReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["trials"] = r.trials;
    j["params"] = {{"sigma", r.params.sigma},
                   {"sigma_p", r.params.sigma_p},
                   {"lambda", r.params.lambda},
                   {"lambda_p", r.params.lambda_p}};
    j["mse"] = {{"mean", r.mse.mean()}, {"stderr", r.mse.std_error()}, {"samples", r.mse.n_samples()}};
    j["asymptotic"] = r.asymptotic;
    if (std::isfinite(r.z_score)) {
        j["z_score"] = r.z_score;
    } else {
        j["z_score"] = nullptr;
    }
    j["seed"] = r.seed;
    return j.dump(2);
}

MseReport mse_experiment(const ProblemParams& p, std::size_t n, std::size_t trials, const ChainConfig& cfg,
                         std::size_t workers) {
    validate(p);
    cfg.validate();
    require(trials >= 8, "mse_experiment needs at least 8 trials");
    require(n >= 2, "mse_experiment needs n >= 2");

    std::vector<TrialDiagnostics> diag(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            const RngSpec trial_rng{cfg.rng.seed, t};
            const SpikedInstance inst = sample_instance(n, p.sigma, p.lambda, trial_rng);
            ChainConfig chain_cfg = cfg;
            chain_cfg.rng = trial_rng.substream(kChainTag);
            const PosteriorMoments moments =
                posterior_mean_outer(PosteriorSpec{inst, p.sigma_p, p.lambda_p}, chain_cfg);
            const ChainDiagnostics& cd = moments.diagnostics();
            TrialDiagnostics& d = diag[t];
            d.mse = moments.matrix_mse(inst.signal);
            d.diagonal_part = diagonal_error(inst, moments);
            d.max_rhat = cd.max_rhat;
            d.min_accept = *std::min_element(cd.accept_rate.begin(), cd.accept_rate.end());
            d.max_accept = *std::max_element(cd.accept_rate.begin(), cd.accept_rate.end());
            d.converged = cd.converged;
        },
        workers);

    std::vector<double> values(trials);
    for (std::size_t t = 0; t < trials; ++t) values[t] = diag[t].mse;

    MseReport report;
    report.n = n;
    report.trials = trials;
    report.params = p;
    report.mse = estimate_mean(values);
    report.asymptotic = asymptotic_mse(p);
    const double gap = report.mse.mean() - report.asymptotic;
    if (report.mse.std_error() > 0.0) {
        report.z_score = gap / report.mse.std_error();
    } else {
        report.z_score = gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), gap);
    }
    report.seed = cfg.rng.seed;
    report.per_trial = std::move(diag);
    return report;
}

void FreeEnergyConfig::validate() const {
    require(grid_points >= 2, "radial grid needs at least 2 points");
    require(sphere_samples >= 1000, "spherical integral needs at least 1000 samples");
    require(r_min > 0.0 && r_max_factor > 0.0, "radial grid bounds must be positive");
}

double log_partition_radial(std::span<const double> normalized_eigvals, double sigma_p, double lambda_p,
                            const RngSpec& rng, const FreeEnergyConfig& cfg) {
    cfg.validate();
    require(std::isfinite(sigma_p) && sigma_p > 0.0, "sigma_p must be positive");
    require(std::isfinite(lambda_p) && lambda_p >= 0.0, "lambda_p must be nonnegative");
    const std::size_t n = normalized_eigvals.size();
    const double nd = static_cast<double>(n);

    const SphericalIntegralEstimator sphere(normalized_eigvals, cfg.sphere_samples, rng);

    const double shape = 0.5 * nd;
    const double scale = 2.0 * sigma_p * sigma_p / nd;
    const double log_norm = -std::lgamma(shape) - shape * std::log(scale);
    const double log_lo = std::log(cfg.r_min / nd);
    const double log_hi = std::log(cfg.r_max_factor * sigma_p * sigma_p);
    require(log_hi > log_lo, "radial grid is empty");
    const double h = (log_hi - log_lo) / static_cast<double>(cfg.grid_points - 1);

    std::vector<double> terms(cfg.grid_points);
    for (std::size_t k = 0; k < cfg.grid_points; ++k) {
        const double log_r = log_lo + h * static_cast<double>(k);
        const double r = std::exp(log_r);
        const double log_density = log_norm + (shape - 1.0) * log_r - r / scale;
        const double theta = 0.5 * std::sqrt(lambda_p) * r;
        const double log_sphere = nd * sphere.estimate(theta, cfg.proposal).mean();
        double term = log_density + log_r - 0.25 * nd * lambda_p * r * r + log_sphere;
        if (k == 0 || k + 1 == cfg.grid_points) term += std::log(0.5);
        terms[k] = term;
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - top);
    return top + std::log(sum * h);
}

Estimate free_energy_experiment(const ProblemParams& p, std::size_t n, std::size_t trials, const RngSpec& rng,
                                const FreeEnergyConfig& cfg, std::size_t workers) {
    validate(p);
    cfg.validate();
    require(trials >= 8, "free_energy_experiment needs at least 8 trials");
    require(n >= 2, "free_energy_experiment needs n >= 2");

    std::vector<double> values(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            const RngSpec trial_rng{rng.seed, t};
            const SpikedInstance inst = sample_instance(n, p.sigma, p.lambda, trial_rng, Spectrum::ValuesOnly);
            const std::vector<double> gamma = inst.normalized_eigvals();
            values[t] = -log_partition_radial(gamma, p.sigma_p, p.lambda_p, trial_rng.substream(kSphereTag), cfg) /
                        static_cast<double>(n);
        },
        workers);
    return estimate_mean(values);
}

}  // namespace mismatchlab
