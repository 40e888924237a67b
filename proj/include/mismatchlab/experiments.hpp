#pragma once

#include "mismatchlab/estimate.hpp"
#include "mismatchlab/hciz_mc.hpp"
#include "mismatchlab/params.hpp"
#include "mismatchlab/posterior.hpp"
#include "mismatchlab/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mismatchlab {

struct TrialDiagnostics {
    double mse = 0.0;
    /// Share of mse coming from the diagonal of s s^T - <x x^T>. The channel
    /// puts variance-2 noise on the diagonal, so this part carries an O(1/n) bias.
    double diagonal_part = 0.0;
    double max_rhat = 1.0;
    double min_accept = 0.0;
    double max_accept = 0.0;
    bool converged = true;
};

struct MseReport {
    std::size_t n = 0;
    std::size_t trials = 0;
    ProblemParams params;
    Estimate mse;
    double asymptotic = 0.0;
    /// (mse.mean - asymptotic) / mse.std_error
    double z_score = 0.0;
    std::uint64_t seed = 0;
    std::vector<TrialDiagnostics> per_trial;  ///< not serialised
};

/// JSON with exactly the keys n, trials, params{sigma,sigma_p,lambda,lambda_p},
/// mse{mean,stderr,samples}, asymptotic, z_score, seed. A non-finite z_score
/// is written as null.
std::string to_json(const MseReport& report);

/// Finite-n matrix MSE averaged over `trials` independent instances (trials >= 8).
/// Trial t draws its instance from stream {cfg.rng.seed, t} and its chains from
/// a substream of that. Trials run in parallel on up to `workers` threads
/// (0 = worker_count()); the result does not depend on the thread count.
MseReport mse_experiment(const ProblemParams& p, std::size_t n, std::size_t trials, const ChainConfig& cfg,
                         std::size_t workers = 0);

struct FreeEnergyConfig {
    std::size_t grid_points = 200;
    std::size_t sphere_samples = 2000;
    /// The radial grid covers r = |x|^2 / n in [r_min / n, r_max_factor sigma_p^2], log-spaced.
    double r_min = 1e-3;
    double r_max_factor = 20.0;
    SphereProposal proposal = SphereProposal::Tilted;

    void validate() const;
};

/// ln Z(Y) for one instance by the radial reduction
///   Z = int dr p(r) exp(-n lambda_p r^2 / 4) I_n(Y / sqrt n, sqrt(lambda_p) r / 2)
/// where p is the law of |x|^2 / n under the prior, Gamma(n/2, scale 2 sigma_p^2 / n).
/// The spherical integral is estimated with common random numbers across the grid
/// and the r integral is a trapezoid rule in ln r.
double log_partition_radial(std::span<const double> normalized_eigvals, double sigma_p, double lambda_p,
                            const RngSpec& rng, const FreeEnergyConfig& cfg = {});

/// f_n = -(1/n) E ln Z(Y) over `trials` instances (trials >= 8); trial t uses
/// stream {rng.seed, t}.
Estimate free_energy_experiment(const ProblemParams& p, std::size_t n, std::size_t trials, const RngSpec& rng,
                                const FreeEnergyConfig& cfg = {}, std::size_t workers = 0);

}  // namespace mismatchlab
