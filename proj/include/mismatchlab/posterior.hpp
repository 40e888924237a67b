#pragma once

#include "mismatchlab/linalg.hpp"
#include "mismatchlab/rng.hpp"
#include "mismatchlab/spiked.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mismatchlab {

/// The statistician's posterior for one observed instance, built from the
/// assumed prior std dev sigma_p and assumed SNR lambda_p. Unnormalised log density:
///   -|x|^2 / (2 sigma_p^2) - lambda_p |x|^4 / (4 n) + 1/2 sqrt(lambda_p / n) x^T Y x
/// The instance must outlive the spec and carry eigenvectors for sampling.
struct PosteriorSpec {
    const SpikedInstance& instance;
    double sigma_p = 1.0;
    double lambda_p = 1.0;
};

struct LogDensity {
    double value = 0.0;
    std::vector<double> grad;
};

/// Value and gradient of the unnormalised log posterior at x (original coordinates).
LogDensity log_posterior_grad(const PosteriorSpec& spec, std::span<const double> x);

/// The same density in the eigenbasis y = Q^T x of Y:
///   log p(y) = sum_i c_i y_i^2 - b (sum_i y_i^2)^2
/// with c_i = sqrt(lambda_p / n) gamma_i / 2 - 1 / (2 sigma_p^2) and b = lambda_p / (4 n).
struct EigenbasisForm {
    std::vector<double> c;
    double b = 0.0;

    double log_density(std::span<const double> y) const;
    /// Position of the radial maximum of |y|^2, or 0 when every c_i <= 0.
    double radial_mode() const;
};

EigenbasisForm eigenbasis_form(const PosteriorSpec& spec);

struct ChainConfig {
    std::size_t n_chains = 4;
    std::size_t burn_in = 2000;
    std::size_t n_samples = 4000;
    double target_accept = 0.574;
    double step_init = 0.1;
    RngSpec rng;
    /// Batches per chain for batch-means standard errors.
    std::size_t batches = 20;
    /// Also estimate <y_i y_j> for i != j (needs n <= 64).
    bool record_cross_moments = false;
    /// Optional starting points in original coordinates, one per chain; when
    /// empty the chains cycle through small, prior-scale, top-eigendirection and
    /// random-radius starts.
    std::vector<std::vector<double>> initial_points;
    double rhat_threshold = 1.1;
    /// Throw NonConvergence when split R-hat exceeds rhat_threshold.
    bool enforce_convergence = true;

    /// Throws InvalidParameter on an unusable configuration (n_chains < 4 included).
    void validate() const;
};

struct ChainDiagnostics {
    std::vector<double> accept_rate;     ///< per chain, after burn-in
    std::vector<double> step_size;       ///< per chain, frozen value
    std::vector<std::size_t> monitored;  ///< eigen-directions checked by split R-hat
    std::vector<double> rhat;            ///< aligned with `monitored`
    double max_rhat = 1.0;
    bool converged = true;
};

/// Rao-Blackwellised posterior second moments. In the eigenbasis of Y the
/// posterior is even in every coordinate, so <x x^T> = Q diag(m) Q^T with
/// m_i = <y_i^2>.
class PosteriorMoments {
public:
    PosteriorMoments(Matrix eigvecs, std::vector<double> second, std::vector<double> second_err,
                     Matrix batch_means, ChainDiagnostics diag);

    std::size_t dimension() const { return second_.size(); }

    /// m_i = <y_i^2>, eigenvalue order.
    const std::vector<double>& second_moments() const { return second_; }
    const std::vector<double>& second_moment_errors() const { return second_err_; }

    /// <x x^T> = Q diag(m) Q^T. O(n^3).
    SymmetricMatrix outer() const;
    /// Per-entry batch-means standard errors of outer(). O(batches n^3); meant for small n.
    SymmetricMatrix outer_std_errors() const;

    /// <y_i y_j> and their errors; empty unless record_cross_moments was set.
    const Matrix& cross_moments() const { return cross_; }
    const Matrix& cross_moment_errors() const { return cross_err_; }

    const ChainDiagnostics& diagnostics() const { return diag_; }

    /// (1/n^2) |s s^T - <x x^T>|_F^2 for a signal s, in O(n^2).
    double matrix_mse(std::span<const double> signal) const;

private:
    friend PosteriorMoments posterior_mean_outer(const PosteriorSpec&, const ChainConfig&);

    Matrix eigvecs_;
    std::vector<double> second_;
    std::vector<double> second_err_;
    Matrix batch_means_;  // (chains * batches) x n
    Matrix cross_;
    Matrix cross_err_;
    ChainDiagnostics diag_;
};

/// Runs cfg.n_chains preconditioned MALA chains in the eigenbasis of Y. The step
/// size follows dual averaging toward cfg.target_accept during burn-in and a
/// diagonal preconditioner is fitted in the middle of burn-in. Throws
/// NonConvergence when enforce_convergence is set and split R-hat of y_i^2 over
/// the top 5 and bottom 5 directions exceeds cfg.rhat_threshold.
PosteriorMoments posterior_mean_outer(const PosteriorSpec& spec, const ChainConfig& cfg);

/// Deterministic <y_i^2> by tensor-product Gauss-Legendre quadrature over the
/// positive orthant of the eigenbasis (the density is even per coordinate).
/// nodes_per_axis = 0 picks 128 for n <= 3 and 64 for n = 4; otherwise it is
/// rounded up to a multiple of 16 and must be at least 64. Throws
/// DimensionTooLarge when n > 4.
std::vector<double> small_n_second_moments(const PosteriorSpec& spec, std::size_t nodes_per_axis = 0);

/// Q diag(small_n_second_moments) Q^T.
SymmetricMatrix small_n_quadrature(const PosteriorSpec& spec, std::size_t nodes_per_axis = 0);

}  // namespace mismatchlab
