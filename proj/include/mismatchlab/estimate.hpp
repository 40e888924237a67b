#pragma once

#include <cstddef>
#include <span>

namespace mismatchlab {

/// A Monte Carlo scalar: point estimate, its standard error, and the number
/// of samples behind it.
class Estimate {
public:
    Estimate() = default;
    Estimate(double mean, double std_error, std::size_t n_samples)
        : mean_(mean), std_error_(std_error), n_samples_(n_samples) {}

    double mean() const { return mean_; }
    double std_error() const { return std_error_; }
    std::size_t n_samples() const { return n_samples_; }

private:
    double mean_ = 0.0;
    double std_error_ = 0.0;
    std::size_t n_samples_ = 0;
};

/// Sample mean with standard error = sample std / sqrt(N).
Estimate estimate_mean(std::span<const double> samples);

/// (1/scale) ln mean(exp(log_values)), evaluated with a max shift, and a
/// grouped-jackknife standard error over `blocks` contiguous blocks.
Estimate log_mean_exp(std::span<const double> log_values, double scale = 1.0, std::size_t blocks = 100);

}  // namespace mismatchlab
