#include "mismatchlab/estimate.hpp"

#include "mismatchlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mismatchlab {

Estimate estimate_mean(std::span<const double> samples) {
    require(!samples.empty(), "cannot estimate a mean from zero samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    if (samples.size() < 2) return {mean, 0.0, samples.size()};
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double var = ss / (n - 1.0);
    return {mean, std::sqrt(var / n), samples.size()};
}

Estimate log_mean_exp(std::span<const double> log_values, double scale, std::size_t blocks) {
    require(!log_values.empty(), "log_mean_exp needs samples");
    require(scale > 0.0, "log_mean_exp scale must be positive");
    const std::size_t n = log_values.size();
    const double shift = *std::max_element(log_values.begin(), log_values.end());

    blocks = std::clamp<std::size_t>(blocks, 1, n);
    std::vector<double> block_sums(blocks, 0.0);
    std::vector<std::size_t> block_counts(blocks, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t b = i * blocks / n;
        const double w = std::exp(log_values[i] - shift);
        block_sums[b] += w;
        ++block_counts[b];
        total += w;
    }
    const double full = (shift + std::log(total / static_cast<double>(n))) / scale;
    if (blocks < 2) return {full, 0.0, n};

    std::vector<double> leave_out(blocks);
    double mean_lo = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const double rest = std::max(total - block_sums[b], std::numeric_limits<double>::min());
        leave_out[b] = (shift + std::log(rest / static_cast<double>(n - block_counts[b]))) / scale;
        mean_lo += leave_out[b];
    }
    mean_lo /= static_cast<double>(blocks);
    double ss = 0.0;
    for (double v : leave_out) ss += (v - mean_lo) * (v - mean_lo);
    const double nb = static_cast<double>(blocks);
    return {full, std::sqrt((nb - 1.0) / nb * ss), n};
}

}  // namespace mismatchlab
