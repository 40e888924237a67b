#include "mismatchlab/hciz_mc.hpp"

#include "mismatchlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mismatchlab {

SphericalIntegralEstimator::SphericalIntegralEstimator(std::span<const double> eigvals, std::size_t samples,
                                                       const RngSpec& rng)
    : gamma_(eigvals.begin(), eigvals.end()), samples_(samples) {
    if (gamma_.size() < 2) throw DegenerateInput("spherical integral needs dimension n >= 2");
    require(samples >= 1, "spherical integral needs at least one sample");
    for (double g : gamma_) require(std::isfinite(g), "eigenvalues must be finite");

    CounterRng engine(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    normals_.resize(samples_ * gamma_.size());
    for (double& z : normals_) z = normal(engine);
}

double tilt_shift(std::span<const double> eigvals, double theta) {
    double top = -std::numeric_limits<double>::infinity();
    for (double g : eigvals) top = std::max(top, 2.0 * theta * g);
    const double n = static_cast<double>(eigvals.size());
    auto excess = [&](double w) {
        double s = 0.0;
        for (double g : eigvals) s += 1.0 / (w - 2.0 * theta * g);
        return s / n - 1.0;
    };
    // every term is at most 1 at top + 1, so the root lies in (top, top + 1]
    double lo = top;
    double hi = top + 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

std::vector<double> SphericalIntegralEstimator::log_weights(double theta, SphereProposal proposal) const {
    const std::size_t n = gamma_.size();
    const double nd = static_cast<double>(n);
    std::vector<double> out(samples_);

    if (proposal == SphereProposal::Uniform || theta == 0.0) {
        for (std::size_t k = 0; k < samples_; ++k) {
            const double* z = normals_.data() + k * n;
            double norm2 = 0.0;
            double quad = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                norm2 += z[i] * z[i];
                quad += gamma_[i] * z[i] * z[i];
            }
            out[k] = nd * theta * quad / norm2;
        }
        return out;
    }

    // u = g / |g| with g ~ N(0, diag(1/p)) has the angular central Gaussian
    // density prod(p)^{1/2} (sum p u^2)^{-n/2} against the uniform measure.
    const double w = tilt_shift(gamma_, theta);
    std::vector<double> inv_sd(n);
    double half_log_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = w - 2.0 * theta * gamma_[i];
        inv_sd[i] = 1.0 / std::sqrt(p);
        half_log_det += 0.5 * std::log(p);
    }
    for (std::size_t k = 0; k < samples_; ++k) {
        const double* z = normals_.data() + k * n;
        double norm2 = 0.0;
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double g = z[i] * inv_sd[i];
            const double g2 = g * g;
            norm2 += g2;
            quad += gamma_[i] * g2;
        }
        const double gu = quad / norm2;  // sum gamma_i u_i^2
        out[k] = nd * theta * gu + 0.5 * nd * std::log(w - 2.0 * theta * gu) - half_log_det;
    }
    return out;
}

Estimate SphericalIntegralEstimator::estimate(double theta, SphereProposal proposal) const {
    require(std::isfinite(theta), "theta must be finite");
    if (theta == 0.0) return {0.0, 0.0, samples_};
    const std::vector<double> lw = log_weights(theta, proposal);
    return log_mean_exp(lw, static_cast<double>(gamma_.size()));
}

Estimate hciz_rank1_mc(std::span<const double> eigvals, double theta, std::size_t samples, const RngSpec& rng,
                       SphereProposal proposal) {
    if (eigvals.size() < 2) throw DegenerateInput("spherical integral needs dimension n >= 2");
    require(samples >= 1000, "hciz_rank1_mc needs at least 1000 samples");
    if (theta == 0.0) return {0.0, 0.0, samples};
    return SphericalIntegralEstimator(eigvals, samples, rng).estimate(theta, proposal);
}

}  // namespace mismatchlab
