#include "mismatchlab/formulas.hpp"

#include "mismatchlab/errors.hpp"

#include <cmath>

namespace mismatchlab {

void validate(const ProblemParams& p) {
    require(std::isfinite(p.sigma) && p.sigma > 0.0, "sigma must be positive and finite");
    require(std::isfinite(p.sigma_p) && p.sigma_p > 0.0, "sigma_p must be positive and finite");
    require(std::isfinite(p.lambda) && p.lambda >= 0.0, "lambda must be nonnegative and finite");
    require(std::isfinite(p.lambda_p) && p.lambda_p > 0.0, "lambda_p must be positive and finite");
}

std::string_view region_tag(Region r) {
    switch (r) {
        case Region::A_LowTrueHighAssumed: return "A";
        case Region::B_Informative: return "B";
        case Region::C_Uninformative: return "C";
    }
    return "?";
}

namespace {

// u = sqrt(lambda) sigma^2 and v = sqrt(lambda') sigma'^2. Every region
// condition is a comparison of u, v or u v against 1.
struct Strengths {
    double u;
    double v;
};

Strengths strengths(const ProblemParams& p) {
    return {std::sqrt(p.lambda) * p.sigma * p.sigma, std::sqrt(p.lambda_p) * p.sigma_p * p.sigma_p};
}

}  // namespace

Region classify_region(const ProblemParams& p) {
    validate(p);
    // lambda sigma^4 and lambda' sigma'^4 avoid the rounding of the square roots
    // so that points placed exactly on lambda = 1/sigma^4 classify as intended.
    const double ls4 = p.lambda * std::pow(p.sigma, 4);
    const double lps4 = p.lambda_p * std::pow(p.sigma_p, 4);
    if (ls4 <= 1.0 && lps4 >= 1.0) return Region::A_LowTrueHighAssumed;
    if (ls4 >= 1.0 && ls4 * lps4 >= 1.0) return Region::B_Informative;
    return Region::C_Uninformative;
}

double mse_branch(Region r, const ProblemParams& p) {
    const double s4 = std::pow(p.sigma, 4);
    switch (r) {
        case Region::A_LowTrueHighAssumed: {
            const double d = 1.0 / std::sqrt(p.lambda_p) - 1.0 / (p.lambda_p * p.sigma_p * p.sigma_p);
            return s4 + d * d;
        }
        case Region::B_Informative:
            return detail::informative_mse(p.sigma, p.sigma_p, p.lambda, p.lambda_p);
        case Region::C_Uninformative:
            return s4;
    }
    return s4;
}

double free_energy_branch(Region r, const ProblemParams& p) {
    const auto [u, v] = strengths(p);
    switch (r) {
        case Region::A_LowTrueHighAssumed:
            return -1.0 / (4.0 * v * v) + 1.0 / v - 0.75 + 0.5 * std::log(v);
        case Region::B_Informative:
            return 0.5 * std::log(u * v) - 1.0 / (4.0 * v * v) - u * u / 4.0 + u / (2.0 * v)
                 + 1.0 / (2.0 * u * v) - 0.5;
        case Region::C_Uninformative:
            return 0.0;
    }
    return 0.0;
}

double asymptotic_mse(const ProblemParams& p) {
    return mse_branch(classify_region(p), p);
}

double asymptotic_free_energy(const ProblemParams& p) {
    return free_energy_branch(classify_region(p), p);
}

double mmse(double sigma, double lambda) {
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be nonnegative and finite");
    const double s4 = std::pow(sigma, 4);
    if (lambda * s4 <= 1.0) return s4;
    return 2.0 / lambda - 1.0 / (lambda * lambda * s4);
}

double matched_snr_mse(double sigma, double sigma_p, double lambda) {
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
    require(std::isfinite(sigma_p) && sigma_p > 0.0, "sigma_p must be positive and finite");
    require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be nonnegative and finite");

    const double s2 = sigma * sigma;
    const double sp2 = sigma_p * sigma_p;
    const double s4 = s2 * s2;
    const auto informative = [&] {
        return 2.0 / lambda - (2.0 / s2 - 1.0 / sp2) / (lambda * lambda * sp2);
    };

    if (sigma_p <= sigma) {
        if (lambda * s2 * sp2 <= 1.0) return s4;
        return informative();
    }
    if (lambda * sp2 * sp2 <= 1.0) return s4;
    if (lambda * s4 <= 1.0) {
        const double root = std::sqrt(lambda);
        return s4 + 1.0 / lambda - (2.0 - 1.0 / (root * sp2)) / (lambda * root * sp2);
    }
    return informative();
}

double kl_gaussian(double sigma, double sigma_p) {
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
    require(std::isfinite(sigma_p) && sigma_p > 0.0, "sigma_p must be positive and finite");
    return std::log(sigma_p / sigma) + (sigma * sigma) / (2.0 * sigma_p * sigma_p) - 0.5;
}

}  // namespace mismatchlab
