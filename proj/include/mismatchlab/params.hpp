#pragma once

#include <string_view>

namespace mismatchlab {

/// One mismatched instance: the true prior std dev and SNR, and the values the
/// statistician assumes for them.
struct ProblemParams {
    double sigma = 1.0;     ///< true prior standard deviation
    double sigma_p = 1.0;   ///< assumed prior standard deviation
    double lambda = 1.0;    ///< true SNR
    double lambda_p = 1.0;  ///< assumed SNR
};

/// Throws InvalidParameter unless sigma > 0, sigma_p > 0, lambda >= 0, lambda_p > 0
/// and all four are finite.
void validate(const ProblemParams& p);

/// Branch of the piecewise asymptotic formulas.
enum class Region {
    A_LowTrueHighAssumed,  ///< lambda sigma^4 <= 1 and lambda' sigma'^4 >= 1
    B_Informative,         ///< lambda sigma^4 >= 1 and sqrt(lambda lambda') sigma^2 sigma'^2 >= 1
    C_Uninformative,       ///< everything else
};

/// Single-letter tag ("A", "B", "C").
std::string_view region_tag(Region r);

}  // namespace mismatchlab
