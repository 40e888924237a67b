#pragma once

#include "mismatchlab/spectral_measure.hpp"

namespace mismatchlab {

/// Data for the rank-one spherical-integral asymptotics: the limiting bulk
/// measure, the rank-one eigenvalue theta, and the edge data. The extreme
/// eigenvalues and their Hilbert limits default to the measure's own edges;
/// a spiked matrix overrides gamma_max/h_max with its outlier.
struct GMInput {
    const SpectralMeasure* measure = nullptr;
    double theta = 0.0;
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    double h_min = 0.0;
    double h_max = 0.0;

    /// Edge data taken from the measure itself.
    static GMInput from_measure(const SpectralMeasure& measure, double theta);
};

/// nu(theta): R(2 theta) when h_min <= 2 theta <= h_max, otherwise
/// gamma_max - 1/(2 theta) above and gamma_min - 1/(2 theta) below.
double gm_nu(const GMInput& in);

/// Limit of (1/n) ln I_n(A, B) for rank-one B:
///   theta nu - 1/2 int ln(1 + 2 theta nu - 2 theta t) dmu(t).
/// Exactly 0 at theta = 0. Throws LogDomainError when the logarithm's argument
/// is not positive on the support (an inconsistent GMInput).
double gm_limit(const GMInput& in);

/// Extreme-eigenvalue data of Y/sqrt(n) for the spiked Wigner matrix with
/// spike strength sqrt(lambda) |s|^2 / n.
struct DeformedEdge {
    double gamma_min = -2.0;
    double gamma_max = 2.0;
    double h_min = -1.0;
    double h_max = 1.0;
};

/// Below the BBP threshold (strength <= 1) the edge stays at 2; above it the
/// top eigenvalue detaches to strength + 1/strength with H_max = 1/strength.
DeformedEdge deformed_edge(double snr_strength);

/// GMInput for the semicircle bulk with the deformed edge of `snr_strength`.
GMInput deformed_gm_input(double snr_strength, double theta);

}  // namespace mismatchlab
