#include "mismatchlab/spherical_integral.hpp"

#include "mismatchlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace mismatchlab {

GMInput GMInput::from_measure(const SpectralMeasure& measure, double theta) {
    return {&measure, theta, measure.support_min(), measure.support_max(), measure.h_min(), measure.h_max()};
}

namespace {

void check_input(const GMInput& in) {
    require(in.measure != nullptr, "GMInput has no measure");
    require(std::isfinite(in.theta), "theta must be finite");
    require(in.gamma_min <= in.measure->support_min() && in.gamma_max >= in.measure->support_max(),
            "extreme eigenvalues must enclose the bulk support");
    require(in.h_min <= 0.0 && in.h_max >= 0.0, "Hilbert edge limits must straddle 0");
}

}  // namespace

double gm_nu(const GMInput& in) {
    check_input(in);
    const double z = 2.0 * in.theta;
    if (z > in.h_max) return in.gamma_max - 1.0 / z;
    if (z < in.h_min) return in.gamma_min - 1.0 / z;
    return r_transform(*in.measure, z);
}

double gm_limit(const GMInput& in) {
    check_input(in);
    if (in.theta == 0.0) return 0.0;

    const double nu = gm_nu(in);
    const double z = 2.0 * in.theta;
    const double base = 1.0 + z * nu;
    const auto arg = [&](double t) { return base - z * t; };

    // The argument is affine in t, so its sign on the support is settled at the
    // edges. It may vanish at an edge (log singularity, still integrable).
    const double tol = 1e-12 * std::max(1.0, std::abs(base));
    for (double t : {in.measure->support_min(), in.measure->support_max()}) {
        if (arg(t) < -tol) {
            std::ostringstream os;
            os << "ln argument " << arg(t) << " < 0 at t = " << t << " (theta = " << in.theta << ")";
            throw LogDomainError(os.str());
        }
    }

    const double integral = in.measure->expect([&](double t) {
        const double a = arg(t);
        if (a <= 0.0) return 0.0;  // only reachable at an edge, where the density vanishes
        return std::log(a);
    });
    return in.theta * nu - 0.5 * integral;
}

DeformedEdge deformed_edge(double snr_strength) {
    require(std::isfinite(snr_strength) && snr_strength >= 0.0, "spike strength must be nonnegative");
    if (snr_strength <= 1.0) return {};
    return {-2.0, snr_strength + 1.0 / snr_strength, -1.0, 1.0 / snr_strength};
}

GMInput deformed_gm_input(double snr_strength, double theta) {
    const DeformedEdge e = deformed_edge(snr_strength);
    return {&semicircle_measure(), theta, e.gamma_min, e.gamma_max, e.h_min, e.h_max};
}

}  // namespace mismatchlab
