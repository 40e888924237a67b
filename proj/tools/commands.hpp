#pragma once

#include "mismatchlab/params.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mismatchlab::cli {

/// Bad flags or an impossible combination of them (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

/// "<axis>:<lo>:<hi>:<count>"
struct GridAxis {
    std::string axis;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;

    std::vector<double> values() const;  ///< linear spacing, both ends included
};

GridAxis parse_grid(const std::string& text);

struct RunConfig {
    std::string command;
    ProblemParams params;
    std::vector<GridAxis> grid;
    std::string out;  ///< empty: stdout
    std::string format = "csv";
    std::uint64_t seed = 1;
    std::size_t n = 400;
    std::size_t trials = 16;
    std::size_t chains = 4;
    std::size_t burn_in = 2000;
    std::size_t samples = 4000;
    bool no_gate = false;
    bool matched = false;     ///< section: lambda' follows lambda
    bool finite_n = false;    ///< free-energy: also run the finite-n estimator
    bool gnuplot = false;     ///< phase-diagram/section: also write <stem>.gp
    std::string dump;         ///< hciz: SPWG1 spectrum cache
    std::vector<double> theta;
};

/// Runs one command; `out` receives data when cfg.out is empty, `err` gets
/// diagnostics. Returns the process exit code. Throws UsageError.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// %.17g
std::string format_number(double x);

}  // namespace mismatchlab::cli
