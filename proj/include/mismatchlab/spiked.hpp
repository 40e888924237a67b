#pragma once

#include "mismatchlab/linalg.hpp"
#include "mismatchlab/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mismatchlab {

enum class Spectrum {
    Full,        ///< eigenvalues and eigenvectors
    ValuesOnly,  ///< eigenvalues only; `eigvecs` left empty
};

/// One draw of the spiked Wigner model Y = sqrt(lambda/n) s s^T + Z, with Z
/// symmetric, N(0,1) off the diagonal and N(0,2) on it. Immutable once built.
struct SpikedInstance {
    std::size_t n = 0;
    double sigma = 1.0;
    double lambda = 0.0;
    RngSpec rng;
    std::vector<double> signal;    ///< s, entries N(0, sigma^2)
    SymmetricMatrix observation;   ///< Y
    std::vector<double> eigvals;   ///< of Y, descending
    Matrix eigvecs;                ///< column k pairs with eigvals[k]; empty for Spectrum::ValuesOnly

    /// Eigenvalues of Y / sqrt(n).
    std::vector<double> normalized_eigvals() const;

    /// sqrt(lambda) |s|^2 / n, the spike strength seen by the top eigenvalue.
    double spike_strength() const;
};

/// Draws s, then the upper triangle of Z row by row, from CounterRng(rng).
/// Requires n >= 2.
SpikedInstance sample_instance(std::size_t n, double sigma, double lambda, const RngSpec& rng,
                               Spectrum spectrum = Spectrum::Full);

/// Cached spectrum of an instance.
struct InstanceDump {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double sigma = 0.0;
    std::vector<double> eigvals;
};

/// Binary layout, all little-endian:
///   "SPWG1" (5 bytes) | n: u64 | seed: u64 | lambda: f64 | sigma: f64 | eigvals: n x f64
void write_dump(std::ostream& os, const InstanceDump& dump);
InstanceDump read_dump(std::istream& is);
InstanceDump make_dump(const SpikedInstance& inst);

}  // namespace mismatchlab
