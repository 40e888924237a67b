#pragma once

#include <cstdint>
#include <limits>

namespace mismatchlab {

/// Identifies one reproducible random stream: the run seed plus a substream
/// index (typically the trial number).
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// A child stream keyed by `tag`; distinct tags give unrelated streams.
    RngSpec substream(std::uint64_t tag) const;

    friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

/// Counter-based generator: the k-th output is a SplitMix64 finalisation of
/// key + k * golden_gamma, where the key hashes (seed, stream). Draws depend
/// only on (seed, stream, k), never on scheduling.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(const RngSpec& spec);

    result_type operator()();

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace mismatchlab
