#include "mismatchlab/rng.hpp"

namespace mismatchlab {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

RngSpec RngSpec::substream(std::uint64_t tag) const {
    return {seed, mix64(stream ^ mix64(tag + 0x632be59bd9b4e019ULL))};
}

CounterRng::CounterRng(const RngSpec& spec)
    : key_(mix64(mix64(spec.seed + kGamma) ^ (spec.stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {}

CounterRng::result_type CounterRng::operator()() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
}

}  // namespace mismatchlab
