#include "workgen/random.hpp"

#include "workgen/math.hpp"

namespace workgen {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kRootSalt = 0x243F6A8885A308D3ull;
constexpr std::uint64_t kChildSalt = 0xD6E8FEB86659FD93ull;

// SplitMix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : key_(mix(seed ^ kRootSalt)) {}

RandomStream RandomStream::derive(std::string_view label) const {
    return RandomStream(mix(mix(key_ ^ fnv1a(label)) ^ kChildSalt), 0);
}

RandomStream RandomStream::derive(std::uint64_t index) const {
    return RandomStream(mix(mix(key_ ^ mix(index + kGolden)) ^ kChildSalt), 0);
}

std::uint64_t RandomStream::next_u64() {
    counter_ += 1;
    return mix(key_ + counter_ * kGolden);
}

double RandomStream::next_uniform() {
    // 53 significand bits mapped to bin centers: never exactly 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
    return math::normal_quantile(next_uniform());
}

}  // namespace workgen
