#pragma once

#include <cstdint>
#include <string_view>

namespace workgen {

// Counter-based random stream. Each output is a hash of (key, counter), and
// child streams are derived by hashing a label into the key, so the values a
// stream produces depend only on its derivation path and draw index -- never
// on what other streams did or on thread scheduling.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    /// Independent child stream keyed by a label (e.g. client id or role).
    RandomStream derive(std::string_view label) const;
    RandomStream derive(std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Uniform draw strictly inside (0, 1).
    double next_uniform();

    /// Standard normal draw via inverse-cdf (one uniform consumed).
    double next_normal();

private:
    RandomStream(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace workgen
