#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace paidexperts {

enum class StreamRole : std::uint64_t {
    Advice = 1,
    Predictor = 2,
    Labels = 3,
    ModelGen = 4,
};

std::string_view to_string(StreamRole role);

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine seed for stream (seed, replication, role). Pure function of its
/// arguments; no dependence on the order streams are created in.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t replication,
                                           StreamRole role) noexcept {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ replication);
    return splitmix64(h ^ static_cast<std::uint64_t>(role));
}

/**
 * Reproducible random stream.
 *
 * Backed by std::mt19937_64, whose output sequence is fixed by the standard.
 * The conversions to doubles and bounded integers are done here rather than
 * through <random> distributions, whose algorithms are implementation-defined,
 * so identical (seed, replication, role) gives identical draws on every
 * platform.
 */
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t replication, StreamRole role)
        : seed_(seed), replication_(replication), role_(role),
          engine_(derive_stream_seed(seed, replication, role)) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t replication() const noexcept { return replication_; }
    StreamRole role() const noexcept { return role_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on the closed range [lo, hi]. Unbiased (rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// True with probability p. p <= 0 never fires, p >= 1 always fires.
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t seed_;
    std::uint64_t replication_;
    StreamRole role_;
    std::mt19937_64 engine_;
};

}  // namespace paidexperts
