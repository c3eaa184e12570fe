#include "paidexperts/rng.hpp"

#include <limits>

#include "paidexperts/errors.hpp"

namespace paidexperts {

std::string_view to_string(StreamRole role) {
    switch (role) {
        case StreamRole::Advice: return "advice";
        case StreamRole::Predictor: return "predictor";
        case StreamRole::Labels: return "labels";
        case StreamRole::ModelGen: return "model-gen";
    }
    return "unknown";
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvalidParameter("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == std::numeric_limits<std::uint64_t>::max()) {
        return static_cast<std::int64_t>(engine_());
    }
    const std::uint64_t range = span + 1;
    // Largest multiple of range that fits; draws at or above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return lo + static_cast<std::int64_t>(x % range);
}

}  // namespace paidexperts
