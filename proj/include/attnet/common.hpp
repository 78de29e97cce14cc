#pragma once

#include <chrono>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace attnet {

/// Radio node identifier. The coordinator is always node 0.
enum class NodeId : std::uint16_t {};

inline constexpr NodeId kCoordinator{0};

constexpr std::uint16_t to_int(NodeId id) noexcept { return static_cast<std::uint16_t>(id); }

/// Virtual simulation time, measured from the start of a run. One tick is 1 us.
using VirtualTime = std::chrono::duration<std::int64_t, std::micro>;

inline constexpr VirtualTime kTick{1};

/// Converts fractional seconds to the nearest tick.
VirtualTime from_seconds(double seconds);

/// Renders a time as seconds with six decimals, e.g. "51.000000".
std::string format_seconds(VirtualTime t);

/// Parses a non-negative decimal number of seconds ("0.5", "50", "1.25").
/// Throws ParseError on malformed input.
VirtualTime parse_seconds(std::string_view text);

/// Seeded random source. Draws are defined in terms of the raw 64-bit
/// engine output so that traces are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// True with probability p.
    bool chance(double p) { return uniform() < p; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace attnet
