#pragma once

// MIFARE Classic 1K tags and a PN532-style proximity reader.

#include "attnet/common.hpp"
#include "attnet/rtc.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

namespace attnet::tagcard {

/// 4-byte NUID as read off the card.
using Uid = std::array<std::uint8_t, 4>;

enum class TagKind { MifareClassic1K };

struct NfcTag {
    Uid uid{};
    TagKind kind = TagKind::MifareClassic1K;
};

/// Big-endian: 51 F1 37 4A -> 1374762826.
constexpr std::uint32_t card_number(const Uid& uid) noexcept {
    return (std::uint32_t{uid[0]} << 24) | (std::uint32_t{uid[1]} << 16) | (std::uint32_t{uid[2]} << 8) |
           std::uint32_t{uid[3]};
}

constexpr Uid uid_of(std::uint32_t card) noexcept {
    return {static_cast<std::uint8_t>(card >> 24), static_cast<std::uint8_t>(card >> 16),
            static_cast<std::uint8_t>(card >> 8), static_cast<std::uint8_t>(card)};
}

inline constexpr double kDefaultRangeCm = 5.0;
inline constexpr double kDefaultCooldownS = 0.5;

struct ReaderConfig {
    double max_range_cm = kDefaultRangeCm; // inclusive
    double cooldown_s = kDefaultCooldownS; // inclusive
    double misread_prob = 0.0;

    /// Throws RangeError.
    void validate() const;

    bool operator==(const ReaderConfig&) const = default;
};

/// One accepted tag read.
struct ScanRecord {
    std::uint32_t seq = 0;
    std::uint32_t card = 0;
    rtc::Datetime datetime;
    bool acked = false;

    bool operator==(const ScanRecord&) const = default;
};

enum class ScanFailure { OutOfRange, Cooldown, ReadError };

const char* to_string(ScanFailure f);

using ScanOutcome = std::variant<ScanRecord, ScanFailure>;

/// Reader state owned by one edge node. Sequence numbers start at 1 and only
/// advance when the caller commits a record, so a record that could not be
/// persisted does not leave a gap.
class Reader {
public:
    explicit Reader(ReaderConfig config = {}, std::uint32_t first_seq = 1);

    /// `timestamp` is the clock reading at `now`.
    ScanOutcome scan(const NfcTag& tag, double distance_cm, VirtualTime now, const rtc::Datetime& timestamp, Rng& rng);

    /// Marks the record as durably accepted; advances the sequence counter.
    void commit(const ScanRecord& record);

    std::uint32_t next_seq() const noexcept { return next_seq_; }
    const ReaderConfig& config() const noexcept { return config_; }

private:
    ReaderConfig config_;
    std::uint32_t next_seq_;
    std::optional<VirtualTime> last_scan_;
};

} // namespace attnet::tagcard
