#pragma once

// XBee-style API frames, API mode 1 (no byte escaping):
//
//   0x7E | length (2 bytes, big-endian) | api_data | checksum
//
// checksum = 0xFF - (sum of api_data mod 256). 16-bit addresses that are not
// known are sent as the 0xFFFE placeholder.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace attnet::frames {

using Bytes = std::vector<std::uint8_t>;
using Address64 = std::array<std::uint8_t, 8>;

inline constexpr std::uint8_t kStartDelimiter = 0x7E;
inline constexpr int kApiMode = 1;
inline constexpr std::uint16_t kUnknownAddress16 = 0xFFFE;
inline constexpr std::size_t kMaxPayload = 255;

inline constexpr std::uint8_t kTxRequestType = 0x10;
inline constexpr std::uint8_t kRxIndicatorType = 0x90;
inline constexpr std::uint8_t kTxStatusType = 0x8B;

struct TxRequest {
    std::uint8_t frame_id = 0; // 0: no delivery status wanted
    Address64 dest64{};
    std::uint16_t dest16 = kUnknownAddress16;
    std::uint8_t radius = 0;
    std::uint8_t options = 0;
    Bytes payload;

    bool operator==(const TxRequest&) const = default;
};

struct RxIndicator {
    Address64 src64{};
    std::uint16_t src16 = kUnknownAddress16;
    std::uint8_t options = 0;
    Bytes payload;

    bool operator==(const RxIndicator&) const = default;
};

struct TxStatus {
    std::uint8_t frame_id = 0;
    std::uint16_t dest16 = kUnknownAddress16;
    std::uint8_t retry_count = 0;
    std::uint8_t delivery_status = 0; // 0x00 success

    bool operator==(const TxStatus&) const = default;
};

using ApiFrame = std::variant<TxRequest, RxIndicator, TxStatus>;

/// Largest api_data any supported frame can carry (a full TxRequest).
inline constexpr std::size_t kMaxApiData = 1 + 1 + 8 + 2 + 1 + 1 + kMaxPayload;

std::uint8_t checksum(std::span<const std::uint8_t> api_data);

/// Serialises the frame. Throws EncodeError for payloads over 255 bytes.
Bytes encode(const ApiFrame& frame);

enum class SkipReason {
    Garbage,          // bytes before a start delimiter
    BadLength,        // declared length outside [1, kMaxApiData]
    ChecksumMismatch,
    UnknownType,
    Malformed,        // known type, wrong length for it
};

const char* to_string(SkipReason reason);

struct Skip {
    SkipReason reason;
    bool operator==(const Skip&) const = default;
};

struct NeedMoreData {
    bool operator==(const NeedMoreData&) const = default;
};

using DecodeResult = std::variant<ApiFrame, Skip, NeedMoreData>;

struct DecodeStep {
    DecodeResult result;
    std::size_t cursor;
};

/// One decoding step over a byte stream starting at `cursor`.
///
/// Garbage before the next 0x7E is consumed as a single Skip. A
/// frame that fails validation yields one Skip and moves the cursor to the
/// next 0x7E after its own delimiter (or the end of the input). An
/// incomplete frame yields NeedMoreData without moving the cursor.
DecodeStep decode_stream(std::span<const std::uint8_t> bytes, std::size_t cursor);

/// Buffered serial receiver around decode_stream. Single owner.
class StreamDecoder {
public:
    void feed(std::span<const std::uint8_t> bytes);

    /// Next result; NeedMoreData when the buffer holds no complete frame.
    DecodeResult next();

    /// Drains all complete frames, counting skips.
    std::vector<ApiFrame> drain();

    std::size_t skipped() const noexcept { return skipped_; }
    std::size_t buffered() const noexcept { return buffer_.size() - cursor_; }

private:
    Bytes buffer_;
    std::size_t cursor_ = 0;
    std::size_t skipped_ = 0;
};

/// Human-readable one-line description, e.g.
/// "TxStatus frame_id=1 dest16=FFFE retry=0 status=0".
std::string describe(const ApiFrame& frame);

/// Inverse of describe(). Fields may be omitted and take their defaults.
/// Throws ParseError.
ApiFrame parse_description(const std::string& text);

std::string to_hex(std::span<const std::uint8_t> bytes, bool spaced = false);

/// Accepts hex digits with optional whitespace. Throws ParseError.
Bytes from_hex(const std::string& text);

} // namespace attnet::frames
