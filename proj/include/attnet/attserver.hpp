#pragma once

// Coordinator-side attendance service: enrollment, exactly-once ingestion of
// relayed scans, grant/deny decisions and the receiver log.
//
// Store file (LF-terminated lines):
//   S|<card>|<name>|<job>|<Y/M/D H:M:S>
//   E|<node>|<seq>|<card>|<Y/M/D H:M:S>|<G or D>|<received_at seconds>

#include "attnet/common.hpp"
#include "attnet/frames.hpp"
#include "attnet/rtc.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace attnet::attserver {

struct StaffRecord {
    std::uint32_t card_key = 0;
    std::string name;
    std::string job_spec;
    rtc::Datetime enrolled_at;

    bool operator==(const StaffRecord&) const = default;
};

enum class Decision { Granted, Denied };

struct AttendanceEvent {
    NodeId node{};
    std::uint32_t seq = 0;
    std::uint32_t card = 0;
    rtc::Datetime datetime;
    Decision decision = Decision::Denied;
    VirtualTime received_at{};

    bool operator==(const AttendanceEvent&) const = default;
};

/// Staff table keyed by card plus the attendance table in arrival order.
struct StoreData {
    std::map<std::uint32_t, StaffRecord> staff;
    std::vector<AttendanceEvent> events;

    bool operator==(const StoreData&) const = default;
};

std::string serialize(const StoreData& store);

/// Throws LoadError with the offending line number.
StoreData deserialize(std::string_view text);

/// A missing or empty file loads as an empty store.
StoreData load(const std::filesystem::path& path);
void persist(const StoreData& store, const std::filesystem::path& path);

/// Validates and inserts. Throws InvalidField (empty name, '|' or newline in
/// a text field) or AlreadyEnrolled.
const StaffRecord& enroll(StoreData& store, std::string name, std::string job_spec, std::uint32_t card_key,
                          const rtc::Datetime& now);

/// Removes the staff row; later scans of the card are denied. Throws NotEnrolled.
void revoke(StoreData& store, std::uint32_t card_key);

struct Duplicate {
    bool operator==(const Duplicate&) const = default;
};

struct PayloadError {
    std::string reason;
};

using IngestResult = std::variant<AttendanceEvent, Duplicate, PayloadError>;

struct ServerCounters {
    std::uint64_t ingested = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t parse_errors = 0;
    std::uint64_t granted = 0;
    std::uint64_t denied = 0;
};

/// A point in time for presence queries: virtual seconds (events received
/// by then) or a wall-calendar datetime (events scanned by then).
using PresenceCutoff = std::variant<VirtualTime, rtc::Datetime>;

inline constexpr std::int64_t kDefaultDebounceS = 60;

/// Granted scans of one card after debouncing, in scan-time order. A scan
/// less than `debounce_s` after the previous counted scan is collapsed.
std::vector<AttendanceEvent> counted_scans(const StoreData& store, std::uint32_t card,
                                           std::int64_t debounce_s = kDefaultDebounceS,
                                           const std::optional<PresenceCutoff>& cutoff = std::nullopt);

/// Enrolled cards with an odd number of counted scans up to the cutoff
/// (first scan checks in, second checks out, ...).
std::set<std::uint32_t> present(const StoreData& store, const PresenceCutoff& at,
                                std::int64_t debounce_s = kDefaultDebounceS);

/// Thread-safe front end. Ingestion is serialised; snapshot() and the other
/// queries never observe a half-applied ingest.
class AttendanceServer {
public:
    explicit AttendanceServer(StoreData initial = {});

    StaffRecord enroll(std::string name, std::string job_spec, std::uint32_t card_key, const rtc::Datetime& now);
    void revoke(std::uint32_t card_key);

    /// Parses the relayed record; stores it once per (node, seq) and appends
    /// the ASCII portion of the payload to the receiver log.
    IngestResult ingest(const frames::RxIndicator& frame, VirtualTime now);

    StoreData snapshot() const;
    std::vector<std::string> receiver_log() const;
    ServerCounters counters() const;

private:
    mutable std::shared_mutex mutex_;
    StoreData store_;
    std::set<std::pair<NodeId, std::uint32_t>> seen_;
    std::vector<std::string> receiver_log_;
    ServerCounters counters_;
};

} // namespace attnet::attserver
