#pragma once

// Reader-side device: journal every accepted scan, then relay it to the
// coordinator, retransmitting until a delivery status comes back.
//
// Journal file (LF-terminated, append-only):
//   J|<seq>|<card>|<Y/M/D H:M:S>    a scan record
//   A|<seq>                         the record with that seq was acknowledged
//
// Wire payload: 4-byte big-endian seq followed by the ASCII line
//   ID FOUND -> <card> <Y/M/D H:M:S>

#include "attnet/common.hpp"
#include "attnet/frames.hpp"
#include "attnet/tagcard.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attnet::edgenode {

using tagcard::ScanRecord;

/// XBee-style 64-bit address for a node: 0013A200 0000 <id>.
frames::Address64 address_of(NodeId node);
std::optional<NodeId> node_of(const frames::Address64& address);

/// Destination for journal lines. append() writes one LF-terminated line
/// durably or throws JournalWriteError.
class LineSink {
public:
    virtual ~LineSink() = default;
    virtual void append(std::string_view line) = 0;
};

class FileSink final : public LineSink {
public:
    /// Opens for append; `truncate` starts the file empty.
    explicit FileSink(const std::filesystem::path& path, bool truncate = false);
    void append(std::string_view line) override;

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class MemorySink final : public LineSink {
public:
    void append(std::string_view line) override;
    const std::string& contents() const noexcept { return contents_; }

private:
    std::string contents_;
};

std::string journal_line(const ScanRecord& record);
std::string ack_line(std::uint32_t seq);

class Journal {
public:
    explicit Journal(std::unique_ptr<LineSink> sink);

    /// Continues an existing journal: `records` come from a replay and new
    /// lines go to `sink`.
    Journal(std::vector<ScanRecord> records, std::unique_ptr<LineSink> sink);

    /// Throws JournalWriteError; memory is untouched on failure.
    void append(const ScanRecord& record);

    /// Records the ack. Returns false if the seq is unknown or already acked.
    /// Throws JournalWriteError.
    bool mark_acked(std::uint32_t seq);

    const std::vector<ScanRecord>& records() const noexcept { return records_; }
    const ScanRecord* find(std::uint32_t seq) const;
    std::size_t unacked_count() const;

private:
    std::vector<ScanRecord> records_;
    std::map<std::uint32_t, std::size_t> index_;
    std::unique_ptr<LineSink> sink_;
};

struct ReplayResult {
    std::vector<ScanRecord> records;
    std::size_t discarded_partial = 0; // 1 when the file ends mid-line
};

/// Rebuilds journal state. A trailing line without LF is dropped and counted;
/// any complete line that does not parse throws ReplayError with its number.
ReplayResult replay_journal(std::string_view text);
ReplayResult journal_replay(const std::filesystem::path& file);

/// "ID FOUND -> 1374762826 2015/7/5 19:41:51"
std::string payload_text(const ScanRecord& record);

frames::Bytes wire_payload(const ScanRecord& record);

/// Inverse of wire_payload (acked is always false). Throws ParseError.
ScanRecord parse_payload(std::span<const std::uint8_t> payload);

struct EdgeConfig {
    VirtualTime retry_timeout = std::chrono::seconds{3};
    std::size_t batch_limit = 16;
};

struct EdgeCounters {
    std::uint64_t journal_failures = 0;
    std::uint64_t transmissions = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t acks = 0;
    std::uint64_t stale_statuses = 0;
    std::uint64_t deferred = 0; // no free frame id
};

/// One edge device. All calls come from the owning event loop.
///
/// Each unacked record holds a frame id (1-255) from its first transmission
/// until it is acked; ids are handed out round-robin, so an id is only reused
/// after 254 other allocations.
class EdgeNode {
public:
    /// Host-to-modem serial output: one encoded API frame per call.
    using SerialOut = std::function<void(const frames::Bytes&)>;

    EdgeNode(NodeId id, Journal journal, SerialOut serial, EdgeConfig config = {});

    /// Persists the record, then transmits it. Returns false (and sends
    /// nothing) when the journal write fails.
    bool on_scan(const ScanRecord& record, VirtualTime now);

    /// Frames arriving from the modem. A successful TxStatus acks its record.
    void on_frame(const frames::ApiFrame& frame, VirtualTime now);

    /// Re-sends unacked records whose last attempt is at least retry_timeout
    /// old, oldest first, at most batch_limit per call. Returns frames sent.
    std::size_t retransmit_pending(VirtualTime now);

    /// When the next retransmission becomes due, if anything is pending.
    std::optional<VirtualTime> next_retry_due() const;

    NodeId id() const noexcept { return id_; }
    const Journal& journal() const noexcept { return journal_; }
    const EdgeCounters& counters() const noexcept { return counters_; }

private:
    struct Pending {
        std::uint8_t frame_id = 0;
        std::optional<VirtualTime> last_attempt; // empty: never sent since (re)start
    };

    bool transmit(std::uint32_t seq, Pending& pending, VirtualTime now);
    std::uint8_t allocate_frame_id();

    NodeId id_;
    Journal journal_;
    SerialOut serial_;
    EdgeConfig config_;
    EdgeCounters counters_;
    std::map<std::uint32_t, Pending> pending_;         // by seq, oldest first
    std::map<std::uint8_t, std::uint32_t> in_flight_;  // frame id -> seq
    std::uint8_t next_frame_id_ = 1;
};

} // namespace attnet::edgenode
