#pragma once

// Discrete-event, virtual-time star network: one coordinator (node 0) and any
// number of routers, each joined to the coordinator by one symmetric link.

#include "attnet/common.hpp"
#include "attnet/frames.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

namespace attnet::radiosim {

inline constexpr double kDefaultTxPowerDbm = 2.0;
inline constexpr double kDefaultSensitivityDbm = -100.0;
inline constexpr double kDefaultFreqMhz = 2400.0;
inline constexpr double kDefaultLatencyS = 1.0;

struct LinkParams {
    double distance_m = 1.0;
    double tx_power_dbm = kDefaultTxPowerDbm;
    double freq_mhz = kDefaultFreqMhz; // 2400, 900 or 868
    double drop_prob = 0.0;
    double dup_prob = 0.0;
    double latency_s = kDefaultLatencyS;
    double sensitivity_dbm = kDefaultSensitivityDbm;

    /// Throws RangeError when an invariant is broken.
    void validate() const;

    bool operator==(const LinkParams&) const = default;
};

/// Free-space path loss in dB: 32.44 + 20 log10(d_km) + 20 log10(f_MHz).
double fspl_db(double distance_m, double freq_mhz);

double rssi_dbm(const LinkParams& link);

/// rssi >= sensitivity; a link exactly at the floor still delivers.
bool deliverable(const LinkParams& link);

/// Distance at which rssi equals the sensitivity floor.
double feasibility_radius_m(double tx_power_dbm, double freq_mhz, double sensitivity_dbm);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct NetEvent {
    VirtualTime deliver_at{};
    NodeId src{};
    NodeId dst{};
    frames::Bytes raw;

    bool operator==(const NetEvent&) const = default;
};

enum class Disposition { Sent, Dropped, Unreachable, Duplicated, Delivered };

const char* to_string(Disposition d);

struct TraceEntry {
    VirtualTime time{};
    NodeId src{};
    NodeId dst{};
    frames::Bytes raw;
    Disposition disposition{};
};

/// Per-link tallies. Once the queue is drained,
/// delivered + dropped == sent + duplicated.
struct LinkCounters {
    std::uint64_t sent = 0;
    std::uint64_t dropped = 0; // includes unreachable
    std::uint64_t duplicated = 0;
    std::uint64_t delivered = 0;
};

class Network {
public:
    using Receiver = std::function<void(const NetEvent&)>;
    using Timer = std::function<void()>;

    Network();

    /// Registers a node's receive callback. The coordinator must be added
    /// as kCoordinator.
    void add_node(NodeId id, Receiver on_receive);

    /// Sets (or replaces) the link between a router and the coordinator.
    void set_link(NodeId router, const LinkParams& params);
    const LinkParams& link(NodeId router) const;

    /// Queues a transmission made at `now`. Returns the scheduled deliveries:
    /// none when the link is infeasible or the frame is dropped, one normally,
    /// two when duplicated (the copy one tick after the original).
    /// Throws TopologyError for unknown nodes, src == dst, or router-to-router.
    std::vector<NetEvent> send(NodeId src, NodeId dst, frames::Bytes raw, VirtualTime now, Rng& rng);

    /// Schedules a callback at `at` (>= now()).
    void schedule(VirtualTime at, Timer timer);

    /// Dispatches everything due at or before `until` in (time, insertion)
    /// order, then sets the clock to `until`. Returns the delivered events.
    std::vector<NetEvent> advance(VirtualTime until);

    VirtualTime now() const noexcept { return now_; }
    std::optional<VirtualTime> next_due() const;
    bool idle() const noexcept { return queue_.empty(); }

    const std::vector<TraceEntry>& trace() const noexcept { return trace_; }
    const std::map<NodeId, LinkCounters>& counters() const noexcept { return counters_; }
    LinkCounters totals() const;

    /// CSV: time,src,dst,bytes_hex,disposition
    void write_trace_csv(std::ostream& os) const;

private:
    struct Entry {
        VirtualTime at;
        std::uint64_t order;
        std::variant<NetEvent, Timer> what;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            return a.at != b.at ? a.at > b.at : a.order > b.order;
        }
    };

    NodeId router_of(NodeId src, NodeId dst) const;
    void push(VirtualTime at, std::variant<NetEvent, Timer> what);
    void record(VirtualTime t, const NetEvent& ev, Disposition d);

    std::map<NodeId, Receiver> nodes_;
    std::map<NodeId, LinkParams> links_;
    std::map<NodeId, LinkCounters> counters_;
    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::vector<TraceEntry> trace_;
    VirtualTime now_{};
    std::uint64_t next_order_ = 0;
};

} // namespace attnet::radiosim
