#pragma once

// Wires the pipeline together in virtual time:
//
//   reader -> edge node (journal, TxRequest) -> serial -> modem -> radio
//     -> coordinator modem -> RxIndicator -> serial -> attendance server
//
// The coordinator modem answers every TxRequest that asked for it with a
// TxStatus carried back over the same link.

#include "attnet/attserver.hpp"
#include "attnet/edgenode.hpp"
#include "attnet/radiosim.hpp"
#include "attnet/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace attnet::sim {

struct RunCounters {
    std::uint64_t scan_attempts = 0;
    std::uint64_t scans_accepted = 0;
    std::uint64_t out_of_range = 0;
    std::uint64_t cooldown = 0;
    std::uint64_t read_errors = 0;
};

/// Scan that made it into a journal, with the virtual time it happened.
struct AcceptedScan {
    NodeId node{};
    tagcard::ScanRecord record;
    VirtualTime scanned_at{};
};

struct LatencyRow {
    NodeId node{};
    std::uint32_t seq = 0;
    std::uint32_t card = 0;
    VirtualTime scanned_at{};
    VirtualTime received_at{};
};

struct SimulationOptions {
    /// Journal destination per node; defaults to in-memory sinks.
    std::function<std::unique_ptr<edgenode::LineSink>(NodeId)> journal_sink;
    /// Seed override.
    std::optional<std::uint64_t> seed;
};

class Simulation {
public:
    explicit Simulation(scenario::Scenario scenario, SimulationOptions options = {});
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Runs until the queue drains or the horizon passes.
    void run();

    const attserver::AttendanceServer& server() const { return server_; }
    const radiosim::Network& network() const { return network_; }
    const edgenode::EdgeNode& edge(NodeId id) const;
    std::vector<NodeId> edge_ids() const;
    const RunCounters& counters() const { return counters_; }
    const std::vector<AcceptedScan>& accepted_scans() const { return accepted_; }

    /// Seqs each node has put on the radio, in order.
    const std::map<NodeId, std::vector<std::uint32_t>>& transmitted() const { return transmitted_; }

    /// Stored events joined with their scan times, in storage order.
    std::vector<LatencyRow> latencies() const;

    VirtualTime end_time() const { return network_.now(); }

    /// Writes journal_<id>.txt, receiver.log, store.txt, trace.csv,
    /// counters.csv and latency.csv.
    void write_outputs(const std::filesystem::path& out_dir) const;

private:
    struct Device;

    void schedule_actions();
    void on_scan(const scenario::ScanAttempt& attempt);
    void arm_retry(NodeId id);
    void edge_serial_out(NodeId id, const frames::Bytes& bytes);
    void coordinator_receive(const radiosim::NetEvent& ev);
    void edge_receive(NodeId id, const radiosim::NetEvent& ev);

    scenario::Scenario scenario_;
    SimulationOptions options_;
    Rng rng_;
    radiosim::Network network_;
    attserver::AttendanceServer server_;
    frames::StreamDecoder server_serial_;
    std::map<NodeId, std::unique_ptr<Device>> devices_;
    RunCounters counters_;
    std::vector<AcceptedScan> accepted_;
    std::map<NodeId, std::vector<std::uint32_t>> transmitted_;
    std::map<std::pair<NodeId, std::uint32_t>, VirtualTime> scan_times_;
};

} // namespace attnet::sim
