#include "attnet/simulation.hpp"

#include "attnet/error.hpp"

#include <algorithm>
#include <fstream>

namespace attnet::sim {

struct Simulation::Device {
    explicit Device(const scenario::NodeSpec& s) : spec(s), reader(s.reader) {}

    scenario::NodeSpec spec;
    tagcard::Reader reader;
    std::unique_ptr<edgenode::EdgeNode> edge;
    edgenode::MemorySink* memory_journal = nullptr;
    frames::StreamDecoder modem_in; // host -> modem serial
    frames::StreamDecoder host_in;  // modem -> host serial
    VirtualTime clock_anchor_at{};
    rtc::Datetime clock_anchor{};
    std::optional<VirtualTime> armed_at;

    rtc::Datetime read_clock(VirtualTime now) const {
        const auto elapsed = std::chrono::floor<std::chrono::seconds>(now - clock_anchor_at).count();
        return rtc::to_datetime(rtc::tick(rtc::make_state(clock_anchor), elapsed));
    }
};

Simulation::Simulation(scenario::Scenario scenario, SimulationOptions options)
    : scenario_(std::move(scenario)),
      options_(std::move(options)),
      rng_(options_.seed.value_or(scenario_.seed)) {
    for (const auto& s : scenario_.staff) {
        server_.enroll(s.name, s.job, s.card, s.enrolled_at);
    }
    network_.add_node(kCoordinator, [this](const radiosim::NetEvent& ev) { coordinator_receive(ev); });
    for (const auto& spec : scenario_.nodes) {
        auto dev = std::make_unique<Device>(spec);
        std::unique_ptr<edgenode::LineSink> sink;
        if (options_.journal_sink) {
            sink = options_.journal_sink(spec.id);
        } else {
            auto mem = std::make_unique<edgenode::MemorySink>();
            dev->memory_journal = mem.get();
            sink = std::move(mem);
        }
        const NodeId id = spec.id;
        dev->edge = std::make_unique<edgenode::EdgeNode>(
            id, edgenode::Journal(std::move(sink)), [this, id](const frames::Bytes& b) { edge_serial_out(id, b); },
            scenario_.edge);
        network_.add_node(id, [this, id](const radiosim::NetEvent& ev) { edge_receive(id, ev); });
        network_.set_link(id, spec.link);
        devices_.emplace(id, std::move(dev));
    }
}

Simulation::~Simulation() = default;

const edgenode::EdgeNode& Simulation::edge(NodeId id) const {
    auto it = devices_.find(id);
    if (it == devices_.end()) {
        throw TopologyError("unknown node " + std::to_string(to_int(id)));
    }
    return *it->second->edge;
}

std::vector<NodeId> Simulation::edge_ids() const {
    std::vector<NodeId> ids;
    for (const auto& [id, dev] : devices_) {
        ids.push_back(id);
    }
    return ids;
}

void Simulation::schedule_actions() {
    // At equal times: link changes, then clock sets, then scans.
    for (const auto& ch : scenario_.link_changes) {
        network_.schedule(ch.t, [this, ch] { network_.set_link(ch.node, ch.params); });
    }
    for (const auto& cs : scenario_.clock_sets) {
        network_.schedule(cs.t, [this, cs] {
            auto& dev = *devices_.at(cs.node);
            dev.clock_anchor_at = cs.t;
            dev.clock_anchor = cs.datetime;
        });
    }
    for (const auto& ev : scenario_.events) {
        network_.schedule(ev.t, [this, ev] { on_scan(ev); });
    }
}

void Simulation::run() {
    schedule_actions();
    VirtualTime last_action{};
    for (const auto& e : scenario_.events) {
        last_action = std::max(last_action, e.t);
    }
    for (const auto& c : scenario_.link_changes) {
        last_action = std::max(last_action, c.t);
    }
    for (const auto& c : scenario_.clock_sets) {
        last_action = std::max(last_action, c.t);
    }
    const VirtualTime horizon = scenario_.horizon.value_or(last_action + std::chrono::seconds{600});
    while (auto due = network_.next_due()) {
        if (*due > horizon) {
            break;
        }
        network_.advance(*due);
    }
}

void Simulation::on_scan(const scenario::ScanAttempt& attempt) {
    auto& dev = *devices_.at(attempt.node);
    const VirtualTime now = network_.now();
    ++counters_.scan_attempts;
    auto outcome =
        dev.reader.scan(tagcard::NfcTag{attempt.uid}, attempt.distance_cm, now, dev.read_clock(now), rng_);
    if (const auto* failure = std::get_if<tagcard::ScanFailure>(&outcome)) {
        switch (*failure) {
        case tagcard::ScanFailure::OutOfRange:
            ++counters_.out_of_range;
            break;
        case tagcard::ScanFailure::Cooldown:
            ++counters_.cooldown;
            break;
        case tagcard::ScanFailure::ReadError:
            ++counters_.read_errors;
            break;
        }
        return;
    }
    const auto& record = std::get<tagcard::ScanRecord>(outcome);
    scan_times_[{attempt.node, record.seq}] = now;
    if (!dev.edge->on_scan(record, now)) {
        scan_times_.erase({attempt.node, record.seq});
        return;
    }
    dev.reader.commit(record);
    ++counters_.scans_accepted;
    accepted_.push_back(AcceptedScan{attempt.node, record, now});
    arm_retry(attempt.node);
}

void Simulation::arm_retry(NodeId id) {
    auto& dev = *devices_.at(id);
    const auto due = dev.edge->next_retry_due();
    if (!due) {
        return;
    }
    const VirtualTime at = std::max(*due, network_.now());
    if (dev.armed_at && *dev.armed_at <= at) {
        return;
    }
    dev.armed_at = at;
    network_.schedule(at, [this, id, at] {
        auto& d = *devices_.at(id);
        if (d.armed_at != at) {
            return;
        }
        d.armed_at.reset();
        d.edge->retransmit_pending(network_.now());
        arm_retry(id);
    });
}

void Simulation::edge_serial_out(NodeId id, const frames::Bytes& bytes) {
    auto& dev = *devices_.at(id);
    dev.modem_in.feed(bytes);
    for (auto& frame : dev.modem_in.drain()) {
        if (const auto* req = std::get_if<frames::TxRequest>(&frame)) {
            const auto seq = edgenode::parse_payload(req->payload).seq;
            transmitted_[id].push_back(seq);
            network_.send(id, kCoordinator, frames::encode(*req), network_.now(), rng_);
        }
    }
}

void Simulation::coordinator_receive(const radiosim::NetEvent& ev) {
    frames::StreamDecoder air;
    air.feed(ev.raw);
    for (auto& frame : air.drain()) {
        const auto* req = std::get_if<frames::TxRequest>(&frame);
        if (req == nullptr) {
            continue;
        }
        frames::RxIndicator rx;
        rx.src64 = edgenode::address_of(ev.src);
        rx.payload = req->payload;
        server_serial_.feed(frames::encode(rx));
        for (auto& host_frame : server_serial_.drain()) {
            if (const auto* in = std::get_if<frames::RxIndicator>(&host_frame)) {
                server_.ingest(*in, network_.now());
            }
        }
        if (req->frame_id != 0) {
            const frames::TxStatus status{req->frame_id, frames::kUnknownAddress16, 0, 0};
            network_.send(kCoordinator, ev.src, frames::encode(status), network_.now(), rng_);
        }
    }
}

void Simulation::edge_receive(NodeId id, const radiosim::NetEvent& ev) {
    auto& dev = *devices_.at(id);
    dev.host_in.feed(ev.raw);
    for (auto& frame : dev.host_in.drain()) {
        dev.edge->on_frame(frame, network_.now());
    }
}

std::vector<LatencyRow> Simulation::latencies() const {
    std::vector<LatencyRow> rows;
    for (const auto& e : server_.snapshot().events) {
        auto it = scan_times_.find({e.node, e.seq});
        if (it == scan_times_.end()) {
            continue;
        }
        rows.push_back(LatencyRow{e.node, e.seq, e.card, it->second, e.received_at});
    }
    return rows;
}

void Simulation::write_outputs(const std::filesystem::path& out_dir) const {
    std::filesystem::create_directories(out_dir);
    const auto open = [&](const std::string& name) {
        std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + (out_dir / name).string());
        }
        return out;
    };

    for (const auto& [id, dev] : devices_) {
        if (dev->memory_journal != nullptr) {
            open("journal_" + std::to_string(to_int(id)) + ".txt") << dev->memory_journal->contents();
        }
    }
    {
        auto out = open("receiver.log");
        for (const auto& line : server_.receiver_log()) {
            out << line << '\n';
        }
    }
    open("store.txt") << attserver::serialize(server_.snapshot());
    {
        auto out = open("trace.csv");
        network_.write_trace_csv(out);
    }
    {
        auto out = open("counters.csv");
        const auto net = network_.totals();
        const auto srv = server_.counters();
        edgenode::EdgeCounters edge_total;
        for (const auto& [id, dev] : devices_) {
            const auto& c = dev->edge->counters();
            edge_total.journal_failures += c.journal_failures;
            edge_total.transmissions += c.transmissions;
            edge_total.retransmissions += c.retransmissions;
            edge_total.acks += c.acks;
            edge_total.stale_statuses += c.stale_statuses;
            edge_total.deferred += c.deferred;
        }
        out << "counter,value\n"
            << "scan_attempts," << counters_.scan_attempts << '\n'
            << "scans_accepted," << counters_.scans_accepted << '\n'
            << "out_of_range," << counters_.out_of_range << '\n'
            << "cooldown," << counters_.cooldown << '\n'
            << "read_errors," << counters_.read_errors << '\n'
            << "journal_failures," << edge_total.journal_failures << '\n'
            << "transmissions," << edge_total.transmissions << '\n'
            << "retransmissions," << edge_total.retransmissions << '\n'
            << "acks," << edge_total.acks << '\n'
            << "stale_statuses," << edge_total.stale_statuses << '\n'
            << "deferred," << edge_total.deferred << '\n'
            << "net_sent," << net.sent << '\n'
            << "net_dropped," << net.dropped << '\n'
            << "net_duplicated," << net.duplicated << '\n'
            << "net_delivered," << net.delivered << '\n'
            << "ingested," << srv.ingested << '\n'
            << "duplicates," << srv.duplicates << '\n'
            << "parse_errors," << srv.parse_errors << '\n'
            << "granted," << srv.granted << '\n'
            << "denied," << srv.denied << '\n'
            << "end_time," << format_seconds(end_time()) << '\n';
    }
    {
        auto out = open("latency.csv");
        out << "node,seq,card,scanned_at,received_at,latency_s\n";
        for (const auto& r : latencies()) {
            out << to_int(r.node) << ',' << r.seq << ',' << r.card << ',' << format_seconds(r.scanned_at) << ','
                << format_seconds(r.received_at) << ',' << format_seconds(r.received_at - r.scanned_at) << '\n';
        }
    }
}

} // namespace attnet::sim
