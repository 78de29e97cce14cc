#include "attnet/radiosim.hpp"

#include "attnet/error.hpp"

#include <cmath>
#include <ostream>

namespace attnet::radiosim {

void LinkParams::validate() const {
    if (!(distance_m > 0.0)) {
        throw RangeError("link: distance_m must be > 0");
    }
    if (freq_mhz != 2400.0 && freq_mhz != 900.0 && freq_mhz != 868.0) {
        throw RangeError("link: freq_mhz must be 2400, 900 or 868");
    }
    if (!(drop_prob >= 0.0 && drop_prob <= 1.0) || !(dup_prob >= 0.0 && dup_prob <= 1.0)) {
        throw RangeError("link: probabilities must lie in [0, 1]");
    }
    if (!(latency_s >= 0.0)) {
        throw RangeError("link: latency_s must be >= 0");
    }
}

double fspl_db(double distance_m, double freq_mhz) {
    return 32.44 + 20.0 * std::log10(distance_m / 1000.0) + 20.0 * std::log10(freq_mhz);
}

double rssi_dbm(const LinkParams& link) { return link.tx_power_dbm - fspl_db(link.distance_m, link.freq_mhz); }

bool deliverable(const LinkParams& link) { return rssi_dbm(link) >= link.sensitivity_dbm; }

double feasibility_radius_m(double tx_power_dbm, double freq_mhz, double sensitivity_dbm) {
    const double budget_db = tx_power_dbm - sensitivity_dbm - 32.44 - 20.0 * std::log10(freq_mhz);
    return 1000.0 * std::pow(10.0, budget_db / 20.0);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1000.0); }

const char* to_string(Disposition d) {
    switch (d) {
    case Disposition::Sent:
        return "sent";
    case Disposition::Dropped:
        return "dropped";
    case Disposition::Unreachable:
        return "unreachable";
    case Disposition::Duplicated:
        return "duplicated";
    case Disposition::Delivered:
        return "delivered";
    }
    return "?";
}

Network::Network() = default;

void Network::add_node(NodeId id, Receiver on_receive) {
    if (!nodes_.emplace(id, std::move(on_receive)).second) {
        throw TopologyError("node " + std::to_string(to_int(id)) + " already registered");
    }
}

void Network::set_link(NodeId router, const LinkParams& params) {
    if (router == kCoordinator) {
        throw TopologyError("the coordinator has no link of its own");
    }
    if (!nodes_.contains(router)) {
        throw TopologyError("unknown node " + std::to_string(to_int(router)));
    }
    params.validate();
    links_[router] = params;
}

const LinkParams& Network::link(NodeId router) const {
    auto it = links_.find(router);
    if (it == links_.end()) {
        throw TopologyError("no link configured for node " + std::to_string(to_int(router)));
    }
    return it->second;
}

NodeId Network::router_of(NodeId src, NodeId dst) const {
    for (NodeId n : {src, dst}) {
        if (!nodes_.contains(n)) {
            throw TopologyError("unknown node " + std::to_string(to_int(n)));
        }
    }
    if (src == dst) {
        throw TopologyError("source and destination are the same node");
    }
    if (src != kCoordinator && dst != kCoordinator) {
        throw TopologyError("router-to-router links are not supported in a star topology");
    }
    return src == kCoordinator ? dst : src;
}

void Network::push(VirtualTime at, std::variant<NetEvent, Timer> what) {
    queue_.push(Entry{at, next_order_++, std::move(what)});
}

void Network::record(VirtualTime t, const NetEvent& ev, Disposition d) {
    trace_.push_back(TraceEntry{t, ev.src, ev.dst, ev.raw, d});
}

std::vector<NetEvent> Network::send(NodeId src, NodeId dst, frames::Bytes raw, VirtualTime now, Rng& rng) {
    if (now < now_) {
        throw RangeError("send: time earlier than the network clock");
    }
    const NodeId router = router_of(src, dst);
    const LinkParams& params = link(router);
    LinkCounters& count = counters_[router];

    NetEvent ev{now + from_seconds(params.latency_s), src, dst, std::move(raw)};
    ++count.sent;
    record(now, ev, Disposition::Sent);

    if (!deliverable(params)) {
        ++count.dropped;
        record(now, ev, Disposition::Unreachable);
        return {};
    }
    if (rng.chance(params.drop_prob)) {
        ++count.dropped;
        record(now, ev, Disposition::Dropped);
        return {};
    }
    std::vector<NetEvent> out{ev};
    if (rng.chance(params.dup_prob)) {
        ++count.duplicated;
        record(now, ev, Disposition::Duplicated);
        NetEvent copy = ev;
        copy.deliver_at += kTick;
        out.push_back(std::move(copy));
    }
    for (const auto& e : out) {
        push(e.deliver_at, e);
    }
    return out;
}

void Network::schedule(VirtualTime at, Timer timer) {
    if (at < now_) {
        throw RangeError("schedule: time earlier than the network clock");
    }
    push(at, std::move(timer));
}

std::vector<NetEvent> Network::advance(VirtualTime until) {
    if (until < now_) {
        throw RangeError("advance: time earlier than the network clock");
    }
    std::vector<NetEvent> delivered;
    while (!queue_.empty() && queue_.top().at <= until) {
        Entry e = queue_.top();
        queue_.pop();
        now_ = e.at;
        if (auto* ev = std::get_if<NetEvent>(&e.what)) {
            ++counters_[router_of(ev->src, ev->dst)].delivered;
            record(now_, *ev, Disposition::Delivered);
            delivered.push_back(*ev);
            nodes_.at(ev->dst)(*ev);
        } else {
            std::get<Timer>(e.what)();
        }
    }
    now_ = until;
    return delivered;
}

std::optional<VirtualTime> Network::next_due() const {
    if (queue_.empty()) {
        return std::nullopt;
    }
    return queue_.top().at;
}

LinkCounters Network::totals() const {
    LinkCounters t;
    for (const auto& [id, c] : counters_) {
        t.sent += c.sent;
        t.dropped += c.dropped;
        t.duplicated += c.duplicated;
        t.delivered += c.delivered;
    }
    return t;
}

void Network::write_trace_csv(std::ostream& os) const {
    os << "time,src,dst,bytes_hex,disposition\n";
    for (const auto& t : trace_) {
        os << format_seconds(t.time) << ',' << to_int(t.src) << ',' << to_int(t.dst) << ','
           << frames::to_hex(t.raw) << ',' << to_string(t.disposition) << '\n';
    }
}

} // namespace attnet::radiosim
