#pragma once

// Line-oriented scenario files. '#' starts a comment; tokens are separated by
// whitespace and may be double-quoted.
//
//   SEED <n>
//   HORIZON <seconds>                     stop time (default: last action + 600 s)
//   RETRY <seconds> <batch>               edge retransmission timeout and batch size
//   NODE <id> [key=value ...]             link and reader parameters
//   STAFF <card> "<name>" "<job>" [<Y/M/D> <H:M:S>]
//   RTC <t> <node> <Y/M/D> <H:M:S>        set a node's clock at virtual time t
//   LINK <t> <node> key=value ...         change link parameters at t
//   EVENT <t> <node> <uid hex> <distance_cm>
//
// NODE / LINK keys: distance_m tx_power_dbm freq_mhz drop dup latency_s
// sensitivity_dbm; NODE also takes range_cm cooldown_s misread.
// EVENT lines must be in non-decreasing time order.

#include "attnet/common.hpp"
#include "attnet/edgenode.hpp"
#include "attnet/radiosim.hpp"
#include "attnet/rtc.hpp"
#include "attnet/tagcard.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace attnet::scenario {

struct NodeSpec {
    NodeId id{};
    radiosim::LinkParams link;
    tagcard::ReaderConfig reader;
};

struct StaffSeed {
    std::uint32_t card = 0;
    std::string name;
    std::string job;
    rtc::Datetime enrolled_at;
};

struct ScanAttempt {
    VirtualTime t{};
    NodeId node{};
    tagcard::Uid uid{};
    double distance_cm = 0.0;
};

struct LinkChange {
    VirtualTime t{};
    NodeId node{};
    radiosim::LinkParams params;
};

struct ClockSet {
    VirtualTime t{};
    NodeId node{};
    rtc::Datetime datetime;
};

struct Scenario {
    std::uint64_t seed = 1;
    std::optional<VirtualTime> horizon;
    edgenode::EdgeConfig edge;
    std::vector<NodeSpec> nodes;
    std::vector<StaffSeed> staff;
    std::vector<ScanAttempt> events;
    std::vector<LinkChange> link_changes;
    std::vector<ClockSet> clock_sets;

    const NodeSpec* node(NodeId id) const;
};

/// Throws ScenarioError carrying the 1-based line number.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace attnet::scenario
