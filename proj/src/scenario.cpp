#include "attnet/scenario.hpp"

#include "attnet/error.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace attnet::scenario {

namespace {

std::vector<std::string> tokenize(const std::string& line, std::size_t line_no) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') {
            break;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        std::string tok;
        if (c == '"') {
            const auto close = line.find('"', i + 1);
            if (close == std::string::npos) {
                throw ScenarioError("unterminated quote", line_no);
            }
            tok = line.substr(i + 1, close - i - 1);
            i = close + 1;
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#') {
                tok.push_back(line[i++]);
            }
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

class LineParser {
public:
    explicit LineParser(std::size_t line_no) : line_no_(line_no) {}

    [[noreturn]] void fail(const std::string& what) const { throw ScenarioError(what, line_no_); }

    template <class T>
    T integer(const std::string& tok, const char* what) const {
        T v{};
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size()) {
            fail(std::string("bad ") + what + " '" + tok + "'");
        }
        return v;
    }

    double real(const std::string& tok, const char* what) const {
        double v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size()) {
            fail(std::string("bad ") + what + " '" + tok + "'");
        }
        return v;
    }

    VirtualTime time(const std::string& tok) const {
        try {
            return parse_seconds(tok);
        } catch (const ParseError& e) {
            fail(e.what());
        }
    }

    rtc::Datetime datetime(const std::string& date, const std::string& time) const {
        try {
            return rtc::parse_timestamp(date + ' ' + time);
        } catch (const ParseError& e) {
            fail(e.what());
        }
    }

    tagcard::Uid uid(const std::string& tok) const {
        if (tok.size() != 8) {
            fail("uid must be 8 hex digits");
        }
        tagcard::Uid u{};
        for (std::size_t i = 0; i < 4; ++i) {
            auto [p, ec] = std::from_chars(tok.data() + 2 * i, tok.data() + 2 * i + 2, u[i], 16);
            if (ec != std::errc{} || p != tok.data() + 2 * i + 2) {
                fail("uid must be 8 hex digits");
            }
        }
        return u;
    }

    // Applies key=value tokens on top of the current values.
    void apply(radiosim::LinkParams& link, tagcard::ReaderConfig* reader,
               const std::vector<std::string>& tokens, std::size_t first) const {
        for (std::size_t i = first; i < tokens.size(); ++i) {
            const auto& tok = tokens[i];
            const auto eq = tok.find('=');
            if (eq == std::string::npos) {
                fail("expected key=value, got '" + tok + "'");
            }
            const std::string key = tok.substr(0, eq);
            const double v = real(tok.substr(eq + 1), key.c_str());
            if (key == "distance_m") {
                link.distance_m = v;
            } else if (key == "tx_power_dbm") {
                link.tx_power_dbm = v;
            } else if (key == "freq_mhz") {
                link.freq_mhz = v;
            } else if (key == "drop") {
                link.drop_prob = v;
            } else if (key == "dup") {
                link.dup_prob = v;
            } else if (key == "latency_s") {
                link.latency_s = v;
            } else if (key == "sensitivity_dbm") {
                link.sensitivity_dbm = v;
            } else if (reader != nullptr && key == "range_cm") {
                reader->max_range_cm = v;
            } else if (reader != nullptr && key == "cooldown_s") {
                reader->cooldown_s = v;
            } else if (reader != nullptr && key == "misread") {
                reader->misread_prob = v;
            } else {
                fail("unknown key '" + key + "'");
            }
        }
        try {
            link.validate();
            if (reader != nullptr) {
                reader->validate();
            }
        } catch (const RangeError& e) {
            fail(e.what());
        }
    }

private:
    std::size_t line_no_;
};

} // namespace

const NodeSpec* Scenario::node(NodeId id) const {
    for (const auto& n : nodes) {
        if (n.id == id) {
            return &n;
        }
    }
    return nullptr;
}

Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    std::map<NodeId, radiosim::LinkParams> current_link;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = tokenize(line, line_no);
        if (tok.empty()) {
            continue;
        }
        const LineParser p(line_no);
        const auto& kw = tok[0];
        const auto want = [&](std::size_t n) {
            if (tok.size() != n) {
                p.fail(kw + " expects " + std::to_string(n - 1) + " arguments");
            }
        };
        const auto known_node = [&](const std::string& t) {
            const NodeId id{p.integer<std::uint16_t>(t, "node id")};
            if (!current_link.contains(id)) {
                p.fail("node " + t + " used before its NODE line");
            }
            return id;
        };

        if (kw == "SEED") {
            want(2);
            sc.seed = p.integer<std::uint64_t>(tok[1], "seed");
        } else if (kw == "HORIZON") {
            want(2);
            sc.horizon = p.time(tok[1]);
        } else if (kw == "RETRY") {
            want(3);
            sc.edge.retry_timeout = p.time(tok[1]);
            sc.edge.batch_limit = p.integer<std::size_t>(tok[2], "batch size");
            if (sc.edge.batch_limit == 0 || sc.edge.retry_timeout <= VirtualTime{0}) {
                p.fail("RETRY needs a positive timeout and batch size");
            }
        } else if (kw == "NODE") {
            if (tok.size() < 2) {
                p.fail("NODE expects an id");
            }
            NodeSpec spec;
            spec.id = NodeId{p.integer<std::uint16_t>(tok[1], "node id")};
            if (spec.id == kCoordinator) {
                p.fail("node 0 is the coordinator");
            }
            if (current_link.contains(spec.id)) {
                p.fail("node " + tok[1] + " declared twice");
            }
            p.apply(spec.link, &spec.reader, tok, 2);
            current_link[spec.id] = spec.link;
            sc.nodes.push_back(spec);
        } else if (kw == "STAFF") {
            if (tok.size() != 4 && tok.size() != 6) {
                p.fail("STAFF expects <card> <name> <job> [<date> <time>]");
            }
            StaffSeed s;
            s.card = p.integer<std::uint32_t>(tok[1], "card number");
            s.name = tok[2];
            s.job = tok[3];
            if (tok.size() == 6) {
                s.enrolled_at = p.datetime(tok[4], tok[5]);
            }
            sc.staff.push_back(std::move(s));
        } else if (kw == "RTC") {
            want(5);
            sc.clock_sets.push_back(ClockSet{p.time(tok[1]), known_node(tok[2]), p.datetime(tok[3], tok[4])});
        } else if (kw == "LINK") {
            if (tok.size() < 4) {
                p.fail("LINK expects <t> <node> key=value ...");
            }
            LinkChange ch{p.time(tok[1]), known_node(tok[2]), {}};
            ch.params = current_link[ch.node];
            p.apply(ch.params, nullptr, tok, 3);
            current_link[ch.node] = ch.params;
            sc.link_changes.push_back(ch);
        } else if (kw == "EVENT") {
            want(5);
            ScanAttempt ev{p.time(tok[1]), known_node(tok[2]), p.uid(tok[3]), p.real(tok[4], "distance")};
            if (!sc.events.empty() && ev.t < sc.events.back().t) {
                p.fail("EVENT lines must be sorted by time");
            }
            sc.events.push_back(ev);
        } else {
            p.fail("unknown directive '" + kw + "'");
        }
    }
    return sc;
}

Scenario parse_scenario(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open scenario " + path.string(), 0);
    }
    return parse_scenario(in);
}

} // namespace attnet::scenario
