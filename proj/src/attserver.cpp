#include "attnet/attserver.hpp"

#include "attnet/edgenode.hpp"
#include "attnet/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

namespace attnet::attserver {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) {
            return parts;
        }
        start = pos + 1;
    }
}

template <class T>
std::optional<T> parse_uint(std::string_view s) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

void check_text(const std::string& value, const char* field) {
    if (value.find_first_of("|\n\r") != std::string::npos) {
        throw InvalidField(std::string(field) + " must not contain '|' or line breaks");
    }
}

bool scan_order(const AttendanceEvent& a, const AttendanceEvent& b) {
    return std::tie(a.datetime, a.node, a.seq) < std::tie(b.datetime, b.node, b.seq);
}

} // namespace

std::string serialize(const StoreData& store) {
    std::ostringstream os;
    for (const auto& [card, s] : store.staff) {
        os << "S|" << card << '|' << s.name << '|' << s.job_spec << '|' << rtc::render_timestamp(s.enrolled_at)
           << '\n';
    }
    for (const auto& e : store.events) {
        os << "E|" << to_int(e.node) << '|' << e.seq << '|' << e.card << '|' << rtc::render_timestamp(e.datetime)
           << '|' << (e.decision == Decision::Granted ? 'G' : 'D') << '|' << format_seconds(e.received_at) << '\n';
    }
    return os.str();
}

StoreData deserialize(std::string_view text) {
    StoreData store;
    std::set<std::pair<NodeId, std::uint32_t>> keys;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (line.empty()) {
            continue;
        }
        const auto f = split(line, '|');
        try {
            if (f[0] == "S" && f.size() == 5) {
                const auto card = parse_uint<std::uint32_t>(f[1]);
                if (!card || f[2].empty()) {
                    throw LoadError("bad staff row", line_no);
                }
                StaffRecord s{*card, std::string(f[2]), std::string(f[3]), rtc::parse_timestamp(f[4])};
                if (!store.staff.emplace(*card, std::move(s)).second) {
                    throw LoadError("duplicate staff card " + std::string(f[1]), line_no);
                }
            } else if (f[0] == "E" && f.size() == 7) {
                const auto node = parse_uint<std::uint16_t>(f[1]);
                const auto seq = parse_uint<std::uint32_t>(f[2]);
                const auto card = parse_uint<std::uint32_t>(f[3]);
                if (!node || !seq || !card || (f[5] != "G" && f[5] != "D")) {
                    throw LoadError("bad event row", line_no);
                }
                AttendanceEvent e{NodeId{*node},
                                  *seq,
                                  *card,
                                  rtc::parse_timestamp(f[4]),
                                  f[5] == "G" ? Decision::Granted : Decision::Denied,
                                  parse_seconds(f[6])};
                if (!keys.emplace(e.node, e.seq).second) {
                    throw LoadError("duplicate event key", line_no);
                }
                store.events.push_back(e);
            } else {
                throw LoadError("unrecognised store line", line_no);
            }
        } catch (const ParseError& err) {
            throw LoadError(err.what(), line_no);
        }
    }
    return store;
}

StoreData load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(path)) {
            return {};
        }
        throw LoadError("cannot read " + path.string(), 0);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

void persist(const StoreData& store, const std::filesystem::path& path) {
    const auto tmp = std::filesystem::path(path).concat(".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << serialize(store);
        out.flush();
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

const StaffRecord& enroll(StoreData& store, std::string name, std::string job_spec, std::uint32_t card_key,
                          const rtc::Datetime& now) {
    if (name.empty()) {
        throw InvalidField("name must not be empty");
    }
    check_text(name, "name");
    check_text(job_spec, "job specification");
    rtc::validate(now);
    auto [it, inserted] =
        store.staff.emplace(card_key, StaffRecord{card_key, std::move(name), std::move(job_spec), now});
    if (!inserted) {
        throw AlreadyEnrolled("card " + std::to_string(card_key) + " is already enrolled");
    }
    return it->second;
}

void revoke(StoreData& store, std::uint32_t card_key) {
    if (store.staff.erase(card_key) == 0) {
        throw NotEnrolled("card " + std::to_string(card_key) + " is not enrolled");
    }
}

std::vector<AttendanceEvent> counted_scans(const StoreData& store, std::uint32_t card, std::int64_t debounce_s,
                                           const std::optional<PresenceCutoff>& cutoff) {
    std::vector<AttendanceEvent> granted;
    for (const auto& e : store.events) {
        if (e.card != card || e.decision != Decision::Granted) {
            continue;
        }
        if (cutoff) {
            if (const auto* t = std::get_if<VirtualTime>(&*cutoff); t && e.received_at > *t) {
                continue;
            }
            if (const auto* dt = std::get_if<rtc::Datetime>(&*cutoff); dt && e.datetime > *dt) {
                continue;
            }
        }
        granted.push_back(e);
    }
    std::sort(granted.begin(), granted.end(), scan_order);

    std::vector<AttendanceEvent> counted;
    std::int64_t last = 0;
    for (const auto& e : granted) {
        const std::int64_t at = rtc::seconds_since_epoch(e.datetime);
        if (counted.empty() || at - last >= debounce_s) {
            counted.push_back(e);
            last = at;
        }
    }
    return counted;
}

std::set<std::uint32_t> present(const StoreData& store, const PresenceCutoff& at, std::int64_t debounce_s) {
    std::set<std::uint32_t> cards;
    for (const auto& [card, staff] : store.staff) {
        if (counted_scans(store, card, debounce_s, at).size() % 2 == 1) {
            cards.insert(card);
        }
    }
    return cards;
}

AttendanceServer::AttendanceServer(StoreData initial) : store_(std::move(initial)) {
    for (const auto& e : store_.events) {
        seen_.emplace(e.node, e.seq);
    }
}

StaffRecord AttendanceServer::enroll(std::string name, std::string job_spec, std::uint32_t card_key,
                                     const rtc::Datetime& now) {
    std::unique_lock lock(mutex_);
    return attserver::enroll(store_, std::move(name), std::move(job_spec), card_key, now);
}

void AttendanceServer::revoke(std::uint32_t card_key) {
    std::unique_lock lock(mutex_);
    attserver::revoke(store_, card_key);
}

IngestResult AttendanceServer::ingest(const frames::RxIndicator& frame, VirtualTime now) {
    std::unique_lock lock(mutex_);
    const auto node = edgenode::node_of(frame.src64);
    if (!node) {
        ++counters_.parse_errors;
        return PayloadError{"source address outside the node address block"};
    }
    tagcard::ScanRecord record;
    try {
        record = edgenode::parse_payload(frame.payload);
    } catch (const ParseError& e) {
        ++counters_.parse_errors;
        return PayloadError{e.what()};
    }
    if (!seen_.emplace(*node, record.seq).second) {
        ++counters_.duplicates;
        return Duplicate{};
    }
    const bool granted = store_.staff.contains(record.card);
    AttendanceEvent event{*node, record.seq, record.card, record.datetime,
                          granted ? Decision::Granted : Decision::Denied, now};
    store_.events.push_back(event);
    receiver_log_.emplace_back(frame.payload.begin() + 4, frame.payload.end());
    ++counters_.ingested;
    ++(granted ? counters_.granted : counters_.denied);
    return event;
}

StoreData AttendanceServer::snapshot() const {
    std::shared_lock lock(mutex_);
    return store_;
}

std::vector<std::string> AttendanceServer::receiver_log() const {
    std::shared_lock lock(mutex_);
    return receiver_log_;
}

ServerCounters AttendanceServer::counters() const {
    std::shared_lock lock(mutex_);
    return counters_;
}

} // namespace attnet::attserver
