#include "attnet/edgenode.hpp"

#include "attnet/error.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace attnet::edgenode {

namespace {

constexpr std::array<std::uint8_t, 6> kAddressPrefix{0x00, 0x13, 0xA2, 0x00, 0x00, 0x00};
constexpr std::string_view kPayloadPrefix = "ID FOUND -> ";

std::optional<std::uint32_t> parse_u32(std::string_view s) {
    if (s.empty() || (s.size() > 1 && s.front() == '0')) {
        return std::nullopt;
    }
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

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

} // namespace

frames::Address64 address_of(NodeId node) {
    frames::Address64 a{};
    std::copy(kAddressPrefix.begin(), kAddressPrefix.end(), a.begin());
    a[6] = static_cast<std::uint8_t>(to_int(node) >> 8);
    a[7] = static_cast<std::uint8_t>(to_int(node) & 0xFF);
    return a;
}

std::optional<NodeId> node_of(const frames::Address64& address) {
    if (!std::equal(kAddressPrefix.begin(), kAddressPrefix.end(), address.begin())) {
        return std::nullopt;
    }
    return NodeId{static_cast<std::uint16_t>((address[6] << 8) | address[7])};
}

FileSink::FileSink(const std::filesystem::path& path, bool truncate)
    : path_(path), out_(path, std::ios::binary | (truncate ? std::ios::trunc : std::ios::app)) {
    if (!out_) {
        throw JournalWriteError("cannot open journal " + path.string());
    }
}

void FileSink::append(std::string_view line) {
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.put('\n');
    out_.flush();
    if (!out_) {
        throw JournalWriteError("write to " + path_.string() + " failed");
    }
}

void MemorySink::append(std::string_view line) {
    contents_.append(line);
    contents_.push_back('\n');
}

std::string journal_line(const ScanRecord& record) {
    return "J|" + std::to_string(record.seq) + '|' + std::to_string(record.card) + '|' +
           rtc::render_timestamp(record.datetime);
}

std::string ack_line(std::uint32_t seq) { return "A|" + std::to_string(seq); }

Journal::Journal(std::unique_ptr<LineSink> sink) : sink_(std::move(sink)) {}

Journal::Journal(std::vector<ScanRecord> records, std::unique_ptr<LineSink> sink)
    : records_(std::move(records)), sink_(std::move(sink)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        index_[records_[i].seq] = i;
    }
}

void Journal::append(const ScanRecord& record) {
    if (index_.contains(record.seq)) {
        throw JournalWriteError("journal already holds seq " + std::to_string(record.seq));
    }
    sink_->append(journal_line(record));
    index_[record.seq] = records_.size();
    records_.push_back(record);
    records_.back().acked = false;
}

bool Journal::mark_acked(std::uint32_t seq) {
    auto it = index_.find(seq);
    if (it == index_.end() || records_[it->second].acked) {
        return false;
    }
    sink_->append(ack_line(seq));
    records_[it->second].acked = true;
    return true;
}

const ScanRecord* Journal::find(std::uint32_t seq) const {
    auto it = index_.find(seq);
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::size_t Journal::unacked_count() const {
    return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [](const auto& r) { return !r.acked; }));
}

ReplayResult replay_journal(std::string_view text) {
    ReplayResult result;
    std::map<std::uint32_t, std::size_t> index;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            result.discarded_partial = 1;
            break;
        }
        ++line_no;
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;

        const auto fields = split(line, '|');
        if (fields.size() == 4 && fields[0] == "J") {
            const auto seq = parse_u32(fields[1]);
            const auto card = parse_u32(fields[2]);
            if (!seq || !card) {
                throw ReplayError("bad journal record", line_no);
            }
            rtc::Datetime dt;
            try {
                dt = rtc::parse_timestamp(fields[3]);
            } catch (const ParseError&) {
                throw ReplayError("bad timestamp in journal record", line_no);
            }
            if (!index.emplace(*seq, result.records.size()).second) {
                throw ReplayError("duplicate seq " + std::to_string(*seq), line_no);
            }
            result.records.push_back(ScanRecord{*seq, *card, dt, false});
        } else if (fields.size() == 2 && fields[0] == "A") {
            const auto seq = parse_u32(fields[1]);
            if (!seq || !index.contains(*seq)) {
                throw ReplayError("ack for unknown seq", line_no);
            }
            result.records[index[*seq]].acked = true;
        } else {
            throw ReplayError("unrecognised journal line", line_no);
        }
    }
    return result;
}

ReplayResult journal_replay(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        if (!std::filesystem::exists(file)) {
            return {};
        }
        throw ReplayError("cannot read " + file.string(), 0);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return replay_journal(ss.str());
}

std::string payload_text(const ScanRecord& record) {
    return std::string(kPayloadPrefix) + std::to_string(record.card) + ' ' + rtc::render_timestamp(record.datetime);
}

frames::Bytes wire_payload(const ScanRecord& record) {
    frames::Bytes out{static_cast<std::uint8_t>(record.seq >> 24), static_cast<std::uint8_t>(record.seq >> 16),
                      static_cast<std::uint8_t>(record.seq >> 8), static_cast<std::uint8_t>(record.seq)};
    const std::string text = payload_text(record);
    out.insert(out.end(), text.begin(), text.end());
    return out;
}

ScanRecord parse_payload(std::span<const std::uint8_t> payload) {
    if (payload.size() < 4 + kPayloadPrefix.size()) {
        throw ParseError("payload too short");
    }
    ScanRecord r;
    r.seq = (std::uint32_t{payload[0]} << 24) | (std::uint32_t{payload[1]} << 16) | (std::uint32_t{payload[2]} << 8) |
            std::uint32_t{payload[3]};
    const std::string text(payload.begin() + 4, payload.end());
    if (!text.starts_with(kPayloadPrefix)) {
        throw ParseError("payload lacks 'ID FOUND -> ' prefix");
    }
    const std::string_view rest = std::string_view(text).substr(kPayloadPrefix.size());
    const auto space = rest.find(' ');
    if (space == std::string_view::npos) {
        throw ParseError("payload lacks timestamp");
    }
    const auto card = parse_u32(rest.substr(0, space));
    if (!card) {
        throw ParseError("bad card number in payload");
    }
    r.card = *card;
    r.datetime = rtc::parse_timestamp(rest.substr(space + 1));
    return r;
}

EdgeNode::EdgeNode(NodeId id, Journal journal, SerialOut serial, EdgeConfig config)
    : id_(id), journal_(std::move(journal)), serial_(std::move(serial)), config_(config) {
    for (const auto& r : journal_.records()) {
        if (!r.acked) {
            pending_.emplace(r.seq, Pending{});
        }
    }
}

bool EdgeNode::on_scan(const ScanRecord& record, VirtualTime now) {
    try {
        journal_.append(record);
    } catch (const JournalWriteError&) {
        ++counters_.journal_failures;
        return false;
    }
    auto& pending = pending_[record.seq];
    transmit(record.seq, pending, now);
    return true;
}

std::uint8_t EdgeNode::allocate_frame_id() {
    for (int tries = 0; tries < 255; ++tries) {
        const std::uint8_t id = next_frame_id_;
        next_frame_id_ = next_frame_id_ == 255 ? 1 : next_frame_id_ + 1;
        if (!in_flight_.contains(id)) {
            return id;
        }
    }
    return 0;
}

bool EdgeNode::transmit(std::uint32_t seq, Pending& pending, VirtualTime now) {
    pending.last_attempt = now;
    if (pending.frame_id == 0) {
        pending.frame_id = allocate_frame_id();
        if (pending.frame_id == 0) {
            ++counters_.deferred;
            return false;
        }
        in_flight_[pending.frame_id] = seq;
    }
    frames::TxRequest req;
    req.frame_id = pending.frame_id;
    req.dest64 = address_of(kCoordinator);
    req.payload = wire_payload(*journal_.find(seq));
    serial_(frames::encode(req));
    ++counters_.transmissions;
    return true;
}

void EdgeNode::on_frame(const frames::ApiFrame& frame, VirtualTime /*now*/) {
    const auto* status = std::get_if<frames::TxStatus>(&frame);
    if (status == nullptr || status->delivery_status != 0) {
        return;
    }
    auto it = in_flight_.find(status->frame_id);
    if (it == in_flight_.end()) {
        ++counters_.stale_statuses;
        return;
    }
    const std::uint32_t seq = it->second;
    try {
        journal_.mark_acked(seq);
    } catch (const JournalWriteError&) {
        // Stays pending; the next retransmission earns another status.
        ++counters_.journal_failures;
        return;
    }
    in_flight_.erase(it);
    pending_.erase(seq);
    ++counters_.acks;
}

std::size_t EdgeNode::retransmit_pending(VirtualTime now) {
    std::size_t sent = 0;
    for (auto& [seq, pending] : pending_) {
        if (sent == config_.batch_limit) {
            break;
        }
        if (pending.last_attempt && now - *pending.last_attempt < config_.retry_timeout) {
            continue;
        }
        if (transmit(seq, pending, now)) {
            ++sent;
            ++counters_.retransmissions;
        }
    }
    return sent;
}

std::optional<VirtualTime> EdgeNode::next_retry_due() const {
    std::optional<VirtualTime> due;
    for (const auto& [seq, pending] : pending_) {
        const VirtualTime t = pending.last_attempt ? *pending.last_attempt + config_.retry_timeout : VirtualTime{0};
        if (!due || t < *due) {
            due = t;
        }
    }
    return due;
}

} // namespace attnet::edgenode
