#include "attnet/frames.hpp"

#include "attnet/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace attnet::frames {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void put16(Bytes& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_payload(Bytes& out, const Bytes& payload) {
    if (payload.size() > kMaxPayload) {
        throw EncodeError("payload of " + std::to_string(payload.size()) + " bytes exceeds " +
                          std::to_string(kMaxPayload));
    }
    out.insert(out.end(), payload.begin(), payload.end());
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

Address64 get64(std::span<const std::uint8_t> b, std::size_t at) {
    Address64 a{};
    std::copy_n(b.begin() + static_cast<std::ptrdiff_t>(at), 8, a.begin());
    return a;
}

Bytes tail(std::span<const std::uint8_t> b, std::size_t at) { return {b.begin() + static_cast<std::ptrdiff_t>(at), b.end()}; }

// Interprets validated api_data. Returns nullopt for layout errors.
std::optional<ApiFrame> parse_api_data(std::span<const std::uint8_t> d, SkipReason& why) {
    switch (d[0]) {
    case kTxRequestType: {
        if (d.size() < 14 || d.size() - 14 > kMaxPayload) {
            break;
        }
        TxRequest f;
        f.frame_id = d[1];
        f.dest64 = get64(d, 2);
        f.dest16 = get16(d, 10);
        f.radius = d[12];
        f.options = d[13];
        f.payload = tail(d, 14);
        return f;
    }
    case kRxIndicatorType: {
        if (d.size() < 12 || d.size() - 12 > kMaxPayload) {
            break;
        }
        RxIndicator f;
        f.src64 = get64(d, 1);
        f.src16 = get16(d, 9);
        f.options = d[11];
        f.payload = tail(d, 12);
        return f;
    }
    case kTxStatusType: {
        if (d.size() != 6) {
            break;
        }
        return TxStatus{d[1], get16(d, 2), d[4], d[5]};
    }
    default:
        why = SkipReason::UnknownType;
        return std::nullopt;
    }
    why = SkipReason::Malformed;
    return std::nullopt;
}

Bytes api_data(const ApiFrame& frame) {
    Bytes d;
    std::visit(Overloaded{
                   [&](const TxRequest& f) {
                       d.push_back(kTxRequestType);
                       d.push_back(f.frame_id);
                       d.insert(d.end(), f.dest64.begin(), f.dest64.end());
                       put16(d, f.dest16);
                       d.push_back(f.radius);
                       d.push_back(f.options);
                       put_payload(d, f.payload);
                   },
                   [&](const RxIndicator& f) {
                       d.push_back(kRxIndicatorType);
                       d.insert(d.end(), f.src64.begin(), f.src64.end());
                       put16(d, f.src16);
                       d.push_back(f.options);
                       put_payload(d, f.payload);
                   },
                   [&](const TxStatus& f) {
                       d.push_back(kTxStatusType);
                       d.push_back(f.frame_id);
                       put16(d, f.dest16);
                       d.push_back(f.retry_count);
                       d.push_back(f.delivery_status);
                   },
               },
               frame);
    return d;
}

} // namespace

std::uint8_t checksum(std::span<const std::uint8_t> api_data) {
    unsigned sum = 0;
    for (auto b : api_data) {
        sum += b;
    }
    return static_cast<std::uint8_t>(0xFF - (sum & 0xFF));
}

Bytes encode(const ApiFrame& frame) {
    const Bytes d = api_data(frame);
    Bytes out;
    out.reserve(d.size() + 4);
    out.push_back(kStartDelimiter);
    put16(out, static_cast<std::uint16_t>(d.size()));
    out.insert(out.end(), d.begin(), d.end());
    out.push_back(checksum(d));
    return out;
}

const char* to_string(SkipReason reason) {
    switch (reason) {
    case SkipReason::Garbage:
        return "garbage";
    case SkipReason::BadLength:
        return "bad length";
    case SkipReason::ChecksumMismatch:
        return "checksum mismatch";
    case SkipReason::UnknownType:
        return "unknown frame type";
    case SkipReason::Malformed:
        return "malformed frame";
    }
    return "?";
}

namespace {

// A rejected frame resumes at the next start delimiter after its own.
std::size_t resync(std::span<const std::uint8_t> bytes, std::size_t cursor) {
    const auto it = std::find(bytes.begin() + static_cast<std::ptrdiff_t>(cursor) + 1, bytes.end(), kStartDelimiter);
    return static_cast<std::size_t>(it - bytes.begin());
}

} // namespace

DecodeStep decode_stream(std::span<const std::uint8_t> bytes, std::size_t cursor) {
    if (cursor >= bytes.size()) {
        return {NeedMoreData{}, bytes.size()};
    }
    if (bytes[cursor] != kStartDelimiter) {
        const auto it = std::find(bytes.begin() + static_cast<std::ptrdiff_t>(cursor), bytes.end(), kStartDelimiter);
        return {Skip{SkipReason::Garbage}, static_cast<std::size_t>(it - bytes.begin())};
    }
    if (bytes.size() - cursor < 3) {
        return {NeedMoreData{}, cursor};
    }
    const std::size_t length = get16(bytes, cursor + 1);
    if (length == 0 || length > kMaxApiData) {
        return {Skip{SkipReason::BadLength}, resync(bytes, cursor)};
    }
    if (bytes.size() - cursor < length + 4) {
        return {NeedMoreData{}, cursor};
    }
    const auto data = bytes.subspan(cursor + 3, length);
    if (checksum(data) != bytes[cursor + 3 + length]) {
        return {Skip{SkipReason::ChecksumMismatch}, resync(bytes, cursor)};
    }
    SkipReason why = SkipReason::Malformed;
    if (auto frame = parse_api_data(data, why)) {
        return {std::move(*frame), cursor + length + 4};
    }
    return {Skip{why}, resync(bytes, cursor)};
}

void StreamDecoder::feed(std::span<const std::uint8_t> bytes) {
    if (cursor_ > 0 && cursor_ == buffer_.size()) {
        buffer_.clear();
        cursor_ = 0;
    }
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

DecodeResult StreamDecoder::next() {
    auto step = decode_stream(buffer_, cursor_);
    cursor_ = step.cursor;
    if (std::holds_alternative<Skip>(step.result)) {
        ++skipped_;
    }
    if (cursor_ > 4096 && cursor_ * 2 > buffer_.size()) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(cursor_));
        cursor_ = 0;
    }
    return std::move(step.result);
}

std::vector<ApiFrame> StreamDecoder::drain() {
    std::vector<ApiFrame> frames;
    for (;;) {
        auto r = next();
        if (std::holds_alternative<NeedMoreData>(r)) {
            return frames;
        }
        if (auto* f = std::get_if<ApiFrame>(&r)) {
            frames.push_back(std::move(*f));
        }
    }
}

std::string to_hex(std::span<const std::uint8_t> bytes, bool spaced) {
    static constexpr char kDigits[] = "0123456789ABCDEF";
    std::string s;
    s.reserve(bytes.size() * 3);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (spaced && i > 0) {
            s.push_back(' ');
        }
        s.push_back(kDigits[bytes[i] >> 4]);
        s.push_back(kDigits[bytes[i] & 0x0F]);
    }
    return s;
}

Bytes from_hex(const std::string& text) {
    std::string digits;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            continue;
        }
        if (!std::isxdigit(static_cast<unsigned char>(c))) {
            throw ParseError(std::string("invalid hex character '") + c + "'");
        }
        digits.push_back(c);
    }
    if (digits.size() % 2 != 0) {
        throw ParseError("odd number of hex digits");
    }
    Bytes out(digits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::from_chars(digits.data() + 2 * i, digits.data() + 2 * i + 2, out[i], 16);
    }
    return out;
}

std::string describe(const ApiFrame& frame) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const TxRequest& f) {
                       os << "TxRequest frame_id=" << int(f.frame_id) << " dest64=" << to_hex(f.dest64)
                          << " dest16=" << to_hex(Bytes{std::uint8_t(f.dest16 >> 8), std::uint8_t(f.dest16)})
                          << " radius=" << int(f.radius) << " options=" << int(f.options)
                          << " payload=" << to_hex(f.payload);
                   },
                   [&](const RxIndicator& f) {
                       os << "RxIndicator src64=" << to_hex(f.src64)
                          << " src16=" << to_hex(Bytes{std::uint8_t(f.src16 >> 8), std::uint8_t(f.src16)})
                          << " options=" << int(f.options) << " payload=" << to_hex(f.payload);
                   },
                   [&](const TxStatus& f) {
                       os << "TxStatus frame_id=" << int(f.frame_id)
                          << " dest16=" << to_hex(Bytes{std::uint8_t(f.dest16 >> 8), std::uint8_t(f.dest16)})
                          << " retry=" << int(f.retry_count) << " status=" << int(f.delivery_status);
                   },
               },
               frame);
    return os.str();
}

ApiFrame parse_description(const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    std::map<std::string, std::string> fields;
    for (std::string tok; is >> tok;) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || !fields.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second) {
            throw ParseError("bad frame field '" + tok + "'");
        }
    }

    const auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = fields.find(key);
        if (it == fields.end()) {
            return std::nullopt;
        }
        auto v = it->second;
        fields.erase(it);
        return v;
    };
    const auto byte_field = [&](const std::string& key, std::uint8_t def) -> std::uint8_t {
        auto v = take(key);
        if (!v) {
            return def;
        }
        unsigned n = 0;
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), n);
        if (ec != std::errc{} || p != v->data() + v->size() || n > 0xFF) {
            throw ParseError("field " + key + " must be 0-255");
        }
        return static_cast<std::uint8_t>(n);
    };
    const auto addr16 = [&](const std::string& key) -> std::uint16_t {
        auto v = take(key);
        if (!v) {
            return kUnknownAddress16;
        }
        const Bytes b = from_hex(*v);
        if (b.size() != 2) {
            throw ParseError("field " + key + " must be 4 hex digits");
        }
        return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
    };
    const auto addr64 = [&](const std::string& key) -> Address64 {
        Address64 a{};
        if (auto v = take(key)) {
            const Bytes b = from_hex(*v);
            if (b.size() != 8) {
                throw ParseError("field " + key + " must be 16 hex digits");
            }
            std::copy(b.begin(), b.end(), a.begin());
        }
        return a;
    };
    const auto payload = [&]() -> Bytes {
        auto v = take("payload");
        return v ? from_hex(*v) : Bytes{};
    };

    ApiFrame frame;
    if (kind == "TxRequest") {
        TxRequest f;
        f.frame_id = byte_field("frame_id", 0);
        f.dest64 = addr64("dest64");
        f.dest16 = addr16("dest16");
        f.radius = byte_field("radius", 0);
        f.options = byte_field("options", 0);
        f.payload = payload();
        frame = std::move(f);
    } else if (kind == "RxIndicator") {
        RxIndicator f;
        f.src64 = addr64("src64");
        f.src16 = addr16("src16");
        f.options = byte_field("options", 0);
        f.payload = payload();
        frame = std::move(f);
    } else if (kind == "TxStatus") {
        TxStatus f;
        f.frame_id = byte_field("frame_id", 0);
        f.dest16 = addr16("dest16");
        f.retry_count = byte_field("retry", 0);
        f.delivery_status = byte_field("status", 0);
        frame = f;
    } else {
        throw ParseError("unknown frame kind '" + kind + "'");
    }
    if (!fields.empty()) {
        throw ParseError("unknown field '" + fields.begin()->first + "' for " + kind);
    }
    return frame;
}

} // namespace attnet::frames
