#include "attnet/tagcard.hpp"

#include "attnet/error.hpp"

namespace attnet::tagcard {

void ReaderConfig::validate() const {
    if (!(max_range_cm > 0.0)) {
        throw RangeError("reader: max_range_cm must be > 0");
    }
    if (!(cooldown_s >= 0.0)) {
        throw RangeError("reader: cooldown_s must be >= 0");
    }
    if (!(misread_prob >= 0.0 && misread_prob <= 1.0)) {
        throw RangeError("reader: misread_prob must lie in [0, 1]");
    }
}

const char* to_string(ScanFailure f) {
    switch (f) {
    case ScanFailure::OutOfRange:
        return "out of range";
    case ScanFailure::Cooldown:
        return "cooldown";
    case ScanFailure::ReadError:
        return "read error";
    }
    return "?";
}

Reader::Reader(ReaderConfig config, std::uint32_t first_seq) : config_(config), next_seq_(first_seq) {
    config_.validate();
}

ScanOutcome Reader::scan(const NfcTag& tag, double distance_cm, VirtualTime now, const rtc::Datetime& timestamp,
                         Rng& rng) {
    if (distance_cm > config_.max_range_cm) {
        return ScanFailure::OutOfRange;
    }
    if (last_scan_ && now - *last_scan_ < from_seconds(config_.cooldown_s)) {
        return ScanFailure::Cooldown;
    }
    if (config_.misread_prob > 0.0 && rng.chance(config_.misread_prob)) {
        return ScanFailure::ReadError;
    }
    last_scan_ = now;
    return ScanRecord{next_seq_, card_number(tag.uid), timestamp, false};
}

void Reader::commit(const ScanRecord& record) {
    if (record.seq != next_seq_) {
        throw RangeError("reader: commit out of sequence");
    }
    ++next_seq_;
}

} // namespace attnet::tagcard
