#include "attnet/cli.hpp"

#include "attnet/attserver.hpp"
#include "attnet/edgenode.hpp"
#include "attnet/error.hpp"
#include "attnet/frames.hpp"
#include "attnet/reports.hpp"
#include "attnet/scenario.hpp"
#include "attnet/simulation.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

namespace attnet::cli {

namespace {

constexpr const char* kStoreEnv = "ATTNET_STORE";

// Thrown for bad arguments detected after CLI11 parsing.
struct UsageError : Error {
    using Error::Error;
};

std::uint32_t parse_card(const std::string& text) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || p != text.data() + text.size()) {
        throw UsageError("card must be a decimal number in 0-4294967295, got '" + text + "'");
    }
    return v;
}

std::string resolve_store(const std::string& flag) {
    if (!flag.empty()) {
        return flag;
    }
    if (const char* env = std::getenv(kStoreEnv); env != nullptr && *env != '\0') {
        return env;
    }
    throw UsageError(std::string("no store given; pass --store or set ") + kStoreEnv);
}

rtc::Datetime parse_datetime_arg(const std::string& text) {
    try {
        return rtc::parse_timestamp(text);
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
}

std::vector<int> parse_workers(const std::string& text) {
    std::vector<int> counts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        int n = -1;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
        if (item.empty() || ec != std::errc{} || p != item.data() + item.size() || n < 0) {
            throw UsageError("--workers expects a comma-separated list of non-negative integers");
        }
        counts.push_back(n);
    }
    return counts;
}

int framedump(const std::string& hex, const std::string& file, const std::string& encode_desc, std::ostream& out) {
    if (!encode_desc.empty()) {
        out << frames::to_hex(frames::encode(frames::parse_description(encode_desc)), true) << '\n';
        return kExitOk;
    }
    frames::Bytes bytes;
    if (!file.empty()) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            throw UsageError("cannot read " + file);
        }
        bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    } else {
        bytes = frames::from_hex(hex);
    }
    std::size_t cursor = 0;
    while (cursor < bytes.size()) {
        auto step = frames::decode_stream(bytes, cursor);
        if (const auto* frame = std::get_if<frames::ApiFrame>(&step.result)) {
            out << frames::describe(*frame) << '\n';
        } else if (const auto* skip = std::get_if<frames::Skip>(&step.result)) {
            out << frames::to_string(skip->reason) << ", skipped\n";
        } else {
            out << "incomplete frame (" << bytes.size() - cursor << " bytes), waiting for more data\n";
            break;
        }
        cursor = step.cursor;
    }
    return kExitOk;
}

int inspect(const std::string& kind, const std::string& path, std::ostream& out) {
    if (kind == "journal") {
        const auto replay = edgenode::journal_replay(path);
        out << "seq,card,datetime,acked\n";
        for (const auto& r : replay.records) {
            out << r.seq << ',' << r.card << ',' << rtc::render_timestamp(r.datetime) << ','
                << (r.acked ? "yes" : "no") << '\n';
        }
        if (replay.discarded_partial > 0) {
            out << "# discarded " << replay.discarded_partial << " partial line\n";
        }
        return kExitOk;
    }
    if (kind == "store") {
        const auto store = attserver::load(path);
        out << "card,name,job,enrolled_at\n";
        for (const auto& [card, s] : store.staff) {
            out << card << ',' << s.name << ',' << s.job_spec << ',' << rtc::render_timestamp(s.enrolled_at) << '\n';
        }
        out << "node,seq,card,datetime,decision,received_at\n";
        for (const auto& e : store.events) {
            out << to_int(e.node) << ',' << e.seq << ',' << e.card << ',' << rtc::render_timestamp(e.datetime) << ','
                << (e.decision == attserver::Decision::Granted ? "granted" : "denied") << ','
                << format_seconds(e.received_at) << '\n';
        }
        return kExitOk;
    }
    throw UsageError("inspect expects 'journal' or 'store'");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attendance network simulator and tools", "attnet"};
    app.require_subcommand(1);

    std::string store_flag;
    std::string name;
    std::string job;
    std::string card;
    std::string at;
    auto* enroll = app.add_subcommand("enroll", "Enroll a staff member's card");
    enroll->add_option("--store", store_flag, "Store file (default $ATTNET_STORE)");
    enroll->add_option("--name", name, "Full name")->required();
    enroll->add_option("--job", job, "Job specification")->required();
    enroll->add_option("--card", card, "Decimal card number")->required();
    enroll->add_option("--at", at, "Enrollment time, Y/M/D H:M:S");

    auto* revoke = app.add_subcommand("revoke", "Revoke a card");
    revoke->add_option("--store", store_flag, "Store file (default $ATTNET_STORE)");
    revoke->add_option("--card", card, "Decimal card number")->required();

    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario in virtual time");
    simulate->add_option("scenario", scenario_path, "Scenario file")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->add_option("--seed", seed, "Override the scenario seed");

    std::string kind;
    std::string date;
    std::string window = "09:00-17:00";
    std::int64_t debounce = attserver::kDefaultDebounceS;
    std::string workers;
    auto* report = app.add_subcommand("report", "Print a CSV report");
    report->add_option("kind", kind, "daily | presence | table2 | curves | latency")->required();
    report->add_option("--store", store_flag, "Store file (default $ATTNET_STORE)");
    report->add_option("--date", date, "Day for the daily report, Y/M/D (default: every day)");
    report->add_option("--at", at, "Presence cutoff: virtual seconds or Y/M/D H:M:S");
    report->add_option("--debounce", debounce, "Debounce window in seconds")->check(CLI::NonNegativeNumber);
    report->add_option("--window", window, "Business window HH:MM-HH:MM");
    report->add_option("--workers", workers, "Worker counts for curves, e.g. 1,10,60,100");
    report->add_option("--scenario", scenario_path, "Scenario for the latency report");

    std::string inspect_kind;
    std::string inspect_path;
    auto* inspect_cmd = app.add_subcommand("inspect", "Dump a journal or store file as CSV");
    inspect_cmd->add_option("kind", inspect_kind, "journal | store")->required();
    inspect_cmd->add_option("file", inspect_path, "File to read")->required();

    std::string hex;
    std::string hex_file;
    std::string encode_desc;
    auto* dump = app.add_subcommand("framedump", "Decode API frames from hex, or encode one");
    dump->add_option("hex", hex, "Hex bytes (whitespace allowed)");
    dump->add_option("--file", hex_file, "Read raw bytes from a file");
    dump->add_option("--encode", encode_desc, "Frame description to encode, e.g. \"TxStatus frame_id=1\"");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*enroll) {
            const auto path = resolve_store(store_flag);
            const auto card_key = parse_card(card);
            const auto when = at.empty() ? rtc::Datetime{} : parse_datetime_arg(at);
            auto store = attserver::load(path);
            const auto& rec = attserver::enroll(store, name, job, card_key, when);
            attserver::persist(store, path);
            out << "enrolled " << rec.card_key << ' ' << rec.name << '\n';
        } else if (*revoke) {
            const auto path = resolve_store(store_flag);
            const auto card_key = parse_card(card);
            auto store = attserver::load(path);
            attserver::revoke(store, card_key);
            attserver::persist(store, path);
            out << "revoked " << card_key << '\n';
        } else if (*simulate) {
            const auto sc = scenario::load_scenario(scenario_path);
            sim::SimulationOptions opts;
            opts.seed = seed;
            sim::Simulation simulation(sc, opts);
            simulation.run();
            simulation.write_outputs(out_dir);
            const auto c = simulation.server().counters();
            out << "simulated until " << format_seconds(simulation.end_time()) << " s: "
                << simulation.counters().scans_accepted << " scans, " << c.ingested << " stored, " << c.duplicates
                << " duplicates\n";
        } else if (*report) {
            const auto bw = [&] {
                try {
                    return reports::parse_window(window);
                } catch (const ParseError& e) {
                    throw UsageError(e.what());
                }
            }();
            if (kind == "table2") {
                reports::write_table2_csv(out);
            } else if (kind == "curves") {
                std::vector<int> counts;
                if (workers.empty()) {
                    for (int n = 0; n <= 100; ++n) {
                        counts.push_back(n);
                    }
                } else {
                    counts = parse_workers(workers);
                }
                reports::write_curves_csv(out, counts);
            } else if (kind == "latency") {
                if (scenario_path.empty()) {
                    throw UsageError("latency report needs --scenario");
                }
                reports::write_latency_csv(out, reports::end_to_end_latency(scenario::load_scenario(scenario_path)));
            } else if (kind == "daily") {
                const auto store = attserver::load(resolve_store(store_flag));
                std::vector<rtc::Datetime> dates;
                if (date.empty()) {
                    dates = reports::report_dates(store);
                } else {
                    dates.push_back(parse_datetime_arg(date + " 0:0:0"));
                }
                reports::write_daily_csv(out, dates, store, bw, debounce);
            } else if (kind == "presence") {
                const auto store = attserver::load(resolve_store(store_flag));
                attserver::PresenceCutoff cutoff = VirtualTime::max();
                std::string label = "end";
                if (!at.empty()) {
                    label = at;
                    if (at.find('/') != std::string::npos) {
                        cutoff = parse_datetime_arg(at);
                    } else {
                        try {
                            cutoff = parse_seconds(at);
                        } catch (const ParseError& e) {
                            throw UsageError(e.what());
                        }
                    }
                }
                reports::write_presence_csv(out, store, cutoff, label, debounce);
            } else {
                throw UsageError("unknown report kind '" + kind + "'");
            }
        } else if (*inspect_cmd) {
            return inspect(inspect_kind, inspect_path, out);
        } else if (*dump) {
            return framedump(hex, hex_file, encode_desc, out);
        }
    } catch (const UsageError& e) {
        err << "attnet: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "attnet: " << e.what() << '\n';
        return kExitUsage;
    } catch (const LineError& e) {
        err << "attnet: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "attnet: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitOk;
}

} // namespace attnet::cli
