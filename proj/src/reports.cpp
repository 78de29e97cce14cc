#include "attnet/reports.hpp"

#include "attnet/error.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

namespace attnet::reports {

const char* to_string(Method m) {
    switch (m) {
    case Method::Manual:
        return "Manual";
    case Method::Rfid:
        return "RFID";
    case Method::Nfc:
        return "NFC";
    }
    return "?";
}

double per_worker_seconds(Method m) {
    switch (m) {
    case Method::Manual:
        return 30.0;
    case Method::Rfid:
        return 2.0;
    case Method::Nfc:
        return 0.5;
    }
    return 0.0;
}

const std::vector<MeasuredCell>& measured_cells(Method m) {
    static const std::vector<MeasuredCell> manual{{1, 30}, {10, 180}, {60, 1800}, {100, 3000}};
    static const std::vector<MeasuredCell> rfid{{1, 2}, {10, 20}, {60, 120}, {100, 210}};
    static const std::vector<MeasuredCell> nfc{{1, 0.5}, {10, 5}, {60, 30}, {100, 50}};
    switch (m) {
    case Method::Manual:
        return manual;
    case Method::Rfid:
        return rfid;
    case Method::Nfc:
        return nfc;
    }
    return nfc;
}

double throughput(Method m, int n_workers) {
    if (n_workers < 0) {
        throw RangeError("throughput: negative worker count");
    }
    const auto& cells = measured_cells(m);
    MeasuredCell prev{0, 0.0};
    for (const auto& cell : cells) {
        if (n_workers <= cell.workers) {
            return prev.seconds + (cell.seconds - prev.seconds) * (n_workers - prev.workers) / (cell.workers - prev.workers);
        }
        prev = cell;
    }
    const auto& a = cells[cells.size() - 2];
    const auto& b = cells.back();
    return b.seconds + (b.seconds - a.seconds) * (n_workers - b.workers) / (b.workers - a.workers);
}

double speedup_percent(double baseline_s, double new_s) {
    if (!(baseline_s > 0.0)) {
        throw RangeError("speedup_percent: baseline must be > 0");
    }
    return 100.0 * (baseline_s - new_s) / baseline_s;
}

BusinessWindow parse_window(const std::string& text) {
    int h1 = 0;
    int m1 = 0;
    int h2 = 0;
    int m2 = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d:%d-%d:%d%c", &h1, &m1, &h2, &m2, &tail) != 4 || h1 < 0 || h1 > 23 || m1 < 0 ||
        m1 > 59 || h2 < 0 || h2 > 23 || m2 < 0 || m2 > 59 || h1 * 60 + m1 > h2 * 60 + m2) {
        throw ParseError("business window must look like 09:00-17:00");
    }
    return BusinessWindow{h1 * 60 + m1, h2 * 60 + m2};
}

namespace {

std::string csv_field(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) {
        return v;
    }
    std::string quoted = "\"";
    for (char c : v) {
        if (c == '"') {
            quoted.push_back('"');
        }
        quoted.push_back(c);
    }
    return quoted + '"';
}

} // namespace

std::vector<DayReportRow> daily_report(const attserver::StoreData& store, const rtc::Datetime& date,
                                       const BusinessWindow& window, std::int64_t debounce_s) {
    std::vector<DayReportRow> rows;
    for (const auto& [card, staff] : store.staff) {
        DayReportRow row;
        for (const auto& e : attserver::counted_scans(store, card, debounce_s)) {
            const auto& dt = e.datetime;
            if (dt.year != date.year || dt.month != date.month || dt.day != date.day) {
                continue;
            }
            if (row.scan_count == 0) {
                row.check_in = dt;
            }
            row.check_out = dt;
            ++row.scan_count;
        }
        if (row.scan_count == 0) {
            continue;
        }
        row.card = card;
        row.name = staff.name;
        row.late = row.check_in.hour * 60 * 60 + row.check_in.minute * 60 + row.check_in.second >
                   window.start_minute * 60;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<rtc::Datetime> report_dates(const attserver::StoreData& store) {
    std::set<rtc::Datetime> dates;
    for (const auto& e : store.events) {
        if (e.decision == attserver::Decision::Granted) {
            dates.insert(rtc::Datetime{e.datetime.year, e.datetime.month, e.datetime.day, 0, 0, 0});
        }
    }
    return {dates.begin(), dates.end()};
}

std::vector<CurveRow> curve_data(const std::vector<Method>& methods, const std::vector<int>& worker_counts) {
    std::vector<CurveRow> rows;
    for (Method m : methods) {
        for (int n : worker_counts) {
            rows.push_back(CurveRow{m, n, throughput(m, n)});
        }
    }
    return rows;
}

std::vector<sim::LatencyRow> end_to_end_latency(const scenario::Scenario& scenario) {
    sim::Simulation simulation(scenario);
    simulation.run();
    return simulation.latencies();
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') {
        s.pop_back();
    }
    return s == "-0" ? "0" : s;
}

void write_table2_csv(std::ostream& os) {
    os << "report,method,workers,seconds\n";
    for (Method m : {Method::Manual, Method::Rfid, Method::Nfc}) {
        for (int n : kTableWorkers) {
            os << "table2," << to_string(m) << ',' << n << ',' << format_number(throughput(m, n)) << '\n';
        }
    }
}

void write_curves_csv(std::ostream& os, const std::vector<int>& worker_counts) {
    os << "report,method,workers,seconds\n";
    for (const auto& r : curve_data({Method::Manual, Method::Rfid, Method::Nfc}, worker_counts)) {
        os << "curves," << to_string(r.method) << ',' << r.workers << ',' << format_number(r.seconds) << '\n';
    }
}

void write_daily_csv(std::ostream& os, const std::vector<rtc::Datetime>& dates, const attserver::StoreData& store,
                     const BusinessWindow& window, std::int64_t debounce_s) {
    os << "report,date,card,name,check_in,check_out,late,scan_count\n";
    for (const auto& date : dates) {
        for (const auto& r : daily_report(store, date, window, debounce_s)) {
            os << "daily," << rtc::render_date(date) << ',' << r.card << ',' << csv_field(r.name) << ','
               << rtc::render_timestamp(r.check_in) << ',' << rtc::render_timestamp(r.check_out) << ','
               << (r.late ? "yes" : "no") << ',' << r.scan_count << '\n';
        }
    }
}

void write_presence_csv(std::ostream& os, const attserver::StoreData& store, const attserver::PresenceCutoff& at,
                        const std::string& at_label, std::int64_t debounce_s) {
    const auto cards = attserver::present(store, at, debounce_s);
    os << "report,at,count,cards\n";
    os << "presence," << at_label << ',' << cards.size() << ',';
    bool first = true;
    for (auto c : cards) {
        os << (first ? "" : ";") << c;
        first = false;
    }
    os << '\n';
}

void write_latency_csv(std::ostream& os, const std::vector<sim::LatencyRow>& rows) {
    os << "report,node,seq,card,scanned_at,received_at,latency_s\n";
    for (const auto& r : rows) {
        os << "latency," << to_int(r.node) << ',' << r.seq << ',' << r.card << ',' << format_seconds(r.scanned_at)
           << ',' << format_seconds(r.received_at) << ',' << format_seconds(r.received_at - r.scanned_at) << '\n';
    }
}

} // namespace attnet::reports
