#pragma once

// Attendance analytics and check-in throughput comparisons. All output is
// CSV with a header row; the first column names the report kind.

#include "attnet/attserver.hpp"
#include "attnet/rtc.hpp"
#include "attnet/scenario.hpp"
#include "attnet/simulation.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace attnet::reports {

enum class Method { Manual, Rfid, Nfc };

const char* to_string(Method m);

/// Nominal per-worker check-in time: Manual 30 s, RFID 2 s, NFC 0.5 s.
double per_worker_seconds(Method m);

/// Measured check-in totals, one per crew size in kTableWorkers.
struct MeasuredCell {
    int workers;
    double seconds;
};
const std::vector<MeasuredCell>& measured_cells(Method m);

/// Total check-in time for n workers: piecewise-linear through the measured
/// cells (and the origin), extended past 100 workers with the last segment's
/// slope. The measured totals are not all n * per_worker_seconds(m): manual
/// entry for 10 workers took 180 s and RFID for 100 workers took 210 s.
double throughput(Method m, int n_workers);

/// 100 * (baseline - new) / baseline. Throws RangeError if baseline <= 0.
double speedup_percent(double baseline_s, double new_s);

struct BusinessWindow {
    int start_minute = 9 * 60;
    int end_minute = 17 * 60;
};

/// "HH:MM-HH:MM". Throws ParseError.
BusinessWindow parse_window(const std::string& text);

struct DayReportRow {
    std::uint32_t card = 0;
    std::string name;
    rtc::Datetime check_in;
    rtc::Datetime check_out;
    bool late = false; // check-in strictly after the window start
    int scan_count = 0;
};

/// One row per enrolled card with at least one counted granted scan on the
/// date (year/month/day of `date`), ordered by card.
std::vector<DayReportRow> daily_report(const attserver::StoreData& store, const rtc::Datetime& date,
                                       const BusinessWindow& window = {},
                                       std::int64_t debounce_s = attserver::kDefaultDebounceS);

/// Distinct scan dates present among granted events, ascending.
std::vector<rtc::Datetime> report_dates(const attserver::StoreData& store);

struct CurveRow {
    Method method;
    int workers;
    double seconds;
};

std::vector<CurveRow> curve_data(const std::vector<Method>& methods, const std::vector<int>& worker_counts);

inline const std::vector<int> kTableWorkers{1, 10, 60, 100};

/// Runs the scenario and reports scan-to-storage latency per stored record.
std::vector<sim::LatencyRow> end_to_end_latency(const scenario::Scenario& scenario);

void write_table2_csv(std::ostream& os);
void write_curves_csv(std::ostream& os, const std::vector<int>& worker_counts);
void write_daily_csv(std::ostream& os, const std::vector<rtc::Datetime>& dates, const attserver::StoreData& store,
                     const BusinessWindow& window, std::int64_t debounce_s);
void write_presence_csv(std::ostream& os, const attserver::StoreData& store, const attserver::PresenceCutoff& at,
                        const std::string& at_label, std::int64_t debounce_s);
void write_latency_csv(std::ostream& os, const std::vector<sim::LatencyRow>& rows);

/// Seconds with trailing zeros trimmed: 50, 0.5, 122.25.
std::string format_number(double v);

} // namespace attnet::reports
