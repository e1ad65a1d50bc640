#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mrsel/montecarlo.hpp"
#include "mrsel/scenarios.hpp"

namespace mrsel {

// 17 significant digits, enough for any double to round-trip through text.
std::string format_real(double v);

// Quotes the field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);

// Runs below this many replications are flagged as low precision.
inline constexpr std::int64_t kLowPrecisionReps = 1000;

// Share of failed estimator fits in a cell above which a run exits with status 4.
inline constexpr double kMaxErrorShare = 0.05;

struct CellRun {
    std::string key;
    std::vector<std::pair<std::string, double>> axes;
    ScenarioRun run;
};

struct EntryRun {
    std::string id;
    std::string title;
    std::vector<std::string> estimator_names;
    std::int64_t reps = 0;
    std::uint64_t master_seed = 0;
    std::vector<CellRun> cells;

    const CellRun* find_cell(const std::string& key) const;
    bool low_precision() const { return reps < kLowPrecisionReps; }
    bool errors_exceed(double share = kMaxErrorShare) const;
};

// Runs every cell of a catalog entry. reps and seed replace the catalog values;
// overrides ("path=value") are then applied to each cell's configuration.
EntryRun run_entry(const CatalogEntry& entry, std::int64_t reps, std::uint64_t master_seed,
                   const RunOptions& options, const std::vector<std::string>& overrides = {});

// A user configuration as a one-cell entry.
EntryRun run_custom(const ScenarioConfig& config, const std::string& id, const RunOptions& options);

// Monte Carlo SE of one summary column.
double column_mcse(const SummaryStats& s, Column column);

struct Comparison {
    const ExpectedValue* expected = nullptr;
    std::optional<double> observed;  // empty when the cell produced no estimates
    double tolerance = 0.0;
    double mcse = 0.0;
    bool passed = false;
};

std::vector<Comparison> compare(const EntryRun& run, const CatalogEntry& entry);

struct ReportColumn {
    std::size_t estimator = 0;
    Column column = Column::Mean;
};

struct ReportRow {
    std::string cell_key;
    std::vector<std::optional<SummaryStats>> stats;  // per estimator
    std::vector<const Comparison*> checks;           // per report column; null if not compared
};

struct ReportTable {
    std::string title;
    std::vector<std::string> estimator_names;
    std::vector<ReportColumn> columns;
    std::vector<ReportRow> rows;

    bool all_passed() const;
};

// Columns follow the source table: those with expected values when an entry is
// given, otherwise Mean, Median, SD, Med SE and Rate for every estimator.
ReportTable build_report(const EntryRun& run, const CatalogEntry* entry = nullptr,
                         const std::vector<Comparison>* comparisons = nullptr);

void write_markdown(std::ostream& os, const ReportTable& table, const EntryRun& run);

// One line per compared value, then a pass count.
void write_comparisons_markdown(std::ostream& os, const std::vector<Comparison>& comparisons);

// Summary CSV:
// scenario_id,cell,estimator,mean,median,sd,median_se,sd_se,rejection_rate,
// n_effective_reps,n_errors,n_extreme_weights,mcse_mean,mcse_median,mcse_rate,mean_f_stat
void write_summary_csv(std::ostream& os, const EntryRun& run);

struct SummaryCsvRow {
    std::string scenario_id;
    std::string cell;
    std::string estimator;
    std::optional<SummaryStats> stats;
    double mean_f_stat = 0.0;
};

// Throws SchemaViolation on a malformed document.
std::vector<SummaryCsvRow> parse_summary_csv(std::istream& is);

// Long format for external plotting:
// scenario_id,cell,estimator,axis,axis_value,statistic,value,mcse
void write_plot_csv(std::ostream& os, const EntryRun& run);

}  // namespace mrsel
