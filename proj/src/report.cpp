#include "mrsel/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>

#include "mrsel/errors.hpp"

namespace mrsel {

namespace {

constexpr const char* kSummaryHeader =
    "scenario_id,cell,estimator,mean,median,sd,median_se,sd_se,rejection_rate,n_effective_reps,n_errors,"
    "n_extreme_weights,mcse_mean,mcse_median,mcse_rate,mean_f_stat";

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    // "-0.000" reads as a sign claim; print it as zero.
    if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string display(const SummaryStats& s, Column column) {
    switch (column) {
        case Column::Mean: return fixed(s.mean, 3);
        case Column::Median: return fixed(s.median, 3);
        case Column::Sd: return fixed(s.sd, 3);
        case Column::MedianSe: return fixed(s.median_se, 3);
        case Column::RejectionRate: return fixed(100.0 * s.rejection_rate, 1) + " %";
        case Column::Sign: return s.median > 0 ? "+" : (s.median < 0 ? "-" : "0");
    }
    return "";
}

std::string display_value(Column column, double v) {
    switch (column) {
        case Column::RejectionRate: return fixed(100.0 * v, 1) + " %";
        case Column::Sign: return v > 0 ? "+" : (v < 0 ? "-" : "0");
        default: return fixed(v, 3);
    }
}

std::string column_title(Column column) {
    return column == Column::RejectionRate ? "Rate (%)" : to_string(column);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

double parse_real(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaViolation(where, "not a number: '" + s + "'");
    }
}

std::int64_t parse_count(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SchemaViolation(where, "not an integer: '" + s + "'");
    }
}

CellRun run_cell(const std::string& key, const std::vector<std::pair<std::string, double>>& axes,
                 const ScenarioConfig& config, const std::string& seed_key, const RunOptions& options) {
    CellRun c;
    c.key = key;
    c.axes = axes;
    c.run = run_scenario(config, seed_key, options);
    return c;
}

}  // namespace

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

const CellRun* EntryRun::find_cell(const std::string& key) const {
    for (const auto& c : cells)
        if (c.key == key) return &c;
    return nullptr;
}

bool EntryRun::errors_exceed(double share) const {
    for (const auto& c : cells) {
        const double fits = static_cast<double>(c.run.records.size() * c.run.config.estimator_plan.size());
        if (fits > 0 && static_cast<double>(c.run.total_errors()) / fits > share) return true;
    }
    return false;
}

EntryRun run_entry(const CatalogEntry& entry, std::int64_t reps, std::uint64_t master_seed,
                   const RunOptions& options, const std::vector<std::string>& overrides) {
    EntryRun out;
    out.id = entry.id;
    out.title = entry.title;
    out.estimator_names = entry.estimator_names;
    out.master_seed = master_seed;
    out.reps = reps;
    for (const auto& cell : entry.grid) {
        ScenarioConfig config = cell.config;
        config.reps = reps;
        config.master_seed = master_seed;
        if (!overrides.empty()) {
            auto doc = serialize_config(config);
            for (const auto& o : overrides) apply_override(doc, o);
            config = parse_config(doc);
        }
        if (config.estimator_plan != cell.config.estimator_plan) {
            out.estimator_names.clear();
            for (const auto& e : config.estimator_plan) out.estimator_names.push_back(e.label());
        }
        out.reps = config.reps;
        out.master_seed = config.master_seed;
        out.cells.push_back(run_cell(cell.key, cell.axes, config, cell.id, options));
    }
    return out;
}

EntryRun run_custom(const ScenarioConfig& config, const std::string& id, const RunOptions& options) {
    EntryRun out;
    out.id = id;
    out.title = id;
    for (const auto& e : config.estimator_plan) out.estimator_names.push_back(e.label());
    out.reps = config.reps;
    out.master_seed = config.master_seed;
    out.cells.push_back(run_cell(id, {}, config, id, options));
    return out;
}

double column_mcse(const SummaryStats& s, Column column) {
    const auto r = static_cast<double>(std::max<std::int64_t>(s.n_effective_reps, 1));
    switch (column) {
        case Column::Mean: return s.mcse_mean;
        case Column::Median: return s.mcse_median;
        case Column::Sd: return s.sd / std::sqrt(2.0 * r);
        case Column::MedianSe: return std::sqrt(std::numbers::pi / 2.0) * s.sd_se / std::sqrt(r);
        case Column::RejectionRate: return s.mcse_rate;
        case Column::Sign: return s.mcse_median;
    }
    return 0.0;
}

std::vector<Comparison> compare(const EntryRun& run, const CatalogEntry& entry) {
    std::vector<Comparison> out;
    out.reserve(entry.expected.size());
    for (const auto& e : entry.expected) {
        Comparison c;
        c.expected = &e;
        const CellRun* cell = run.find_cell(e.cell_key);
        if (cell && e.estimator < cell->run.summaries.size() && cell->run.summaries[e.estimator]) {
            const SummaryStats& s = *cell->run.summaries[e.estimator];
            c.observed = e.observed_value(s);
            c.tolerance = e.tolerance(run.reps, s);
            c.mcse = column_mcse(s, e.column);
            c.passed = e.passes(s, run.reps);
        }
        out.push_back(c);
    }
    return out;
}

bool ReportTable::all_passed() const {
    for (const auto& r : rows)
        for (const auto* c : r.checks)
            if (c && !c->passed) return false;
    return true;
}

ReportTable build_report(const EntryRun& run, const CatalogEntry* entry, const std::vector<Comparison>* comparisons) {
    ReportTable t;
    t.title = run.title;
    t.estimator_names = run.estimator_names;
    const std::size_t n_est = run.estimator_names.size();

    if (entry && !entry->expected.empty()) {
        for (std::size_t e = 0; e < n_est; ++e)
            for (Column col : {Column::Mean, Column::Median, Column::Sd, Column::MedianSe, Column::RejectionRate,
                               Column::Sign}) {
                const bool present = std::any_of(entry->expected.begin(), entry->expected.end(),
                                                 [&](const ExpectedValue& x) { return x.estimator == e && x.column == col; });
                if (present) t.columns.push_back({e, col});
            }
    } else {
        for (std::size_t e = 0; e < n_est; ++e)
            for (Column col : {Column::Mean, Column::Median, Column::Sd, Column::MedianSe, Column::RejectionRate})
                t.columns.push_back({e, col});
    }

    for (const auto& cell : run.cells) {
        ReportRow row;
        row.cell_key = cell.key;
        row.stats = cell.run.summaries;
        row.checks.assign(t.columns.size(), nullptr);
        if (comparisons) {
            for (const auto& c : *comparisons) {
                if (c.expected->cell_key != cell.key) continue;
                for (std::size_t k = 0; k < t.columns.size(); ++k)
                    if (t.columns[k].estimator == c.expected->estimator && t.columns[k].column == c.expected->column)
                        row.checks[k] = &c;
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_markdown(std::ostream& os, const ReportTable& table, const EntryRun& run) {
    os << "## " << table.title << "\n\n";
    os << "- scenario: " << run.id << "\n";
    os << "- catalog version: " << kCatalogVersion << "\n";
    os << "- master seed: " << run.master_seed << "\n";
    os << "- replications: " << run.reps << "\n";
    if (run.low_precision())
        os << "- low-precision run: fewer than " << kLowPrecisionReps << " replications\n";
    os << "\n| Cell |";
    const bool many = table.estimator_names.size() > 1;
    for (const auto& c : table.columns) {
        os << ' ';
        if (many) os << table.estimator_names[c.estimator] << ": ";
        os << column_title(c.column) << " |";
    }
    os << "\n|---|";
    for (std::size_t k = 0; k < table.columns.size(); ++k) os << "---:|";
    os << '\n';
    for (const auto& row : table.rows) {
        os << "| " << row.cell_key << " |";
        for (std::size_t k = 0; k < table.columns.size(); ++k) {
            const auto& col = table.columns[k];
            const auto& s = col.estimator < row.stats.size() ? row.stats[col.estimator] : std::nullopt;
            os << ' ' << (s ? display(*s, col.column) : "n/a");
            if (row.checks[k]) os << (row.checks[k]->passed ? "" : " (FAIL)");
            os << " |";
        }
        os << '\n';
    }
    bool any_errors = false;
    for (const auto& row : table.rows)
        for (const auto& s : row.stats)
            if (!s || s->n_errors > 0 || s->n_extreme_weights > 0) any_errors = true;
    if (any_errors) {
        os << "\nFailed fits and extreme-weight replications:\n\n";
        for (const auto& row : table.rows)
            for (std::size_t e = 0; e < row.stats.size(); ++e) {
                const auto& s = row.stats[e];
                if (s && s->n_errors == 0 && s->n_extreme_weights == 0) continue;
                os << "- " << row.cell_key << ", " << table.estimator_names[e] << ": ";
                if (s)
                    os << s->n_errors << " failed, " << s->n_extreme_weights << " with max/median weight above 1e4\n";
                else
                    os << "no replication produced an estimate\n";
            }
    }
}

void write_comparisons_markdown(std::ostream& os, const std::vector<Comparison>& comparisons) {
    os << "\n| Cell | Estimator | Column | Expected | Observed | Tolerance | MC SE | Result | Source |\n";
    os << "|---|---:|---|---:|---:|---:|---:|---|---|\n";
    std::size_t passed = 0, compared = 0;
    for (const auto& c : comparisons) {
        const ExpectedValue& e = *c.expected;
        const bool informational = e.kind == ToleranceKind::Informational;
        if (!informational) ++compared;
        if (c.passed && !informational) ++passed;
        os << "| " << e.cell_key << " | " << e.estimator << " | " << to_string(e.column) << " | "
           << display_value(e.column, e.value) << " | "
           << (c.observed ? display_value(e.column, *c.observed) : "n/a") << " | ";
        if (informational)
            os << "not compared";
        else if (e.kind == ToleranceKind::SignOnly)
            os << "sign";
        else
            os << fixed(e.column == Column::RejectionRate ? 100.0 * c.tolerance : c.tolerance,
                        e.column == Column::RejectionRate ? 2 : 4);
        os << " | " << fixed(e.column == Column::RejectionRate ? 100.0 * c.mcse : c.mcse, 4) << " | "
           << (informational ? "info" : (c.passed ? "pass" : "FAIL")) << " | " << e.citation << " |\n";
    }
    os << "\n" << passed << " of " << compared << " compared values within tolerance\n";
}

void write_summary_csv(std::ostream& os, const EntryRun& run) {
    os << kSummaryHeader << '\n';
    for (const auto& cell : run.cells) {
        for (std::size_t e = 0; e < cell.run.summaries.size(); ++e) {
            os << csv_field(run.id) << ',' << csv_field(cell.key) << ','
               << csv_field(cell.run.config.estimator_plan[e].label()) << ',';
            const auto& s = cell.run.summaries[e];
            if (s) {
                os << format_real(s->mean) << ',' << format_real(s->median) << ',' << format_real(s->sd) << ','
                   << format_real(s->median_se) << ',' << format_real(s->sd_se) << ','
                   << format_real(s->rejection_rate) << ',' << s->n_effective_reps << ',' << s->n_errors << ','
                   << s->n_extreme_weights << ',' << format_real(s->mcse_mean) << ','
                   << format_real(s->mcse_median) << ',' << format_real(s->mcse_rate);
            } else {
                os << ",,,,,,0," << cell.run.records.size() << ",0,,,";
            }
            os << ',' << format_real(cell.run.mean_f_statistic) << '\n';
        }
    }
}

std::vector<SummaryCsvRow> parse_summary_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kSummaryHeader) throw SchemaViolation("line 1", "unexpected header");
    std::vector<SummaryCsvRow> rows;
    for (int lineno = 2; std::getline(is, line); ++lineno) {
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        const auto f = split_csv_line(line);
        if (f.size() != 16) throw SchemaViolation(where, "expected 16 fields, got " + std::to_string(f.size()));
        SummaryCsvRow r;
        r.scenario_id = f[0];
        r.cell = f[1];
        r.estimator = f[2];
        r.mean_f_stat = parse_real(f[15], where);
        if (!f[3].empty()) {
            SummaryStats s;
            s.mean = parse_real(f[3], where);
            s.median = parse_real(f[4], where);
            s.sd = parse_real(f[5], where);
            s.median_se = parse_real(f[6], where);
            s.sd_se = parse_real(f[7], where);
            s.rejection_rate = parse_real(f[8], where);
            s.n_effective_reps = parse_count(f[9], where);
            s.n_errors = parse_count(f[10], where);
            s.n_extreme_weights = parse_count(f[11], where);
            s.mcse_mean = parse_real(f[12], where);
            s.mcse_median = parse_real(f[13], where);
            s.mcse_rate = parse_real(f[14], where);
            r.stats = s;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_plot_csv(std::ostream& os, const EntryRun& run) {
    os << "scenario_id,cell,estimator,axis,axis_value,statistic,value,mcse\n";
    for (const auto& cell : run.cells) {
        std::string axis;
        std::string axis_value;
        if (!cell.axes.empty()) {
            axis = cell.axes.back().first;
            axis_value = format_real(cell.axes.back().second);
        }
        for (std::size_t e = 0; e < cell.run.summaries.size(); ++e) {
            const auto& s = cell.run.summaries[e];
            if (!s) continue;
            const std::string prefix = csv_field(run.id) + ',' + csv_field(cell.key) + ',' +
                                       csv_field(cell.run.config.estimator_plan[e].label()) + ',' + axis + ',' +
                                       axis_value + ',';
            const std::pair<const char*, Column> stats[] = {{"mean", Column::Mean},
                                                            {"median", Column::Median},
                                                            {"sd", Column::Sd},
                                                            {"median_se", Column::MedianSe},
                                                            {"rejection_rate", Column::RejectionRate}};
            for (const auto& [name, col] : stats) {
                const double v = col == Column::Mean     ? s->mean
                                 : col == Column::Median ? s->median
                                 : col == Column::Sd     ? s->sd
                                 : col == Column::MedianSe ? s->median_se
                                                           : s->rejection_rate;
                os << prefix << name << ',' << format_real(v) << ',' << format_real(column_mcse(*s, col)) << '\n';
            }
        }
    }
}

}  // namespace mrsel
