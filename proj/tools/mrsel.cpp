// mrsel: command-line front end for the selection-bias Monte Carlo engine.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mrsel/errors.hpp"
#include "mrsel/montecarlo.hpp"
#include "mrsel/report.hpp"
#include "mrsel/scenarios.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitEstimatorFailures = 4;

struct Common {
    std::optional<std::int64_t> reps;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string out;
    std::string format = "md";
    std::string per_rep_csv;
    std::string plot_csv;
};

void add_common(CLI::App* cmd, Common& c, bool outputs) {
    cmd->add_option("--reps", c.reps, "replications per cell (default 2000)")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--workers", c.workers, "OpenMP workers (default: available cores)")
        ->envname("MRSEL_WORKERS")
        ->check(CLI::NonNegativeNumber);
    if (!outputs) return;
    cmd->add_option("--out", c.out, "write the report here instead of stdout");
    cmd->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "md"}));
    cmd->add_option("--per-rep-csv", c.per_rep_csv, "write per-replication records");
    cmd->add_option("--plot-csv", c.plot_csv, "write long-format summary for plotting");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    return f;
}

// Writes the main report and any side files.
void emit(const Common& c, const mrsel::EntryRun& run, const mrsel::ReportTable& table,
          const std::vector<mrsel::Comparison>* comparisons) {
    std::ostringstream body;
    if (c.format == "csv") {
        mrsel::write_summary_csv(body, run);
    } else {
        mrsel::write_markdown(body, table, run);
        if (comparisons) mrsel::write_comparisons_markdown(body, *comparisons);
    }
    if (c.out.empty()) {
        std::cout << body.str();
    } else {
        auto f = open_out(c.out);
        f << body.str();
    }
    if (!c.per_rep_csv.empty()) {
        auto f = open_out(c.per_rep_csv);
        mrsel::write_per_rep_csv_header(f);
        for (const auto& cell : run.cells) mrsel::write_per_rep_csv(f, cell.run);
    }
    if (!c.plot_csv.empty()) {
        auto f = open_out(c.plot_csv);
        mrsel::write_plot_csv(f, run);
    }
}

// "table1" or "table1/gx=-1": the longest catalog-id prefix, then an optional cell key.
std::pair<const mrsel::CatalogEntry*, std::string> resolve_target(const std::string& target) {
    try {
        return {&mrsel::catalog_lookup(target), ""};
    } catch (const mrsel::UnknownScenario&) {
        for (auto slash = target.rfind('/'); slash != std::string::npos && slash > 0;
             slash = target.rfind('/', slash - 1)) {
            try {
                const auto& entry = mrsel::catalog_lookup(target.substr(0, slash));
                return {&entry, target.substr(slash + 1)};
            } catch (const mrsel::UnknownScenario&) {
            }
        }
        throw;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw mrsel::InvalidConfig("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int finish_run(const mrsel::EntryRun& run) {
    if (run.errors_exceed()) {
        std::cerr << "error: more than " << 100.0 * mrsel::kMaxErrorShare
                  << "% of estimator fits failed in at least one cell\n";
        return kExitEstimatorFailures;
    }
    return 0;
}

int cmd_list() {
    for (const auto& e : mrsel::catalog()) {
        std::printf("%-32s %3zu cells  %s\n", e.id.c_str(), e.grid.size(), e.title.c_str());
    }
    std::printf("\naliases:\n");
    for (const auto& [alias, target] : mrsel::catalog_aliases())
        std::printf("  %-10s -> %s\n", alias.c_str(), target.c_str());
    return 0;
}

int cmd_run(const Common& c, const std::string& target, const std::string& config_path,
            const std::vector<std::string>& overrides) {
    if (target.empty() == config_path.empty())
        throw mrsel::InvalidConfig("give either a catalog id or --config, not both");
    const mrsel::RunOptions options{c.workers};
    mrsel::EntryRun run;
    const mrsel::CatalogEntry* entry = nullptr;
    if (!config_path.empty()) {
        auto doc = nlohmann::json::parse(read_file(config_path), nullptr, false);
        if (doc.is_discarded()) throw mrsel::SchemaViolation("$", "not valid JSON");
        if (c.reps) doc["run"]["reps"] = *c.reps;
        if (c.seed) doc["run"]["master_seed"] = *c.seed;
        for (const auto& o : overrides) mrsel::apply_override(doc, o);
        run = mrsel::run_custom(mrsel::parse_config(doc), "custom", options);
    } else {
        auto [found, cell_key] = resolve_target(target);
        entry = found;
        mrsel::CatalogEntry selected = *entry;
        if (!cell_key.empty()) {
            const auto* cell = entry->find_cell(cell_key);
            if (!cell) throw mrsel::InvalidConfig("no cell '" + cell_key + "' in " + entry->id);
            selected.grid = {*cell};
        }
        run = mrsel::run_entry(selected, c.reps.value_or(2000), c.seed.value_or(mrsel::kDefaultMasterSeed), options,
                               overrides);
    }
    const auto table = mrsel::build_report(run, entry);
    emit(c, run, table, nullptr);
    return finish_run(run);
}

int cmd_reproduce(const Common& c, const std::string& table_id) {
    const auto& entry = mrsel::catalog_lookup(table_id);
    const auto t0 = std::chrono::steady_clock::now();
    const auto run = mrsel::run_entry(entry, c.reps.value_or(2000), c.seed.value_or(mrsel::kDefaultMasterSeed),
                                      {c.workers});
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto comparisons = mrsel::compare(run, entry);
    const auto table = mrsel::build_report(run, &entry, &comparisons);

    std::size_t failed = 0;
    for (const auto& cmp : comparisons)
        if (!cmp.passed && cmp.expected->kind != mrsel::ToleranceKind::Informational) ++failed;

    std::fprintf(stderr, "reproduce %s: catalog %s, seed %llu, reps %lld, wall time %.1f s%s\n", entry.id.c_str(),
                 mrsel::kCatalogVersion, static_cast<unsigned long long>(run.master_seed),
                 static_cast<long long>(run.reps), wall, run.low_precision() ? ", low-precision run" : "");
    emit(c, run, table, &comparisons);
    if (c.format == "csv" || !c.out.empty()) mrsel::write_comparisons_markdown(std::cout, comparisons);
    std::cout << "\nwall time: " << wall << " s\n";
    std::cout << (failed == 0 ? "REPRODUCED" : "NOT REPRODUCED") << ": " << entry.id << " (" << failed
              << " failing values)\n";
    if (const int rc = finish_run(run); rc != 0) return rc;
    return failed == 0 ? 0 : kExitFailure;
}

int cmd_signs(const Common& c) {
    const auto& entry = mrsel::catalog_lookup("appendix.A2.signs");
    const auto run = mrsel::run_entry(entry, c.reps.value_or(2000), c.seed.value_or(mrsel::kDefaultMasterSeed),
                                      {c.workers});
    const auto comparisons = mrsel::compare(run, entry);
    auto sign = [](double v) { return v > 0 ? "+" : (v < 0 ? "-" : "0"); };

    std::printf("Direction of median bias (expected/observed), |gamma_X| = 0.5 then 2\n\n");
    std::printf("| gamma_U, gamma_X | aU+ bU+ | aU+ bU- | aU- bU+ | aU- bU- |\n|---|---|---|---|---|\n");
    std::size_t failed = 0;
    for (std::size_t row = 0; row < 4; ++row) {
        std::string label;
        std::string cells;
        for (std::size_t col = 0; col < 4; ++col) {
            // Two comparisons (moderate, strong) per table cell, in row-major order.
            const auto& moderate = comparisons[(row * 4 + col) * 2];
            const auto& strong = comparisons[(row * 4 + col) * 2 + 1];
            const auto& key = moderate.expected->cell_key;
            if (col == 0) label = key.substr(0, key.find(",aU"));
            cells += std::string(" ") + sign(moderate.expected->value) + sign(strong.expected->value) + "/" +
                     (moderate.observed ? sign(*moderate.observed) : "?") +
                     (strong.observed ? sign(*strong.observed) : "?") +
                     (moderate.passed && strong.passed ? "" : " (FAIL)") + " |";
            failed += !moderate.passed + !strong.passed;
        }
        std::printf("| %s |%s\n", label.c_str(), cells.c_str());
    }

    // Null configuration: no selection effects, so there is no sign to test.
    auto null_config = entry.grid.front().config;
    null_config.gamma_x = 0.0;
    null_config.gamma_u = 0.0;
    null_config.reps = run.reps;
    null_config.master_seed = run.master_seed;
    const auto null_run = mrsel::run_scenario(null_config, entry.id + "/null", {c.workers});
    if (const auto& s = null_run.summaries.front()) {
        std::printf("\nnull configuration (all gamma = 0): median %.4f, MC SE %.4f, %s; sign test skipped\n",
                    s->median, s->mcse_median,
                    std::abs(s->median) <= 4.0 * s->mcse_median ? "within Monte Carlo noise of 0"
                                                               : "OUTSIDE Monte Carlo noise of 0");
    }
    std::printf("\n%s: %zu of %zu signs match (seed %llu, reps %lld)\n", failed == 0 ? "MATCH" : "MISMATCH",
                comparisons.size() - failed, comparisons.size(), static_cast<unsigned long long>(run.master_seed),
                static_cast<long long>(run.reps));
    if (const int rc = finish_run(run); rc != 0) return rc;
    return failed == 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mrsel: Monte Carlo study of selection bias in Mendelian randomization"};
    app.require_subcommand(1);

    Common common;
    app.add_subcommand("list", "list catalog ids");

    auto* run = app.add_subcommand("run", "run a catalog entry (or entry/cell) or a JSON config");
    std::string target, config_path;
    std::vector<std::string> overrides;
    run->add_option("target", target, "catalog id, optionally followed by /cell-key");
    run->add_option("--config", config_path, "JSON configuration file");
    run->add_option("--set", overrides, "override a config field: path=value (repeatable)");
    add_common(run, common, true);

    auto* reproduce = app.add_subcommand("reproduce", "run a table and compare with its reported values");
    std::string table_id;
    reproduce->add_option("table", table_id, "catalog id or alias")->required();
    add_common(reproduce, common, true);

    auto* signs = app.add_subcommand("signs", "direction of bias over the 16 sign combinations");
    add_common(signs, common, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (app.got_subcommand("list")) return cmd_list();
        if (run->parsed()) return cmd_run(common, target, config_path, overrides);
        if (reproduce->parsed()) return cmd_reproduce(common, table_id);
        if (signs->parsed()) return cmd_signs(common);
    } catch (const mrsel::InsufficientSelected& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const mrsel::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case mrsel::ErrorCode::InvalidConfig:
            case mrsel::ErrorCode::SchemaViolation:
            case mrsel::ErrorCode::UnknownScenario: return kExitConfig;
            default: return kExitFailure;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
