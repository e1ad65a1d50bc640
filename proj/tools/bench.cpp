// Times one catalog cell with the serial reference loop and the OpenMP pool,
// and checks that both produce identical records.
#include <chrono>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mrsel/montecarlo.hpp"
#include "mrsel/scenarios.hpp"

namespace {

bool same_records(const mrsel::ScenarioRun& a, const mrsel::ScenarioRun& b) {
    if (a.records.size() != b.records.size()) return false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& ra = a.records[i];
        const auto& rb = b.records[i];
        if (ra.f_statistic != rb.f_statistic || ra.outcomes.size() != rb.outcomes.size()) return false;
        for (std::size_t e = 0; e < ra.outcomes.size(); ++e) {
            const auto& oa = ra.outcomes[e];
            const auto& ob = rb.outcomes[e];
            if (oa.error != ob.error || oa.ok() != ob.ok()) return false;
            if (oa.ok() && (oa.result->beta_hat != ob.result->beta_hat || oa.result->se != ob.result->se))
                return false;
        }
    }
    return a.summaries == b.summaries;
}

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mrsel benchmark: serial reference vs OpenMP worker pool"};
    std::string entry_id = "table1";
    std::string cell_key = "gx=-2";
    std::int64_t reps = 200;
    int workers = 0;
    app.add_option("--entry", entry_id, "catalog id");
    app.add_option("--cell", cell_key, "cell key within the entry");
    app.add_option("--reps", reps, "replications")->check(CLI::PositiveNumber);
    app.add_option("--workers", workers, "OpenMP workers (0: default)");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto& entry = mrsel::catalog_lookup(entry_id);
        const auto* cell = entry.find_cell(cell_key);
        if (!cell) {
            std::fprintf(stderr, "no cell '%s' in %s\n", cell_key.c_str(), entry.id.c_str());
            return 2;
        }
        auto config = cell->config;
        config.reps = reps;
        config.master_seed = mrsel::kDefaultMasterSeed;
        const int w = workers > 0 ? workers : mrsel::default_worker_count();

        mrsel::ScenarioRun serial, parallel;
        const double ts = seconds([&] { serial = mrsel::run_scenario_serial(config, cell->id); });
        const double tp = seconds([&] { parallel = mrsel::run_scenario(config, cell->id, {w}); });
        std::printf("cell %s, %lld reps\n", cell->id.c_str(), static_cast<long long>(reps));
        std::printf("serial    %8.3f s  %8.3f ms/rep\n", ts, 1e3 * ts / static_cast<double>(reps));
        std::printf("parallel  %8.3f s  %8.3f ms/rep  (%d workers, speedup %.2fx)\n", tp,
                    1e3 * tp / static_cast<double>(reps), w, ts / tp);
        const bool same = same_records(serial, parallel);
        std::printf("identical records: %s\n", same ? "yes" : "NO");
        return same ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
