#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrsel/config.hpp"
#include "mrsel/errors.hpp"
#include "mrsel/estimators.hpp"

namespace mrsel {

// Two-sided 5% critical value used for every rejection count.
inline constexpr double kCriticalZ = 1.96;

// Seed for one replication. Depends only on its arguments, so a replication
// draws the same data whatever thread or order it runs in. For a fixed master
// seed and scenario id the map rep_index -> seed is a bijection.
std::uint64_t derive_rep_seed(std::uint64_t master_seed, std::string_view scenario_id,
                              std::uint64_t rep_index);

struct EstimatorOutcome {
    std::optional<EstimateResult> result;
    ErrorCode error = ErrorCode::None;
    bool extreme_weights = false;

    bool ok() const { return result.has_value(); }
};

struct RepRecord {
    std::int64_t rep_index = 0;
    std::vector<EstimatorOutcome> outcomes;  // aligned with the estimator plan
    double f_statistic = 0.0;                // X on G in the scenario's analysis sample
    std::size_t selected_count = 0;
    bool feasible = true;
};

// Generates the cohort, draws the sample(s) and runs every planned estimator.
// Estimator failures are recorded in the outcome; only InsufficientSelected propagates.
RepRecord run_replication(const ScenarioConfig& config, std::string_view scenario_id,
                          std::int64_t rep_index);

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double median_se = 0.0;
    double sd_se = 0.0;  // spread of the per-replication SEs
    double rejection_rate = 0.0;
    std::int64_t n_effective_reps = 0;
    std::int64_t n_errors = 0;
    std::int64_t n_extreme_weights = 0;

    // Monte Carlo standard errors.
    double mcse_mean = 0.0;
    double mcse_median = 0.0;  // sqrt(pi/2) sd / sqrt(R), the normal-theory value
    double mcse_rate = 0.0;

    friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

// Aggregates one estimator's column of records, folding in rep_index order.
// Throws NoEffectiveReps when every replication failed.
SummaryStats summarize(const std::vector<RepRecord>& records, std::size_t estimator_index);

// Midpoint-of-two median for even counts.
double median(std::vector<double> values);

struct ScenarioRun {
    std::string scenario_id;
    ScenarioConfig config;
    std::vector<RepRecord> records;  // ordered by rep_index
    std::vector<std::optional<SummaryStats>> summaries;  // per estimator; empty if no effective reps
    double mean_f_statistic = 0.0;

    std::int64_t total_errors() const;
};

struct RunOptions {
    int workers = 0;  // 0: OpenMP default
};

// Replications run on an OpenMP worker pool; output does not depend on the worker count.
ScenarioRun run_scenario(const ScenarioConfig& config, const std::string& scenario_id,
                         const RunOptions& options = {});

// Single-threaded reference kept for checking the parallel path.
ScenarioRun run_scenario_serial(const ScenarioConfig& config, const std::string& scenario_id);

int default_worker_count();

// Per-replication long-format CSV:
// scenario_id,rep_index,estimator,beta_hat,se,z,f_stat,error_code
void write_per_rep_csv_header(std::ostream& os);
void write_per_rep_csv(std::ostream& os, const ScenarioRun& run);

}  // namespace mrsel
