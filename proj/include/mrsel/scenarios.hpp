#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrsel/config.hpp"
#include "mrsel/montecarlo.hpp"

namespace mrsel {

// Bumped whenever a grid or a transcribed value changes.
inline constexpr const char* kCatalogVersion = "1.0.0";

inline constexpr std::uint64_t kDefaultMasterSeed = 20190318;

// Reported values carry three decimals (rates: one decimal of a percent).
inline constexpr double kRoundingHalfUnit = 0.0005;

enum class Column { Mean, Median, Sd, MedianSe, RejectionRate, Sign };

const char* to_string(Column column);

enum class ToleranceKind {
    MonteCarlo,     // 4 Monte Carlo SEs of the column at the run's rep count
    Relative,       // fixed fraction of the expected value
    SignOnly,       // the sign of the median must match
    Informational,  // reported alongside, never compared
};

struct ExpectedValue {
    std::string cell_key;
    std::size_t estimator = 0;  // index into the cell's estimator plan
    Column column = Column::Mean;
    double value = 0.0;
    ToleranceKind kind = ToleranceKind::MonteCarlo;
    // Spread of the estimates as reported alongside the value; NaN when the
    // source table has no SD column, in which case the run's own SD is used.
    double reference_sd = std::numeric_limits<double>::quiet_NaN();
    double relative = 0.0;
    std::string citation;

    // Tolerance at a reference-scale run of 10 000 replications.
    double tolerance_at_reference_scale(const SummaryStats& observed) const;
    double tolerance(std::int64_t reps, const SummaryStats& observed) const;
    double observed_value(const SummaryStats& observed) const;
    bool passes(const SummaryStats& observed, std::int64_t reps) const;
};

inline constexpr std::int64_t kReferenceReps = 10000;

struct CatalogCell {
    std::string id;   // globally unique; seeds derive from it
    std::string key;  // row/column label within the table
    ScenarioConfig config;
    std::vector<std::pair<std::string, double>> axes;  // e.g. {"gamma_x", -2}
};

struct CatalogEntry {
    std::string id;
    std::string title;
    std::vector<std::string> estimator_names;  // display name per plan index
    std::vector<CatalogCell> grid;
    std::vector<ExpectedValue> expected;

    const CatalogCell* find_cell(const std::string& key) const;
};

const std::vector<CatalogEntry>& catalog();
std::vector<std::string> catalog_ids();

// Accepts canonical ids and the short aliases listed by catalog_aliases().
// Throws UnknownScenario listing every valid id.
const CatalogEntry& catalog_lookup(const std::string& id);
const std::map<std::string, std::string>& catalog_aliases();

// Configuration document (JSON):
// {
//   "dgp": {"alpha_g", "alpha_u", "beta_x", "beta_u",
//           "outcome": {"kind": "continuous"} | {"kind": "binary", "beta_0"},
//           "gamma_0", "gamma_x", "gamma_u", "gamma_y"},
//   "sampling": {"population_size", "sample_size", "policy"?},
//   "run": {"reps", "master_seed"},
//   "estimators"?: [{"kind", "trim_percentile"?, "se"?, "policy"?}, ...]
// }
// Keys marked ? have defaults; unknown keys are rejected.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);
nlohmann::json serialize_config(const ScenarioConfig& config);

// Applies "dotted.path=value" to a serialized document. The value is read as
// JSON when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace mrsel
