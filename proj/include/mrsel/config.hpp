#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mrsel {

enum class OutcomeKind { Continuous, Binary };

enum class SelectionPolicy {
    RandomAmongSelected,  // uniform subset of the S = 1 rows
    FirstNSelected,       // the n lowest-index S = 1 rows
    FirstNPopulation,     // rows 0..n-1, ignoring S
};

// Percentile at which inverse-probability weights are capped; 100 disables trimming.
struct TrimSpec {
    double percentile = 100.0;

    bool is_identity() const { return percentile >= 100.0; }
    friend bool operator==(const TrimSpec&, const TrimSpec&) = default;
};

enum class EstimatorKind {
    Ratio,                // Wald ratio of instrument-outcome over instrument-exposure
    IpwRatio,             // ratio with both regressions weighted by 1 / fitted P(S = 1 | X)
    LogisticAssociation,  // logistic coefficient of the outcome on the instrument, no ratio
};

// Standard error used for the weighted instrument regressions.
enum class WeightedSe {
    Hc0,    // heteroskedasticity-robust sandwich
    Model,  // classical weighted least squares: sigma^2 (sum w d^2)^-1
};

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Ratio;
    TrimSpec trim{};                       // IpwRatio only
    WeightedSe weighted_se = WeightedSe::Hc0;  // IpwRatio only
    std::optional<SelectionPolicy> policy;  // overrides the scenario sampling policy

    std::string label() const;
    friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

struct ScenarioConfig {
    // Structural coefficients.
    double alpha_g = 0.0;
    double alpha_u = 0.0;
    double beta_x = 0.0;
    double beta_u = 0.0;
    OutcomeKind outcome_kind = OutcomeKind::Continuous;
    double beta_0 = 0.0;  // Binary outcome intercept

    // Selection log-odds: gamma_0 + gamma_x X + gamma_u U + gamma_y Y.
    double gamma_0 = 0.0;
    double gamma_x = 0.0;
    double gamma_u = 0.0;
    double gamma_y = 0.0;

    std::int64_t population_size = 100000;
    std::int64_t sample_size = 10000;
    SelectionPolicy selection_policy = SelectionPolicy::RandomAmongSelected;

    std::int64_t reps = 2000;
    std::uint64_t master_seed = 0;

    std::vector<EstimatorSpec> estimator_plan{EstimatorSpec{}};

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// Throws InvalidConfig naming the first violated constraint.
void validate(const ScenarioConfig& config);

// True when alpha_g^2 + alpha_u^2 == 1 (within rounding): X has no residual error term.
bool has_degenerate_exposure_residual(const ScenarioConfig& config);

double exposure_residual_sd(const ScenarioConfig& config);
double outcome_residual_sd(const ScenarioConfig& config);

const char* to_string(OutcomeKind kind);
const char* to_string(SelectionPolicy policy);
const char* to_string(EstimatorKind kind);
const char* to_string(WeightedSe se);

std::optional<OutcomeKind> outcome_kind_from_string(const std::string& s);
std::optional<SelectionPolicy> selection_policy_from_string(const std::string& s);
std::optional<EstimatorKind> estimator_kind_from_string(const std::string& s);
std::optional<WeightedSe> weighted_se_from_string(const std::string& s);

}  // namespace mrsel
