#include "mrsel/config.hpp"

#include <cmath>
#include <sstream>

#include "mrsel/errors.hpp"

namespace mrsel {

namespace {

// Squared coefficients built from sqrt() of a table value can overshoot 1 by a few ulps.
constexpr double kVarianceSlack = 1e-12;

bool finite_all(std::initializer_list<double> values) {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::None: return "";
        case ErrorCode::InvalidConfig: return "invalid_config";
        case ErrorCode::SchemaViolation: return "schema_violation";
        case ErrorCode::UnknownScenario: return "unknown_scenario";
        case ErrorCode::InsufficientSelected: return "insufficient_selected";
        case ErrorCode::DegenerateDesign: return "degenerate_design";
        case ErrorCode::NonConvergence: return "non_convergence";
        case ErrorCode::SeparationDetected: return "separation_detected";
        case ErrorCode::ZeroDenominator: return "zero_denominator";
        case ErrorCode::NoEffectiveReps: return "no_effective_reps";
    }
    return "unknown";
}

std::string EstimatorSpec::label() const {
    std::ostringstream os;
    os << to_string(kind);
    if (kind == EstimatorKind::IpwRatio) {
        os << "[trim=" << trim.percentile;
        if (weighted_se != WeightedSe::Hc0) os << ",se=" << to_string(weighted_se);
        os << "]";
    }
    if (policy) os << "@" << to_string(*policy);
    return os.str();
}

void validate(const ScenarioConfig& c) {
    if (!finite_all({c.alpha_g, c.alpha_u, c.beta_x, c.beta_u, c.beta_0, c.gamma_0, c.gamma_x,
                     c.gamma_u, c.gamma_y}))
        throw InvalidConfig("all coefficients must be finite");
    if (c.alpha_g * c.alpha_g + c.alpha_u * c.alpha_u > 1.0 + kVarianceSlack)
        throw InvalidConfig("alpha_g^2 + alpha_u^2 <= 1");
    if (c.outcome_kind == OutcomeKind::Continuous &&
        c.beta_x * c.beta_x + c.beta_u * c.beta_u > 1.0 + kVarianceSlack)
        throw InvalidConfig("beta_x^2 + beta_u^2 <= 1 for a continuous outcome");
    if (c.population_size < 1) throw InvalidConfig("population_size >= 1");
    if (c.sample_size < 1) throw InvalidConfig("sample_size >= 1");
    if (c.sample_size > c.population_size) throw InvalidConfig("sample_size <= population_size");
    if (c.reps < 1) throw InvalidConfig("reps >= 1");
    if (c.estimator_plan.empty()) throw InvalidConfig("estimator plan must not be empty");
    for (const auto& e : c.estimator_plan) {
        if (!(e.trim.percentile > 0.0 && e.trim.percentile <= 100.0))
            throw InvalidConfig("trim percentile in (0, 100]");
    }
}

bool has_degenerate_exposure_residual(const ScenarioConfig& c) {
    return std::abs(1.0 - c.alpha_g * c.alpha_g - c.alpha_u * c.alpha_u) <= kVarianceSlack;
}

double exposure_residual_sd(const ScenarioConfig& c) {
    return std::sqrt(std::max(0.0, 1.0 - c.alpha_g * c.alpha_g - c.alpha_u * c.alpha_u));
}

double outcome_residual_sd(const ScenarioConfig& c) {
    return std::sqrt(std::max(0.0, 1.0 - c.beta_x * c.beta_x - c.beta_u * c.beta_u));
}

const char* to_string(OutcomeKind kind) {
    return kind == OutcomeKind::Continuous ? "continuous" : "binary";
}

const char* to_string(SelectionPolicy policy) {
    switch (policy) {
        case SelectionPolicy::RandomAmongSelected: return "random_among_selected";
        case SelectionPolicy::FirstNSelected: return "first_n_selected";
        case SelectionPolicy::FirstNPopulation: return "first_n_population";
    }
    return "?";
}

const char* to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Ratio: return "ratio";
        case EstimatorKind::IpwRatio: return "ipw_ratio";
        case EstimatorKind::LogisticAssociation: return "logistic_association";
    }
    return "?";
}

const char* to_string(WeightedSe se) { return se == WeightedSe::Hc0 ? "hc0" : "model"; }

std::optional<OutcomeKind> outcome_kind_from_string(const std::string& s) {
    if (s == "continuous") return OutcomeKind::Continuous;
    if (s == "binary") return OutcomeKind::Binary;
    return std::nullopt;
}

std::optional<SelectionPolicy> selection_policy_from_string(const std::string& s) {
    for (auto p : {SelectionPolicy::RandomAmongSelected, SelectionPolicy::FirstNSelected,
                   SelectionPolicy::FirstNPopulation})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

std::optional<EstimatorKind> estimator_kind_from_string(const std::string& s) {
    for (auto k : {EstimatorKind::Ratio, EstimatorKind::IpwRatio, EstimatorKind::LogisticAssociation})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

std::optional<WeightedSe> weighted_se_from_string(const std::string& s) {
    if (s == "hc0") return WeightedSe::Hc0;
    if (s == "model") return WeightedSe::Model;
    return std::nullopt;
}

}  // namespace mrsel
