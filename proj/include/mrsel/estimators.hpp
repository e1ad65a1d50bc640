#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mrsel/config.hpp"
#include "mrsel/model.hpp"

namespace mrsel {

struct EstimateResult {
    double beta_hat = 0.0;
    double se = 0.0;
    double z = 0.0;
    std::size_t n_used = 0;

    // z = beta_hat / se; a zero SE gives 0 for a zero estimate and +-inf otherwise.
    static EstimateResult make(double beta_hat, double se, std::size_t n_used);
};

// Slope of response on predictor with an intercept. SE is the classical
// homoskedastic slope SE with an n - 2 residual denominator.
EstimateResult ols_simple(std::span<const double> predictor, std::span<const double> response);

// Weighted least-squares slope with an intercept. Weights must be positive and finite.
EstimateResult ols_weighted(std::span<const double> predictor, std::span<const double> response,
                            std::span<const double> weights, WeightedSe se = WeightedSe::Hc0);

struct LogisticFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    int iterations = 0;
};

struct IrlsOptions {
    int max_iterations = 50;
    double tolerance = 1e-8;        // max |coefficient change|
    double separation_bound = 30.0;  // any |coefficient| above this aborts the fit
};

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares. The design must carry its own intercept column. Optional weights
// multiply each row's log-likelihood contribution. SEs come from the inverse
// information matrix at the optimum.
LogisticFit logistic_fit(const Eigen::MatrixXd& design, std::span<const double> response,
                         std::span<const double> weights = {}, const IrlsOptions& options = {});

// Convenience: logistic regression of response on (1, predictor); returns the slope.
EstimateResult logistic_slope(std::span<const double> predictor, std::span<const double> response,
                              std::span<const double> weights = {});

// First-order delta method ignoring uncertainty in the denominator.
EstimateResult ratio_estimate(const EstimateResult& numerator, const EstimateResult& denominator);

// Nearest-rank percentile: the ceil(p n / 100)-th smallest value. Always one of
// the inputs, so capping at it is idempotent.
double percentile(std::span<const double> values, double p);

// Caps every weight above the given percentile at that percentile.
std::vector<double> trim_weights(std::span<const double> weights, const TrimSpec& spec);

struct IpwEstimate {
    EstimateResult estimate;
    double max_to_median_weight = 1.0;  // after trimming

    bool extreme_weights() const { return max_to_median_weight > 1e4; }
};

// Untrimmed inverse-probability weights for the sampled rows. The working
// selection model is S ~ (1, X) fitted on the full population; it omits U and
// Y even when selection depends on them.
std::vector<double> ipw_weights(const Cohort& cohort, const SampleIndex& sample);

// Ratio of weighted instrument-outcome over weighted instrument-exposure
// regressions on the sample. For a binary outcome the numerator is a weighted
// logistic regression.
IpwEstimate ipw_ratio_from_weights(const Cohort& cohort, const SampleIndex& sample,
                                   std::span<const double> raw_weights, const TrimSpec& trim,
                                   WeightedSe se = WeightedSe::Hc0);

IpwEstimate ipw_pipeline(const Cohort& cohort, const SampleIndex& sample, const TrimSpec& trim,
                         WeightedSe se = WeightedSe::Hc0);

}  // namespace mrsel
