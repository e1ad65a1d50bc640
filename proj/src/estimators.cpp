#include "mrsel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrsel/errors.hpp"

namespace mrsel {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw DegenerateDesign(std::string(what) + " lengths differ");
}

struct Moments {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
};

double median_of(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace

EstimateResult EstimateResult::make(double beta_hat, double se, std::size_t n_used) {
    EstimateResult r;
    r.beta_hat = beta_hat;
    r.se = se;
    r.n_used = n_used;
    if (se > 0.0)
        r.z = beta_hat / se;
    else
        r.z = beta_hat == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), beta_hat);
    return r;
}

EstimateResult ols_simple(std::span<const double> predictor, std::span<const double> response) {
    require_same_length(predictor.size(), response.size(), "predictor and response");
    const std::size_t n = predictor.size();
    if (n < 3) throw DegenerateDesign("ols needs at least 3 observations");

    Moments m;
    for (std::size_t i = 0; i < n; ++i) {
        m.mean_x += predictor[i];
        m.mean_y += response[i];
    }
    m.mean_x /= static_cast<double>(n);
    m.mean_y /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = predictor[i] - m.mean_x;
        m.sxx += dx * dx;
        m.sxy += dx * (response[i] - m.mean_y);
    }
    if (!(m.sxx > 0.0)) throw DegenerateDesign("predictor has zero variance");

    const double slope = m.sxy / m.sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (response[i] - m.mean_y) - slope * (predictor[i] - m.mean_x);
        rss += r * r;
    }
    const double sigma2 = rss / static_cast<double>(n - 2);
    return EstimateResult::make(slope, std::sqrt(sigma2 / m.sxx), n);
}

EstimateResult ols_weighted(std::span<const double> predictor, std::span<const double> response,
                            std::span<const double> weights, WeightedSe se_kind) {
    require_same_length(predictor.size(), response.size(), "predictor and response");
    require_same_length(predictor.size(), weights.size(), "predictor and weights");
    const std::size_t n = predictor.size();
    if (n < 3) throw DegenerateDesign("ols needs at least 3 observations");

    double sum_w = 0.0;
    Moments m;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights[i];
        if (!(w > 0.0) || !std::isfinite(w)) throw DegenerateDesign("weights must be positive and finite");
        sum_w += w;
        m.mean_x += w * predictor[i];
        m.mean_y += w * response[i];
    }
    m.mean_x /= sum_w;
    m.mean_y /= sum_w;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = predictor[i] - m.mean_x;
        m.sxx += weights[i] * dx * dx;
        m.sxy += weights[i] * dx * (response[i] - m.mean_y);
    }
    if (!(m.sxx > 0.0)) throw DegenerateDesign("predictor has zero weighted variance");

    const double slope = m.sxy / m.sxx;
    double meat = 0.0;
    double weighted_rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = predictor[i] - m.mean_x;
        const double r = (response[i] - m.mean_y) - slope * dx;
        const double wdr = weights[i] * dx * r;
        meat += wdr * wdr;
        weighted_rss += weights[i] * r * r;
    }
    double var;
    if (se_kind == WeightedSe::Hc0)
        var = meat / (m.sxx * m.sxx);
    else
        var = weighted_rss / static_cast<double>(n - 2) / m.sxx;
    return EstimateResult::make(slope, std::sqrt(var), n);
}

LogisticFit logistic_fit(const Eigen::MatrixXd& design, std::span<const double> response,
                         std::span<const double> weights, const IrlsOptions& options) {
    const auto n = static_cast<std::size_t>(design.rows());
    const auto p = static_cast<Eigen::Index>(design.cols());
    require_same_length(n, response.size(), "design and response");
    const bool weighted = !weights.empty();
    if (weighted) require_same_length(n, weights.size(), "design and weights");
    if (p < 1) throw DegenerateDesign("empty design");

    std::size_t ones = 0;
    for (double yi : response) {
        if (yi != 0.0 && yi != 1.0) throw DegenerateDesign("logistic response must be 0/1");
        ones += yi == 1.0;
    }
    if (ones == 0 || ones == n) throw DegenerateDesign("logistic response has a single class");

    // One pass: log-likelihood, information X'VX and score X'(y - mu) at beta.
    Eigen::MatrixXd info(p, p);
    Eigen::VectorXd score(p);
    std::vector<double> row(static_cast<std::size_t>(p));
    auto evaluate = [&](const Eigen::VectorXd& beta) {
        info.setZero();
        score.setZero();
        double loglik = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double eta = 0.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                row[static_cast<std::size_t>(j)] = design(static_cast<Eigen::Index>(i), j);
                eta += row[static_cast<std::size_t>(j)] * beta[j];
            }
            const double e = std::exp(-std::abs(eta));
            const double mu = eta >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
            const double w = weighted ? weights[i] : 1.0;
            loglik += w * (response[i] * eta - (std::max(eta, 0.0) + std::log1p(e)));
            const double v = w * mu * (1.0 - mu);
            const double resid = w * (response[i] - mu);
            for (Eigen::Index j = 0; j < p; ++j) {
                const double xj = row[static_cast<std::size_t>(j)];
                score[j] += xj * resid;
                for (Eigen::Index k = 0; k <= j; ++k) info(j, k) += v * xj * row[static_cast<std::size_t>(k)];
            }
        }
        for (Eigen::Index j = 0; j < p; ++j)
            for (Eigen::Index k = j + 1; k < p; ++k) info(j, k) = info(k, j);
        return loglik;
    };

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double loglik = evaluate(beta);
    for (int it = 1; it <= options.max_iterations; ++it) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw DegenerateDesign("information matrix is singular");
        Eigen::VectorXd step = ldlt.solve(score);
        if (!step.allFinite()) throw DegenerateDesign("information matrix is singular");

        // Newton step with halving; the log-likelihood is concave so a
        // shortened step along the Newton direction eventually increases it.
        Eigen::VectorXd candidate = beta + step;
        double candidate_loglik = evaluate(candidate);
        for (int half = 0; half < 30 && candidate_loglik < loglik - 1e-12 * std::abs(loglik); ++half) {
            step *= 0.5;
            candidate = beta + step;
            candidate_loglik = evaluate(candidate);
        }
        if (candidate.cwiseAbs().maxCoeff() > options.separation_bound) throw SeparationDetected();

        beta = candidate;
        loglik = candidate_loglik;
        if (step.cwiseAbs().maxCoeff() < options.tolerance) {
            // info was evaluated at the accepted beta by the last evaluate() call.
            const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
            LogisticFit fit;
            fit.coef = beta;
            fit.se = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
            fit.iterations = it;
            return fit;
        }
    }
    throw NonConvergence(options.max_iterations);
}

EstimateResult logistic_slope(std::span<const double> predictor, std::span<const double> response,
                              std::span<const double> weights) {
    const auto n = static_cast<Eigen::Index>(predictor.size());
    Eigen::MatrixXd design(n, 2);
    design.col(0).setOnes();
    for (Eigen::Index i = 0; i < n; ++i) design(i, 1) = predictor[static_cast<std::size_t>(i)];
    const LogisticFit fit = logistic_fit(design, response, weights);
    return EstimateResult::make(fit.coef[1], fit.se[1], predictor.size());
}

EstimateResult ratio_estimate(const EstimateResult& numerator, const EstimateResult& denominator) {
    if (denominator.beta_hat == 0.0) throw ZeroDenominator();
    return EstimateResult::make(numerator.beta_hat / denominator.beta_hat,
                                numerator.se / std::abs(denominator.beta_hat), numerator.n_used);
}

double percentile(std::span<const double> values, double p) {
    if (values.empty()) throw DegenerateDesign("percentile of an empty vector");
    std::vector<double> v(values.begin(), values.end());
    const std::size_t n = v.size();
    // Nearest rank: the smallest order statistic with empirical CDF >= p / 100.
    const double rank = std::ceil(p / 100.0 * static_cast<double>(n));
    const std::size_t k = rank < 1.0 ? 0 : std::min(n - 1, static_cast<std::size_t>(rank) - 1);
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

std::vector<double> trim_weights(std::span<const double> weights, const TrimSpec& spec) {
    std::vector<double> out(weights.begin(), weights.end());
    if (spec.is_identity() || out.empty()) return out;
    const double threshold = percentile(weights, spec.percentile);
    for (double& w : out) w = std::min(w, threshold);
    return out;
}

std::vector<double> ipw_weights(const Cohort& cohort, const SampleIndex& sample) {
    const auto n = static_cast<Eigen::Index>(cohort.size());
    Eigen::MatrixXd design(n, 2);
    design.col(0).setOnes();
    std::vector<double> s(cohort.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        design(i, 1) = cohort.x[static_cast<std::size_t>(i)];
        s[static_cast<std::size_t>(i)] = cohort.s[static_cast<std::size_t>(i)];
    }
    const LogisticFit fit = logistic_fit(design, s);

    std::vector<double> w(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const double pi_hat = expit(fit.coef[0] + fit.coef[1] * cohort.x[sample.indices[k]]);
        w[k] = 1.0 / pi_hat;
    }
    return w;
}

IpwEstimate ipw_ratio_from_weights(const Cohort& cohort, const SampleIndex& sample,
                                   std::span<const double> raw_weights, const TrimSpec& trim,
                                   WeightedSe se) {
    const std::vector<double> w = trim_weights(raw_weights, trim);
    const std::vector<double> g = gather(cohort.g, sample);
    const std::vector<double> x = gather(cohort.x, sample);
    const std::vector<double> y = gather(cohort.y, sample);

    const bool binary = cohort.outcome == OutcomeKind::Binary;
    const EstimateResult den = ols_weighted(g, x, w, se);
    const EstimateResult num = binary ? logistic_slope(g, y, w) : ols_weighted(g, y, w, se);

    IpwEstimate out;
    out.estimate = ratio_estimate(num, den);
    out.max_to_median_weight = *std::max_element(w.begin(), w.end()) / median_of(w);
    return out;
}

IpwEstimate ipw_pipeline(const Cohort& cohort, const SampleIndex& sample, const TrimSpec& trim,
                         WeightedSe se) {
    const std::vector<double> raw = ipw_weights(cohort, sample);
    return ipw_ratio_from_weights(cohort, sample, raw, trim, se);
}

}  // namespace mrsel
