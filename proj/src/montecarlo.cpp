#include "mrsel/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <ostream>

#include <omp.h>

#include "mrsel/model.hpp"
#include "mrsel/random.hpp"
#include "mrsel/report.hpp"

namespace mrsel {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double f_statistic(std::span<const double> g, std::span<const double> x) {
    const auto n = static_cast<double>(g.size());
    double mg = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        mg += g[i];
        mx += x[i];
    }
    mg /= n;
    mx /= n;
    double sgg = 0.0, sxx = 0.0, sgx = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double dg = g[i] - mg, dx = x[i] - mx;
        sgg += dg * dg;
        sxx += dx * dx;
        sgx += dg * dx;
    }
    const double r2 = sgx * sgx / (sgg * sxx);
    return (n - 2.0) * r2 / (1.0 - r2);
}

// Sample columns gathered once per policy and shared by the estimators using it.
struct AnalysisSample {
    SampleIndex index;
    std::vector<double> g, x, y;
    std::optional<std::vector<double>> ipw_raw;
};

EstimateResult run_estimator(const EstimatorSpec& spec, const Cohort& cohort, AnalysisSample& a,
                             bool& extreme) {
    const bool binary = cohort.outcome == OutcomeKind::Binary;
    switch (spec.kind) {
        case EstimatorKind::Ratio: {
            const EstimateResult den = ols_simple(a.g, a.x);
            const EstimateResult num = binary ? logistic_slope(a.g, a.y) : ols_simple(a.g, a.y);
            return ratio_estimate(num, den);
        }
        case EstimatorKind::IpwRatio: {
            if (!a.ipw_raw) a.ipw_raw = ipw_weights(cohort, a.index);
            const IpwEstimate ipw =
                ipw_ratio_from_weights(cohort, a.index, *a.ipw_raw, spec.trim, spec.weighted_se);
            extreme = ipw.extreme_weights();
            return ipw.estimate;
        }
        case EstimatorKind::LogisticAssociation:
            return logistic_slope(a.g, a.y);
    }
    throw InvalidConfig("unknown estimator kind");
}

}  // namespace

std::uint64_t derive_rep_seed(std::uint64_t master_seed, std::string_view scenario_id,
                              std::uint64_t rep_index) {
    const std::uint64_t stream_key = mix64(mix64(master_seed) ^ fnv1a(scenario_id));
    return mix64(stream_key ^ rep_index);
}

RepRecord run_replication(const ScenarioConfig& config, std::string_view scenario_id,
                          std::int64_t rep_index) {
    RandomStream stream(derive_rep_seed(config.master_seed, scenario_id,
                                        static_cast<std::uint64_t>(rep_index)));
    const Cohort cohort = generate_cohort(config, stream);
    const auto n = static_cast<std::size_t>(config.sample_size);

    RepRecord record;
    record.rep_index = rep_index;
    record.selected_count = cohort.selected_count();

    // Main sample first, then any per-estimator overrides in plan order.
    std::map<SelectionPolicy, AnalysisSample> samples;
    auto sample_for = [&](SelectionPolicy policy) -> AnalysisSample& {
        auto it = samples.find(policy);
        if (it != samples.end()) return it->second;
        AnalysisSample a;
        a.index = draw_sample(cohort, n, policy, stream);
        a.g = gather(cohort.g, a.index);
        a.x = gather(cohort.x, a.index);
        a.y = gather(cohort.y, a.index);
        return samples.emplace(policy, std::move(a)).first->second;
    };

    try {
        const AnalysisSample& main = sample_for(config.selection_policy);
        record.f_statistic = f_statistic(main.g, main.x);
        for (const auto& spec : config.estimator_plan) sample_for(spec.policy.value_or(config.selection_policy));
    } catch (const InsufficientSelected&) {
        record.feasible = false;
        throw;
    }

    record.outcomes.reserve(config.estimator_plan.size());
    for (const auto& spec : config.estimator_plan) {
        EstimatorOutcome outcome;
        try {
            AnalysisSample& a = sample_for(spec.policy.value_or(config.selection_policy));
            outcome.result = run_estimator(spec, cohort, a, outcome.extreme_weights);
        } catch (const Error& e) {
            outcome.error = e.code();
        }
        record.outcomes.push_back(outcome);
    }
    return record;
}

double median(std::vector<double> values) {
    if (values.empty()) throw NoEffectiveReps();
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

SummaryStats summarize(const std::vector<RepRecord>& records, std::size_t estimator_index) {
    SummaryStats s;
    std::vector<double> estimates, ses;
    estimates.reserve(records.size());
    ses.reserve(records.size());
    std::int64_t rejections = 0;
    for (const auto& r : records) {
        const EstimatorOutcome& o = r.outcomes.at(estimator_index);
        if (o.extreme_weights) ++s.n_extreme_weights;
        if (!o.ok()) {
            ++s.n_errors;
            continue;
        }
        estimates.push_back(o.result->beta_hat);
        ses.push_back(o.result->se);
        if (std::abs(o.result->z) > kCriticalZ) ++rejections;
    }
    if (estimates.empty()) throw NoEffectiveReps();

    const auto count = static_cast<double>(estimates.size());
    s.n_effective_reps = static_cast<std::int64_t>(estimates.size());
    double sum = 0.0;
    for (double e : estimates) sum += e;
    s.mean = sum / count;
    double ss = 0.0;
    for (double e : estimates) ss += (e - s.mean) * (e - s.mean);
    s.sd = estimates.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    double se_sum = 0.0;
    for (double v : ses) se_sum += v;
    const double se_mean = se_sum / count;
    double se_ss = 0.0;
    for (double v : ses) se_ss += (v - se_mean) * (v - se_mean);
    s.sd_se = ses.size() > 1 ? std::sqrt(se_ss / (count - 1.0)) : 0.0;
    s.median = median(std::move(estimates));
    s.median_se = median(std::move(ses));
    s.rejection_rate = static_cast<double>(rejections) / count;

    s.mcse_mean = s.sd / std::sqrt(count);
    s.mcse_median = std::sqrt(std::numbers::pi / 2.0) * s.mcse_mean;
    s.mcse_rate = std::sqrt(s.rejection_rate * (1.0 - s.rejection_rate) / count);
    return s;
}

std::int64_t ScenarioRun::total_errors() const {
    std::int64_t n = 0;
    for (const auto& r : records)
        for (const auto& o : r.outcomes) n += !o.ok();
    return n;
}

namespace {

ScenarioRun finish(const ScenarioConfig& config, const std::string& scenario_id,
                   std::vector<RepRecord> records) {
    ScenarioRun run;
    run.scenario_id = scenario_id;
    run.config = config;
    run.records = std::move(records);
    for (std::size_t e = 0; e < config.estimator_plan.size(); ++e) {
        try {
            run.summaries.emplace_back(summarize(run.records, e));
        } catch (const NoEffectiveReps&) {
            run.summaries.emplace_back(std::nullopt);
        }
    }
    double f_sum = 0.0;
    for (const auto& r : run.records) f_sum += r.f_statistic;
    run.mean_f_statistic = f_sum / static_cast<double>(run.records.size());
    return run;
}

}  // namespace

ScenarioRun run_scenario(const ScenarioConfig& config, const std::string& scenario_id,
                         const RunOptions& options) {
    validate(config);
    const std::int64_t reps = config.reps;
    std::vector<RepRecord> records(static_cast<std::size_t>(reps));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(reps));
    const int workers = options.workers > 0 ? options.workers : default_worker_count();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t rep = 0; rep < reps; ++rep) {
        try {
            records[static_cast<std::size_t>(rep)] = run_replication(config, scenario_id, rep);
        } catch (...) {
            failures[static_cast<std::size_t>(rep)] = std::current_exception();
        }
    }

    // Surface the lowest-index failure, matching what the serial loop would throw.
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return finish(config, scenario_id, std::move(records));
}

ScenarioRun run_scenario_serial(const ScenarioConfig& config, const std::string& scenario_id) {
    validate(config);
    std::vector<RepRecord> records;
    records.reserve(static_cast<std::size_t>(config.reps));
    for (std::int64_t rep = 0; rep < config.reps; ++rep)
        records.push_back(run_replication(config, scenario_id, rep));
    return finish(config, scenario_id, std::move(records));
}

int default_worker_count() { return std::max(1, omp_get_max_threads()); }

void write_per_rep_csv_header(std::ostream& os) {
    os << "scenario_id,rep_index,estimator,beta_hat,se,z,f_stat,error_code\n";
}

void write_per_rep_csv(std::ostream& os, const ScenarioRun& run) {
    for (const auto& r : run.records) {
        for (std::size_t e = 0; e < r.outcomes.size(); ++e) {
            const EstimatorOutcome& o = r.outcomes[e];
            os << csv_field(run.scenario_id) << ',' << r.rep_index << ','
               << csv_field(run.config.estimator_plan[e].label()) << ',';
            if (o.ok())
                os << format_real(o.result->beta_hat) << ',' << format_real(o.result->se) << ','
                   << format_real(o.result->z);
            else
                os << ",,";
            os << ',' << format_real(r.f_statistic) << ',' << error_code_name(o.error) << '\n';
        }
    }
}

}  // namespace mrsel
