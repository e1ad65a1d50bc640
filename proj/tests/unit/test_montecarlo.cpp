#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <unordered_set>

#include "mrsel/errors.hpp"
#include "mrsel/montecarlo.hpp"

using namespace mrsel;

namespace {

ScenarioConfig small_config() {
    ScenarioConfig c;
    c.alpha_g = std::sqrt(0.05);
    c.alpha_u = std::sqrt(0.5);
    c.beta_u = std::sqrt(0.5);
    c.gamma_x = -1.0;
    c.gamma_u = 0.5;
    c.population_size = 4000;
    c.sample_size = 1000;
    c.reps = 48;
    c.master_seed = 123;
    EstimatorSpec ipw;
    ipw.kind = EstimatorKind::IpwRatio;
    ipw.trim = TrimSpec{95.0};
    c.estimator_plan = {EstimatorSpec{}, ipw};
    return c;
}

RepRecord record_with(std::vector<double> betas, std::vector<double> ses) {
    RepRecord r;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        EstimatorOutcome o;
        o.result = EstimateResult::make(betas[i], ses[i], 100);
        r.outcomes.push_back(o);
    }
    return r;
}

RepRecord failed_record(ErrorCode code) {
    RepRecord r;
    EstimatorOutcome o;
    o.error = code;
    r.outcomes.push_back(o);
    return r;
}

void check_same_run(const ScenarioRun& a, const ScenarioRun& b) {
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const auto& ra = a.records[i];
        const auto& rb = b.records[i];
        CHECK(ra.rep_index == rb.rep_index);
        CHECK(ra.f_statistic == rb.f_statistic);
        REQUIRE(ra.outcomes.size() == rb.outcomes.size());
        for (std::size_t e = 0; e < ra.outcomes.size(); ++e) {
            REQUIRE(ra.outcomes[e].ok() == rb.outcomes[e].ok());
            CHECK(ra.outcomes[e].error == rb.outcomes[e].error);
            if (ra.outcomes[e].ok()) {
                CHECK(ra.outcomes[e].result->beta_hat == rb.outcomes[e].result->beta_hat);
                CHECK(ra.outcomes[e].result->se == rb.outcomes[e].result->se);
            }
        }
    }
    CHECK(a.summaries == b.summaries);
    CHECK(a.mean_f_statistic == b.mean_f_statistic);
}

}  // namespace

TEST_CASE("replication seeds are distinct over 100k reps") {
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t rep = 0; rep < 100000; ++rep) seen.insert(derive_rep_seed(20190318, "table1/gx=-2", rep));
    CHECK(seen.size() == 100000);
    // Other cells and master seeds start other streams.
    CHECK(derive_rep_seed(1, "a", 0) != derive_rep_seed(1, "b", 0));
    CHECK(derive_rep_seed(1, "a", 0) != derive_rep_seed(2, "a", 0));
    CHECK(derive_rep_seed(1, "a", 5) == derive_rep_seed(1, "a", 5));
}

TEST_CASE("replication is a pure function of its inputs") {
    const auto c = small_config();
    const auto a = run_replication(c, "cell", 7);
    const auto b = run_replication(c, "cell", 7);
    const auto other = run_replication(c, "cell", 8);
    CHECK(a.outcomes[0].result->beta_hat == b.outcomes[0].result->beta_hat);
    CHECK(a.outcomes[0].result->beta_hat != other.outcomes[0].result->beta_hat);
    CHECK(a.rep_index == 7);
    CHECK(a.f_statistic > 0.0);
    CHECK(a.selected_count > 1000);
}

TEST_CASE("results do not depend on the worker count") {
    const auto c = small_config();
    const auto serial = run_scenario_serial(c, "cell");
    const auto one = run_scenario(c, "cell", {1});
    const auto eight = run_scenario(c, "cell", {8});
    check_same_run(serial, one);
    check_same_run(one, eight);
    std::ostringstream a, b;
    write_per_rep_csv(a, one);
    write_per_rep_csv(b, eight);
    CHECK(a.str() == b.str());
}

TEST_CASE("summary statistics") {
    SUBCASE("four estimates") {
        std::vector<RepRecord> records;
        for (double b : {1.0, 2.0, 3.0, 4.0}) records.push_back(record_with({b}, {b / 2.0}));
        const auto s = summarize(records, 0);
        CHECK(s.mean == 2.5);
        CHECK(s.median == 2.5);  // midpoint of the two middle values
        CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
        CHECK(s.median_se == 1.25);
        CHECK(s.rejection_rate == 1.0);  // every z is 2
        CHECK(s.n_effective_reps == 4);
        CHECK(s.mcse_mean == doctest::Approx(s.sd / 2.0));
        CHECK(s.mcse_median == doctest::Approx(std::sqrt(M_PI / 2.0) * s.sd / 2.0));
        CHECK(s.mcse_rate == 0.0);
    }
    SUBCASE("a single replication has zero SD") {
        const auto s = summarize({record_with({0.3}, {0.1})}, 0);
        CHECK(s.sd == 0.0);
        CHECK(s.median == 0.3);
        CHECK(s.mean == 0.3);
    }
    SUBCASE("rejection uses a strict inequality") {
        std::vector<RepRecord> records{record_with({1.96}, {1.0}), record_with({-1.9600001}, {1.0}),
                                       record_with({0.5}, {1.0}), record_with({3.0}, {1.0})};
        const auto s = summarize(records, 0);
        CHECK(s.rejection_rate == 0.5);
        CHECK(s.mcse_rate == doctest::Approx(0.25));
    }
    SUBCASE("failed fits are excluded and counted") {
        std::vector<RepRecord> records{record_with({1.0}, {1.0}), failed_record(ErrorCode::SeparationDetected),
                                       record_with({3.0}, {1.0})};
        const auto s = summarize(records, 0);
        CHECK(s.n_effective_reps == 2);
        CHECK(s.n_errors == 1);
        CHECK(s.mean == 2.0);
    }
    SUBCASE("no effective replications") {
        CHECK_THROWS_AS(summarize({failed_record(ErrorCode::NonConvergence)}, 0), NoEffectiveReps);
    }
}

TEST_CASE("median") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK_THROWS_AS(median({}), NoEffectiveReps);
}

TEST_CASE("infeasible selection propagates") {
    auto c = small_config();
    c.gamma_0 = -6.0;
    CHECK_THROWS_AS(run_scenario(c, "cell", {2}), InsufficientSelected);
    CHECK_THROWS_AS(run_scenario_serial(c, "cell"), InsufficientSelected);
}

TEST_CASE("per-policy samples for one replication") {
    auto c = small_config();
    c.outcome_kind = OutcomeKind::Binary;
    c.beta_0 = -1.0;
    c.selection_policy = SelectionPolicy::FirstNSelected;
    EstimatorSpec population;
    population.kind = EstimatorKind::LogisticAssociation;
    population.policy = SelectionPolicy::FirstNPopulation;
    EstimatorSpec selected;
    selected.kind = EstimatorKind::LogisticAssociation;
    c.estimator_plan = {population, selected};
    const auto r = run_replication(c, "lpa", 0);
    REQUIRE(r.outcomes.size() == 2);
    REQUIRE(r.outcomes[0].ok());
    REQUIRE(r.outcomes[1].ok());
    CHECK(r.outcomes[0].result->beta_hat != r.outcomes[1].result->beta_hat);
}

TEST_CASE("per-replication CSV layout") {
    auto c = small_config();
    c.reps = 3;
    const auto run = run_scenario(c, "my,cell", {1});
    std::ostringstream os;
    write_per_rep_csv_header(os);
    write_per_rep_csv(os, run);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "scenario_id,rep_index,estimator,beta_hat,se,z,f_stat,error_code");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(line.starts_with("\"my,cell\","));
    }
    CHECK(rows == 6);
}
