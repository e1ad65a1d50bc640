#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mrsel/errors.hpp"
#include "mrsel/model.hpp"

using namespace mrsel;

namespace {

ScenarioConfig base_config() {
    ScenarioConfig c;
    c.alpha_g = std::sqrt(0.02);
    c.alpha_u = std::sqrt(0.5);
    c.beta_u = std::sqrt(0.5);
    c.population_size = 200000;
    c.sample_size = 1000;
    c.master_seed = 1;
    return c;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double cov(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean(a), mb = mean(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / (a.size() - 1);
}

}  // namespace

TEST_CASE("expit is stable and symmetric") {
    CHECK(expit(0.0) == 0.5);
    CHECK(expit(1000.0) == 1.0);
    CHECK(expit(-1000.0) == 0.0);
    CHECK(std::isfinite(expit(-745.0)));
    for (double eta = -30.0; eta <= 30.0; eta += 0.37)
        CHECK(expit(-eta) == doctest::Approx(1.0 - expit(eta)).epsilon(1e-14));
}

TEST_CASE("logit inverts expit for moderate linear predictors") {
    for (double eta = -5.0; eta <= 5.0; eta += 0.01) CHECK(std::abs(logit(expit(eta)) - eta) < 1e-12);
}

TEST_CASE("random streams are reproducible") {
    RandomStream a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        differs |= x != c.normal();
        const double u = a.uniform();
        CHECK(u == b.uniform());
        c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(differs);
}

TEST_CASE("cohort moments follow the structural model") {
    auto c = base_config();
    c.beta_x = 0.3;
    c.beta_u = 0.5;
    RandomStream stream(7);
    const Cohort cohort = generate_cohort(c, stream);
    REQUIRE(cohort.size() == 200000);
    // X is standardized; Y picks up 2 bX bU cov(X, U) on top of unit variance.
    CHECK(cov(cohort.x, cohort.x) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(cov(cohort.y, cohort.y) == doctest::Approx(1.0 + 2 * c.beta_x * c.beta_u * c.alpha_u).epsilon(0.02));
    CHECK(cov(cohort.g, cohort.x) == doctest::Approx(c.alpha_g).epsilon(0.1));
    CHECK(cov(cohort.u, cohort.x) == doctest::Approx(c.alpha_u).epsilon(0.02));
    CHECK(std::abs(cov(cohort.g, cohort.u)) < 0.01);
    // No selection effects: about half the population is selected.
    CHECK(static_cast<double>(cohort.selected_count()) / cohort.size() == doctest::Approx(0.5).epsilon(0.01));
    for (std::size_t i = 0; i < 100; ++i) CHECK(cohort.pi_s[i] == 0.5);
}

TEST_CASE("selection probabilities use the full linear predictor") {
    auto c = base_config();
    c.population_size = 1000;
    c.gamma_0 = -1.0;
    c.gamma_x = 0.7;
    c.gamma_u = -0.4;
    c.gamma_y = 0.2;
    RandomStream stream(3);
    const Cohort cohort = generate_cohort(c, stream);
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const double eta = -1.0 + 0.7 * cohort.x[i] - 0.4 * cohort.u[i] + 0.2 * cohort.y[i];
        CHECK(cohort.pi_s[i] == doctest::Approx(expit(eta)).epsilon(1e-15));
        CHECK(logit(cohort.pi_s[i]) == doctest::Approx(eta).epsilon(1e-10));
    }
}

TEST_CASE("binary outcome is 0/1 with the intercept's prevalence") {
    auto c = base_config();
    c.outcome_kind = OutcomeKind::Binary;
    c.beta_0 = -1.4;
    c.beta_u = 0.0;
    RandomStream stream(11);
    const Cohort cohort = generate_cohort(c, stream);
    CHECK(cohort.outcome == OutcomeKind::Binary);
    for (double y : cohort.y) REQUIRE((y == 0.0 || y == 1.0));
    CHECK(mean(cohort.y) == doctest::Approx(expit(-1.4)).epsilon(0.02));
}

TEST_CASE("same seed gives the same cohort") {
    auto c = base_config();
    c.population_size = 5000;
    RandomStream a(99), b(99);
    const Cohort x = generate_cohort(c, a);
    const Cohort y = generate_cohort(c, b);
    CHECK(x.g == y.g);
    CHECK(x.x == y.x);
    CHECK(x.y == y.y);
    CHECK(x.s == y.s);
}

TEST_CASE("exposure without residual error") {
    auto c = base_config();
    c.population_size = 100;
    c.sample_size = 10;
    c.alpha_g = std::sqrt(0.5);
    c.alpha_u = std::sqrt(0.5);
    CHECK(has_degenerate_exposure_residual(c));
    RandomStream stream(5);
    const Cohort cohort = generate_cohort(c, stream);
    for (std::size_t i = 0; i < cohort.size(); ++i)
        CHECK(cohort.x[i] == doctest::Approx(c.alpha_g * cohort.g[i] + c.alpha_u * cohort.u[i]));
}

TEST_CASE("invalid structural coefficients are rejected") {
    auto c = base_config();
    c.alpha_g = 0.8;
    c.alpha_u = 0.8;
    RandomStream stream(1);
    CHECK_THROWS_AS(generate_cohort(c, stream), InvalidConfig);
    c = base_config();
    c.beta_x = 0.9;
    c.beta_u = 0.9;
    CHECK_THROWS_AS(validate(c), InvalidConfig);
    c.outcome_kind = OutcomeKind::Binary;  // no residual scale for a binary outcome
    CHECK_NOTHROW(validate(c));
    c = base_config();
    c.sample_size = c.population_size + 1;
    CHECK_THROWS_AS(validate(c), InvalidConfig);
    c = base_config();
    c.gamma_x = std::nan("");
    CHECK_THROWS_AS(validate(c), InvalidConfig);
}

TEST_CASE("sampling policies") {
    auto c = base_config();
    c.population_size = 20000;
    c.gamma_x = 1.0;
    RandomStream stream(17);
    const Cohort cohort = generate_cohort(c, stream);

    SUBCASE("random among selected") {
        const auto s = draw_sample(cohort, 1000, SelectionPolicy::RandomAmongSelected, stream);
        REQUIRE(s.size() == 1000);
        CHECK(std::is_sorted(s.indices.begin(), s.indices.end()));
        CHECK(std::adjacent_find(s.indices.begin(), s.indices.end()) == s.indices.end());
        for (auto i : s.indices) CHECK(cohort.s[i] == 1);
        // Spread over the whole population rather than its start.
        CHECK(s.indices.back() > cohort.size() / 2);
    }
    SUBCASE("first n selected") {
        const auto s = draw_sample(cohort, 500, SelectionPolicy::FirstNSelected, stream);
        REQUIRE(s.size() == 500);
        std::vector<std::uint32_t> expected;
        for (std::size_t i = 0; expected.size() < 500; ++i)
            if (cohort.s[i]) expected.push_back(static_cast<std::uint32_t>(i));
        CHECK(s.indices == expected);
    }
    SUBCASE("first n of the population") {
        const auto s = draw_sample(cohort, 300, SelectionPolicy::FirstNPopulation, stream);
        REQUIRE(s.size() == 300);
        for (std::uint32_t i = 0; i < 300; ++i) CHECK(s.indices[i] == i);
    }
    SUBCASE("too few selected") {
        const std::size_t available = cohort.selected_count();
        try {
            draw_sample(cohort, available + 1, SelectionPolicy::RandomAmongSelected, stream);
            FAIL("expected InsufficientSelected");
        } catch (const InsufficientSelected& e) {
            CHECK(e.available() == available);
            CHECK(e.required() == available + 1);
        }
        CHECK_THROWS_AS(draw_sample(cohort, available + 1, SelectionPolicy::FirstNSelected, stream),
                        InsufficientSelected);
        const auto all = draw_sample(cohort, available, SelectionPolicy::RandomAmongSelected, stream);
        CHECK(all.size() == available);
    }
}

TEST_CASE("random-among-selected is uniform over the selected rows") {
    // Each selected row should be drawn with probability n / available.
    auto c = base_config();
    c.population_size = 200;
    c.sample_size = 20;
    RandomStream stream(23);
    const Cohort cohort = generate_cohort(c, stream);
    const std::size_t available = cohort.selected_count();
    std::vector<int> hits(cohort.size(), 0);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t)
        for (auto i : draw_sample(cohort, 20, SelectionPolicy::RandomAmongSelected, stream).indices) ++hits[i];
    const double p = 20.0 / static_cast<double>(available);
    const double sd = std::sqrt(trials * p * (1 - p));
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        if (!cohort.s[i]) {
            CHECK(hits[i] == 0);
            continue;
        }
        CHECK(std::abs(hits[i] - trials * p) < 5.0 * sd);
    }
}

TEST_CASE("gather copies sampled rows in order") {
    const std::vector<double> column{10, 11, 12, 13, 14};
    SampleIndex s;
    s.indices = {0, 2, 4};
    CHECK(gather(column, s) == std::vector<double>{10, 12, 14});
}
