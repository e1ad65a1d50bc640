#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "mrsel/errors.hpp"
#include "mrsel/scenarios.hpp"

using namespace mrsel;
using nlohmann::json;

namespace {

const ExpectedValue* find_expected(const CatalogEntry& e, const std::string& key, std::size_t est, Column col) {
    for (const auto& x : e.expected)
        if (x.cell_key == key && x.estimator == est && x.column == col) return &x;
    return nullptr;
}

json valid_doc() {
    return json::parse(R"({
      "dgp": {"alpha_g": 0.1414, "alpha_u": 0.7071, "beta_x": 0, "beta_u": 0.7071,
              "outcome": {"kind": "continuous"},
              "gamma_0": 0, "gamma_x": -1, "gamma_u": 0, "gamma_y": 0},
      "sampling": {"population_size": 100000, "sample_size": 10000, "policy": "random_among_selected"},
      "run": {"reps": 2000, "master_seed": 20190318},
      "estimators": [{"kind": "ratio"}, {"kind": "ipw_ratio", "trim_percentile": 99}]
    })");
}

}  // namespace

TEST_CASE("catalog sizes match the source tables") {
    const std::map<std::string, std::pair<std::size_t, std::size_t>> sizes{
        {"table1", {9, 45}},
        {"table2", {111, 222}},
        {"scenario5.gammaU+1", {9, 18}},
        {"scenario6.gamma0-2.4", {7, 14}},
        {"table3", {27, 27 * 3 * 4}},
        {"lpa.table4", {6, 18}},
        {"appendix.A1.direction", {27, 27 * 4}},
        {"appendix.A2.signs", {32, 32}},
        {"appendix.A3.nonnull", {9, 45}},
        {"appendix.A4.outcome-selection", {36, 36 * 4}},
        {"appendix.A5.binary", {27, 27 * 4}},
        {"appendix.A6.misspecified-ipw", {9, 9 * 3 * 4}},
    };
    for (const auto& [id, n] : sizes) {
        CAPTURE(id);
        const auto& e = catalog_lookup(id);
        CHECK(e.grid.size() == n.first);
        CHECK(e.expected.size() == n.second);
    }
}

TEST_CASE("catalog entries are self-consistent") {
    std::set<std::string> ids;
    for (const auto& e : catalog()) {
        CAPTURE(e.id);
        CHECK(ids.insert(e.id).second);
        std::set<std::string> keys;
        for (const auto& cell : e.grid) {
            CHECK(keys.insert(cell.key).second);
            CHECK_NOTHROW(validate(cell.config));
            CHECK(cell.config.estimator_plan.size() == e.estimator_names.size());
            CHECK(cell.config.master_seed == kDefaultMasterSeed);
            CHECK(cell.id.find('/') != std::string::npos);
        }
        for (const auto& x : e.expected) {
            const auto* cell = e.find_cell(x.cell_key);
            REQUIRE(cell != nullptr);
            CHECK(x.estimator < cell->config.estimator_plan.size());
            CHECK_FALSE(x.citation.empty());
        }
    }
}

TEST_CASE("combined views share seeds with their blocks") {
    const auto& combined = catalog_lookup("table2");
    const auto& block = catalog_lookup("scenario5.gammaU+1");
    const auto* a = combined.find_cell("scenario5.gammaU+1/gx=-0.5");
    const auto* b = block.find_cell("gx=-0.5");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(a->id == b->id);
    CHECK(a->config == b->config);
}

TEST_CASE("transcribed values and designs") {
    const auto& t1 = catalog_lookup("table1");
    REQUIRE(find_expected(t1, "gx=-2", 0, Column::Mean));
    CHECK(find_expected(t1, "gx=-2", 0, Column::Mean)->value == -0.296);
    CHECK(find_expected(t1, "gx=0", 0, Column::RejectionRate)->value == doctest::Approx(0.051));
    CHECK(t1.find_cell("gx=-2")->config.gamma_x == -2.0);
    CHECK(t1.find_cell("gx=-2")->config.alpha_g == std::sqrt(0.02));

    const auto& lpa = catalog_lookup("lpa");
    const std::vector<double> with_selection{0.149, 0.145, 0.133, 0.102, 0.077, 0.061};
    for (std::size_t i = 0; i < lpa.grid.size(); ++i) {
        const auto& cell = lpa.grid[i];
        CHECK(find_expected(lpa, cell.key, 1, Column::Mean)->value == with_selection[i]);
        CHECK(cell.config.sample_size == 3313);
        CHECK(cell.config.beta_u == cell.config.gamma_u);
        CHECK(cell.config.outcome_kind == OutcomeKind::Binary);
        CHECK(cell.config.estimator_plan[0].policy == SelectionPolicy::FirstNPopulation);
    }
    CHECK(find_expected(lpa, "gU=2", 1, Column::RejectionRate)->value == doctest::Approx(0.304));

    const auto& s6 = catalog_lookup("scenario6.gamma0-2.4");
    CHECK(s6.grid.front().config.sample_size == 500);
    CHECK(s6.grid.front().config.gamma_0 == -2.4);

    const auto& a6 = catalog_lookup("tableA6");
    CHECK(a6.find_cell("gx=-2")->config.alpha_u == std::sqrt(0.1));
    CHECK(find_expected(a6, "gx=-2", 0, Column::Median)->value == 0.158);
    CHECK(a6.grid.front().config.estimator_plan[2].trim.percentile == 95.0);
}

TEST_CASE("sign table") {
    const auto& a2 = catalog_lookup("appendix.A2.signs");
    CHECK(find_expected(a2, "gU+,gX+,aU+,bU+/|gx|=0.5", 0, Column::Sign)->value == -1);
    CHECK(find_expected(a2, "gU+,gX+,aU+,bU+/|gx|=2", 0, Column::Sign)->value == -1);
    // "-/+" cell: down when moderate, up when strong.
    CHECK(find_expected(a2, "gU+,gX+,aU-,bU+/|gx|=0.5", 0, Column::Sign)->value == -1);
    CHECK(find_expected(a2, "gU+,gX+,aU-,bU+/|gx|=2", 0, Column::Sign)->value == 1);
    const auto* cell = a2.find_cell("gU-,gX+,aU-,bU-/|gx|=2");
    REQUIRE(cell);
    CHECK(cell->config.gamma_u == -1.0);
    CHECK(cell->config.gamma_x == 2.0);
    CHECK(cell->config.alpha_u < 0);
    CHECK(cell->config.beta_u < 0);
}

TEST_CASE("lookup and aliases") {
    CHECK(&catalog_lookup("table4") == &catalog_lookup("lpa.table4"));
    CHECK(&catalog_lookup("tableA4") == &catalog_lookup("appendix.A4.outcome-selection"));
    try {
        catalog_lookup("table9");
        FAIL("expected UnknownScenario");
    } catch (const UnknownScenario& e) {
        CHECK(std::string(e.what()).find("table1") != std::string::npos);
        CHECK(std::string(e.what()).find("appendix.A6.misspecified-ipw") != std::string::npos);
    }
}

TEST_CASE("tolerances scale with replications") {
    const auto& t1 = catalog_lookup("table1");
    const auto* mean = find_expected(t1, "gx=-2", 0, Column::Mean);
    const auto* rate = find_expected(t1, "gx=0", 0, Column::RejectionRate);
    SummaryStats s;
    s.sd = 0.123;
    s.sd_se = 0.01;
    CHECK(mean->tolerance(10000, s) == doctest::Approx(4 * 0.123 / 100 + kRoundingHalfUnit));
    CHECK(mean->tolerance_at_reference_scale(s) == mean->tolerance(10000, s));
    CHECK(mean->tolerance(2000, s) - kRoundingHalfUnit ==
          doctest::Approx(std::sqrt(5.0) * (mean->tolerance(10000, s) - kRoundingHalfUnit)));
    // Rate floor of one percentage point at reference scale, widened below it.
    CHECK(rate->tolerance(10000, s) == doctest::Approx(0.01 + kRoundingHalfUnit));
    CHECK(rate->tolerance(2000, s) == doctest::Approx(0.01 * std::sqrt(5.0) + kRoundingHalfUnit));
    const auto* high = find_expected(t1, "gx=-2", 0, Column::RejectionRate);
    CHECK(high->tolerance(10000, s) == doctest::Approx(4 * std::sqrt(0.777 * 0.223 / 10000) + kRoundingHalfUnit));

    s.mean = -0.296 + 0.9 * (mean->tolerance(10000, s));
    CHECK(mean->passes(s, 10000));
    s.mean = -0.296 - 1.1 * (mean->tolerance(10000, s));
    CHECK_FALSE(mean->passes(s, 10000));
}

TEST_CASE("sign-only and informational values") {
    ExpectedValue sign;
    sign.column = Column::Sign;
    sign.kind = ToleranceKind::SignOnly;
    sign.value = -1;
    SummaryStats s;
    s.median = -0.01;
    CHECK(sign.passes(s, 50));
    s.median = 0.01;
    CHECK_FALSE(sign.passes(s, 50));
    ExpectedValue info;
    info.column = Column::Sd;
    info.kind = ToleranceKind::Informational;
    info.value = 6.499;
    CHECK(info.passes(s, 2000));
}

TEST_CASE("config JSON round-trips for every catalog cell") {
    for (const auto& e : catalog())
        for (const auto& cell : e.grid) {
            const auto doc = serialize_config(cell.config);
            CHECK(parse_config(doc) == cell.config);
            CHECK(parse_config_text(doc.dump()) == cell.config);
        }
}

TEST_CASE("config parsing") {
    const auto c = parse_config(valid_doc());
    CHECK(c.gamma_x == -1.0);
    CHECK(c.estimator_plan.size() == 2);
    CHECK(c.estimator_plan[1].kind == EstimatorKind::IpwRatio);
    CHECK(c.estimator_plan[1].trim.percentile == 99.0);
    CHECK(c.estimator_plan[1].weighted_se == WeightedSe::Hc0);

    auto no_plan = valid_doc();
    no_plan.erase("estimators");
    no_plan["dgp"].erase("gamma_y");
    no_plan["sampling"].erase("policy");
    const auto d = parse_config(no_plan);
    CHECK(d.estimator_plan == std::vector<EstimatorSpec>{EstimatorSpec{}});
    CHECK(d.gamma_y == 0.0);
    CHECK(d.selection_policy == SelectionPolicy::RandomAmongSelected);

    auto binary = valid_doc();
    binary["dgp"]["outcome"] = {{"kind", "binary"}, {"beta_0", -1.4}};
    CHECK(parse_config(binary).beta_0 == -1.4);
}

TEST_CASE("invalid configs") {
    auto expect_schema = [](json doc, const std::string& path) {
        try {
            parse_config(doc);
            FAIL("expected SchemaViolation at " << path);
        } catch (const SchemaViolation& e) {
            CHECK(e.path() == path);
        }
    };
    auto doc = valid_doc();
    doc["dgp"]["alpha_x"] = 1;
    expect_schema(doc, "$.dgp.alpha_x");
    doc = valid_doc();
    doc["dgp"].erase("beta_u");
    expect_schema(doc, "$.dgp.beta_u");
    doc = valid_doc();
    doc["dgp"]["gamma_x"] = "strong";
    expect_schema(doc, "$.dgp.gamma_x");
    doc = valid_doc();
    doc["sampling"]["policy"] = "everyone";
    expect_schema(doc, "$.sampling.policy");
    doc = valid_doc();
    doc["run"]["reps"] = 2.5;
    expect_schema(doc, "$.run.reps");
    doc = valid_doc();
    doc["run"]["master_seed"] = -1;
    expect_schema(doc, "$.run.master_seed");
    doc = valid_doc();
    doc["estimators"][0]["trim_percentile"] = 95;
    expect_schema(doc, "$.estimators[0]");
    doc = valid_doc();
    doc["estimators"][1]["kind"] = "median";
    expect_schema(doc, "$.estimators[1].kind");
    doc = valid_doc();
    doc["dgp"]["outcome"] = {{"kind", "binary"}};
    expect_schema(doc, "$.dgp.outcome.beta_0");
    expect_schema(json::array(), "$");
    CHECK_THROWS_AS(parse_config_text("{not json"), SchemaViolation);

    doc = valid_doc();
    doc["dgp"]["alpha_u"] = 0.999;
    CHECK_THROWS_AS(parse_config(doc), InvalidConfig);
    doc = valid_doc();
    doc["sampling"]["sample_size"] = 100001;
    CHECK_THROWS_AS(parse_config(doc), InvalidConfig);
    doc = valid_doc();
    doc["run"]["reps"] = 0;
    CHECK_THROWS_AS(parse_config(doc), InvalidConfig);
    doc = valid_doc();
    doc["estimators"] = json::array();
    CHECK_THROWS_AS(parse_config(doc), InvalidConfig);
    doc = valid_doc();
    doc["estimators"][1]["trim_percentile"] = 0;
    CHECK_THROWS_AS(parse_config(doc), InvalidConfig);
}

TEST_CASE("overrides") {
    auto doc = valid_doc();
    apply_override(doc, "gamma_x=0.5");
    apply_override(doc, "sampling.sample_size=500");
    apply_override(doc, "reps=1");
    apply_override(doc, "policy=first_n_selected");
    apply_override(doc, R"(estimators=[{"kind":"ratio"}])");
    const auto c = parse_config(doc);
    CHECK(c.gamma_x == 0.5);
    CHECK(c.sample_size == 500);
    CHECK(c.reps == 1);
    CHECK(c.selection_policy == SelectionPolicy::FirstNSelected);
    CHECK(c.estimator_plan.size() == 1);

    CHECK_THROWS_AS(apply_override(doc, "nonsense=1"), SchemaViolation);
    CHECK_THROWS_AS(apply_override(doc, "gamma_x"), SchemaViolation);
    CHECK_THROWS_AS(apply_override(doc, "=1"), SchemaViolation);
    apply_override(doc, "dgp.gamma_z=1");  // lands in the document, rejected on parse
    CHECK_THROWS_AS(parse_config(doc), SchemaViolation);
}
