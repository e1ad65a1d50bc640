#include <cmath>
#include <limits>
#include <set>

#include "mrsel/errors.hpp"
#include "mrsel/scenarios.hpp"

namespace mrsel {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.contains(key)) throw SchemaViolation(path + "." + key, "unknown key");
}

const json& require_object(const json& doc, const std::string& key, const std::string& path) {
    if (!doc.contains(key)) throw SchemaViolation(path + key, "missing section");
    const json& v = doc.at(key);
    if (!v.is_object()) throw SchemaViolation(path + key, "expected an object");
    return v;
}

double get_real(const json& obj, const char* key, const std::string& path, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw SchemaViolation(path + "." + key, "missing required field");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw SchemaViolation(path + "." + key, "expected a number");
    return v.get<double>();
}

std::int64_t get_int(const json& obj, const char* key, const std::string& path,
                     std::optional<std::int64_t> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw SchemaViolation(path + "." + key, "missing required field");
    }
    const json& v = obj.at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    }
    throw SchemaViolation(path + "." + key, "expected an integer");
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaViolation(path, "expected a string");
    return v.get<std::string>();
}

SelectionPolicy parse_policy(const json& v, const std::string& path) {
    const auto s = get_string(v, path);
    const auto p = selection_policy_from_string(s);
    if (!p) throw SchemaViolation(path, "unknown policy '" + s + "'");
    return *p;
}

EstimatorSpec parse_estimator(const json& e, const std::string& path) {
    if (!e.is_object()) throw SchemaViolation(path, "expected an object");
    reject_unknown_keys(e, path, {"kind", "trim_percentile", "se", "policy"});
    if (!e.contains("kind")) throw SchemaViolation(path + ".kind", "missing required field");
    EstimatorSpec spec;
    const auto kind_name = get_string(e.at("kind"), path + ".kind");
    const auto kind = estimator_kind_from_string(kind_name);
    if (!kind) throw SchemaViolation(path + ".kind", "unknown estimator '" + kind_name + "'");
    spec.kind = *kind;
    spec.trim.percentile = get_real(e, "trim_percentile", path, 100.0);
    if (e.contains("se")) {
        const auto name = get_string(e.at("se"), path + ".se");
        const auto se = weighted_se_from_string(name);
        if (!se) throw SchemaViolation(path + ".se", "unknown standard error '" + name + "'");
        spec.weighted_se = *se;
    }
    if (e.contains("policy")) spec.policy = parse_policy(e.at("policy"), path + ".policy");
    if (spec.kind != EstimatorKind::IpwRatio && (e.contains("trim_percentile") || e.contains("se")))
        throw SchemaViolation(path, "trim_percentile and se apply to ipw_ratio only");
    return spec;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw SchemaViolation("$", "expected an object");
    reject_unknown_keys(doc, "$", {"dgp", "sampling", "run", "estimators"});
    ScenarioConfig c;

    const json& dgp = require_object(doc, "dgp", "$.");
    reject_unknown_keys(dgp, "$.dgp",
                        {"alpha_g", "alpha_u", "beta_x", "beta_u", "outcome", "gamma_0", "gamma_x", "gamma_u",
                         "gamma_y"});
    c.alpha_g = get_real(dgp, "alpha_g", "$.dgp");
    c.alpha_u = get_real(dgp, "alpha_u", "$.dgp");
    c.beta_x = get_real(dgp, "beta_x", "$.dgp");
    c.beta_u = get_real(dgp, "beta_u", "$.dgp");
    c.gamma_0 = get_real(dgp, "gamma_0", "$.dgp");
    c.gamma_x = get_real(dgp, "gamma_x", "$.dgp");
    c.gamma_u = get_real(dgp, "gamma_u", "$.dgp");
    c.gamma_y = get_real(dgp, "gamma_y", "$.dgp", 0.0);
    if (dgp.contains("outcome")) {
        const json& o = dgp.at("outcome");
        if (!o.is_object()) throw SchemaViolation("$.dgp.outcome", "expected an object");
        reject_unknown_keys(o, "$.dgp.outcome", {"kind", "beta_0"});
        if (!o.contains("kind")) throw SchemaViolation("$.dgp.outcome.kind", "missing required field");
        const auto name = get_string(o.at("kind"), "$.dgp.outcome.kind");
        const auto kind = outcome_kind_from_string(name);
        if (!kind) throw SchemaViolation("$.dgp.outcome.kind", "unknown outcome kind '" + name + "'");
        c.outcome_kind = *kind;
        if (c.outcome_kind == OutcomeKind::Binary)
            c.beta_0 = get_real(o, "beta_0", "$.dgp.outcome");
        else if (o.contains("beta_0"))
            throw SchemaViolation("$.dgp.outcome.beta_0", "only valid for a binary outcome");
    }

    const json& sampling = require_object(doc, "sampling", "$.");
    reject_unknown_keys(sampling, "$.sampling", {"population_size", "sample_size", "policy"});
    c.population_size = get_int(sampling, "population_size", "$.sampling");
    c.sample_size = get_int(sampling, "sample_size", "$.sampling");
    if (sampling.contains("policy")) c.selection_policy = parse_policy(sampling.at("policy"), "$.sampling.policy");

    const json& run = require_object(doc, "run", "$.");
    reject_unknown_keys(run, "$.run", {"reps", "master_seed"});
    c.reps = get_int(run, "reps", "$.run");
    if (!run.contains("master_seed")) throw SchemaViolation("$.run.master_seed", "missing required field");
    const json& seed = run.at("master_seed");
    if (seed.is_number_unsigned())
        c.master_seed = seed.get<std::uint64_t>();
    else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)
        c.master_seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
    else
        throw SchemaViolation("$.run.master_seed", "expected a non-negative integer");

    if (doc.contains("estimators")) {
        const json& list = doc.at("estimators");
        if (!list.is_array()) throw SchemaViolation("$.estimators", "expected an array");
        c.estimator_plan.clear();
        for (std::size_t i = 0; i < list.size(); ++i)
            c.estimator_plan.push_back(parse_estimator(list[i], "$.estimators[" + std::to_string(i) + "]"));
    }

    validate(c);
    return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaViolation("$", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json serialize_config(const ScenarioConfig& c) {
    json outcome{{"kind", to_string(c.outcome_kind)}};
    if (c.outcome_kind == OutcomeKind::Binary) outcome["beta_0"] = c.beta_0;
    json estimators = json::array();
    for (const auto& e : c.estimator_plan) {
        json j{{"kind", to_string(e.kind)}};
        if (e.kind == EstimatorKind::IpwRatio) {
            j["trim_percentile"] = e.trim.percentile;
            j["se"] = to_string(e.weighted_se);
        }
        if (e.policy) j["policy"] = to_string(*e.policy);
        estimators.push_back(std::move(j));
    }
    return json{
        {"dgp",
         {{"alpha_g", c.alpha_g},
          {"alpha_u", c.alpha_u},
          {"beta_x", c.beta_x},
          {"beta_u", c.beta_u},
          {"outcome", outcome},
          {"gamma_0", c.gamma_0},
          {"gamma_x", c.gamma_x},
          {"gamma_u", c.gamma_u},
          {"gamma_y", c.gamma_y}}},
        {"sampling",
         {{"population_size", c.population_size},
          {"sample_size", c.sample_size},
          {"policy", to_string(c.selection_policy)}}},
        {"run", {{"reps", c.reps}, {"master_seed", c.master_seed}}},
        {"estimators", estimators},
    };
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw SchemaViolation(assignment, "override must be key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    std::vector<std::string> parts;
    for (std::size_t start = 0;;) {
        const auto dot = path.find('.', start);
        parts.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    // A bare key is looked up in the sections that hold scalar fields.
    if (parts.size() == 1 && !doc.contains(parts[0])) {
        std::vector<std::string> hits;
        for (const char* section : {"dgp", "sampling", "run"})
            if (doc.contains(section) && doc[section].contains(parts[0])) hits.emplace_back(section);
        if (doc.contains("dgp") && doc["dgp"].contains("outcome") && doc["dgp"]["outcome"].contains(parts[0]))
            hits.emplace_back("dgp.outcome");
        if (hits.size() != 1)
            throw SchemaViolation(path, hits.empty() ? "no such field" : "ambiguous field; use a dotted path");
        std::vector<std::string> full;
        for (std::size_t start = 0;;) {
            const auto dot = hits[0].find('.', start);
            full.push_back(hits[0].substr(start, dot - start));
            if (dot == std::string::npos) break;
            start = dot + 1;
        }
        full.push_back(parts[0]);
        parts = std::move(full);
    }

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &doc;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        json& next = (*node)[parts[i]];
        if (next.is_null()) next = json::object();
        if (!next.is_object()) throw SchemaViolation(path, "'" + parts[i] + "' is not an object");
        node = &next;
    }
    (*node)[parts.back()] = std::move(value);
}

}  // namespace mrsel
