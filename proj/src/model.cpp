#include "mrsel/model.hpp"

#include <algorithm>
#include <numeric>

#include "mrsel/errors.hpp"

namespace mrsel {

std::size_t Cohort::selected_count() const {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
}

Cohort generate_cohort(const ScenarioConfig& c, RandomStream& stream) {
    validate(c);
    const auto n = static_cast<std::size_t>(c.population_size);
    const double sd_x = exposure_residual_sd(c);
    const double sd_y = outcome_residual_sd(c);
    const bool binary = c.outcome_kind == OutcomeKind::Binary;

    Cohort out;
    out.outcome = c.outcome_kind;
    out.g.resize(n);
    out.u.resize(n);
    out.x.resize(n);
    out.y.resize(n);
    out.pi_s.resize(n);
    out.s.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double g = stream.normal();
        const double u = stream.normal();
        const double ex = stream.normal();
        const double x = c.alpha_g * g + c.alpha_u * u + sd_x * ex;
        double y;
        if (binary) {
            const double p_y = expit(c.beta_0 + c.beta_x * x + c.beta_u * u);
            y = stream.uniform() < p_y ? 1.0 : 0.0;
        } else {
            const double ey = stream.normal();
            y = c.beta_x * x + c.beta_u * u + sd_y * ey;
        }
        const double pi = expit(c.gamma_0 + c.gamma_x * x + c.gamma_u * u + c.gamma_y * y);
        out.g[i] = g;
        out.u[i] = u;
        out.x[i] = x;
        out.y[i] = y;
        out.pi_s[i] = pi;
        out.s[i] = stream.uniform() < pi ? 1 : 0;
    }
    return out;
}

SampleIndex draw_sample(const Cohort& cohort, std::size_t n, SelectionPolicy policy,
                        RandomStream& stream) {
    const std::size_t total = cohort.size();
    if (n > total) throw InvalidConfig("sample_size <= population_size");

    SampleIndex out;
    out.policy_used = policy;
    out.indices.reserve(n);

    if (policy == SelectionPolicy::FirstNPopulation) {
        out.indices.resize(n);
        std::iota(out.indices.begin(), out.indices.end(), 0u);
        return out;
    }

    const std::size_t available = cohort.selected_count();
    if (available < n) throw InsufficientSelected(available, n);

    if (policy == SelectionPolicy::FirstNSelected) {
        for (std::size_t i = 0; i < total && out.indices.size() < n; ++i)
            if (cohort.s[i]) out.indices.push_back(static_cast<std::uint32_t>(i));
        return out;
    }

    // Selection sampling (Knuth, Algorithm S) over the selected rows: each
    // n-subset is equally likely and the output comes out ascending.
    std::size_t seen = 0;
    for (std::size_t i = 0; i < total && out.indices.size() < n; ++i) {
        if (!cohort.s[i]) continue;
        const std::size_t needed = n - out.indices.size();
        const std::size_t remaining = available - seen;
        if (static_cast<double>(remaining) * stream.uniform() < static_cast<double>(needed))
            out.indices.push_back(static_cast<std::uint32_t>(i));
        ++seen;
    }
    return out;
}

std::vector<double> gather(std::span<const double> column, const SampleIndex& sample) {
    std::vector<double> out(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) out[k] = column[sample.indices[k]];
    return out;
}

}  // namespace mrsel
