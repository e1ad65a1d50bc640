#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "mrsel/config.hpp"
#include "mrsel/random.hpp"

namespace mrsel {

// Numerically safe inverse logit; never overflows for any finite input.
inline double expit(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

// log(p / (1 - p)) without cancellation near p = 0.
inline double logit(double p) { return std::log(p) - std::log1p(-p); }

// Generated population in structure-of-arrays layout. Immutable once built.
struct Cohort {
    std::vector<double> g;     // instrument
    std::vector<double> u;     // confounder
    std::vector<double> x;     // risk factor
    std::vector<double> y;     // outcome (0/1 for a binary outcome)
    std::vector<double> pi_s;  // selection probability
    std::vector<std::uint8_t> s;
    OutcomeKind outcome = OutcomeKind::Continuous;

    std::size_t size() const { return g.size(); }
    std::size_t selected_count() const;
};

struct SampleIndex {
    std::vector<std::uint32_t> indices;  // always ascending
    SelectionPolicy policy_used = SelectionPolicy::RandomAmongSelected;

    std::size_t size() const { return indices.size(); }
};

// Draws N rows from the structural model:
//   X = aG G + aU U + sqrt(1 - aG^2 - aU^2) eX
//   Y = bX X + bU U + sqrt(1 - bX^2 - bU^2) eY      (continuous)
//   Y ~ Bernoulli(expit(b0 + bX X + bU U))          (binary)
//   S ~ Bernoulli(expit(g0 + gX X + gU U + gY Y))
// Per row the stream is consumed as G, U, eX, eY (continuous only), then the
// binary-outcome uniform, then the selection uniform.
Cohort generate_cohort(const ScenarioConfig& config, RandomStream& stream);

// Throws InsufficientSelected when a selection-based policy needs more S = 1 rows than exist.
SampleIndex draw_sample(const Cohort& cohort, std::size_t n, SelectionPolicy policy,
                        RandomStream& stream);

// Copies column[indices] into a contiguous vector.
std::vector<double> gather(std::span<const double> column, const SampleIndex& sample);

}  // namespace mrsel
