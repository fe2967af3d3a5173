#pragma once

#include <string>

#include "ctdrl/linalg.hpp"

namespace ctdrl {

enum class StatKind { quantile, categorical_probs, gaussian_params };

// A finite vector of distribution statistics plus the convention needed to
// read it: N quantile atoms, N category probabilities, or (mean, variance).
struct StatVec {
    Vec values;
    StatKind kind = StatKind::quantile;
};

std::string stat_kind_name(StatKind kind);
StatKind stat_kind_from_name(const std::string& name);

// Kind-specific invariants: quantile vectors nondecreasing (and inside the
// return interval when one is supplied), categorical vectors on the simplex
// within 1e-12, gaussian vectors (mu, sigma2 >= 0) of length 2.
void validate_stats(const StatVec& s, const double* v_min = nullptr, const double* v_max = nullptr);

std::string stats_to_json(const StatVec& s);
StatVec stats_from_json(const std::string& text);

}  // namespace ctdrl
