#pragma once

#include <string>
#include <vector>

#include "ctdrl/env.hpp"
#include "ctdrl/imputation_types.hpp"
#include "ctdrl/linalg.hpp"

namespace ctdrl {

// Smooth statistics function s: state box -> R^N as a Gaussian radial basis
// expansion, s_k(x) = offsets_k + sum_j weights(k,j) exp(-|x-c_j|^2/(2 l^2)).
// Infinitely differentiable with closed-form Jacobian and Hessians.
struct StatFn {
    Mat centers;             // J x d feature centers
    double lengthscale = 1.0;
    Mat weights;             // N x J
    Vec offsets;             // N

    int n_stats() const { return weights.rows; }
    int n_features() const { return centers.rows; }
    int dim() const { return centers.cols; }
};

void validate_statfn(const StatFn& sf);

// s(x), Jacobian J_x s (N x d), and per-statistic spatial Hessians (d x d).
struct StatsEval {
    Vec s;
    Mat jac;
    std::vector<Mat> hess;
};

void statfn_eval_into(const StatFn& sf, const Vec& x, StatsEval& out);
StatsEval statfn_eval(const StatFn& sf, const Vec& x);

// N-statistic representation over a 1-D state box: n_features centers on a
// uniform grid, lengthscale twice the grid spacing, zero coefficients.
StatFn make_grid_statfn(const EnvSpec& env, int n_stats, int n_features = 25);

// Uniform 1-D feature grid matching make_grid_statfn, reused as anchor
// states when fitting.
std::vector<Vec> grid_states(const EnvSpec& env, int n_points);

// Pool-adjacent-violators projection: nearest nondecreasing vector in
// squared distance.
Vec isotonic_project(const Vec& s);

// Predicted quantile statistics at x with the monotonicity invariant
// restored by projection. Derivative paths read the raw expansion instead:
// the mollified CDF is invariant under atom reordering.
StatVec predict_quantiles(const StatFn& sf, const Vec& x);

std::string statfn_to_json(const StatFn& sf);
StatFn statfn_from_json(const std::string& text);

}  // namespace ctdrl
