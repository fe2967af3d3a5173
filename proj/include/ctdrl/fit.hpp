#pragma once

#include <string>
#include <vector>

#include "ctdrl/env.hpp"
#include "ctdrl/hjb.hpp"
#include "ctdrl/sde.hpp"
#include "ctdrl/statfn.hpp"

namespace ctdrl {

// Monte Carlo return distributions at the anchor states, collected once and
// reusable across fits with different statistic counts. Anchor k draws from
// the derived stream (sim.seed, k), so anchors are mutually independent.
struct ReturnData {
    std::vector<Vec> anchors;
    std::vector<EmpiricalReturnDist> dists;
};

ReturnData collect_return_data(const EnvSpec& env, const std::vector<Vec>& anchors, const SimConfig& sim);

struct FitReport {
    Vec anchor_rmse;               // per-anchor RMS quantile residual
    double max_kolmogorov = 0.0;   // worst-anchor distance between fitted imputation and MC oracle
    double condition = 0.0;        // normal-equation condition number
    bool ill_conditioned = false;  // condition above 1e12
    long iterations = 0;
    double final_weak_loss = 0.0;  // filled by callers that evaluate the weak loss
};

// Ridge least squares of basis coefficients against the empirical midpoint
// quantiles at each anchor; offsets are the unpenalized intercepts.
StatFn fit_quantiles(const EnvSpec& env, const ReturnData& data, int n_stats, double ridge,
                     FitReport* report = nullptr, int n_features = 25);

// collect_return_data + fit_quantiles in one call.
StatFn fit_quantiles_mc(const EnvSpec& env, const std::vector<Vec>& anchors, int n_stats, const SimConfig& sim,
                        double ridge, FitReport* report = nullptr, int n_features = 25);

struct MinimizeOptions {
    double step = 1e-2;
    int iterations = 100;
    std::vector<Vec> probe_states;
    double bandwidth = 0.05;
    int n_quad = 0;        // 0 = resolution picked from the bandwidth
    double fd_step = 1e-6; // coefficient-space central-difference step
};

struct MinimizeResult {
    StatFn sf;    // best-so-far iterate
    Vec trace;    // best-so-far mean weak loss per iteration, nonincreasing
    long loss_evaluations = 0;
};

// Fixed-step gradient descent on the mean over probe states of the weak
// loss, with coefficient gradients by central finite differences. Aborts
// with a diagnostic on a non-finite loss.
MinimizeResult minimize_shjb(const EnvSpec& env, const StatFn& sf0, const TestFunctionFamily& fam,
                             const MinimizeOptions& opt);

// Rows (iter, loss).
void write_trace_csv(const std::string& path, const Vec& trace);

}  // namespace ctdrl
