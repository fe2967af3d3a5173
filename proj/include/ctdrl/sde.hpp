#pragma once

#include <cstdint>
#include <string>

#include "ctdrl/env.hpp"
#include "ctdrl/imputation_types.hpp"
#include "ctdrl/linalg.hpp"
#include "ctdrl/rng.hpp"

namespace ctdrl {

struct SimConfig {
    double dt = 1e-3;
    double horizon = 10.0;
    long n_paths = 1;
    std::uint64_t seed = 0;
};

// dt/horizon sanity plus the truncation-tail bound: the discounted reward
// mass beyond the horizon, max|r| * gamma^T / log(1/gamma), must not exceed
// 1e-4 * max(return width, 1).
void validate_sim(const SimConfig& cfg, const EnvSpec& env);

// Smallest horizon passing validate_sim's tail bound for this env.
double default_horizon(const EnvSpec& env);

// Sorted Monte Carlo returns drawn from one origin state.
struct EmpiricalReturnDist {
    Vec samples;        // ascending
    Vec origin_state;
};

// One Euler-Maruyama step, clamped to the state box:
//   x' = clamp(x + mu(x) dt + sigma(x) * noise * sqrt(dt)).
// Throws on a non-finite result (dynamics blow-up).
Vec euler_maruyama_step(const EnvSpec& env, const Vec& x, double dt, const Vec& noise);

// Left-Riemann sum of the discounted reward along one simulated path:
//   sum_k gamma^{k dt} r(x_k) dt  over  k dt < horizon.
double sample_return(const EnvSpec& env, const Vec& x0, const SimConfig& cfg, CounterRng& rng);

// n_paths independent returns, sorted ascending. Deterministic in
// (env, x0, cfg): path k always consumes stream (seed, k) regardless of
// thread schedule. The _serial variant is the reference implementation the
// parallel kernel is tested and benchmarked against. Aborted paths
// (non-finite states) raise with a count rather than being resampled.
EmpiricalReturnDist mc_return_distribution(const EnvSpec& env, const Vec& x0, const SimConfig& cfg);
EmpiricalReturnDist mc_return_distribution_serial(const EnvSpec& env, const Vec& x0, const SimConfig& cfg);

// Fraction of samples <= z; right-continuous.
double empirical_cdf(const EmpiricalReturnDist& d, double z);

// Midpoint-level quantiles (2i-1)/(2N) of the empirical distribution,
// each the first sorted sample whose ECDF reaches the level.
StatVec empirical_quantiles(const EmpiricalReturnDist& d, int n_stats);

// One return per line under a "return" header.
void write_samples_csv(const std::string& path, const EmpiricalReturnDist& d);

}  // namespace ctdrl
