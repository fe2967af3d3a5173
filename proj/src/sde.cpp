#include "ctdrl/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctdrl {

namespace {

double tail_tolerance(const EnvSpec& env) {
    const double beta = env.discount_rate();
    const double width = (env.reward_max - env.reward_min) / beta;
    return 1e-4 * std::max(width, 1.0);
}

double tail_mass(const EnvSpec& env, double horizon) {
    const double beta = env.discount_rate();
    const double r_abs = std::max(std::abs(env.reward_min), std::abs(env.reward_max));
    return r_abs * std::pow(env.discount, horizon) / beta;
}

// Shared path loop. Returns the discounted reward sum; sets ok=false on a
// non-finite state.
double run_path(const EnvSpec& env, const Vec& x0, const SimConfig& cfg, CounterRng& rng, bool& ok) {
    const int d = env.dim;
    const int m = env.noise_dim;
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double step_discount = std::exp(std::log(env.discount) * dt);
    const long n_steps = static_cast<long>(std::ceil(cfg.horizon / dt - 1e-12));

    Vec x = x0;
    Vec mu(static_cast<std::size_t>(d));
    Mat sig(d, m);
    Vec noise(static_cast<std::size_t>(m));

    ok = true;
    double ret = 0.0;
    double disc = 1.0;
    for (long k = 0; k < n_steps; ++k) {
        ret += disc * env.reward(x) * dt;
        env.drift(x, mu);
        env.diffusion(x, sig);
        for (int j = 0; j < m; ++j) noise[j] = rng.next_normal();
        for (int i = 0; i < d; ++i) {
            double xi = x[i] + mu[i] * dt;
            for (int j = 0; j < m; ++j) xi += sig(i, j) * noise[j] * sqrt_dt;
            if (!std::isfinite(xi)) {
                ok = false;
                return ret;
            }
            x[i] = std::clamp(xi, env.state_lo[i], env.state_hi[i]);
        }
        disc *= step_discount;
    }
    if (!std::isfinite(ret)) ok = false;
    return ret;
}

EmpiricalReturnDist mc_impl(const EnvSpec& env, const Vec& x0, const SimConfig& cfg, bool parallel) {
    validate_sim(cfg, env);
    if (static_cast<int>(x0.size()) != env.dim) throw std::invalid_argument("mc: x0 dimension mismatch");

    EmpiricalReturnDist d;
    d.origin_state = x0;
    d.samples.assign(static_cast<std::size_t>(cfg.n_paths), 0.0);
    std::vector<unsigned char> aborted(static_cast<std::size_t>(cfg.n_paths), 0);

#pragma omp parallel for schedule(static) if (parallel)
    for (long p = 0; p < cfg.n_paths; ++p) {
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(p));
        bool ok = true;
        d.samples[static_cast<std::size_t>(p)] = run_path(env, x0, cfg, rng, ok);
        if (!ok) aborted[static_cast<std::size_t>(p)] = 1;
    }

    long n_aborted = 0;
    for (unsigned char a : aborted) n_aborted += a;
    if (n_aborted > 0)
        throw std::runtime_error("mc_return_distribution: " + std::to_string(n_aborted) +
                                 " of " + std::to_string(cfg.n_paths) + " paths hit non-finite states");

    std::sort(d.samples.begin(), d.samples.end());
    return d;
}

}  // namespace

void validate_sim(const SimConfig& cfg, const EnvSpec& env) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
    if (!(cfg.dt <= cfg.horizon)) throw std::invalid_argument("sim: dt must not exceed horizon");
    if (cfg.n_paths < 1) throw std::invalid_argument("sim: n_paths must be positive");
    if (tail_mass(env, cfg.horizon) > tail_tolerance(env))
        throw std::invalid_argument("sim: horizon too short, truncated discounted tail exceeds tolerance");
}

double default_horizon(const EnvSpec& env) {
    const double beta = env.discount_rate();
    const double r_abs = std::max(std::abs(env.reward_min), std::abs(env.reward_max));
    if (r_abs == 0.0) return 1.0;
    // r_abs * gamma^T / beta <= tol  =>  T >= log(r_abs / (beta tol)) / beta
    const double t = std::log(r_abs / (beta * tail_tolerance(env))) / beta;
    return std::max(1.0, std::ceil(t));
}

Vec euler_maruyama_step(const EnvSpec& env, const Vec& x, double dt, const Vec& noise) {
    if (!(dt > 0.0)) throw std::invalid_argument("euler_maruyama_step: dt must be positive");
    if (static_cast<int>(noise.size()) != env.noise_dim)
        throw std::invalid_argument("euler_maruyama_step: noise width mismatch");
    Vec mu(static_cast<std::size_t>(env.dim));
    Mat sig(env.dim, env.noise_dim);
    env.drift(x, mu);
    env.diffusion(x, sig);
    const double sqrt_dt = std::sqrt(dt);
    Vec out(static_cast<std::size_t>(env.dim));
    for (int i = 0; i < env.dim; ++i) {
        double xi = x[i] + mu[i] * dt;
        for (int j = 0; j < env.noise_dim; ++j) xi += sig(i, j) * noise[j] * sqrt_dt;
        if (!std::isfinite(xi)) throw std::runtime_error("euler_maruyama_step: non-finite state (dynamics blow-up)");
        out[static_cast<std::size_t>(i)] = std::clamp(xi, env.state_lo[i], env.state_hi[i]);
    }
    return out;
}

double sample_return(const EnvSpec& env, const Vec& x0, const SimConfig& cfg, CounterRng& rng) {
    validate_sim(cfg, env);
    bool ok = true;
    const double ret = run_path(env, x0, cfg, rng, ok);
    if (!ok) throw std::runtime_error("sample_return: path hit a non-finite state");
    return ret;
}

EmpiricalReturnDist mc_return_distribution(const EnvSpec& env, const Vec& x0, const SimConfig& cfg) {
    return mc_impl(env, x0, cfg, true);
}

EmpiricalReturnDist mc_return_distribution_serial(const EnvSpec& env, const Vec& x0, const SimConfig& cfg) {
    return mc_impl(env, x0, cfg, false);
}

double empirical_cdf(const EmpiricalReturnDist& d, double z) {
    if (d.samples.empty()) throw std::invalid_argument("empirical_cdf: no samples");
    const auto it = std::upper_bound(d.samples.begin(), d.samples.end(), z);
    return static_cast<double>(it - d.samples.begin()) / static_cast<double>(d.samples.size());
}

StatVec empirical_quantiles(const EmpiricalReturnDist& d, int n_stats) {
    if (d.samples.empty()) throw std::invalid_argument("empirical_quantiles: no samples");
    if (n_stats < 1) throw std::invalid_argument("empirical_quantiles: n_stats must be positive");
    const long n = static_cast<long>(d.samples.size());
    StatVec s;
    s.kind = StatKind::quantile;
    s.values.reserve(static_cast<std::size_t>(n_stats));
    for (int i = 1; i <= n_stats; ++i) {
        const double tau = (2.0 * i - 1.0) / (2.0 * n_stats);
        // inf{z : ecdf(z) >= tau}: the first index k with (k+1)/n >= tau.
        long k = static_cast<long>(std::ceil(tau * n)) - 1;
        k = std::clamp(k, 0L, n - 1);
        s.values.push_back(d.samples[static_cast<std::size_t>(k)]);
    }
    return s;
}

void write_samples_csv(const std::string& path, const EmpiricalReturnDist& d) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_samples_csv: cannot open " + path);
    out << "return\n";
    char buf[32];
    for (double v : d.samples) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", v);
        out << buf;
    }
}

}  // namespace ctdrl
