// Timing comparison of the OpenMP kernels against their serial reference
// implementations, with a bitwise-equality audit of the results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ctdrl/env.hpp"
#include "ctdrl/fit.hpp"
#include "ctdrl/hjb.hpp"
#include "ctdrl/imputation.hpp"
#include "ctdrl/sde.hpp"
#include "ctdrl/statfn.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

namespace chrono = std::chrono;

double seconds_since(const chrono::steady_clock::time_point& t0) {
    return chrono::duration<double>(chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads available: %d\n", omp_get_max_threads());
#else
    std::printf("compiled without OpenMP; both columns run serial code\n");
#endif

    const ctdrl::EnvModel model = ctdrl::make_ou_env(1.0, 0.5, std::exp(-1.0));
    const ctdrl::EnvSpec& env = model.env;

    std::printf("%-28s %12s %12s %9s %10s\n", "kernel", "serial [s]", "parallel [s]", "speedup", "bitwise");

    {
        ctdrl::SimConfig sim;
        sim.dt = 1e-3;
        sim.horizon = 10.0;
        sim.n_paths = 20000;
        sim.seed = 7;
        const ctdrl::Vec x0 = {0.5};

        auto t0 = chrono::steady_clock::now();
        const auto serial = ctdrl::mc_return_distribution_serial(env, x0, sim);
        const double ts = seconds_since(t0);

        t0 = chrono::steady_clock::now();
        const auto parallel = ctdrl::mc_return_distribution(env, x0, sim);
        const double tp = seconds_since(t0);

        const bool same = serial.samples == parallel.samples;
        std::printf("%-28s %12.3f %12.3f %8.2fx %10s\n", "mc_return_distribution", ts, tp, ts / tp,
                    same ? "equal" : "DIFFER");
    }

    {
        const ctdrl::ReturnInterval ri = ctdrl::return_bounds(env);
        const auto fam = ctdrl::make_test_family(ri.v_min, ri.v_max);
        const int n_stats = 32;
        const double h = ctdrl::mollification_bandwidth(ri.v_min, ri.v_max, n_stats);

        ctdrl::SimConfig sim;
        sim.dt = 5e-3;
        sim.horizon = 10.0;
        sim.n_paths = 400;
        sim.seed = 7;
        const auto anchors = ctdrl::grid_states(env, 25);
        const ctdrl::StatFn sf = ctdrl::fit_quantiles_mc(env, anchors, n_stats, sim, 1e-8);

        std::vector<ctdrl::Vec> states;
        for (int k = 1; k <= 64; ++k)
            states.push_back({env.state_lo[0] + (env.state_hi[0] - env.state_lo[0]) * k / 65.0});

        auto t0 = chrono::steady_clock::now();
        const auto serial = ctdrl::weak_loss_batch_serial(env, sf, h, states, fam);
        const double ts = seconds_since(t0);

        t0 = chrono::steady_clock::now();
        const auto parallel = ctdrl::weak_loss_batch(env, sf, h, states, fam);
        const double tp = seconds_since(t0);

        bool same = serial.size() == parallel.size();
        for (std::size_t i = 0; same && i < serial.size(); ++i)
            same = serial[i].loss == parallel[i].loss && serial[i].quad_converged == parallel[i].quad_converged;
        std::printf("%-28s %12.3f %12.3f %8.2fx %10s\n", "weak_loss_batch", ts, tp, ts / tp,
                    same ? "equal" : "DIFFER");
    }

    return 0;
}
