#pragma once

#include <string>
#include <vector>

#include "ctdrl/env.hpp"
#include "ctdrl/imputation.hpp"
#include "ctdrl/linalg.hpp"
#include "ctdrl/statfn.hpp"

namespace ctdrl {

// Residual of the stationary value equation at x:
//   <grad V, mu> + log(gamma) V + r + 1/2 Tr(sigma^T hess V sigma).
// Zero when V is the true expected return.
double hjb_residual(const EnvSpec& env, const SmoothFn& v, const Vec& x);

// Return CDF tabulated on a uniform (x, z) product grid, 1-D state.
struct GridCDF {
    Vec x_grid;
    Vec z_grid;
    Mat values;  // x_grid.size() rows, z_grid.size() cols
};

// Uniform spacing, values in [0,1], rows nondecreasing along z.
void validate_grid_cdf(const GridCDF& f);

// Second-order central-difference residual of the distributional value PDE
//   <grad_x F, mu> - (r + z log gamma) dF/dz + 1/2 Tr(sigma^T hess_x F sigma)
// at interior grid point (i, j). Boundary indices are rejected.
double dhjb_residual_grid(const EnvSpec& env, const GridCDF& f, int i, int j);

// One evaluation of the statistical generator at (x, z), split into the
// three chain-rule terms. K_space collects curvature routed through the
// statistics function's Hessians, K_stat curvature through the imputation
// map's statistics Hessian.
struct ShjbTerms {
    double drift_term = 0.0;      // grad_s Phi . (J_x s mu)
    double advection_term = 0.0;  // -(r + z log gamma) dPhi/dz
    double diffusion_term = 0.0;  // 1/2 Tr(sigma^T (K_space + K_stat) sigma)
    double residual = 0.0;
    double loss = 0.0;            // residual^2
};

// Scratch buffers reused across a z-sweep at fixed x.
struct ShjbWork {
    StatsEval se;
    MollifiedGrads g;
    Vec mu;
    Mat sigma;
    Mat curvature;
    double reward = 0.0;
};

// Prepares the x-dependent pieces (statistics eval, drift, diffusion,
// reward) once; shjb_terms_at then sweeps z cheaply.
void shjb_prepare(const EnvSpec& env, const StatFn& sf, const Vec& x, ShjbWork& work);
ShjbTerms shjb_terms_at(const EnvSpec& env, ShjbWork& work, double z, double h);

// Single-call evaluation at one (x, z).
ShjbTerms shjb_pointwise(const EnvSpec& env, const StatFn& sf, double h, const Vec& x, double z);

// Weak form at one state: max over the family of the squared pairing
//   (integral of residual(x, .) phi_j)^2,
// by Simpson quadrature over [min atom - 12h, max atom + 12h] with the
// residual evaluated once per node and shared across members. n_quad = 0
// picks the resolution from the bandwidth (at least 32 nodes per h).
struct WeakShjbResult {
    double loss = 0.0;
    bool quad_converged = true;
};
WeakShjbResult shjb_weak(const EnvSpec& env, const StatFn& sf, double h, const Vec& x,
                         const TestFunctionFamily& fam, int n_quad = 0);

// shjb_weak over a batch of probe states. The parallel kernel distributes
// states across threads; the _serial variant is the reference it is tested
// and benchmarked against.
std::vector<WeakShjbResult> weak_loss_batch(const EnvSpec& env, const StatFn& sf, double h,
                                            const std::vector<Vec>& states, const TestFunctionFamily& fam,
                                            int n_quad = 0);
std::vector<WeakShjbResult> weak_loss_batch_serial(const EnvSpec& env, const StatFn& sf, double h,
                                                   const std::vector<Vec>& states, const TestFunctionFamily& fam,
                                                   int n_quad = 0);

// Mean of the imputed N-atom measure.
double mean_of_imputation(const StatVec& s);

// Rows (x, z, drift_term, advection_term, diffusion_term, residual).
struct ShjbRow {
    double x = 0.0;
    double z = 0.0;
    ShjbTerms terms;
};
std::vector<ShjbRow> shjb_scan(const EnvSpec& env, const StatFn& sf, double h, const Vec& x, int n_z);
void write_residual_csv(const std::string& path, const std::vector<ShjbRow>& rows);

}  // namespace ctdrl
