#include "ctdrl/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ctdrl/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ctdrl {

namespace {

void check_uniform(const Vec& grid, const char* what) {
    if (grid.size() < 3) throw std::invalid_argument(std::string("grid cdf: ") + what + " needs >= 3 points");
    const double step = grid[1] - grid[0];
    if (!(step > 0.0)) throw std::invalid_argument(std::string("grid cdf: ") + what + " must be increasing");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double d = grid[i] - grid[i - 1];
        if (std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
            throw std::invalid_argument(std::string("grid cdf: ") + what + " must be uniform");
    }
}

}  // namespace

double hjb_residual(const EnvSpec& env, const SmoothFn& v, const Vec& x) {
    if (!v.value || !v.gradient || !v.hessian)
        throw std::invalid_argument("hjb_residual: value function needs value, gradient, and hessian");
    const Vec mu = env.drift_at(x);
    const Mat sigma = env.diffusion_at(x);
    const Vec grad = v.gradient(x);
    const Mat hess = v.hessian(x);
    return dot(grad, mu) + std::log(env.discount) * v.value(x) + env.reward(x) +
           0.5 * trace_quadratic(sigma, hess);
}

void validate_grid_cdf(const GridCDF& f) {
    check_uniform(f.x_grid, "x grid");
    check_uniform(f.z_grid, "z grid");
    if (f.values.rows != static_cast<int>(f.x_grid.size()) || f.values.cols != static_cast<int>(f.z_grid.size()))
        throw std::invalid_argument("grid cdf: value shape mismatch");
    for (int i = 0; i < f.values.rows; ++i) {
        for (int j = 0; j < f.values.cols; ++j) {
            const double v = f.values(i, j);
            if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
                throw std::invalid_argument("grid cdf: value outside [0,1]");
            if (j > 0 && f.values(i, j) < f.values(i, j - 1) - 1e-12)
                throw std::invalid_argument("grid cdf: row not nondecreasing along z");
        }
    }
}

double dhjb_residual_grid(const EnvSpec& env, const GridCDF& f, int i, int j) {
    if (env.dim != 1) throw std::invalid_argument("dhjb_residual_grid: only 1-D state grids supported");
    const int nx = static_cast<int>(f.x_grid.size());
    const int nz = static_cast<int>(f.z_grid.size());
    if (i <= 0 || i >= nx - 1 || j <= 0 || j >= nz - 1)
        throw std::invalid_argument("dhjb_residual_grid: boundary index rejected, central stencil unavailable");

    const double dx = f.x_grid[1] - f.x_grid[0];
    const double dz = f.z_grid[1] - f.z_grid[0];
    const Vec x = {f.x_grid[static_cast<std::size_t>(i)]};
    const double z = f.z_grid[static_cast<std::size_t>(j)];

    const double fx = (f.values(i + 1, j) - f.values(i - 1, j)) / (2.0 * dx);
    const double fxx = (f.values(i + 1, j) - 2.0 * f.values(i, j) + f.values(i - 1, j)) / (dx * dx);
    const double fz = (f.values(i, j + 1) - f.values(i, j - 1)) / (2.0 * dz);

    const Vec mu = env.drift_at(x);
    const Mat sigma = env.diffusion_at(x);
    Mat hess(1, 1);
    hess(0, 0) = fxx;
    return mu[0] * fx - (env.reward(x) + z * std::log(env.discount)) * fz + 0.5 * trace_quadratic(sigma, hess);
}

void shjb_prepare(const EnvSpec& env, const StatFn& sf, const Vec& x, ShjbWork& work) {
    if (sf.dim() != env.dim) throw std::invalid_argument("shjb: statistics function dimension mismatch");
    if (static_cast<int>(x.size()) != env.dim) throw std::invalid_argument("shjb: state dimension mismatch");
    statfn_eval_into(sf, x, work.se);
    work.mu.resize(static_cast<std::size_t>(env.dim));
    env.drift(x, work.mu);
    work.sigma = Mat(env.dim, env.noise_dim);
    env.diffusion(x, work.sigma);
    work.curvature = Mat(env.dim, env.dim);
    work.reward = env.reward(x);
}

ShjbTerms shjb_terms_at(const EnvSpec& env, ShjbWork& work, double z, double h) {
    const int n = static_cast<int>(work.se.s.size());
    const int d = env.dim;
    mollified_grads_into(work.se.s, z, h, work.g);

    ShjbTerms t;
    for (int k = 0; k < n; ++k) {
        double row_mu = 0.0;
        for (int a = 0; a < d; ++a) row_mu += work.se.jac(k, a) * work.mu[a];
        t.drift_term += work.g.ds[static_cast<std::size_t>(k)] * row_mu;
    }

    t.advection_term = -(work.reward + z * std::log(env.discount)) * work.g.dz;

    std::fill(work.curvature.data.begin(), work.curvature.data.end(), 0.0);
    for (int k = 0; k < n; ++k) {
        const double dsk = work.g.ds[static_cast<std::size_t>(k)];
        const double ds2k = work.g.ds2_diag[static_cast<std::size_t>(k)];
        const Mat& hk = work.se.hess[static_cast<std::size_t>(k)];
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                work.curvature(a, b) +=
                    dsk * hk(a, b) + ds2k * work.se.jac(k, a) * work.se.jac(k, b);
            }
        }
    }
    t.diffusion_term = 0.5 * trace_quadratic(work.sigma, work.curvature);

    t.residual = t.drift_term + t.advection_term + t.diffusion_term;
    t.loss = t.residual * t.residual;
    return t;
}

ShjbTerms shjb_pointwise(const EnvSpec& env, const StatFn& sf, double h, const Vec& x, double z) {
    if (!(h > 0.0)) throw std::invalid_argument("shjb: bandwidth must be positive");
    ShjbWork work;
    shjb_prepare(env, sf, x, work);
    return shjb_terms_at(env, work, z, h);
}

WeakShjbResult shjb_weak(const EnvSpec& env, const StatFn& sf, double h, const Vec& x,
                         const TestFunctionFamily& fam, int n_quad) {
    if (!(h > 0.0)) throw std::invalid_argument("shjb_weak: bandwidth must be positive");
    ShjbWork work;
    shjb_prepare(env, sf, x, work);

    const auto [s_min_it, s_max_it] = std::minmax_element(work.se.s.begin(), work.se.s.end());
    const double lo = *s_min_it - 12.0 * h;
    const double hi = *s_max_it + 12.0 * h;

    int n = n_quad;
    if (n <= 0) n = std::max(1024, static_cast<int>(std::ceil(32.0 * (hi - lo) / h)));
    n = ((n + 3) / 4) * 4;  // multiple of 4 so the half-resolution pass is Simpson-valid

    const double step = (hi - lo) / n;
    Vec res(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i)
        res[static_cast<std::size_t>(i)] = shjb_terms_at(env, work, lo + step * i, h).residual;

    WeakShjbResult out;
    for (int j = 0; j < fam.size(); ++j) {
        double fine = 0.0, coarse = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double g = res[static_cast<std::size_t>(i)] * fam.phi(j, lo + step * i);
            const double wf = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            fine += wf * g;
            if (i % 2 == 0) {
                const int i2 = i / 2;
                const double wc = (i == 0 || i == n) ? 1.0 : (i2 % 2 == 1 ? 4.0 : 2.0);
                coarse += wc * g;
            }
        }
        fine *= step / 3.0;
        coarse *= 2.0 * step / 3.0;
        if (std::abs(fine - coarse) > kQuadFlagTol) out.quad_converged = false;
        out.loss = std::max(out.loss, fine * fine);
    }
    return out;
}

namespace {

std::vector<WeakShjbResult> weak_batch_impl(const EnvSpec& env, const StatFn& sf, double h,
                                            const std::vector<Vec>& states, const TestFunctionFamily& fam,
                                            int n_quad, bool parallel) {
    std::vector<WeakShjbResult> out(states.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (long i = 0; i < static_cast<long>(states.size()); ++i)
        out[static_cast<std::size_t>(i)] = shjb_weak(env, sf, h, states[static_cast<std::size_t>(i)], fam, n_quad);
    return out;
}

}  // namespace

std::vector<WeakShjbResult> weak_loss_batch(const EnvSpec& env, const StatFn& sf, double h,
                                            const std::vector<Vec>& states, const TestFunctionFamily& fam,
                                            int n_quad) {
    return weak_batch_impl(env, sf, h, states, fam, n_quad, true);
}

std::vector<WeakShjbResult> weak_loss_batch_serial(const EnvSpec& env, const StatFn& sf, double h,
                                                   const std::vector<Vec>& states, const TestFunctionFamily& fam,
                                                   int n_quad) {
    return weak_batch_impl(env, sf, h, states, fam, n_quad, false);
}

double mean_of_imputation(const StatVec& s) {
    if (s.kind != StatKind::quantile) throw std::invalid_argument("mean_of_imputation: need quantile stats");
    if (s.values.empty()) throw std::invalid_argument("mean_of_imputation: empty stats");
    double acc = 0.0;
    for (double v : s.values) acc += v;
    return acc / static_cast<double>(s.values.size());
}

std::vector<ShjbRow> shjb_scan(const EnvSpec& env, const StatFn& sf, double h, const Vec& x, int n_z) {
    if (n_z < 2) throw std::invalid_argument("shjb_scan: need at least 2 z points");
    ShjbWork work;
    shjb_prepare(env, sf, x, work);
    const auto [s_min_it, s_max_it] = std::minmax_element(work.se.s.begin(), work.se.s.end());
    const double lo = *s_min_it - 12.0 * h;
    const double hi = *s_max_it + 12.0 * h;
    std::vector<ShjbRow> rows;
    rows.reserve(static_cast<std::size_t>(n_z));
    for (int i = 0; i < n_z; ++i) {
        ShjbRow row;
        row.x = x[0];
        row.z = lo + (hi - lo) * i / (n_z - 1);
        row.terms = shjb_terms_at(env, work, row.z, h);
        rows.push_back(row);
    }
    return rows;
}

void write_residual_csv(const std::string& path, const std::vector<ShjbRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_residual_csv: cannot open " + path);
    out << "x,z,drift_term,advection_term,diffusion_term,residual\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.x, r.z, r.terms.drift_term,
                      r.terms.advection_term, r.terms.diffusion_term, r.terms.residual);
        out << buf;
    }
}

}  // namespace ctdrl
