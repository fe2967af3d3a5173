#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "check.hpp"
#include "ctdrl/env.hpp"
#include "ctdrl/hjb.hpp"
#include "ctdrl/imputation.hpp"
#include "ctdrl/normal.hpp"
#include "ctdrl/rng.hpp"
#include "ctdrl/statfn.hpp"

using namespace ctdrl;

namespace {

SmoothFn constant_fn(double v) {
    SmoothFn f;
    f.value = [v](const Vec&) { return v; };
    f.gradient = [](const Vec&) { return Vec{0.0}; };
    f.hessian = [](const Vec&) { return Mat(1, 1, 0.0); };
    return f;
}

void value_residual_examples() {
    const EnvModel cm = make_const_env(1.0, 0.9);
    const double beta = cm.env.discount_rate();
    REQUIRE_CLOSE(hjb_residual(cm.env, constant_fn(1.0 / beta), {0.2}), 0.0, 1e-12,
                  "the constant value solves the constant-reward equation");
    REQUIRE_CLOSE(hjb_residual(cm.env, constant_fn(0.0), {0.2}), 1.0, 1e-12,
                  "zero value leaves exactly the reward");

    const EnvModel ou = make_ou_env(1.0, 0.5, std::exp(-1.0));
    for (double x : {-1.5, -0.3, 0.0, 0.8, 2.0})
        REQUIRE_CLOSE(hjb_residual(ou.env, ou.baseline.value, {x}), 0.0, 1e-12,
                      "the analytic value solves the mean-reverting equation");
    test_done("value residual examples");
}

GridCDF tabulate(const std::function<double(double, double)>& f, double x_lo, double x_hi, int nx, double z_lo,
                 double z_hi, int nz) {
    GridCDF g;
    g.x_grid.resize(static_cast<std::size_t>(nx));
    g.z_grid.resize(static_cast<std::size_t>(nz));
    for (int i = 0; i < nx; ++i) g.x_grid[static_cast<std::size_t>(i)] = x_lo + (x_hi - x_lo) * i / (nx - 1);
    for (int j = 0; j < nz; ++j) g.z_grid[static_cast<std::size_t>(j)] = z_lo + (z_hi - z_lo) * j / (nz - 1);
    g.values = Mat(nx, nz);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nz; ++j)
            g.values(i, j) = f(g.x_grid[static_cast<std::size_t>(i)], g.z_grid[static_cast<std::size_t>(j)]);
    return g;
}

void grid_cdf_validation() {
    const auto flat = [](double, double) { return 0.7; };
    GridCDF g = tabulate(flat, 0.0, 1.0, 5, 0.0, 1.0, 5);
    validate_grid_cdf(g);

    g.values(2, 3) = 1.2;
    REQUIRE_THROWS(validate_grid_cdf(g), "values above one rejected");

    g = tabulate(flat, 0.0, 1.0, 5, 0.0, 1.0, 5);
    g.values(2, 3) = 0.1;
    REQUIRE_THROWS(validate_grid_cdf(g), "decreasing rows rejected");

    g = tabulate(flat, 0.0, 1.0, 5, 0.0, 1.0, 5);
    g.x_grid[2] += 0.05;
    REQUIRE_THROWS(validate_grid_cdf(g), "non-uniform spacing rejected");
    test_done("grid cdf validation");
}

void distributional_residual_on_grids() {
    const EnvModel cm = make_const_env(1.0, std::exp(-1.0));

    const auto flat = [](double, double) { return 0.7; };
    const GridCDF g0 = tabulate(flat, -0.5, 0.5, 5, 0.5, 1.5, 5);
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j)
            REQUIRE(dhjb_residual_grid(cm.env, g0, i, j) == 0.0, "constant tables have zero residual");
    REQUIRE_THROWS(dhjb_residual_grid(cm.env, g0, 0, 2), "boundary row rejected");
    REQUIRE_THROWS(dhjb_residual_grid(cm.env, g0, 2, 4), "boundary column rejected");

    const double h = 0.05;
    const auto moll = [h](double, double z) { return mollified_cdf({1.0}, z, h); };
    const GridCDF g1 = tabulate(moll, -0.5, 0.5, 5, 0.8, 1.2, 41);
    REQUIRE_CLOSE(dhjb_residual_grid(cm.env, g1, 2, 20), 0.0, 1e-8,
                  "advection coefficient vanishes at z = reward/rate");
    test_done("distributional residual basics");
}

// The mean-reverting fixture's Gaussian return law solves the distributional
// equation exactly, so the tabulated residual is pure discretization error
// and must quarter when both grid spacings halve.
void grid_residual_quarters() {
    const EnvModel ou = make_ou_env(1.0, 0.5, std::exp(-1.0));
    const double sd = std::sqrt(ou_return_variance(1.0, 0.5, std::exp(-1.0)));
    const auto cdf = [sd](double x, double z) { return normal_cdf((z - 0.5 * x) / sd); };

    const auto max_interior = [&](int nx, int nz) {
        const GridCDF g = tabulate(cdf, -1.0, 1.0, nx, -1.2, 1.2, nz);
        validate_grid_cdf(g);
        double worst = 0.0;
        for (int i = 1; i < nx - 1; ++i)
            for (int j = 1; j < nz - 1; ++j)
                worst = std::max(worst, std::abs(dhjb_residual_grid(ou.env, g, i, j)));
        return worst;
    };

    const double coarse = max_interior(101, 101);
    const double fine = max_interior(201, 201);
    REQUIRE(fine > 0.0, "discretization error resolvable above rounding");
    const double ratio = coarse / fine;
    REQUIRE(ratio >= 3.5 && ratio <= 4.5, "halving the spacing quarters the residual");
    test_done("grid residual quarters under refinement");
}

void statistical_residual_structure() {
    const EnvModel cm = make_const_env(1.0, 0.9);
    const double v = 1.0 / cm.env.discount_rate();

    StatFn sf = make_grid_statfn(cm.env, 2, 5);
    CounterRng rng(99, 0);
    for (double& w : sf.weights.data) w = 0.4 * (rng.next_uniform() - 0.5);
    sf.offsets = {v - 0.1, v + 0.1};

    const ShjbTerms t = shjb_pointwise(cm.env, sf, 0.05, {0.3}, v - 0.05);
    REQUIRE(t.diffusion_term == 0.0, "noise-free dynamics contribute no diffusion term");
    REQUIRE(t.drift_term == 0.0, "zero drift contributes no drift term");
    REQUIRE(t.advection_term != 0.0, "advection alive away from the deterministic return");
    REQUIRE_CLOSE(t.residual, t.advection_term, 1e-15, "only advection survives");
    REQUIRE_CLOSE(t.loss, t.residual * t.residual, 1e-15, "loss is the squared residual");

    StatFn atom = make_grid_statfn(cm.env, 1, 5);
    atom.offsets = {v};
    const ShjbTerms at_atom = shjb_pointwise(cm.env, atom, 0.05, {0.0}, v);
    REQUIRE_CLOSE(at_atom.residual, 0.0, 1e-12, "residual vanishes at the deterministic return");

    const TestFunctionFamily fam = make_test_family(v, v);
    const WeakShjbResult weak = shjb_weak(cm.env, atom, 0.05, {0.0}, fam);
    REQUIRE(weak.quad_converged, "weak quadrature refinements agree");
    REQUIRE(weak.loss <= 1e-6, "exact atom has negligible weak loss");
    test_done("statistical residual structure");
}

void analytic_assembly_matches_composite_differences() {
    const EnvModel ou = make_ou_env(1.0, 0.5, std::exp(-1.0));
    StatFn sf = make_grid_statfn(ou.env, 3, 6);
    CounterRng rng(31337, 0);
    for (double& w : sf.weights.data) w = 0.6 * (rng.next_uniform() - 0.5);
    for (double& o : sf.offsets) o = 0.4 * (rng.next_uniform() - 0.5);

    const double h = 0.1;
    const double dx1 = 1e-6, dx2 = 1e-4, dz1 = 1e-6;
    const auto composite = [&](double x, double z) { return mollified_cdf(statfn_eval(sf, {x}).s, z, h); };

    for (int probe = 0; probe < 10; ++probe) {
        const double x = 1.6 * (rng.next_uniform() - 0.5);
        const Vec s = statfn_eval(sf, {x}).s;
        double center = 0.0;
        for (double si : s) center += si / static_cast<double>(s.size());
        const double z = center + 4.0 * h * (rng.next_uniform() - 0.5);

        const double mu = ou.env.drift_at({x})[0];
        const double sig = ou.env.diffusion_at({x})(0, 0);
        const double reward = ou.env.reward({x});
        const double gx = (composite(x + dx1, z) - composite(x - dx1, z)) / (2.0 * dx1);
        const double gz = (composite(x, z + dz1) - composite(x, z - dz1)) / (2.0 * dz1);
        const double gxx = (composite(x + dx2, z) - 2.0 * composite(x, z) + composite(x - dx2, z)) / (dx2 * dx2);
        const double fd = mu * gx - (reward + z * std::log(ou.env.discount)) * gz + 0.5 * sig * sig * gxx;

        const double analytic = shjb_pointwise(ou.env, sf, h, {x}, z).residual;
        const double denom = std::max({std::abs(analytic), std::abs(fd), 1e-3});
        REQUIRE(std::abs(analytic - fd) / denom <= 1e-4, "assembled residual matches the composite differences");
    }
    test_done("analytic assembly vs composite finite differences");
}

void imputed_mean_and_scan() {
    StatVec s;
    s.values = {0.25, 0.75};
    REQUIRE_CLOSE(mean_of_imputation(s), 0.5, 1e-15, "two-atom mean");

    const Cdf uniform = make_uniform_cdf(0.0, 1.0);
    REQUIRE_CLOSE(mean_of_imputation(midpoint_quantiles(uniform, 8)), 0.5, 1e-12,
                  "midpoint quantiles of the uniform average to its mean");

    const EnvModel cm = make_const_env(1.0, 0.9);
    StatFn atom = make_grid_statfn(cm.env, 1, 5);
    atom.offsets = {1.0 / cm.env.discount_rate()};
    const auto rows = shjb_scan(cm.env, atom, 0.05, {0.0}, 33);
    REQUIRE(rows.size() == 33, "requested scan length");
    for (const auto& r : rows) REQUIRE(std::isfinite(r.terms.residual), "finite scan residuals");

    const std::string path = "/tmp/ctdrl_test_scan.csv";
    write_residual_csv(path, rows);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "x,z,drift_term,advection_term,diffusion_term,residual", "scan csv header");
    std::remove(path.c_str());
    test_done("imputed mean and residual scan");
}

}  // namespace

int main() {
    value_residual_examples();
    grid_cdf_validation();
    distributional_residual_on_grids();
    grid_residual_quarters();
    statistical_residual_structure();
    analytic_assembly_matches_composite_differences();
    imputed_mean_and_scan();
    std::cout << "test_hjb: all tests passed\n";
    return 0;
}
