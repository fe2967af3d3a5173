#pragma once

#include "ctdrl/cdf.hpp"
#include "ctdrl/imputation_types.hpp"
#include "ctdrl/linalg.hpp"

namespace ctdrl {

// Interval width floored at 1 so degenerate (point-mass) return intervals
// still yield usable bandwidths and test-function widths.
double effective_width(double v_min, double v_max);

// Bandwidth rule h_N = 0.5 * effective_width / N: atom smoothing stays below
// the 1/(2N) resolution scale while the derivatives remain stable.
double mollification_bandwidth(double v_min, double v_max, int n_stats);

// Midpoint-level quantiles s_i = F^{-1}((2i-1)/(2N)).
StatVec midpoint_quantiles(const Cdf& f, int n_stats);

// Step CDF of the N-atom uniform mixture: (1/N) #{i : z >= s_i}.
double quantile_cdf_exact(const StatVec& s, double z);

// Smooth surrogate (1/N) sum_i S((z - s_i)/h), S the standard normal CDF.
// Invariant under atom reordering, so callers need not sort.
double mollified_cdf(const Vec& atoms, double z, double h);

// First and second partials of mollified_cdf. The off-diagonal entries of
// the statistics Hessian vanish identically (each kernel term touches one
// atom), so only the diagonal is materialized.
struct MollifiedGrads {
    double dz = 0.0;  // d/dz
    Vec ds;           // d/ds_i = -(1/(Nh)) k((z - s_i)/h)
    Vec ds2_diag;     // d2/ds_i2 = -(u_i/(N h^2)) k(u_i), u_i = (z - s_i)/h
};
void mollified_grads_into(const Vec& atoms, double z, double h, MollifiedGrads& out);
MollifiedGrads mollified_grads(const Vec& atoms, double z, double h);

Cdf impute_quantile_exact(const StatVec& s);
Cdf impute_quantile_mollified(const StatVec& s, double h);
Cdf categorical_impute(const StatVec& p, const Vec& support);
Cdf gaussian_impute(double mu, double sigma2);

// Finite stand-in for the class of rapidly decaying smooth test functions:
// Gaussian bumps phi_j(z) = exp(-(z - c_j)^2 / (2 w_j^2)) with unit sup-norm,
// centers uniform over [v_min, v_max], common width effective_width / 8.
struct TestFunctionFamily {
    Vec centers;
    Vec widths;
    double v_min = 0.0;
    double v_max = 1.0;

    int size() const { return static_cast<int>(centers.size()); }
    double phi(int j, double z) const;
};

TestFunctionFamily make_test_family(double v_min, double v_max, int n_members = 17);

// Integral of one member over R by checked quadrature (the closed form
// w_j sqrt(2 pi) is kept to the tests as an independent oracle).
double family_member_mass(const TestFunctionFamily& fam, int j);
double family_max_mass(const TestFunctionFamily& fam);

// max_j |integral of (F1 - F2) phi_j|. quad_converged reports whether two
// grid refinements agreed within 1e-8.
struct WeakResult {
    double value = 0.0;
    bool quad_converged = true;
};
WeakResult weak_distance(const Cdf& f1, const Cdf& f2, const TestFunctionFamily& fam);

}  // namespace ctdrl
