#pragma once

#include <functional>
#include <string>

#include "ctdrl/linalg.hpp"

namespace ctdrl {

// A scalar distribution function with enough structure for sup-norm and
// weak-norm computations: the right-continuous value F(z), the left limit
// F(z-), the generalized inverse, the jump locations, and an interval
// [lo, hi] carrying essentially all mass.
struct Cdf {
    std::function<double(double)> value;
    std::function<double(double)> left_value;
    std::function<double(double)> quantile;  // inf{z : F(z) >= tau}
    Vec atoms;                               // sorted jump locations, empty if continuous
    double lo = 0.0;
    double hi = 1.0;
};

Cdf make_uniform_cdf(double a, double b);

// Normal(mu, sigma^2) conditioned on [a, b]. Quantiles are resolved by
// bisection so they are exact to machine precision.
Cdf make_truncated_normal_cdf(double mu, double sigma, double a, double b);

Cdf make_gaussian_cdf(double mu, double sigma);

Cdf make_point_mass_cdf(double v);

// Equal-weight step CDF over the given points (sorted internally).
Cdf make_step_cdf(Vec points);

// sup_z |F(z) - G(z)|, evaluated at both one-sided limits over the union of
// jump locations, interval endpoints, and a uniform scan grid.
double kolmogorov_distance(const Cdf& f, const Cdf& g, int grid_n = 2048);

// Two-column fixture dump: header "z,F", n+1 uniform rows over [lo, hi].
void write_cdf_csv(const std::string& path, const Cdf& f, int n = 512);

}  // namespace ctdrl
