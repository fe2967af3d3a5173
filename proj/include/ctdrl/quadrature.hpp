#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ctdrl {

// Composite Simpson on [lo, hi] with n subintervals (n forced even).
template <typename F>
double integrate_simpson(F&& f, double lo, double hi, int n) {
    if (!(hi > lo)) return 0.0;
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) {
        const double z = lo + i * h;
        s += f(z) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

// Composite Simpson with the domain split at the given breakpoints, so
// integrands with jump discontinuities (step CDFs) stay piecewise smooth.
// n_total subintervals are distributed across pieces by length.
template <typename F>
double integrate_piecewise(F&& f, double lo, double hi, const std::vector<double>& breaks, int n_total) {
    if (!(hi > lo)) return 0.0;
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double b : breaks) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const double width = hi - lo;
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        const double a = cuts[p], b = cuts[p + 1];
        int n = static_cast<int>(std::ceil(n_total * (b - a) / width));
        n = std::max(n, 8);
        total += integrate_simpson(f, a, b, n);
    }
    return total;
}

// Value plus a convergence certificate: the integral is evaluated at the
// base resolution and at double it; disagreement beyond the flag threshold
// marks the quadrature as non-converged.
struct QuadResult {
    double value = 0.0;
    double refine_delta = 0.0;
    bool converged = true;
};

inline constexpr double kQuadFlagTol = 1e-8;

template <typename F>
QuadResult integrate_checked(F&& f, double lo, double hi, const std::vector<double>& breaks, int n_base) {
    QuadResult r;
    const double coarse = integrate_piecewise(f, lo, hi, breaks, n_base);
    const double fine = integrate_piecewise(f, lo, hi, breaks, 2 * n_base);
    r.value = fine;
    r.refine_delta = std::abs(fine - coarse);
    r.converged = r.refine_delta <= kQuadFlagTol;
    return r;
}

}  // namespace ctdrl
