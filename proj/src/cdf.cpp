#include "ctdrl/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ctdrl/normal.hpp"

namespace ctdrl {

Cdf make_uniform_cdf(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("uniform cdf: need a < b");
    Cdf f;
    f.lo = a;
    f.hi = b;
    f.value = [a, b](double z) { return std::clamp((z - a) / (b - a), 0.0, 1.0); };
    f.left_value = f.value;
    f.quantile = [a, b](double tau) { return a + tau * (b - a); };
    return f;
}

Cdf make_truncated_normal_cdf(double mu, double sigma, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("truncated normal cdf: need a < b");
    if (!(sigma > 0.0)) throw std::invalid_argument("truncated normal cdf: need sigma > 0");
    const double fa = normal_cdf((a - mu) / sigma);
    const double fb = normal_cdf((b - mu) / sigma);
    const double mass = fb - fa;
    if (!(mass > 0.0)) throw std::invalid_argument("truncated normal cdf: no mass on [a, b]");
    Cdf f;
    f.lo = a;
    f.hi = b;
    f.value = [=](double z) {
        if (z <= a) return 0.0;
        if (z >= b) return 1.0;
        return (normal_cdf((z - mu) / sigma) - fa) / mass;
    };
    f.left_value = f.value;
    auto val = f.value;
    f.quantile = [val, a, b](double tau) { return invert_cdf(val, a, b, tau); };
    return f;
}

Cdf make_gaussian_cdf(double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian cdf: need sigma > 0");
    Cdf f;
    f.lo = mu - 10.0 * sigma;
    f.hi = mu + 10.0 * sigma;
    f.value = [mu, sigma](double z) { return normal_cdf((z - mu) / sigma); };
    f.left_value = f.value;
    auto val = f.value;
    const double lo = f.lo, hi = f.hi;
    f.quantile = [val, lo, hi](double tau) { return invert_cdf(val, lo, hi, tau); };
    return f;
}

Cdf make_point_mass_cdf(double v) {
    Cdf f;
    f.lo = v;
    f.hi = v;
    f.atoms = {v};
    f.value = [v](double z) { return z >= v ? 1.0 : 0.0; };
    f.left_value = [v](double z) { return z > v ? 1.0 : 0.0; };
    f.quantile = [v](double) { return v; };
    return f;
}

Cdf make_step_cdf(Vec points) {
    if (points.empty()) throw std::invalid_argument("step cdf: no points");
    std::sort(points.begin(), points.end());
    for (double p : points)
        if (!std::isfinite(p)) throw std::invalid_argument("step cdf: non-finite point");
    const double n = static_cast<double>(points.size());
    Cdf f;
    f.lo = points.front();
    f.hi = points.back();
    f.atoms = points;
    f.value = [points, n](double z) {
        const auto it = std::upper_bound(points.begin(), points.end(), z);
        return static_cast<double>(it - points.begin()) / n;
    };
    f.left_value = [points, n](double z) {
        const auto it = std::lower_bound(points.begin(), points.end(), z);
        return static_cast<double>(it - points.begin()) / n;
    };
    f.quantile = [points](double tau) {
        const long m = static_cast<long>(points.size());
        long k = static_cast<long>(std::ceil(tau * m)) - 1;
        k = std::clamp(k, 0L, m - 1);
        return points[static_cast<std::size_t>(k)];
    };
    return f;
}

double kolmogorov_distance(const Cdf& f, const Cdf& g, int grid_n) {
    const double lo = std::min(f.lo, g.lo);
    const double hi = std::max(f.hi, g.hi);
    Vec zs;
    zs.reserve(f.atoms.size() + g.atoms.size() + static_cast<std::size_t>(grid_n) + 5);
    zs.insert(zs.end(), f.atoms.begin(), f.atoms.end());
    zs.insert(zs.end(), g.atoms.begin(), g.atoms.end());
    zs.push_back(f.lo);
    zs.push_back(f.hi);
    zs.push_back(g.lo);
    zs.push_back(g.hi);
    if (hi > lo)
        for (int i = 0; i <= grid_n; ++i)
            zs.push_back(lo + (hi - lo) * i / grid_n);
    double best = 0.0;
    for (double z : zs) {
        best = std::max(best, std::abs(f.value(z) - g.value(z)));
        best = std::max(best, std::abs(f.left_value(z) - g.left_value(z)));
    }
    return best;
}

void write_cdf_csv(const std::string& path, const Cdf& f, int n) {
    if (n < 1) throw std::invalid_argument("write_cdf_csv: need n >= 1");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_cdf_csv: cannot open " + path);
    out << "z,F\n";
    char buf[80];
    for (int i = 0; i <= n; ++i) {
        const double z = f.lo + (f.hi - f.lo) * i / n;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", z, f.value(z));
        out << buf;
    }
}

}  // namespace ctdrl
