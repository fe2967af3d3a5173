#include "ctdrl/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ctdrl/normal.hpp"
#include "ctdrl/quadrature.hpp"

namespace ctdrl {

double effective_width(double v_min, double v_max) {
    if (!(v_max >= v_min)) throw std::invalid_argument("effective_width: need v_max >= v_min");
    return std::max(v_max - v_min, 1.0);
}

double mollification_bandwidth(double v_min, double v_max, int n_stats) {
    if (n_stats < 1) throw std::invalid_argument("mollification_bandwidth: n_stats must be positive");
    return 0.5 * effective_width(v_min, v_max) / n_stats;
}

StatVec midpoint_quantiles(const Cdf& f, int n_stats) {
    if (n_stats < 1) throw std::invalid_argument("midpoint_quantiles: n_stats must be positive");
    StatVec s;
    s.kind = StatKind::quantile;
    s.values.reserve(static_cast<std::size_t>(n_stats));
    for (int i = 1; i <= n_stats; ++i)
        s.values.push_back(f.quantile((2.0 * i - 1.0) / (2.0 * n_stats)));
    validate_stats(s);
    return s;
}

double quantile_cdf_exact(const StatVec& s, double z) {
    if (s.kind != StatKind::quantile) throw std::invalid_argument("quantile_cdf_exact: need quantile stats");
    validate_stats(s);
    std::size_t count = 0;
    for (double v : s.values) count += (z >= v) ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(s.values.size());
}

double mollified_cdf(const Vec& atoms, double z, double h) {
    if (atoms.empty()) throw std::invalid_argument("mollified_cdf: no atoms");
    if (!(h > 0.0)) throw std::invalid_argument("mollified_cdf: bandwidth must be positive");
    double acc = 0.0;
    for (double s : atoms) acc += normal_cdf((z - s) / h);
    return acc / static_cast<double>(atoms.size());
}

void mollified_grads_into(const Vec& atoms, double z, double h, MollifiedGrads& out) {
    if (atoms.empty()) throw std::invalid_argument("mollified_grads: no atoms");
    if (!(h > 0.0)) throw std::invalid_argument("mollified_grads: bandwidth must be positive");
    const std::size_t n = atoms.size();
    out.ds.resize(n);
    out.ds2_diag.resize(n);
    const double inv_nh = 1.0 / (static_cast<double>(n) * h);
    double dz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (z - atoms[i]) / h;
        const double k = normal_pdf(u);
        dz += k;
        out.ds[i] = -k * inv_nh;
        out.ds2_diag[i] = -u * k * inv_nh / h;
    }
    out.dz = dz * inv_nh;
}

MollifiedGrads mollified_grads(const Vec& atoms, double z, double h) {
    MollifiedGrads out;
    mollified_grads_into(atoms, z, h, out);
    return out;
}

Cdf impute_quantile_exact(const StatVec& s) {
    if (s.kind != StatKind::quantile) throw std::invalid_argument("impute_quantile_exact: need quantile stats");
    validate_stats(s);
    return make_step_cdf(s.values);
}

Cdf impute_quantile_mollified(const StatVec& s, double h) {
    if (s.kind != StatKind::quantile) throw std::invalid_argument("impute_quantile_mollified: need quantile stats");
    validate_stats(s);
    if (!(h > 0.0)) throw std::invalid_argument("impute_quantile_mollified: bandwidth must be positive");
    const Vec atoms = s.values;
    Cdf f;
    f.lo = atoms.front() - 12.0 * h;
    f.hi = atoms.back() + 12.0 * h;
    f.value = [atoms, h](double z) { return mollified_cdf(atoms, z, h); };
    f.left_value = f.value;
    auto val = f.value;
    const double lo = f.lo, hi = f.hi;
    f.quantile = [val, lo, hi](double tau) { return invert_cdf(val, lo, hi, tau); };
    return f;
}

Cdf categorical_impute(const StatVec& p, const Vec& support) {
    if (p.kind != StatKind::categorical_probs)
        throw std::invalid_argument("categorical_impute: need categorical stats");
    validate_stats(p);
    if (support.size() != p.values.size())
        throw std::invalid_argument("categorical_impute: support size mismatch");
    if (!std::is_sorted(support.begin(), support.end()))
        throw std::invalid_argument("categorical_impute: support must be sorted");
    Vec cum(p.values.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        acc += p.values[i];
        cum[i] = std::min(acc, 1.0);
    }
    cum.back() = 1.0;
    Cdf f;
    f.lo = support.front();
    f.hi = support.back();
    f.atoms = support;
    f.value = [support, cum](double z) {
        const auto it = std::upper_bound(support.begin(), support.end(), z);
        const auto k = it - support.begin();
        return k == 0 ? 0.0 : cum[static_cast<std::size_t>(k - 1)];
    };
    f.left_value = [support, cum](double z) {
        const auto it = std::lower_bound(support.begin(), support.end(), z);
        const auto k = it - support.begin();
        return k == 0 ? 0.0 : cum[static_cast<std::size_t>(k - 1)];
    };
    f.quantile = [support, cum](double tau) {
        for (std::size_t i = 0; i < cum.size(); ++i)
            if (cum[i] >= tau) return support[i];
        return support.back();
    };
    return f;
}

Cdf gaussian_impute(double mu, double sigma2) {
    if (sigma2 < 0.0) throw std::invalid_argument("gaussian_impute: negative variance");
    if (sigma2 == 0.0) return make_point_mass_cdf(mu);
    return make_gaussian_cdf(mu, std::sqrt(sigma2));
}

double TestFunctionFamily::phi(int j, double z) const {
    const double d = (z - centers[static_cast<std::size_t>(j)]) / widths[static_cast<std::size_t>(j)];
    return std::exp(-0.5 * d * d);
}

TestFunctionFamily make_test_family(double v_min, double v_max, int n_members) {
    if (n_members < 2) throw std::invalid_argument("make_test_family: need at least 2 members");
    TestFunctionFamily fam;
    fam.v_min = v_min;
    fam.v_max = v_max;
    const double w = effective_width(v_min, v_max) / 8.0;
    fam.centers.resize(static_cast<std::size_t>(n_members));
    fam.widths.assign(static_cast<std::size_t>(n_members), w);
    for (int j = 0; j < n_members; ++j)
        fam.centers[static_cast<std::size_t>(j)] = v_min + (v_max - v_min) * j / (n_members - 1);
    return fam;
}

double family_member_mass(const TestFunctionFamily& fam, int j) {
    const double c = fam.centers[static_cast<std::size_t>(j)];
    const double w = fam.widths[static_cast<std::size_t>(j)];
    const auto q = integrate_checked([&](double z) { return fam.phi(j, z); }, c - 12.0 * w, c + 12.0 * w, {}, 2048);
    return q.value;
}

double family_max_mass(const TestFunctionFamily& fam) {
    double m = 0.0;
    for (int j = 0; j < fam.size(); ++j) m = std::max(m, family_member_mass(fam, j));
    return m;
}

WeakResult weak_distance(const Cdf& f1, const Cdf& f2, const TestFunctionFamily& fam) {
    const double lo = std::min(f1.lo, f2.lo);
    const double hi = std::max(f1.hi, f2.hi);
    WeakResult out;
    if (!(hi > lo)) return out;

    Vec cuts;
    cuts.push_back(lo);
    for (const Vec* atoms : {&f1.atoms, &f2.atoms})
        for (double a : *atoms)
            if (a > lo && a < hi) cuts.push_back(a);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Piecewise Simpson with the pieces split at jump locations. Endpoint
    // nodes take the one-sided limit from inside the piece: the
    // right-continuous value at the left end, the left limit at the right
    // end, so jumps never leak across a cut.
    const auto pairings = [&](int budget) {
        Vec acc(static_cast<std::size_t>(fam.size()), 0.0);
        const double width = hi - lo;
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            const double a = cuts[p], b = cuts[p + 1];
            int n = std::max(8, static_cast<int>(std::ceil(budget * (b - a) / width)));
            if (n % 2 != 0) ++n;
            const double step = (b - a) / n;
            for (int i = 0; i <= n; ++i) {
                const double z = a + step * i;
                const double diff = (i == n) ? f1.left_value(z) - f2.left_value(z)
                                             : f1.value(z) - f2.value(z);
                const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
                const double c = w * step / 3.0 * diff;
                for (int j = 0; j < fam.size(); ++j) acc[static_cast<std::size_t>(j)] += c * fam.phi(j, z);
            }
        }
        return acc;
    };

    const int n_total = std::max<int>(4096, 16 * static_cast<int>(cuts.size()));
    const Vec coarse = pairings(n_total);
    const Vec fine = pairings(2 * n_total);
    for (int j = 0; j < fam.size(); ++j) {
        if (std::abs(fine[static_cast<std::size_t>(j)] - coarse[static_cast<std::size_t>(j)]) > kQuadFlagTol)
            out.quad_converged = false;
        out.value = std::max(out.value, std::abs(fine[static_cast<std::size_t>(j)]));
    }
    return out;
}

}  // namespace ctdrl
