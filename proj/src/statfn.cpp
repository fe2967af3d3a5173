#include "ctdrl/statfn.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace ctdrl {

void validate_statfn(const StatFn& sf) {
    if (sf.centers.rows < 1 || sf.centers.cols < 1)
        throw std::invalid_argument("statfn: need at least one feature center");
    if (!(sf.lengthscale > 0.0)) throw std::invalid_argument("statfn: lengthscale must be positive");
    if (sf.weights.cols != sf.centers.rows)
        throw std::invalid_argument("statfn: weights columns must match feature count");
    if (sf.weights.rows < 1) throw std::invalid_argument("statfn: need at least one statistic");
    if (static_cast<int>(sf.offsets.size()) != sf.weights.rows)
        throw std::invalid_argument("statfn: offsets length must match statistic count");
    for (double c : sf.centers.data)
        if (!std::isfinite(c)) throw std::invalid_argument("statfn: non-finite center");
    for (double w : sf.weights.data)
        if (!std::isfinite(w)) throw std::invalid_argument("statfn: non-finite weight");
    for (double b : sf.offsets)
        if (!std::isfinite(b)) throw std::invalid_argument("statfn: non-finite offset");
}

void statfn_eval_into(const StatFn& sf, const Vec& x, StatsEval& out) {
    const int n = sf.n_stats();
    const int j_count = sf.n_features();
    const int d = sf.dim();
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("statfn_eval: state dimension mismatch");

    out.s.assign(static_cast<std::size_t>(n), 0.0);
    out.jac.rows = n;
    out.jac.cols = d;
    out.jac.data.assign(static_cast<std::size_t>(n) * d, 0.0);
    out.hess.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out.hess[static_cast<std::size_t>(k)].rows = d;
        out.hess[static_cast<std::size_t>(k)].cols = d;
        out.hess[static_cast<std::size_t>(k)].data.assign(static_cast<std::size_t>(d) * d, 0.0);
    }

    const double inv_l2 = 1.0 / (sf.lengthscale * sf.lengthscale);
    Vec diff(static_cast<std::size_t>(d));
    for (int j = 0; j < j_count; ++j) {
        double sq = 0.0;
        for (int a = 0; a < d; ++a) {
            diff[a] = x[a] - sf.centers(j, a);
            sq += diff[a] * diff[a];
        }
        const double feat = std::exp(-0.5 * sq * inv_l2);
        for (int k = 0; k < n; ++k) {
            const double wk = sf.weights(k, j) * feat;
            if (wk == 0.0) continue;
            out.s[k] += wk;
            Mat& hk = out.hess[static_cast<std::size_t>(k)];
            for (int a = 0; a < d; ++a) {
                out.jac(k, a) += -wk * diff[a] * inv_l2;
                for (int b = 0; b < d; ++b)
                    hk(a, b) += wk * (diff[a] * diff[b] * inv_l2 - (a == b ? 1.0 : 0.0)) * inv_l2;
            }
        }
    }
    for (int k = 0; k < n; ++k) out.s[k] += sf.offsets[k];
}

StatsEval statfn_eval(const StatFn& sf, const Vec& x) {
    StatsEval out;
    statfn_eval_into(sf, x, out);
    return out;
}

StatFn make_grid_statfn(const EnvSpec& env, int n_stats, int n_features) {
    if (env.dim != 1) throw std::invalid_argument("make_grid_statfn: only 1-D state boxes supported");
    if (n_stats < 1) throw std::invalid_argument("make_grid_statfn: need at least one statistic");
    if (n_features < 2) throw std::invalid_argument("make_grid_statfn: need at least two features");
    const double lo = env.state_lo[0];
    const double hi = env.state_hi[0];
    const double spacing = (hi - lo) / (n_features - 1);
    StatFn sf;
    sf.centers.rows = n_features;
    sf.centers.cols = 1;
    sf.centers.data.resize(static_cast<std::size_t>(n_features));
    for (int j = 0; j < n_features; ++j) sf.centers(j, 0) = lo + spacing * j;
    sf.lengthscale = 2.0 * spacing;
    sf.weights.rows = n_stats;
    sf.weights.cols = n_features;
    sf.weights.data.assign(static_cast<std::size_t>(n_stats) * n_features, 0.0);
    sf.offsets.assign(static_cast<std::size_t>(n_stats), 0.0);
    return sf;
}

std::vector<Vec> grid_states(const EnvSpec& env, int n_points) {
    if (env.dim != 1) throw std::invalid_argument("grid_states: only 1-D state boxes supported");
    if (n_points < 2) throw std::invalid_argument("grid_states: need at least two points");
    const double lo = env.state_lo[0];
    const double hi = env.state_hi[0];
    std::vector<Vec> states;
    states.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        states.push_back({lo + (hi - lo) * i / (n_points - 1)});
    return states;
}

Vec isotonic_project(const Vec& s) {
    const std::size_t n = s.size();
    Vec level(n);
    std::vector<std::size_t> count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        level[blocks] = s[i];
        count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && level[blocks - 2] > level[blocks - 1]) {
            const double merged = (level[blocks - 2] * count[blocks - 2] + level[blocks - 1] * count[blocks - 1]) /
                                  static_cast<double>(count[blocks - 2] + count[blocks - 1]);
            count[blocks - 2] += count[blocks - 1];
            level[blocks - 2] = merged;
            --blocks;
        }
    }
    Vec out;
    out.reserve(n);
    for (std::size_t b = 0; b < blocks; ++b)
        out.insert(out.end(), count[b], level[b]);
    return out;
}

StatVec predict_quantiles(const StatFn& sf, const Vec& x) {
    StatVec out;
    out.kind = StatKind::quantile;
    out.values = isotonic_project(statfn_eval(sf, x).s);
    return out;
}

std::string statfn_to_json(const StatFn& sf) {
    nlohmann::json j;
    auto& centers = j["centers"] = nlohmann::json::array();
    for (int r = 0; r < sf.centers.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < sf.centers.cols; ++c) row.push_back(sf.centers(r, c));
        centers.push_back(row);
    }
    j["lengthscale"] = sf.lengthscale;
    auto& weights = j["weights"] = nlohmann::json::array();
    for (int r = 0; r < sf.weights.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < sf.weights.cols; ++c) row.push_back(sf.weights(r, c));
        weights.push_back(row);
    }
    j["offsets"] = sf.offsets;
    return j.dump();
}

StatFn statfn_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    StatFn sf;
    const auto& centers = j.at("centers");
    sf.centers.rows = static_cast<int>(centers.size());
    sf.centers.cols = centers.empty() ? 0 : static_cast<int>(centers[0].size());
    for (const auto& row : centers) {
        if (static_cast<int>(row.size()) != sf.centers.cols)
            throw std::invalid_argument("statfn_from_json: ragged centers");
        for (const auto& v : row) sf.centers.data.push_back(v.get<double>());
    }
    sf.lengthscale = j.at("lengthscale").get<double>();
    const auto& weights = j.at("weights");
    sf.weights.rows = static_cast<int>(weights.size());
    sf.weights.cols = weights.empty() ? 0 : static_cast<int>(weights[0].size());
    for (const auto& row : weights) {
        if (static_cast<int>(row.size()) != sf.weights.cols)
            throw std::invalid_argument("statfn_from_json: ragged weights");
        for (const auto& v : row) sf.weights.data.push_back(v.get<double>());
    }
    sf.offsets = j.at("offsets").get<Vec>();
    validate_statfn(sf);
    return sf;
}

}  // namespace ctdrl
