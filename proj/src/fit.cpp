#include "ctdrl/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "ctdrl/cdf.hpp"
#include "ctdrl/imputation.hpp"
#include "ctdrl/rng.hpp"

namespace ctdrl {

ReturnData collect_return_data(const EnvSpec& env, const std::vector<Vec>& anchors, const SimConfig& sim) {
    if (anchors.empty()) throw std::invalid_argument("collect_return_data: no anchor states");
    ReturnData data;
    data.anchors = anchors;
    data.dists.reserve(anchors.size());
    for (std::size_t k = 0; k < anchors.size(); ++k) {
        SimConfig local = sim;
        local.seed = derive_seed(sim.seed, k);
        data.dists.push_back(mc_return_distribution(env, anchors[k], local));
    }
    return data;
}

StatFn fit_quantiles(const EnvSpec& env, const ReturnData& data, int n_stats, double ridge, FitReport* report,
                     int n_features) {
    if (n_stats < 1) throw std::invalid_argument("fit_quantiles: n_stats must be positive");
    if (ridge < 0.0) throw std::invalid_argument("fit_quantiles: ridge must be nonnegative");
    const int n_anchors = static_cast<int>(data.anchors.size());
    if (n_anchors < n_features)
        throw std::invalid_argument("fit_quantiles: need at least as many anchor states as features");

    StatFn sf = make_grid_statfn(env, n_stats, n_features);

    // Design matrix over features plus an unpenalized intercept column.
    const int p = n_features + 1;
    Eigen::MatrixXd design(n_anchors, p);
    for (int a = 0; a < n_anchors; ++a) {
        for (int j = 0; j < n_features; ++j) {
            const double diff = data.anchors[static_cast<std::size_t>(a)][0] - sf.centers(j, 0);
            design(a, j) = std::exp(-0.5 * diff * diff / (sf.lengthscale * sf.lengthscale));
        }
        design(a, n_features) = 1.0;
    }

    Eigen::MatrixXd targets(n_anchors, n_stats);
    for (int a = 0; a < n_anchors; ++a) {
        const StatVec q = empirical_quantiles(data.dists[static_cast<std::size_t>(a)], n_stats);
        for (int i = 0; i < n_stats; ++i) targets(a, i) = q.values[static_cast<std::size_t>(i)];
    }

    Eigen::MatrixXd gram = design.transpose() * design;
    for (int j = 0; j < n_features; ++j) gram(j, j) += ridge;

    const Eigen::MatrixXd coef = gram.ldlt().solve(design.transpose() * targets);

    for (int i = 0; i < n_stats; ++i) {
        for (int j = 0; j < n_features; ++j) sf.weights(i, j) = coef(j, i);
        sf.offsets[static_cast<std::size_t>(i)] = coef(n_features, i);
    }

    if (report) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        const double ev_min = eig.eigenvalues().minCoeff();
        const double ev_max = eig.eigenvalues().maxCoeff();
        report->condition = ev_min > 0.0 ? ev_max / ev_min : std::numeric_limits<double>::infinity();
        report->ill_conditioned = !(report->condition <= 1e12);
        report->iterations = 1;
        report->anchor_rmse.assign(static_cast<std::size_t>(n_anchors), 0.0);
        report->max_kolmogorov = 0.0;
        for (int a = 0; a < n_anchors; ++a) {
            const StatVec pred = predict_quantiles(sf, data.anchors[static_cast<std::size_t>(a)]);
            double sq = 0.0;
            for (int i = 0; i < n_stats; ++i) {
                const double r = pred.values[static_cast<std::size_t>(i)] - targets(a, i);
                sq += r * r;
            }
            report->anchor_rmse[static_cast<std::size_t>(a)] = std::sqrt(sq / n_stats);
            const Cdf fitted = impute_quantile_exact(pred);
            const Cdf oracle = make_step_cdf(data.dists[static_cast<std::size_t>(a)].samples);
            report->max_kolmogorov = std::max(report->max_kolmogorov, kolmogorov_distance(fitted, oracle));
        }
        report->final_weak_loss = 0.0;
    }
    return sf;
}

StatFn fit_quantiles_mc(const EnvSpec& env, const std::vector<Vec>& anchors, int n_stats, const SimConfig& sim,
                        double ridge, FitReport* report, int n_features) {
    const ReturnData data = collect_return_data(env, anchors, sim);
    return fit_quantiles(env, data, n_stats, ridge, report, n_features);
}

namespace {

int coeff_count(const StatFn& sf) { return sf.weights.rows * sf.weights.cols + sf.n_stats(); }

double& coeff_at(StatFn& sf, int idx) {
    const int nw = sf.weights.rows * sf.weights.cols;
    if (idx < nw) return sf.weights.data[static_cast<std::size_t>(idx)];
    return sf.offsets[static_cast<std::size_t>(idx - nw)];
}

}  // namespace

MinimizeResult minimize_shjb(const EnvSpec& env, const StatFn& sf0, const TestFunctionFamily& fam,
                             const MinimizeOptions& opt) {
    validate_statfn(sf0);
    if (opt.step < 0.0) throw std::invalid_argument("minimize_shjb: step must be nonnegative");
    if (opt.iterations < 0) throw std::invalid_argument("minimize_shjb: iterations must be nonnegative");
    if (opt.probe_states.empty()) throw std::invalid_argument("minimize_shjb: need probe states");
    if (!(opt.bandwidth > 0.0)) throw std::invalid_argument("minimize_shjb: bandwidth must be positive");
    if (!(opt.fd_step > 0.0)) throw std::invalid_argument("minimize_shjb: fd_step must be positive");

    MinimizeResult out;
    long evals = 0;
    const auto loss_of = [&](const StatFn& sf) {
        const auto batch = weak_loss_batch(env, sf, opt.bandwidth, opt.probe_states, fam, opt.n_quad);
        double acc = 0.0;
        for (const auto& r : batch) acc += r.loss;
        ++evals;
        return acc / static_cast<double>(batch.size());
    };

    StatFn cur = sf0;
    double cur_loss = loss_of(cur);
    if (!std::isfinite(cur_loss)) throw std::runtime_error("minimize_shjb: non-finite loss at the initial iterate");
    StatFn best = cur;
    double best_loss = cur_loss;
    out.trace.reserve(static_cast<std::size_t>(opt.iterations));

    const int n_coeff = coeff_count(cur);
    Vec grad(static_cast<std::size_t>(n_coeff));
    for (int it = 0; it < opt.iterations; ++it) {
        for (int c = 0; c < n_coeff; ++c) {
            double& theta = coeff_at(cur, c);
            const double saved = theta;
            theta = saved + opt.fd_step;
            const double up = loss_of(cur);
            theta = saved - opt.fd_step;
            const double down = loss_of(cur);
            theta = saved;
            grad[static_cast<std::size_t>(c)] = (up - down) / (2.0 * opt.fd_step);
        }
        for (int c = 0; c < n_coeff; ++c) coeff_at(cur, c) -= opt.step * grad[static_cast<std::size_t>(c)];
        cur_loss = loss_of(cur);
        if (!std::isfinite(cur_loss))
            throw std::runtime_error("minimize_shjb: non-finite loss at iteration " + std::to_string(it));
        if (cur_loss < best_loss) {
            best_loss = cur_loss;
            best = cur;
        }
        out.trace.push_back(best_loss);
    }

    out.sf = best;
    out.loss_evaluations = evals;
    return out;
}

void write_trace_csv(const std::string& path, const Vec& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    out << "iter,loss\n";
    char buf[48];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, trace[i]);
        out << buf;
    }
}

}  // namespace ctdrl
