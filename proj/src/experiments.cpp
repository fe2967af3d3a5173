#include "ctdrl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ctdrl/cdf.hpp"
#include "ctdrl/fit.hpp"
#include "ctdrl/hjb.hpp"
#include "ctdrl/imputation.hpp"
#include "ctdrl/rng.hpp"
#include "ctdrl/statfn.hpp"

namespace ctdrl {

namespace {

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double median(Vec v) {
    if (v.empty()) throw std::invalid_argument("median: empty");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<int> default_bound_ladder() { return {1, 2, 4, 8, 16, 32, 64, 128, 256}; }
std::vector<int> default_decay_ladder() { return {4, 8, 16, 32, 64}; }

EnvModel default_ou_model() { return make_ou_env(1.0, 0.5, std::exp(-1.0)); }

// Nine equally spaced interior states of the 1-D box.
std::vector<Vec> probe_states(const EnvSpec& env) {
    const double lo = env.state_lo[0];
    const double hi = env.state_hi[0];
    std::vector<Vec> probes;
    for (int k = 1; k <= 9; ++k) probes.push_back({lo + (hi - lo) * k / 10.0});
    return probes;
}

struct NamedCdf {
    std::string name;
    Cdf cdf;
};

// The two scalar reference fixtures every bound experiment sweeps, plus the
// environment's analytic return CDF at the box midpoint when one exists.
std::vector<NamedCdf> bound_fixtures(const ExperimentConfig& cfg) {
    std::vector<NamedCdf> fixtures;
    fixtures.push_back({"uniform", make_uniform_cdf(0.0, 1.0)});
    fixtures.push_back({"truncnorm", make_truncated_normal_cdf(0.3, 0.25, 0.0, 1.0)});
    if (cfg.has_env) {
        const auto& m = cfg.model;
        if (!m.baseline.has_cdf())
            throw std::invalid_argument("experiment: configured env has no analytic return CDF oracle");
        const Vec x = {0.5 * (m.env.state_lo[0] + m.env.state_hi[0])};
        const ReturnInterval ri = return_bounds(m.env);
        Cdf f;
        f.lo = ri.v_min;
        f.hi = ri.v_max;
        auto base = m.baseline;
        f.value = [base, x](double z) { return base.return_cdf(x, z); };
        if (m.kind == "const") {
            const double atom = base.value.value(x);
            f.atoms = {atom};
            f.lo = atom;
            f.hi = atom;
            f.left_value = [atom](double z) { return z > atom ? 1.0 : 0.0; };
        } else {
            f.left_value = f.value;
        }
        if (base.has_quantile()) {
            f.quantile = [base, x](double tau) { return base.return_quantile(x, tau); };
        } else {
            auto val = f.value;
            const double lo = f.lo, hi = f.hi;
            f.quantile = [val, lo, hi](double tau) { return invert_cdf(val, lo, hi, tau); };
        }
        fixtures.push_back({"env-" + m.kind, std::move(f)});
    }
    return fixtures;
}

void append_check(ExperimentReport& rep, const std::string& name, bool ok) { rep.checks.push_back({name, ok}); }

std::string config_hash_of(const ExperimentConfig& cfg) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.canonical_json)));
    return buf;
}

std::string plot_script_for(const ExperimentReport& rep) {
    std::ostringstream os;
    os << "# gnuplot script; run from the report directory:  gnuplot plot.gp\n";
    os << "set datafile separator \",\"\n";
    os << "set terminal dumb size 100,30\n";
    os << "set key left bottom\n";
    if (rep.experiment == "quantile-bound" || rep.experiment == "weak-norm") {
        os << "set logscale xy\n";
        os << "set xlabel \"N\"\n";
        os << "set ylabel \"" << (rep.experiment == "quantile-bound" ? "kolmogorov distance" : "weak distance")
           << "\"\n";
        os << "plot \"metrics.csv\" skip 1 using 2:3 with linespoints title \"measured\", \\\n";
        os << "     \"metrics.csv\" skip 1 using 2:4 with lines title \"bound\"\n";
    } else if (rep.experiment == "shjb-decay") {
        os << "set logscale xy\n";
        os << "set xlabel \"N\"\n";
        os << "set ylabel \"median weak loss\"\n";
        os << "plot \"metrics.csv\" skip 1 using 2:4 with linespoints title \"median weak loss\"\n";
    } else {
        os << "set xlabel \"x\"\n";
        os << "set ylabel \"|imputed mean - baseline value|\"\n";
        os << "plot \"metrics.csv\" skip 1 using 2:5 with linespoints title \"error\", \\\n";
        os << "     \"metrics.csv\" skip 1 using 2:6 with lines title \"bound\"\n";
    }
    return os.str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

bool ExperimentReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

ExperimentConfig experiment_config_from_json(const std::string& text, const std::string& experiment_name) {
    const auto j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    cfg.experiment = experiment_name;
    if (j.contains("experiment")) {
        const auto named = j.at("experiment").get<std::string>();
        if (named != experiment_name)
            throw std::invalid_argument("config names experiment '" + named + "' but '" + experiment_name +
                                        "' was requested");
    }
    nlohmann::json canonical;
    canonical["experiment"] = experiment_name;
    if (j.contains("env") && !j.at("env").is_null()) {
        cfg.model = env_from_json(j.at("env").dump());
        cfg.has_env = true;
        canonical["env"] = j.at("env");
    } else {
        canonical["env"] = "builtin-default";
    }
    if (j.contains("n_list")) {
        cfg.n_list = j.at("n_list").get<std::vector<int>>();
        if (cfg.n_list.empty()) throw std::invalid_argument("config: n_list must be nonempty when given");
        for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
            if (cfg.n_list[i] < 1) throw std::invalid_argument("config: n_list entries must be positive");
            if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1])
                throw std::invalid_argument("config: n_list must be strictly increasing");
        }
    }
    canonical["n_list"] = cfg.n_list;
    cfg.sim.dt = 2e-3;
    cfg.sim.horizon = 10.0;
    cfg.sim.n_paths = 10000;
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        if (s.contains("dt")) cfg.sim.dt = s.at("dt").get<double>();
        if (s.contains("horizon")) cfg.sim.horizon = s.at("horizon").get<double>();
        if (s.contains("n_paths")) cfg.sim.n_paths = s.at("n_paths").get<long>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.sim.seed = cfg.seed;
    canonical["seed"] = cfg.seed;
    canonical["sim"] = {{"dt", cfg.sim.dt}, {"horizon", cfg.sim.horizon}, {"n_paths", cfg.sim.n_paths}};
    cfg.canonical_json = canonical.dump();
    return cfg;
}

ExperimentConfig experiment_config_from_file(const std::string& path, const std::string& experiment_name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return experiment_config_from_json(ss.str(), experiment_name);
}

void write_report_artifacts(const ExperimentReport& report, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);

    {
        std::ofstream csv(dir / "metrics.csv");
        if (!csv) throw std::runtime_error("cannot write metrics.csv");
        for (std::size_t c = 0; c < report.columns.size(); ++c)
            csv << report.columns[c] << (c + 1 < report.columns.size() ? "," : "\n");
        for (const auto& row : report.rows) {
            csv << row.label;
            for (double v : row.values) csv << "," << format_g(v);
            csv << "\n";
        }
    }
    {
        nlohmann::json j;
        j["experiment"] = report.experiment;
        j["version"] = report.version;
        j["provenance"] = {{"seed", report.seed}, {"config_hash", report.config_hash}};
        auto& checks = j["checks"] = nlohmann::json::array();
        for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}});
        auto& scalars = j["scalars"] = nlohmann::json::object();
        for (const auto& [k, v] : report.scalars) scalars[k] = v;
        j["passed"] = report.passed();
        j["metrics"] = "metrics.csv";
        std::ofstream out(dir / "report.json");
        if (!out) throw std::runtime_error("cannot write report.json");
        out << j.dump(2) << "\n";
    }
    {
        std::ofstream gp(dir / "plot.gp");
        if (!gp) throw std::runtime_error("cannot write plot.gp");
        gp << plot_script_for(report);
    }
}

ExperimentReport run_quantile_bound(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "quantile-bound";
    rep.seed = cfg.seed;
    rep.config_hash = config_hash_of(cfg);
    rep.columns = {"fixture", "N", "kolmogorov", "bound", "pass"};

    const auto ladder = cfg.n_list.empty() ? default_bound_ladder() : cfg.n_list;
    for (const auto& fx : bound_fixtures(cfg)) {
        bool all_ok = true;
        for (int n : ladder) {
            const StatVec s = midpoint_quantiles(fx.cdf, n);
            const Cdf imputed = impute_quantile_exact(s);
            const double dist = kolmogorov_distance(fx.cdf, imputed);
            const double bound = 0.5 / n + 1e-9;
            const bool ok = dist <= bound;
            all_ok = all_ok && ok;
            rep.rows.push_back({fx.name, {static_cast<double>(n), dist, bound, ok ? 1.0 : 0.0}});
        }
        append_check(rep, fx.name + ": kolmogorov distance within 1/(2N) + 1e-9 for all N", all_ok);
    }
    return rep;
}

ExperimentReport run_weak_norm(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "weak-norm";
    rep.seed = cfg.seed;
    rep.config_hash = config_hash_of(cfg);
    rep.columns = {"fixture", "N", "weak_distance", "bound", "quad_converged"};

    const auto ladder = cfg.n_list.empty() ? default_bound_ladder() : cfg.n_list;
    for (const auto& fx : bound_fixtures(cfg)) {
        const auto fam = make_test_family(fx.cdf.lo, fx.cdf.hi);
        const double mass = family_max_mass(fam);
        rep.scalars.push_back({"family_mass_" + fx.name, mass});
        bool bound_ok = true, mono_ok = true, quad_ok = true;
        double prev = std::numeric_limits<double>::infinity();
        for (int n : ladder) {
            const StatVec s = midpoint_quantiles(fx.cdf, n);
            const Cdf imputed = impute_quantile_exact(s);
            const auto wd = weak_distance(fx.cdf, imputed, fam);
            const double bound = 0.5 * mass / n;
            bound_ok = bound_ok && (wd.value <= bound);
            mono_ok = mono_ok && (wd.value <= prev);
            quad_ok = quad_ok && wd.quad_converged;
            prev = wd.value;
            rep.rows.push_back({fx.name, {static_cast<double>(n), wd.value, bound, wd.quad_converged ? 1.0 : 0.0}});
        }
        append_check(rep, fx.name + ": weak distance within M/(2N) for all N", bound_ok);
        append_check(rep, fx.name + ": weak distance non-increasing along the N sweep", mono_ok);
        append_check(rep, fx.name + ": quadrature refinements agreed", quad_ok);
    }
    return rep;
}

ExperimentReport run_shjb_decay(const ExperimentConfig& cfg, const std::string& out_dir) {
    ExperimentReport rep;
    rep.experiment = "shjb-decay";
    rep.seed = cfg.seed;
    rep.config_hash = config_hash_of(cfg);
    rep.columns = {"env", "N", "bandwidth", "median_weak_loss", "max_weak_loss", "fit_condition", "quad_converged"};

    const EnvModel model = cfg.has_env ? cfg.model : default_ou_model();
    const EnvSpec& env = model.env;
    const auto ladder = cfg.n_list.empty() ? default_decay_ladder() : cfg.n_list;

    const auto anchors = grid_states(env, 25);
    const ReturnData data = collect_return_data(env, anchors, cfg.sim);
    const ReturnInterval ri = return_bounds(env);
    const auto fam = make_test_family(ri.v_min, ri.v_max);
    const auto probes = probe_states(env);

    Vec medians;
    bool quad_ok = true;
    bool cond_ok = true;
    for (int n : ladder) {
        FitReport fit_rep;
        const StatFn sf = fit_quantiles(env, data, n, 1e-8, &fit_rep);
        const double h = mollification_bandwidth(ri.v_min, ri.v_max, n);
        const auto batch = weak_loss_batch(env, sf, h, probes, fam);
        Vec losses;
        double worst = 0.0;
        for (const auto& r : batch) {
            losses.push_back(r.loss);
            worst = std::max(worst, r.loss);
            quad_ok = quad_ok && r.quad_converged;
        }
        const double med = median(losses);
        medians.push_back(med);
        cond_ok = cond_ok && !fit_rep.ill_conditioned;
        rep.rows.push_back({model.kind,
                            {static_cast<double>(n), h, med, worst, fit_rep.condition, quad_ok ? 1.0 : 0.0}});

        if (!out_dir.empty() && n == ladder.back()) {
            std::filesystem::create_directories(out_dir);
            const auto rows = shjb_scan(env, sf, h, probes[probes.size() / 2], 513);
            write_residual_csv((std::filesystem::path(out_dir) / "residuals.csv").string(), rows);
        }
    }

    int violations = 0;
    for (std::size_t i = 1; i < medians.size(); ++i)
        if (medians[i] > medians[i - 1]) ++violations;
    append_check(rep, "median weak loss at N_max strictly below N_min", medians.back() < medians.front());
    append_check(rep, "median weak loss non-increasing in all but at most one doubling step", violations <= 1);
    append_check(rep, "quadrature refinements agreed", quad_ok);
    append_check(rep, "normal equations well conditioned", cond_ok);
    rep.scalars.push_back({"median_loss_first", medians.front()});
    rep.scalars.push_back({"median_loss_last", medians.back()});
    return rep;
}

ExperimentReport run_hjb_consistency(const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = "hjb-consistency";
    rep.seed = cfg.seed;
    rep.config_hash = config_hash_of(cfg);
    rep.columns = {"env", "x", "baseline_value", "imputed_mean", "abs_error", "bound", "hjb_residual"};

    const EnvModel model = cfg.has_env ? cfg.model : default_ou_model();
    const EnvSpec& env = model.env;
    if (!model.baseline.has_value())
        throw std::invalid_argument("hjb-consistency: env has no baseline value function");
    const auto ladder = cfg.n_list.empty() ? default_decay_ladder() : cfg.n_list;
    const int n_max = ladder.back();

    double residual_max = 0.0;
    for (const Vec& x : grid_states(env, 100))
        residual_max = std::max(residual_max, std::abs(hjb_residual(env, model.baseline.value, x)));
    append_check(rep, "baseline value solves the stationary equation within 1e-8 on 100 states",
                 residual_max <= 1e-8);
    rep.scalars.push_back({"hjb_residual_max", residual_max});

    const ReturnInterval ri = return_bounds(env);
    const double r_abs = std::max(std::abs(env.reward_min), std::abs(env.reward_max));
    bool means_ok = true;
    const auto probes = probe_states(env);
    const ReturnData data = collect_return_data(env, probes, cfg.sim);
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto& dist = data.dists[k];
        const StatVec q = empirical_quantiles(dist, n_max);
        const double imputed = mean_of_imputation(q);
        const double baseline = model.baseline.value.value(probes[k]);
        const double err = std::abs(imputed - baseline);

        double mean = 0.0;
        for (double s : dist.samples) mean += s;
        mean /= static_cast<double>(dist.samples.size());
        double var = 0.0;
        for (double s : dist.samples) var += (s - mean) * (s - mean);
        var /= static_cast<double>(dist.samples.size() - 1);
        const double slack = 3.0 * std::sqrt(var / static_cast<double>(dist.samples.size())) + cfg.sim.dt * r_abs;

        const double bound = ri.width() / (2.0 * n_max) + slack;
        means_ok = means_ok && (err <= bound);
        const double resid = std::abs(hjb_residual(env, model.baseline.value, probes[k]));
        rep.rows.push_back({model.kind, {probes[k][0], baseline, imputed, err, bound, resid}});
    }
    append_check(rep, "imputed mean matches baseline value within width/(2N) plus sampling slack", means_ok);
    return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    ExperimentReport rep;
    if (cfg.experiment == "quantile-bound") {
        rep = run_quantile_bound(cfg);
    } else if (cfg.experiment == "weak-norm") {
        rep = run_weak_norm(cfg);
    } else if (cfg.experiment == "shjb-decay") {
        rep = run_shjb_decay(cfg, out_dir);
    } else if (cfg.experiment == "hjb-consistency") {
        rep = run_hjb_consistency(cfg);
    } else {
        throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
    }
    write_report_artifacts(rep, out_dir);
    return rep;
}

}  // namespace ctdrl
