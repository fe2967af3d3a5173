#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "check.hpp"
#include "ctdrl/experiments.hpp"

using namespace ctdrl;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(static_cast<bool>(in), "readable file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void config_parsing() {
    const ExperimentConfig cfg = experiment_config_from_json("{}", "quantile-bound");
    REQUIRE(cfg.experiment == "quantile-bound", "experiment name attached");
    REQUIRE(!cfg.has_env, "no env by default");
    REQUIRE(cfg.n_list.empty(), "ladder deferred to the experiment default");
    REQUIRE(cfg.sim.dt == 2e-3 && cfg.sim.horizon == 10.0 && cfg.sim.n_paths == 10000, "sim defaults");
    REQUIRE(cfg.seed == 0 && cfg.sim.seed == 0, "seed default");
    REQUIRE(cfg.canonical_json.find("builtin-default") != std::string::npos,
            "canonical form marks the built-in env");

    const ExperimentConfig twice = experiment_config_from_json("{}", "quantile-bound");
    REQUIRE(twice.canonical_json == cfg.canonical_json, "canonical form deterministic");

    const ExperimentConfig full = experiment_config_from_json(
        R"({"experiment": "weak-norm", "env": {"kind": "const", "c": 1.0, "gamma": 0.9},
            "n_list": [1, 2, 4], "sim": {"dt": 0.01, "n_paths": 500}, "seed": 7})",
        "weak-norm");
    REQUIRE(full.has_env && full.model.kind == "const", "env parsed");
    REQUIRE(full.n_list.size() == 3 && full.n_list[2] == 4, "ladder parsed");
    REQUIRE(full.sim.dt == 0.01 && full.sim.n_paths == 500 && full.sim.horizon == 10.0, "sim overrides");
    REQUIRE(full.seed == 7 && full.sim.seed == 7, "seed propagated to the simulator");

    REQUIRE_THROWS(experiment_config_from_json(R"({"experiment": "weak-norm"})", "quantile-bound"),
                   "experiment name mismatch rejected");
    REQUIRE_THROWS(experiment_config_from_json(R"({"n_list": [4, 2]})", "weak-norm"),
                   "non-increasing ladder rejected");
    REQUIRE_THROWS(experiment_config_from_json(R"({"n_list": [0]})", "weak-norm"), "zero entry rejected");
    REQUIRE_THROWS(experiment_config_from_json(R"({"env": {"kind": "bogus"}})", "weak-norm"),
                   "unknown env kind rejected");
    test_done("config parsing");
}

void hash_function_vectors() {
    REQUIRE(fnv1a64("") == 0xcbf29ce484222325ull, "empty-string offset basis");
    REQUIRE(fnv1a64("a") == 0xaf63dc4c8601ec8cull, "single byte");
    REQUIRE(fnv1a64("ab") != fnv1a64("ba"), "order sensitive");
    test_done("hash vectors");
}

void quantile_bound_experiment() {
    const ExperimentConfig cfg = experiment_config_from_json(R"({"n_list": [1, 2, 4]})", "quantile-bound");
    const ExperimentReport rep = run_quantile_bound(cfg);
    REQUIRE(rep.passed(), "bound holds on the reference fixtures");
    REQUIRE(rep.checks.size() == 2, "one check per fixture");
    REQUIRE(rep.rows.size() == 6, "one row per fixture and N");
    REQUIRE(rep.rows[0].label == "uniform", "fixture label");
    REQUIRE_CLOSE(rep.rows[0].values[0], 1.0, 0.0, "first N");
    REQUIRE_CLOSE(rep.rows[0].values[1], 0.5, 1e-9, "single uniform atom sits exactly 1/2 away");
    REQUIRE(rep.config_hash.size() == 16, "hex provenance hash");

    const ExperimentConfig with_env = experiment_config_from_json(
        R"({"n_list": [1, 2], "env": {"kind": "const", "c": 1.0, "gamma": 0.9}})", "quantile-bound");
    const ExperimentReport rep2 = run_quantile_bound(with_env);
    REQUIRE(rep2.passed(), "point-mass env fixture imputes exactly");
    REQUIRE(rep2.rows.size() == 6 && rep2.checks.size() == 3, "env fixture adds a sweep");
    REQUIRE(rep2.rows[4].label == "env-const", "env fixture label");
    REQUIRE(rep2.rows[4].values[1] <= 1e-12, "deterministic return imputed with zero distance");
    test_done("quantile bound experiment");
}

void weak_norm_experiment() {
    const ExperimentConfig cfg = experiment_config_from_json(R"({"n_list": [1, 2, 4]})", "weak-norm");
    const ExperimentReport rep = run_weak_norm(cfg);
    REQUIRE(rep.passed(), "weak bound, monotonicity, and quadrature checks hold");
    REQUIRE(rep.checks.size() == 6, "three checks per fixture");
    bool found_mass = false;
    for (const auto& [name, value] : rep.scalars) {
        if (name == "family_mass_uniform") {
            found_mass = true;
            REQUIRE_CLOSE(value, 0.125 * std::sqrt(2.0 * std::acos(-1.0)), 1e-6, "recorded family mass");
        }
    }
    REQUIRE(found_mass, "family mass recorded as a scalar");
    test_done("weak norm experiment");
}

void decay_experiment_small() {
    const ExperimentConfig cfg = experiment_config_from_json(
        R"({"n_list": [2, 4], "sim": {"n_paths": 1500, "dt": 0.004}, "seed": 1})", "shjb-decay");
    const std::string dir = "/tmp/ctdrl_test_decay";
    std::filesystem::remove_all(dir);
    const ExperimentReport rep = run_experiment(cfg, dir);
    REQUIRE(rep.passed(), "loss decays from two to four statistics");
    REQUIRE(rep.rows.size() == 2, "one row per N");
    REQUIRE(rep.rows[1].values[2] < rep.rows[0].values[2], "median loss fell");
    REQUIRE(std::filesystem::exists(dir + "/report.json"), "report written");
    REQUIRE(std::filesystem::exists(dir + "/metrics.csv"), "metrics written");
    REQUIRE(std::filesystem::exists(dir + "/plot.gp"), "plot script written");
    REQUIRE(std::filesystem::exists(dir + "/residuals.csv"), "residual scan written for the largest N");

    const std::string report_text = slurp(dir + "/report.json");
    REQUIRE(report_text.find("\"passed\": true") != std::string::npos, "report records the verdict");
    REQUIRE(report_text.find(rep.config_hash) != std::string::npos, "report records the provenance hash");
    REQUIRE(report_text.find(kVersion) != std::string::npos, "report records the version");
    test_done("decay experiment, small ladder");
}

void consistency_experiment_small() {
    const ExperimentConfig cfg = experiment_config_from_json(
        R"({"n_list": [1, 2, 4, 8], "sim": {"n_paths": 2000, "dt": 0.005}})", "hjb-consistency");
    const ExperimentReport rep = run_hjb_consistency(cfg);
    REQUIRE(rep.passed(), "baseline residual and imputed means verified");
    REQUIRE(rep.rows.size() == 9, "one row per probe state");
    for (const auto& row : rep.rows) REQUIRE(row.values[5] <= 1e-8, "pointwise residual column stays at zero");
    test_done("consistency experiment, small run");
}

void artifacts_are_deterministic() {
    const ExperimentConfig cfg = experiment_config_from_json(R"({"n_list": [1, 2, 4]})", "quantile-bound");
    const std::string dir_a = "/tmp/ctdrl_test_rep_a";
    const std::string dir_b = "/tmp/ctdrl_test_rep_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    run_experiment(cfg, dir_a);
    run_experiment(cfg, dir_b);
    REQUIRE(slurp(dir_a + "/metrics.csv") == slurp(dir_b + "/metrics.csv"), "metrics byte-identical across reruns");
    REQUIRE(slurp(dir_a + "/report.json") == slurp(dir_b + "/report.json"), "report byte-identical across reruns");
    REQUIRE(slurp(dir_a + "/plot.gp") == slurp(dir_b + "/plot.gp"), "plot script byte-identical across reruns");

    const std::string header = slurp(dir_a + "/metrics.csv").substr(0, 31);
    REQUIRE(header == "fixture,N,kolmogorov,bound,pass", "metrics header names the columns");
    test_done("artifact determinism");
}

void dispatch_rejects_unknown_experiments() {
    ExperimentConfig cfg = experiment_config_from_json("{}", "quantile-bound");
    cfg.experiment = "made-up";
    REQUIRE_THROWS(run_experiment(cfg, "/tmp/ctdrl_test_never"), "unknown experiment rejected");
    test_done("dispatch validation");
}

}  // namespace

int main() {
    config_parsing();
    hash_function_vectors();
    quantile_bound_experiment();
    weak_norm_experiment();
    decay_experiment_small();
    consistency_experiment_small();
    artifacts_are_deterministic();
    dispatch_rejects_unknown_experiments();
    std::cout << "test_experiments: all tests passed\n";
    return 0;
}
