#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "check.hpp"

namespace {

std::string g_binary;

int run(const std::string& args, const std::string& out_file) {
    const std::string cmd = "\"" + g_binary + "\" " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1, "command launched");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(static_cast<bool>(in), "readable file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(static_cast<bool>(out), "writable file " + path);
    out << text;
}

void simulate_subcommand() {
    write_file("/tmp/ctdrl_cli_env.json", R"({"kind": "const", "c": 1.0, "gamma": 0.9})");
    const int code = run(
        "simulate --env /tmp/ctdrl_cli_env.json --x0 0.0 --dt 0.05 --horizon 110 "
        "--paths 4 --seed 2 --out /tmp/ctdrl_cli_samples.csv",
        "/tmp/ctdrl_cli_sim.out");
    REQUIRE(code == 0, "simulate exits cleanly");
    const std::string out = slurp("/tmp/ctdrl_cli_sim.out");
    REQUIRE(out.find("wrote 4 returns") != std::string::npos, "simulate reports the sample count");

    const std::string csv = slurp("/tmp/ctdrl_cli_samples.csv");
    REQUIRE(csv.rfind("return\n", 0) == 0, "samples csv header");
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    REQUIRE(rows == 5, "header plus one row per path");
    test_done("simulate subcommand");
}

void experiment_subcommands() {
    write_file("/tmp/ctdrl_cli_qb.json", R"({"n_list": [1, 2, 4]})");
    std::filesystem::remove_all("/tmp/ctdrl_cli_qb");
    int code = run("quantile-bound --config /tmp/ctdrl_cli_qb.json --out /tmp/ctdrl_cli_qb",
                   "/tmp/ctdrl_cli_qb.out");
    REQUIRE(code == 0, "quantile-bound exits cleanly");
    const std::string out = slurp("/tmp/ctdrl_cli_qb.out");
    REQUIRE(out.find("[PASS]") != std::string::npos, "per-check verdict printed");
    REQUIRE(out.find("[FAIL]") == std::string::npos, "no failures on the reference fixtures");
    REQUIRE(std::filesystem::exists("/tmp/ctdrl_cli_qb/report.json"), "report artifact written");
    REQUIRE(std::filesystem::exists("/tmp/ctdrl_cli_qb/metrics.csv"), "metrics artifact written");

    write_file("/tmp/ctdrl_cli_wn.json", R"({"n_list": [1, 2]})");
    std::filesystem::remove_all("/tmp/ctdrl_cli_wn");
    code = run("weak-norm --config /tmp/ctdrl_cli_wn.json --out /tmp/ctdrl_cli_wn", "/tmp/ctdrl_cli_wn.out");
    REQUIRE(code == 0, "weak-norm exits cleanly");
    test_done("experiment subcommands");
}

void error_paths() {
    write_file("/tmp/ctdrl_cli_bad.json", R"({"experiment": "weak-norm"})");
    int code = run("quantile-bound --config /tmp/ctdrl_cli_bad.json --out /tmp/ctdrl_cli_bad_out",
                   "/tmp/ctdrl_cli_bad.out");
    REQUIRE(code == 2, "mismatched experiment name exits with the error code");
    REQUIRE(slurp("/tmp/ctdrl_cli_bad.out").find("error") != std::string::npos, "error message printed");

    code = run("quantile-bound", "/tmp/ctdrl_cli_noout.out");
    REQUIRE(code != 0, "missing required output directory rejected");

    code = run("simulate --env /tmp/ctdrl_cli_env.json --x0 0.0 --dt 0.05 --horizon 1 --paths 2 "
               "--out /tmp/ctdrl_cli_short.csv",
               "/tmp/ctdrl_cli_short.out");
    REQUIRE(code == 2, "horizon with a fat discounted tail rejected");
    test_done("error paths");
}

}  // namespace

int main(int argc, char** argv) {
    REQUIRE(argc == 2, "usage: test_cli <path-to-cli-binary>");
    g_binary = argv[1];
    simulate_subcommand();
    experiment_subcommands();
    error_paths();
    std::cout << "test_cli: all tests passed\n";
    return 0;
}
