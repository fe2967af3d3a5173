#include "ctdrl/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ctdrl/normal.hpp"
#include "json.hpp"

namespace ctdrl {

double EnvSpec::discount_rate() const { return std::log(1.0 / discount); }

Vec EnvSpec::drift_at(const Vec& x) const {
    Vec out(static_cast<std::size_t>(dim), 0.0);
    drift(x, out);
    return out;
}

Mat EnvSpec::diffusion_at(const Vec& x) const {
    Mat out(dim, noise_dim);
    diffusion(x, out);
    return out;
}

void validate_env(const EnvSpec& env) {
    if (!(env.discount > 0.0 && env.discount < 1.0)) throw std::invalid_argument("env: discount must lie in (0,1)");
    if (env.dim < 1 || env.noise_dim < 1) throw std::invalid_argument("env: dimensions must be positive");
    if (static_cast<int>(env.state_lo.size()) != env.dim || static_cast<int>(env.state_hi.size()) != env.dim)
        throw std::invalid_argument("env: state box size mismatch");
    for (int i = 0; i < env.dim; ++i) {
        if (!(env.state_lo[i] <= env.state_hi[i])) throw std::invalid_argument("env: inverted state box");
    }
    if (!std::isfinite(env.reward_min) || !std::isfinite(env.reward_max) || env.reward_min > env.reward_max)
        throw std::invalid_argument("env: reward bounds invalid");
    if (!env.drift || !env.diffusion || !env.reward) throw std::invalid_argument("env: missing dynamics callbacks");

    // Probe corners and the midpoint for finiteness.
    Vec probe(static_cast<std::size_t>(env.dim));
    Vec mu(static_cast<std::size_t>(env.dim));
    Mat sig(env.dim, env.noise_dim);
    for (int corner = 0; corner < 3; ++corner) {
        for (int i = 0; i < env.dim; ++i) {
            probe[i] = corner == 0 ? env.state_lo[i]
                     : corner == 1 ? env.state_hi[i]
                                   : 0.5 * (env.state_lo[i] + env.state_hi[i]);
        }
        env.drift(probe, mu);
        env.diffusion(probe, sig);
        const double r = env.reward(probe);
        if (!std::isfinite(r)) throw std::invalid_argument("env: non-finite reward on state box");
        for (double v : mu)
            if (!std::isfinite(v)) throw std::invalid_argument("env: non-finite drift on state box");
        for (double v : sig.data)
            if (!std::isfinite(v)) throw std::invalid_argument("env: non-finite diffusion on state box");
    }
}

ReturnInterval return_bounds(const EnvSpec& env) {
    if (!(env.discount > 0.0 && env.discount < 1.0)) throw std::invalid_argument("return_bounds: discount outside (0,1)");
    const double beta = env.discount_rate();
    return ReturnInterval{env.reward_min / beta, env.reward_max / beta};
}

EnvModel make_const_env(double c, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("make_const_env: gamma outside (0,1)");
    EnvModel m;
    m.kind = "const";
    EnvSpec& e = m.env;
    e.dim = 1;
    e.noise_dim = 1;
    e.discount = gamma;
    e.state_lo = {-1.0};
    e.state_hi = {1.0};
    e.reward_min = c;
    e.reward_max = c;
    e.drift = [](const Vec&, Vec& out) { out[0] = 0.0; };
    e.diffusion = [](const Vec&, Mat& out) { out(0, 0) = 0.0; };
    e.reward = [c](const Vec&) { return c; };
    validate_env(e);

    const double v = c / e.discount_rate();
    m.baseline.value.value = [v](const Vec&) { return v; };
    m.baseline.value.gradient = [](const Vec&) { return Vec{0.0}; };
    m.baseline.value.hessian = [](const Vec&) { return Mat(1, 1, 0.0); };
    m.baseline.return_cdf = [v](const Vec&, double z) { return z >= v ? 1.0 : 0.0; };
    m.baseline.return_quantile = [v](const Vec&, double) { return v; };
    return m;
}

double ou_return_variance(double theta, double sigma0, double gamma) {
    const double beta = std::log(1.0 / gamma);
    const double a = theta + beta;
    return sigma0 * sigma0 / (2.0 * beta * a * a);
}

EnvModel make_ou_env(double theta, double sigma0, double gamma) {
    if (!(theta > 0.0)) throw std::invalid_argument("make_ou_env: theta must be positive");
    if (!(sigma0 >= 0.0)) throw std::invalid_argument("make_ou_env: sigma0 must be nonnegative");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("make_ou_env: gamma outside (0,1)");

    EnvModel m;
    m.kind = "ou";
    EnvSpec& e = m.env;
    e.dim = 1;
    e.noise_dim = 1;
    e.discount = gamma;
    // Three stationary standard deviations plus margin, so the mass the
    // clamp touches stays below Monte Carlo noise.
    const double edge = 3.0 * sigma0 / std::sqrt(2.0 * theta) + 1.0;
    e.state_lo = {-edge};
    e.state_hi = {edge};
    e.reward_min = -edge;
    e.reward_max = edge;
    const double lo = -edge, hi = edge;
    e.drift = [theta](const Vec& x, Vec& out) { out[0] = -theta * x[0]; };
    e.diffusion = [sigma0](const Vec&, Mat& out) { out(0, 0) = sigma0; };
    e.reward = [lo, hi](const Vec& x) { return std::clamp(x[0], lo, hi); };
    validate_env(e);

    const double beta = e.discount_rate();
    const double slope = 1.0 / (theta + beta);
    m.baseline.value.value = [slope](const Vec& x) { return slope * x[0]; };
    m.baseline.value.gradient = [slope](const Vec&) { return Vec{slope}; };
    m.baseline.value.hessian = [](const Vec&) { return Mat(1, 1, 0.0); };

    if (sigma0 > 0.0) {
        const double sd = std::sqrt(ou_return_variance(theta, sigma0, gamma));
        m.baseline.return_cdf = [slope, sd](const Vec& x, double z) { return normal_cdf((z - slope * x[0]) / sd); };
        m.baseline.return_quantile = [slope, sd](const Vec& x, double tau) {
            return slope * x[0] + sd * normal_quantile_fast(tau);
        };
    } else {
        m.baseline.return_cdf = [slope](const Vec& x, double z) { return z >= slope * x[0] ? 1.0 : 0.0; };
        m.baseline.return_quantile = [slope](const Vec& x, double) { return slope * x[0]; };
    }
    return m;
}

EnvModel env_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    const std::string kind = j.at("kind").get<std::string>();
    EnvModel m;
    if (kind == "const") {
        m = make_const_env(j.at("c").get<double>(), j.at("gamma").get<double>());
    } else if (kind == "ou") {
        m = make_ou_env(j.at("theta").get<double>(), j.value("sigma0", 0.0), j.at("gamma").get<double>());
    } else {
        throw std::invalid_argument("env_from_json: unknown kind '" + kind + "'");
    }
    // Optional box override; reward bounds follow the box for the OU kind.
    if (j.contains("state_lo") && j.contains("state_hi")) {
        const double lo = j.at("state_lo").get<double>();
        const double hi = j.at("state_hi").get<double>();
        m.env.state_lo = {lo};
        m.env.state_hi = {hi};
        if (kind == "ou") {
            m.env.reward_min = lo;
            m.env.reward_max = hi;
            m.env.reward = [lo, hi](const Vec& x) { return std::clamp(x[0], lo, hi); };
        }
        validate_env(m.env);
    }
    return m;
}

EnvModel env_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("env_from_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return env_from_json(ss.str());
}

}  // namespace ctdrl
