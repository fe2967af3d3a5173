#pragma once

#include <functional>
#include <string>

#include "ctdrl/linalg.hpp"

namespace ctdrl {

// Fixed-policy diffusion dynamics: drift and diffusion of the state SDE,
// an instantaneous reward rate, a discount in (0,1), and a box the state
// is confined to. Drift/diffusion/reward write into caller-owned buffers;
// the struct is immutable after construction and safe to share across
// threads.
struct EnvSpec {
    int dim = 1;
    int noise_dim = 1;
    std::function<void(const Vec&, Vec&)> drift;       // out: dim
    std::function<void(const Vec&, Mat&)> diffusion;   // out: dim x noise_dim
    std::function<double(const Vec&)> reward;
    double discount = 0.9;
    Vec state_lo, state_hi;
    double reward_min = 0.0;
    double reward_max = 0.0;

    // log(1/gamma) > 0; the effective discount rate.
    double discount_rate() const;
    Vec drift_at(const Vec& x) const;
    Mat diffusion_at(const Vec& x) const;
};

// Throws std::invalid_argument when an invariant is broken (discount
// outside (0,1), inverted box, non-finite drift/diffusion/reward probes).
void validate_env(const EnvSpec& env);

struct ReturnInterval {
    double v_min = 0.0;
    double v_max = 0.0;
    double width() const { return v_max - v_min; }
};

// Scalar field with analytic first and second derivatives.
struct SmoothFn {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
};

// Closed forms bundled with an environment where they exist. Empty
// std::function means "not available".
struct AnalyticBaseline {
    SmoothFn value;                                          // expected return
    std::function<double(const Vec&, double)> return_cdf;    // F(x, z)
    std::function<double(const Vec&, double)> return_quantile;
    bool has_value() const { return static_cast<bool>(value.value); }
    bool has_cdf() const { return static_cast<bool>(return_cdf); }
    bool has_quantile() const { return static_cast<bool>(return_quantile); }
};

struct EnvModel {
    EnvSpec env;
    AnalyticBaseline baseline;
    std::string kind;
};

// [v_min, v_max] containing every realizable discounted return:
// r in [r_min, r_max] integrated against gamma^t has mass 1/log(1/gamma).
ReturnInterval return_bounds(const EnvSpec& env);

// Degenerate fixture: zero dynamics, constant reward c. The return is
// deterministic, c / log(1/gamma), at every state.
EnvModel make_const_env(double c, double gamma);

// 1-D mean-reverting diffusion: dX = -theta X dt + sigma0 dB, reward
// r(x) = x clipped to the state box. The expected return is
// x / (theta + log(1/gamma)); with sigma0 > 0 the return is Gaussian with
// the state-independent variance given by ou_return_variance.
EnvModel make_ou_env(double theta, double sigma0, double gamma);

// Variance of the discounted-reward integral for the unclipped OU fixture.
double ou_return_variance(double theta, double sigma0, double gamma);

// Construct from a JSON config: {"kind": "const"|"ou", "c": .., "theta": ..,
// "sigma0": .., "gamma": .., "state_lo": .., "state_hi": ..}.
EnvModel env_from_json(const std::string& json_text);
EnvModel env_from_file(const std::string& path);

}  // namespace ctdrl
