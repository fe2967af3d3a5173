#include "ctdrl/imputation_types.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace ctdrl {

std::string stat_kind_name(StatKind kind) {
    switch (kind) {
        case StatKind::quantile: return "quantile";
        case StatKind::categorical_probs: return "categorical_probs";
        case StatKind::gaussian_params: return "gaussian_params";
    }
    throw std::logic_error("stat_kind_name: unknown kind");
}

StatKind stat_kind_from_name(const std::string& name) {
    if (name == "quantile") return StatKind::quantile;
    if (name == "categorical_probs") return StatKind::categorical_probs;
    if (name == "gaussian_params") return StatKind::gaussian_params;
    throw std::invalid_argument("stat_kind_from_name: unknown kind '" + name + "'");
}

void validate_stats(const StatVec& s, const double* v_min, const double* v_max) {
    if (s.values.empty()) throw std::invalid_argument("stats: empty value vector");
    for (double v : s.values)
        if (!std::isfinite(v)) throw std::invalid_argument("stats: non-finite value");

    switch (s.kind) {
        case StatKind::quantile: {
            for (std::size_t i = 1; i < s.values.size(); ++i)
                if (s.values[i] < s.values[i - 1])
                    throw std::invalid_argument("stats: quantile values must be nondecreasing");
            if (v_min && s.values.front() < *v_min)
                throw std::invalid_argument("stats: quantile below the return interval");
            if (v_max && s.values.back() > *v_max)
                throw std::invalid_argument("stats: quantile above the return interval");
            break;
        }
        case StatKind::categorical_probs: {
            double total = 0.0;
            for (double v : s.values) {
                if (v < -1e-12) throw std::invalid_argument("stats: negative category probability");
                total += v;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw std::invalid_argument("stats: category probabilities must sum to 1");
            break;
        }
        case StatKind::gaussian_params: {
            if (s.values.size() != 2)
                throw std::invalid_argument("stats: gaussian_params needs exactly (mean, variance)");
            if (s.values[1] < 0.0) throw std::invalid_argument("stats: negative variance");
            break;
        }
    }
}

std::string stats_to_json(const StatVec& s) {
    nlohmann::json j;
    j["kind"] = stat_kind_name(s.kind);
    j["values"] = s.values;
    return j.dump();
}

StatVec stats_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    StatVec s;
    s.kind = stat_kind_from_name(j.at("kind").get<std::string>());
    s.values = j.at("values").get<Vec>();
    validate_stats(s);
    return s;
}

}  // namespace ctdrl
