#include "abdesign/evaluators.hpp"

#include <cmath>

#include "abdesign/errors.hpp"
#include "abdesign/so3.hpp"

namespace abdesign {

double kyte_doolittle(AminoAcid a) {
    // Kyte & Doolittle (1982) hydropathy, indexed by the ACDE... alphabet.
    static constexpr std::array<double, kNumAminoAcids> kScale = {
        1.8,   // A
        2.5,   // C
        -3.5,  // D
        -3.5,  // E
        2.8,   // F
        -0.4,  // G
        -3.2,  // H
        4.5,   // I
        -3.9,  // K
        3.8,   // L
        1.9,   // M
        -3.5,  // N
        -1.6,  // P
        -3.5,  // Q
        -4.5,  // R
        -0.8,  // S
        -0.7,  // T
        4.2,   // V
        -0.9,  // W
        -1.3,  // Y
    };
    return kScale[static_cast<std::size_t>(a)];
}

double HydropathyReward::evaluate_impl(const CdrState& state) {
    if (state.types.empty()) throw ContractError("hydropathy: empty state");
    double sum = 0.0;
    for (AminoAcid a : state.types) sum += kyte_doolittle(a);
    return -sum / static_cast<double>(state.types.size());
}

QuadraticReward::QuadraticReward(CdrState target, double lambda, double mu, std::string name)
    : Evaluator(std::move(name)), target_(std::move(target)), lambda_(lambda), mu_(mu) {}

double QuadraticReward::evaluate_impl(const CdrState& state) {
    if (state.size() != target_.size()) throw ContractError("quadratic reward: length mismatch");
    double reward = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        reward -= (state.coords[i] - target_.coords[i]).squaredNorm();
        if (state.types[i] != target_.types[i]) reward -= lambda_;
        if (mu_ != 0.0) {
            double g = so3::geodesic_distance(state.orients[i], target_.orients[i]);
            reward -= mu_ * g * g;
        }
    }
    return reward;
}

WeightedObjective::WeightedObjective(std::vector<ObjectiveComponent> components, std::string name)
    : Evaluator(std::move(name)), components_(std::move(components)) {
    for (const auto& c : components_) {
        if (!c.evaluator) throw ConfigError("weighted objective: null component");
        if (!(c.normalizer.scale > 0.0))
            throw ConfigError("weighted objective: normalizer scale must be > 0");
    }
}

void WeightedObjective::set_normalizers(const std::vector<Normalizer>& normalizers) {
    if (normalizers.size() != components_.size())
        throw ConfigError("weighted objective: normalizer count mismatch");
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (!(normalizers[i].scale > 0.0))
            throw ConfigError("weighted objective: normalizer scale must be > 0");
        components_[i].normalizer = normalizers[i];
    }
}

void WeightedObjective::set_weights(const std::vector<double>& weights) {
    if (weights.size() != components_.size())
        throw ConfigError("weighted objective: weight count mismatch");
    for (std::size_t i = 0; i < components_.size(); ++i) components_[i].weight = weights[i];
}

std::vector<double> WeightedObjective::component_raw_values(const CdrState& state) const {
    std::vector<double> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.evaluator->evaluate(state));
    return out;
}

double WeightedObjective::evaluate_impl(const CdrState& state) {
    double total = 0.0;
    for (const auto& c : components_) {
        double raw;
        try {
            raw = c.evaluator->evaluate(state);
        } catch (const std::exception& e) {
            throw EvaluatorError("component '" + c.evaluator->name() + "' failed: " + e.what());
        }
        total += c.weight * (raw - c.normalizer.shift) / c.normalizer.scale;
    }
    return total;
}

std::vector<Normalizer> calibrate_normalizers(const WeightedObjective& objective,
                                              const std::vector<CdrState>& samples) {
    if (samples.size() < 2)
        throw ConfigError("calibration needs at least 2 samples, got " +
                          std::to_string(samples.size()));
    const auto& comps = objective.components();
    std::vector<std::vector<double>> raw(comps.size());
    for (const auto& s : samples) {
        auto values = objective.component_raw_values(s);
        for (std::size_t i = 0; i < comps.size(); ++i) raw[i].push_back(values[i]);
    }
    std::vector<Normalizer> out(comps.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
        double mean = 0.0;
        for (double v : raw[i]) mean += v;
        mean /= n;
        double var = 0.0;
        for (double v : raw[i]) var += (v - mean) * (v - mean);
        var /= n;
        out[i].shift = mean;
        out[i].scale = std::max(std::sqrt(var), 1e-8);
    }
    return out;
}

}  // namespace abdesign
