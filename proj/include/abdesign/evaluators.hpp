#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "abdesign/types.hpp"

namespace abdesign {

/// Black-box property function. Rewards are always "higher is better";
/// properties whose raw value is lower-better are negated inside the
/// evaluator, never by the guidance code, so a single orientation convention
/// holds across every strategy.
///
/// The query counter increments by exactly one per evaluate() call, including
/// calls that end in an error. Built-in evaluators are pure in the state and
/// safe to call concurrently.
class Evaluator {
public:
    virtual ~Evaluator() = default;

    double evaluate(const CdrState& state) {
        queries_.fetch_add(1, std::memory_order_relaxed);
        return evaluate_impl(state);
    }

    const std::string& name() const { return name_; }
    std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }

protected:
    explicit Evaluator(std::string name) : name_(std::move(name)) {}
    virtual double evaluate_impl(const CdrState& state) = 0;

private:
    std::string name_;
    std::atomic<std::uint64_t> queries_{0};
};

/// Kyte-Doolittle hydropathy value for one residue type.
double kyte_doolittle(AminoAcid a);

/// Mean hydropathy over the sequence, negated: hydrophilic (low hydropathy)
/// sequences score high.
class HydropathyReward final : public Evaluator {
public:
    HydropathyReward() : Evaluator("hydropathy") {}

protected:
    double evaluate_impl(const CdrState& state) override;
};

/// Smooth analytic reward peaking at a target state:
///   -sum_i ||x_i - x*_i||^2 - lambda * #{s_i != s*_i} - mu * sum_i geo(O_i, O*_i)^2
/// Used to verify the gradient estimator and for latent-coupled guidance
/// experiments on the synthetic task.
class QuadraticReward final : public Evaluator {
public:
    QuadraticReward(CdrState target, double lambda, double mu,
                    std::string name = "quadratic");

protected:
    double evaluate_impl(const CdrState& state) override;

private:
    CdrState target_;
    double lambda_;
    double mu_;
};

struct Normalizer {
    double shift = 0.0;
    double scale = 1.0;  // must stay > 0
};

struct ObjectiveComponent {
    std::shared_ptr<Evaluator> evaluator;
    double weight = 1.0;
    Normalizer normalizer;
};

/// Weighted scalarization of several component rewards:
///   sum_i w_i * (raw_i - shift_i) / scale_i
class WeightedObjective final : public Evaluator {
public:
    explicit WeightedObjective(std::vector<ObjectiveComponent> components,
                               std::string name = "weighted");

    const std::vector<ObjectiveComponent>& components() const { return components_; }
    void set_normalizers(const std::vector<Normalizer>& normalizers);
    void set_weights(const std::vector<double>& weights);

    /// Raw (unnormalized, unweighted) component values for reporting.
    /// Increments the component counters but not this objective's counter.
    std::vector<double> component_raw_values(const CdrState& state) const;

protected:
    double evaluate_impl(const CdrState& state) override;

private:
    std::vector<ObjectiveComponent> components_;
};

/// Z-score normalizers from a calibration sample: shift = sample mean of each
/// component's raw reward, scale = sample standard deviation floored at 1e-8.
/// Requires at least 2 samples.
std::vector<Normalizer> calibrate_normalizers(const WeightedObjective& objective,
                                              const std::vector<CdrState>& samples);

}  // namespace abdesign
