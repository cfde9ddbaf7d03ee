#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "abdesign/denoiser.hpp"
#include "abdesign/diffusion.hpp"
#include "abdesign/evaluators.hpp"
#include "abdesign/rng.hpp"
#include "abdesign/schedule.hpp"

namespace abdesign {

/// How the candidate noise applied to the shared latent code is chosen.
///   Hard / Soft / Weighted operate on K latent perturbations; the combined
///   modes evaluate the selection result against the reward-weighted sum and
///   keep the better of the two. RawHard / RawSoft are the baseline that
///   selects among K raw-space DDPM candidates instead.
enum class GuidanceStrategy {
    None,
    Hard,
    Soft,
    Weighted,
    WeightedHard,
    WeightedSoft,
    RawHard,
    RawSoft,
};

GuidanceStrategy strategy_from_string(const std::string& s);
std::string to_string(GuidanceStrategy s);
bool is_raw_strategy(GuidanceStrategy s);
bool is_latent_strategy(GuidanceStrategy s);

struct SigmaPolicy {
    enum class Kind { AdaptiveBetaT, Fixed };
    Kind kind = Kind::AdaptiveBetaT;
    double fixed_value = 0.1;

    double value(const NoiseSchedule& sched, int t) const {
        return kind == Kind::AdaptiveBetaT ? sched.beta_at(t) : fixed_value;
    }
    static SigmaPolicy adaptive() { return {}; }
    static SigmaPolicy fixed(double sigma) { return {Kind::Fixed, sigma}; }
};

struct GuidanceConfig {
    int K = 20;                  // evaluator queries per guided step
    SigmaPolicy sigma;
    int t_init = 50;             // guidance is active for t <= t_init
    GuidanceStrategy strategy = GuidanceStrategy::Hard;
    std::uint64_t seed = 0;
};

/// K latent perturbations with their decoded states and rewards, kept in
/// candidate-index order so tie-breaking and seeded categorical draws are
/// reproducible however the evaluations were scheduled.
struct PerturbationBatch {
    std::vector<Eigen::MatrixXd> deltas;  // standard-normal, m x d each
    std::vector<double> rewards;
    std::vector<CdrState> decoded;

    std::size_t size() const { return deltas.size(); }
};

struct Selection {
    Eigen::MatrixXd delta;
    std::size_t index = 0;
};

/// Per guided-step record for instrumentation hooks.
struct StepTrace {
    int t = 0;
    double sigma = 0.0;
    GuidanceStrategy strategy = GuidanceStrategy::None;
    std::vector<double> candidate_rewards;       // the K batch rewards
    std::vector<double> combined_rewards;        // W+H / W+S: the two zeta rewards
    double selected_reward = 0.0;                // reward of the applied candidate
    bool selected_reward_known = false;          // false for the pure weighted update
};

using StepObserver = std::function<void(const StepTrace&)>;

/// Numerically stable softmax over rewards (max subtraction; exact under the
/// softmax's shift invariance).
std::vector<double> softmax_probs(const std::vector<double>& rewards);

/// Draw K standard-normal latent perturbations, decode Z + sigma * delta_k
/// deterministically, and score each decoded state. sigma = beta_t under the
/// adaptive policy. Evaluator failures propagate with the candidate index.
PerturbationBatch perturb_and_evaluate(const LatentCode& z, const Denoiser& den, Evaluator& f,
                                       const GuidanceConfig& cfg, const NoiseSchedule& sched,
                                       int t, Rng& rng);

/// Monte-Carlo gradient step on the latent code:
///   Z + (1 / (sigma K)) * sum_k delta_k * reward_k
/// No baseline subtraction: the update is linear in the rewards but not
/// shift-invariant. Throws std::domain_error when sigma is 0.
LatentCode weighted_update(const LatentCode& z, const PerturbationBatch& batch, double sigma);

/// Sample a perturbation index from softmax(rewards).
Selection soft_select(const PerturbationBatch& batch, Rng& rng);

/// Argmax reward; ties break to the lowest index.
Selection hard_select(const PerturbationBatch& batch);

enum class CombineMode { WeightedHard, WeightedSoft };

/// Keep the better of (zeta_1 = hard/soft selection, zeta_2 = reward-weighted
/// sum including its 1/(sigma K) scale), judged by decoding Z + sigma * zeta_i
/// and scoring each: two extra evaluator queries. When `trace` is given, the
/// two candidate rewards and the winner are recorded.
Eigen::MatrixXd combined_select(const LatentCode& z, const PerturbationBatch& batch, double sigma,
                                const Denoiser& den, Evaluator& f, const NoiseSchedule& sched,
                                int t, CombineMode mode, Rng& rng, StepTrace* trace = nullptr);

/// One guided reverse step: encode, perturb-and-evaluate, apply the
/// configured strategy, and decode the updated latent deterministically.
/// Strategy None falls through to a plain DDPM step. Queries per step: K for
/// Hard/Soft/Weighted, K + 2 for the combined modes.
CdrState guided_step(const CdrState& a_t, const ComplexContext& ctx, const Denoiser& den,
                     Evaluator& f, const GuidanceConfig& cfg, const NoiseSchedule& sched,
                     Rng& rng, so3::IgSo3TableCache* cache = nullptr,
                     const StepObserver& observer = nullptr);

/// Raw-space baseline step: draw K independent DDPM candidates from the same
/// state and keep one, by argmax reward (hard) or a softmax draw (soft).
CdrState guideraw_step(const CdrState& a_t, const ComplexContext& ctx, const Denoiser& den,
                       Evaluator& f, int K, bool soft, const NoiseSchedule& sched, Rng& rng,
                       so3::IgSo3TableCache* cache = nullptr,
                       const StepObserver& observer = nullptr);

}  // namespace abdesign
