#include "abdesign/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "abdesign/errors.hpp"

namespace abdesign {

GuidanceStrategy strategy_from_string(const std::string& s) {
    if (s == "none") return GuidanceStrategy::None;
    if (s == "H") return GuidanceStrategy::Hard;
    if (s == "S") return GuidanceStrategy::Soft;
    if (s == "W") return GuidanceStrategy::Weighted;
    if (s == "W+H") return GuidanceStrategy::WeightedHard;
    if (s == "W+S") return GuidanceStrategy::WeightedSoft;
    if (s == "guideraw_H") return GuidanceStrategy::RawHard;
    if (s == "guideraw_S") return GuidanceStrategy::RawSoft;
    throw ConfigError("unknown guidance strategy: '" + s +
                      "' (expected one of H, S, W, W+H, W+S, guideraw_H, guideraw_S, none)");
}

std::string to_string(GuidanceStrategy s) {
    switch (s) {
        case GuidanceStrategy::None: return "none";
        case GuidanceStrategy::Hard: return "H";
        case GuidanceStrategy::Soft: return "S";
        case GuidanceStrategy::Weighted: return "W";
        case GuidanceStrategy::WeightedHard: return "W+H";
        case GuidanceStrategy::WeightedSoft: return "W+S";
        case GuidanceStrategy::RawHard: return "guideraw_H";
        case GuidanceStrategy::RawSoft: return "guideraw_S";
    }
    return "none";
}

bool is_raw_strategy(GuidanceStrategy s) {
    return s == GuidanceStrategy::RawHard || s == GuidanceStrategy::RawSoft;
}

bool is_latent_strategy(GuidanceStrategy s) {
    return s == GuidanceStrategy::Hard || s == GuidanceStrategy::Soft ||
           s == GuidanceStrategy::Weighted || s == GuidanceStrategy::WeightedHard ||
           s == GuidanceStrategy::WeightedSoft;
}

std::vector<double> softmax_probs(const std::vector<double>& rewards) {
    if (rewards.empty()) throw ContractError("softmax_probs: empty rewards");
    for (double r : rewards)
        if (!std::isfinite(r)) throw ContractError("softmax_probs: non-finite reward");
    double mx = *std::max_element(rewards.begin(), rewards.end());
    std::vector<double> p(rewards.size());
    double total = 0.0;
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        p[i] = std::exp(rewards[i] - mx);
        total += p[i];
    }
    for (double& v : p) v /= total;
    return p;
}

PerturbationBatch perturb_and_evaluate(const LatentCode& z, const Denoiser& den, Evaluator& f,
                                       const GuidanceConfig& cfg, const NoiseSchedule& sched,
                                       int t, Rng& rng) {
    if (cfg.K < 1) throw ConfigError("guidance: K must be >= 1");
    const double sigma = cfg.sigma.value(sched, t);

    PerturbationBatch batch;
    batch.deltas.reserve(static_cast<std::size_t>(cfg.K));
    batch.rewards.reserve(static_cast<std::size_t>(cfg.K));
    batch.decoded.reserve(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        Eigen::MatrixXd delta(z.values.rows(), z.values.cols());
        for (Eigen::Index i = 0; i < delta.rows(); ++i)
            for (Eigen::Index j = 0; j < delta.cols(); ++j) delta(i, j) = rng.normal();

        LatentCode zk = z;
        zk.values += sigma * delta;
        CdrState decoded = ddim_step(zk, den, sched, t);
        double reward;
        try {
            reward = f.evaluate(decoded);
        } catch (const EvaluatorError& e) {
            throw EvaluatorError(std::string(e.what()) + " (candidate " + std::to_string(k) + ")",
                                 k);
        }
        batch.deltas.push_back(std::move(delta));
        batch.rewards.push_back(reward);
        batch.decoded.push_back(std::move(decoded));
    }
    return batch;
}

LatentCode weighted_update(const LatentCode& z, const PerturbationBatch& batch, double sigma) {
    if (sigma == 0.0) throw std::domain_error("weighted_update: sigma must be nonzero");
    if (batch.size() == 0) throw ContractError("weighted_update: empty batch");
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(z.values.rows(), z.values.cols());
    for (std::size_t k = 0; k < batch.size(); ++k) sum += batch.deltas[k] * batch.rewards[k];
    LatentCode out = z;
    out.values += sum / (sigma * static_cast<double>(batch.size()));
    return out;
}

Selection soft_select(const PerturbationBatch& batch, Rng& rng) {
    auto probs = softmax_probs(batch.rewards);
    std::size_t index = sample_categorical(probs, rng);
    return {batch.deltas[index], index};
}

Selection hard_select(const PerturbationBatch& batch) {
    if (batch.size() == 0) throw ContractError("hard_select: empty batch");
    std::size_t best = 0;
    for (std::size_t k = 1; k < batch.size(); ++k) {
        if (!std::isfinite(batch.rewards[k]))
            throw ContractError("hard_select: non-finite reward");
        if (batch.rewards[k] > batch.rewards[best]) best = k;
    }
    if (!std::isfinite(batch.rewards[0])) throw ContractError("hard_select: non-finite reward");
    return {batch.deltas[best], best};
}

Eigen::MatrixXd combined_select(const LatentCode& z, const PerturbationBatch& batch, double sigma,
                                const Denoiser& den, Evaluator& f, const NoiseSchedule& sched,
                                int t, CombineMode mode, Rng& rng, StepTrace* trace) {
    if (!(sigma > 0.0)) throw std::domain_error("combined_select: sigma must be > 0");

    Eigen::MatrixXd zeta1 = mode == CombineMode::WeightedHard
                                ? hard_select(batch).delta
                                : soft_select(batch, rng).delta;
    // zeta_2 carries the full 1/(sigma K) scale of the weighted sum, so the
    // candidate state below is Z + (1/K) * sum_k delta_k * reward_k.
    Eigen::MatrixXd zeta2 = Eigen::MatrixXd::Zero(z.values.rows(), z.values.cols());
    for (std::size_t k = 0; k < batch.size(); ++k) zeta2 += batch.deltas[k] * batch.rewards[k];
    zeta2 /= sigma * static_cast<double>(batch.size());

    double rewards[2];
    const Eigen::MatrixXd* zetas[2] = {&zeta1, &zeta2};
    for (int i = 0; i < 2; ++i) {
        LatentCode zc = z;
        zc.values += sigma * (*zetas[i]);
        rewards[i] = f.evaluate(ddim_step(zc, den, sched, t));
    }
    int winner = rewards[1] > rewards[0] ? 1 : 0;
    if (trace) {
        trace->combined_rewards = {rewards[0], rewards[1]};
        trace->selected_reward = rewards[winner];
        trace->selected_reward_known = true;
    }
    return *zetas[winner];
}

CdrState guided_step(const CdrState& a_t, const ComplexContext& ctx, const Denoiser& den,
                     Evaluator& f, const GuidanceConfig& cfg, const NoiseSchedule& sched,
                     Rng& rng, so3::IgSo3TableCache* cache, const StepObserver& observer) {
    const int t = a_t.t;
    if (cfg.strategy == GuidanceStrategy::None)
        return ddpm_step(a_t, ctx, den, sched, rng, cache);
    if (is_raw_strategy(cfg.strategy))
        return guideraw_step(a_t, ctx, den, f, cfg.K, cfg.strategy == GuidanceStrategy::RawSoft,
                             sched, rng, cache, observer);

    const double sigma = cfg.sigma.value(sched, t);
    LatentCode z = den.encode(a_t, ctx, t);
    PerturbationBatch batch = perturb_and_evaluate(z, den, f, cfg, sched, t, rng);

    StepTrace trace;
    trace.t = t;
    trace.sigma = sigma;
    trace.strategy = cfg.strategy;
    trace.candidate_rewards = batch.rewards;

    LatentCode z_star = z;
    switch (cfg.strategy) {
        case GuidanceStrategy::Hard: {
            Selection sel = hard_select(batch);
            z_star.values += sigma * sel.delta;
            trace.selected_reward = batch.rewards[sel.index];
            trace.selected_reward_known = true;
            break;
        }
        case GuidanceStrategy::Soft: {
            Selection sel = soft_select(batch, rng);
            z_star.values += sigma * sel.delta;
            trace.selected_reward = batch.rewards[sel.index];
            trace.selected_reward_known = true;
            break;
        }
        case GuidanceStrategy::Weighted: {
            z_star = weighted_update(z, batch, sigma);
            break;
        }
        case GuidanceStrategy::WeightedHard:
        case GuidanceStrategy::WeightedSoft: {
            CombineMode mode = cfg.strategy == GuidanceStrategy::WeightedHard
                                   ? CombineMode::WeightedHard
                                   : CombineMode::WeightedSoft;
            Eigen::MatrixXd zeta =
                combined_select(z, batch, sigma, den, f, sched, t, mode, rng, &trace);
            z_star.values += sigma * zeta;
            break;
        }
        default:
            throw ConfigError("guided_step: unsupported strategy");
    }

    if (observer) observer(trace);
    return ddim_step(z_star, den, sched, t);
}

CdrState guideraw_step(const CdrState& a_t, const ComplexContext& ctx, const Denoiser& den,
                       Evaluator& f, int K, bool soft, const NoiseSchedule& sched, Rng& rng,
                       so3::IgSo3TableCache* cache, const StepObserver& observer) {
    if (K < 1) throw ConfigError("guideraw_step: K must be >= 1");
    std::vector<CdrState> candidates;
    std::vector<double> rewards;
    candidates.reserve(static_cast<std::size_t>(K));
    rewards.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        CdrState cand = ddpm_step(a_t, ctx, den, sched, rng, cache);
        double reward;
        try {
            reward = f.evaluate(cand);
        } catch (const EvaluatorError& e) {
            throw EvaluatorError(std::string(e.what()) + " (candidate " + std::to_string(k) + ")",
                                 k);
        }
        candidates.push_back(std::move(cand));
        rewards.push_back(reward);
    }

    std::size_t pick;
    if (soft) {
        pick = sample_categorical(softmax_probs(rewards), rng);
    } else {
        pick = 0;
        for (std::size_t k = 1; k < rewards.size(); ++k)
            if (rewards[k] > rewards[pick]) pick = k;
    }

    if (observer) {
        StepTrace trace;
        trace.t = a_t.t;
        trace.strategy = soft ? GuidanceStrategy::RawSoft : GuidanceStrategy::RawHard;
        trace.candidate_rewards = rewards;
        trace.selected_reward = rewards[pick];
        trace.selected_reward_known = true;
        observer(trace);
    }
    return candidates[pick];
}

}  // namespace abdesign
