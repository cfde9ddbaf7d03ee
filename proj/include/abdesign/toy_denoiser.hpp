#pragma once

#include <string>
#include <vector>

#include "abdesign/denoiser.hpp"
#include "abdesign/oracle.hpp"
#include "abdesign/rng.hpp"
#include "abdesign/schedule.hpp"

namespace abdesign {

struct ToyDenoiserConfig {
    int latent_dim = 32;
    int hidden_dim = 64;
    int time_freqs = 4;  // sin/cos pairs in the time embedding
};

/// Small trainable denoiser: a permutation-equivariant per-residue MLP
/// encoder over (type one-hot, coordinate, flattened orientation, sinusoidal
/// time embedding, mean-pooled context summary), and three linear decoder
/// heads. The type head is row-stochastic via softmax and the rotation head
/// is projected to SO(3) by polar decomposition, so DenoiserOutput invariants
/// hold for any parameter values, trained or not.
class ToyDenoiser final : public Denoiser {
public:
    struct Params {
        Eigen::MatrixXd w1, w2;      // encoder trunk
        Eigen::VectorXd b1, b2;
        Eigen::MatrixXd ws, wx, wo;  // decoder heads: types, coords, rotations
        Eigen::VectorXd bs, bx, bo;
    };

    ToyDenoiser(ToyDenoiserConfig cfg, int total_steps, Rng& rng);

    LatentCode encode(const CdrState& state, const ComplexContext& ctx, int t) const override;
    DenoiserOutput decode(const LatentCode& z, int t) const override;
    int latent_dim() const override { return cfg_.latent_dim; }

    const ToyDenoiserConfig& config() const { return cfg_; }
    int total_steps() const { return total_steps_; }
    Params& params() { return params_; }
    const Params& params() const { return params_; }

    /// Per-residue encoder input features (exposed for the trainer).
    Eigen::VectorXd features(const CdrState& state, const ComplexContext& ctx, int t,
                             std::size_t residue) const;
    int feature_dim() const;

    /// Checkpoint round trip. Binary layout documented in
    /// docs/checkpoint-format.md; loading validates the header and shapes.
    void save(const std::string& path) const;
    static ToyDenoiser load(const std::string& path);

private:
    ToyDenoiserConfig cfg_;
    int total_steps_;
    Params params_;
};

struct TrainingExample {
    CdrState state;  // clean, t = 0
    ComplexContext context;
};

struct TrainOptions {
    int epochs = 40;
    int batch_size = 32;
    double lr = 3e-3;
    int validation_size = 64;
};

struct TrainResult {
    ToyDenoiser model;
    std::vector<double> epoch_loss;   // mean training loss per epoch
    double initial_validation_loss = 0.0;
    double final_validation_loss = 0.0;
};

/// Fit the toy denoiser to the analytic posteriors of the synthetic task:
/// cross-entropy against the categorical posterior, squared error against
/// the coordinate posterior mean, squared geodesic distance against the
/// rotation posterior mean. With epochs = 0 the initialized model is
/// returned unchanged.
TrainResult train_toy_denoiser(const SyntheticTask& task,
                               const std::vector<TrainingExample>& dataset,
                               const NoiseSchedule& sched, const TrainOptions& opts, Rng& rng);

}  // namespace abdesign
