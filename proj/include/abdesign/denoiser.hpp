#pragma once

#include <vector>

#include <Eigen/Dense>

#include "abdesign/types.hpp"

namespace abdesign {

/// Shared per-residue embedding produced by a denoiser's encoder. Every
/// reverse step factors through this code: it is the single coupling point
/// between the three modalities and the optimization variable of latent
/// guidance.
struct LatentCode {
    Eigen::MatrixXd values;  // m x d
    int t = 0;

    int residues() const { return static_cast<int>(values.rows()); }
    int dim() const { return static_cast<int>(values.cols()); }
};

/// Posterior parameters for one reverse step: a categorical distribution per
/// residue, a coordinate mean per residue, and a mean rotation per residue.
struct DenoiserOutput {
    Eigen::MatrixXd seq_probs;                // m x 20, rows sum to 1
    std::vector<Eigen::Vector3d> coord_means; // m
    std::vector<Rotation> orient_means;       // m

    std::size_t size() const { return coord_means.size(); }

    /// Throws ContractError on shape mismatch, non-stochastic rows, or
    /// invalid rotations.
    void validate() const;
};

/// Denoising network contract: a shared encoder and three modality decoders.
/// Implementations must be deterministic; `decode(encode(A, R, t), t)` is the
/// only path that produces reverse-step parameters.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual LatentCode encode(const CdrState& state, const ComplexContext& ctx, int t) const = 0;
    virtual DenoiserOutput decode(const LatentCode& z, int t) const = 0;
    virtual int latent_dim() const = 0;
};

}  // namespace abdesign
