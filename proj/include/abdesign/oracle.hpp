#pragma once

#include <string>
#include <vector>

#include "abdesign/denoiser.hpp"
#include "abdesign/rng.hpp"
#include "abdesign/schedule.hpp"
#include "abdesign/so3.hpp"
#include "abdesign/types.hpp"

namespace abdesign {

/// One mode of the synthetic data distribution: a fixed type pattern, fixed
/// coordinates and fixed orientations per residue.
struct MixtureComponent {
    double weight = 0.5;
    std::vector<AminoAcid> pattern;
    std::vector<Eigen::Vector3d> coords;
    std::vector<Rotation> orients;
};

/// Desk-scale generative story used for exact-oracle testing and toy
/// training: clean loops are drawn from a two-component mixture with known
/// parameters, so every reverse-step posterior is available in closed form.
/// Parameters live in configs/synthetic_mixture.json; default_task() mirrors
/// that file.
struct SyntheticTask {
    int m = 4;
    std::vector<MixtureComponent> components;
    NoiseSchedule schedule;
    ComplexContext context;
    int reference_component = 1;

    static SyntheticTask default_task();

    CdrState clean_state(int component) const;
    CdrState reference_state() const { return clean_state(reference_component); }

    /// Draw (component, clean state at t = 0).
    std::pair<int, CdrState> sample_clean(Rng& rng) const;

    /// Analytic marginal P(s_i = a) of the clean data, for calibration tests.
    Eigen::MatrixXd type_marginals() const;  // m x 20

    void validate() const;
};

/// Exact denoiser for the synthetic task. The latent code is the per-residue
/// concatenation of the sufficient statistics of the reverse posterior:
///
///   cols [0, 2)   component responsibilities given the full noisy state
///   cols [2, 22)  one-hot residue type of the noisy state
///   cols [22, 25) noisy coordinate
///   cols [25, 34) noisy orientation, row-major
///
/// decode() maps this to the closed-form posterior parameters of the reverse
/// process, marginalized over the component posterior. It reads only the
/// latent, so perturbed codes decode to smoothly perturbed outputs: the
/// responsibility block is clamped and renormalized, the type block is
/// treated as a soft observation.
class OracleDenoiser final : public Denoiser {
public:
    static constexpr int kLatentDim = 34;

    explicit OracleDenoiser(SyntheticTask task);

    LatentCode encode(const CdrState& state, const ComplexContext& ctx, int t) const override;
    DenoiserOutput decode(const LatentCode& z, int t) const override;
    int latent_dim() const override { return kLatentDim; }

    const SyntheticTask& task() const { return task_; }

    /// log P(component = c | state at level t), the Bayes posterior over
    /// mixture components given all three modalities.
    std::vector<double> component_log_posterior(const CdrState& state, int t) const;

private:
    SyntheticTask task_;
    mutable so3::IgSo3TableCache igso3_tables_;
};

}  // namespace abdesign
