#pragma once

#include "abdesign/denoiser.hpp"
#include "abdesign/rng.hpp"
#include "abdesign/schedule.hpp"
#include "abdesign/so3.hpp"
#include "abdesign/types.hpp"

namespace abdesign {

/// Forward noising, one modality at a time. The three modalities are
/// conditionally independent: each operation reads only its own modality's
/// clean value, which the signatures enforce.

/// Sample s^t ~ C(abar_t * onehot(s0) + bbar_t / 20).
AminoAcid forward_seq(AminoAcid s0, const NoiseSchedule& sched, int t, Rng& rng);

/// Sample x^t ~ N(sqrt(abar_t) * x0, bbar_t * I).
Eigen::Vector3d forward_coord(const Eigen::Vector3d& x0, const NoiseSchedule& sched, int t,
                              Rng& rng);

/// Sample O^t ~ IGSO3(ScaleRot(sqrt(abar_t), O0), bbar_t). Pass a table cache
/// when noising many states against the same schedule.
Rotation forward_orient(const Rotation& o0, const NoiseSchedule& sched, int t, Rng& rng,
                        so3::IgSo3TableCache* cache = nullptr);

/// All residues, all modalities; returns a state at time t.
CdrState forward_state(const CdrState& a0, const NoiseSchedule& sched, int t, Rng& rng,
                       so3::IgSo3TableCache* cache = nullptr);

/// One stochastic reverse step (time t -> t-1): decode the posterior
/// parameters through the shared latent and sample each modality, with
/// beta_t as the reverse-step variance for coordinates and orientations.
CdrState ddpm_step(const CdrState& a_t, const ComplexContext& ctx, const Denoiser& den,
                   const NoiseSchedule& sched, Rng& rng, so3::IgSo3TableCache* cache = nullptr);

/// One deterministic reverse step from a latent code: per-residue argmax of
/// the type posterior (ties to the lowest alphabet index), the coordinate
/// mean exactly, and the mean rotation with no noise. A pure function of
/// (z_t, t).
CdrState ddim_step(const LatentCode& z_t, const Denoiser& den, const NoiseSchedule& sched, int t);

}  // namespace abdesign
