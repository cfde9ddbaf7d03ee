#include "abdesign/diffusion.hpp"

#include <cmath>

#include "abdesign/errors.hpp"

namespace abdesign {

namespace {

void check_time(const NoiseSchedule& sched, int t) {
    if (t < 1 || t > sched.T)
        throw ContractError("diffusion: time step " + std::to_string(t) +
                            " outside [1, " + std::to_string(sched.T) + "]");
}

Rotation sample_orient(const Rotation& mean, double epsilon, Rng& rng,
                       so3::IgSo3TableCache* cache) {
    if (cache) return so3::sample_igso3(mean, cache->get(epsilon), rng);
    so3::IgSo3Params p;
    p.mean = mean;
    p.epsilon = epsilon;
    return so3::sample_igso3(p, rng);
}

}  // namespace

AminoAcid forward_seq(AminoAcid s0, const NoiseSchedule& sched, int t, Rng& rng) {
    check_time(sched, t);
    const double abar = sched.alpha_bar_at(t);
    const double bbar = sched.beta_bar_at(t);
    double u = rng.uniform();
    // Probability abar + bbar/20 of keeping s0, bbar/20 for each other type.
    double stay = abar + bbar / kNumAminoAcids;
    if (u < stay) return s0;
    double rest = (u - stay) / (bbar / kNumAminoAcids);
    int offset = std::min(static_cast<int>(rest), kNumAminoAcids - 2);
    // Skip over s0 when walking the remaining 19 types.
    int idx = offset >= static_cast<int>(s0) ? offset + 1 : offset;
    return static_cast<AminoAcid>(idx);
}

Eigen::Vector3d forward_coord(const Eigen::Vector3d& x0, const NoiseSchedule& sched, int t,
                              Rng& rng) {
    check_time(sched, t);
    return std::sqrt(sched.alpha_bar_at(t)) * x0 +
           std::sqrt(sched.beta_bar_at(t)) * rng.normal3();
}

Rotation forward_orient(const Rotation& o0, const NoiseSchedule& sched, int t, Rng& rng,
                        so3::IgSo3TableCache* cache) {
    check_time(sched, t);
    Rotation mean = so3::scale_rot(std::sqrt(sched.alpha_bar_at(t)), o0);
    return sample_orient(mean, sched.beta_bar_at(t), rng, cache);
}

CdrState forward_state(const CdrState& a0, const NoiseSchedule& sched, int t, Rng& rng,
                       so3::IgSo3TableCache* cache) {
    CdrState out;
    out.t = t;
    out.types.reserve(a0.size());
    out.coords.reserve(a0.size());
    out.orients.reserve(a0.size());
    for (std::size_t i = 0; i < a0.size(); ++i) {
        out.types.push_back(forward_seq(a0.types[i], sched, t, rng));
        out.coords.push_back(forward_coord(a0.coords[i], sched, t, rng));
        out.orients.push_back(forward_orient(a0.orients[i], sched, t, rng, cache));
    }
    return out;
}

CdrState ddpm_step(const CdrState& a_t, const ComplexContext& ctx, const Denoiser& den,
                   const NoiseSchedule& sched, Rng& rng, so3::IgSo3TableCache* cache) {
    const int t = a_t.t;
    check_time(sched, t);

    LatentCode z = den.encode(a_t, ctx, t);
    DenoiserOutput out = den.decode(z, t);
    if (out.size() != a_t.size() || out.seq_probs.rows() != static_cast<Eigen::Index>(a_t.size()))
        throw ContractError("ddpm_step: denoiser output length does not match the state");
    out.validate();

    const double beta = sched.beta_at(t);
    const double noise_scale = std::sqrt(beta);

    CdrState next;
    next.t = t - 1;
    next.types.reserve(a_t.size());
    next.coords.reserve(a_t.size());
    next.orients.reserve(a_t.size());
    for (std::size_t i = 0; i < a_t.size(); ++i) {
        std::vector<double> probs(kNumAminoAcids);
        for (int a = 0; a < kNumAminoAcids; ++a)
            probs[static_cast<std::size_t>(a)] = out.seq_probs(static_cast<Eigen::Index>(i), a);
        next.types.push_back(static_cast<AminoAcid>(sample_categorical(probs, rng)));
        next.coords.push_back(out.coord_means[i] + noise_scale * rng.normal3());
        next.orients.push_back(sample_orient(out.orient_means[i], beta, rng, cache));
    }
    return next;
}

CdrState ddim_step(const LatentCode& z_t, const Denoiser& den, const NoiseSchedule& sched, int t) {
    check_time(sched, t);
    DenoiserOutput out = den.decode(z_t, t);
    if (out.size() != static_cast<std::size_t>(z_t.residues()))
        throw ContractError("ddim_step: denoiser output length does not match the latent");
    out.validate();

    CdrState next;
    next.t = t - 1;
    const std::size_t m = out.size();
    next.types.reserve(m);
    next.coords.reserve(m);
    next.orients.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        int best = 0;
        double best_p = out.seq_probs(static_cast<Eigen::Index>(i), 0);
        for (int a = 1; a < kNumAminoAcids; ++a) {
            double p = out.seq_probs(static_cast<Eigen::Index>(i), a);
            if (p > best_p) {
                best = a;
                best_p = p;
            }
        }
        next.types.push_back(static_cast<AminoAcid>(best));
        next.coords.push_back(out.coord_means[i]);
        next.orients.push_back(out.orient_means[i]);
    }
    return next;
}

}  // namespace abdesign
