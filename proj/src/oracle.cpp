#include "abdesign/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "abdesign/errors.hpp"

namespace abdesign {

namespace {

constexpr int kRespOffset = 0;
constexpr int kSeqOffset = 2;
constexpr int kCoordOffset = 22;
constexpr int kOrientOffset = 25;

std::vector<double> softmax_from_log(const std::vector<double>& logw) {
    double mx = *std::max_element(logw.begin(), logw.end());
    std::vector<double> p(logw.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        p[i] = std::exp(logw[i] - mx);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

}  // namespace

SyntheticTask SyntheticTask::default_task() {
    SyntheticTask task;
    task.m = 4;
    task.schedule = build_schedule(64, ScheduleKind::Linear, 0.02, 0.25);

    MixtureComponent hydrophobic;
    hydrophobic.weight = 0.5;
    hydrophobic.pattern = sequence_from_string("ILVF");
    MixtureComponent hydrophilic;
    hydrophilic.weight = 0.5;
    hydrophilic.pattern = sequence_from_string("DEKR");

    Rotation rot_z = so3::from_axis_angle(Eigen::Vector3d::UnitZ(), 0.9);
    Rotation rot_x = so3::from_axis_angle(Eigen::Vector3d::UnitX(), 0.9);
    for (int i = 0; i < task.m; ++i) {
        double y = static_cast<double>(i) - 1.5;
        hydrophobic.coords.emplace_back(-2.0, y, 0.0);
        hydrophobic.orients.push_back(rot_z);
        hydrophilic.coords.emplace_back(2.0, y, 0.0);
        hydrophilic.orients.push_back(rot_x);
    }
    task.components = {hydrophobic, hydrophilic};
    task.reference_component = 1;

    // Fixed framework flanking the designed span.
    ComplexContext ctx;
    ctx.types = sequence_from_string("GGSSGG");
    for (int j = 0; j < 6; ++j) {
        ctx.coords.emplace_back(0.0, 1.5 * j - 3.75, 3.0);
        ctx.orients.push_back(Rotation::Identity());
    }
    ctx.chain_tags = {ChainTag::Antigen, ChainTag::Antigen, ChainTag::Heavy,
                      ChainTag::Heavy,   ChainTag::Light,   ChainTag::Light};
    ctx.cdr_span = {3, task.m};
    task.context = ctx;
    return task;
}

void SyntheticTask::validate() const {
    if (m < 1) throw ConfigError("synthetic task: m must be >= 1");
    if (components.size() != 2) throw ConfigError("synthetic task: expected 2 components");
    double wsum = 0.0;
    for (const auto& c : components) {
        if (static_cast<int>(c.pattern.size()) != m || static_cast<int>(c.coords.size()) != m ||
            static_cast<int>(c.orients.size()) != m)
            throw ConfigError("synthetic task: component arrays must have length m");
        if (!(c.weight > 0.0)) throw ConfigError("synthetic task: component weights must be > 0");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ConfigError("synthetic task: component weights must sum to 1");
    if (schedule.T < 1) throw ConfigError("synthetic task: missing schedule");
    context.validate(static_cast<std::size_t>(m));
}

CdrState SyntheticTask::clean_state(int component) const {
    const auto& c = components.at(static_cast<std::size_t>(component));
    CdrState s;
    s.types = c.pattern;
    s.coords = c.coords;
    s.orients = c.orients;
    s.t = 0;
    return s;
}

std::pair<int, CdrState> SyntheticTask::sample_clean(Rng& rng) const {
    std::vector<double> w;
    for (const auto& c : components) w.push_back(c.weight);
    int comp = static_cast<int>(sample_categorical(w, rng));
    return {comp, clean_state(comp)};
}

Eigen::MatrixXd SyntheticTask::type_marginals() const {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, kNumAminoAcids);
    for (const auto& c : components)
        for (int i = 0; i < m; ++i)
            p(i, static_cast<int>(c.pattern[static_cast<std::size_t>(i)])) += c.weight;
    return p;
}

OracleDenoiser::OracleDenoiser(SyntheticTask task) : task_(std::move(task)) {
    task_.validate();
}

std::vector<double> OracleDenoiser::component_log_posterior(const CdrState& state, int t) const {
    const auto& sched = task_.schedule;
    const double abar = sched.alpha_bar_at(t);
    const double bbar = sched.beta_bar_at(t);
    const double sqrt_abar = std::sqrt(abar);
    const std::size_t m = state.size();

    const so3::IgSo3Table* orient_table = nullptr;
    if (bbar > 0.0) orient_table = &igso3_tables_.get(bbar);

    std::vector<double> logp;
    logp.reserve(task_.components.size());
    for (const auto& comp : task_.components) {
        double lp = std::log(comp.weight);
        for (std::size_t i = 0; i < m; ++i) {
            // Types: stay-probability abar + bbar/20 on the pattern letter.
            double match = state.types[i] == comp.pattern[i] ? abar : 0.0;
            lp += std::log(match + bbar / kNumAminoAcids + 1e-300);
            // Coordinates: N(sqrt(abar) * mu, bbar I). The normalization is
            // shared across components and drops out.
            if (bbar > 0.0) {
                lp += -(state.coords[i] - sqrt_abar * comp.coords[i]).squaredNorm() / (2.0 * bbar);
                double omega = so3::geodesic_distance(so3::scale_rot(sqrt_abar, comp.orients[i]),
                                                      state.orients[i]);
                lp += orient_table->log_point_density(omega);
            } else {
                // Clean level: likelihood degenerates to exact matches.
                if ((state.coords[i] - comp.coords[i]).norm() > 1e-9 ||
                    so3::geodesic_distance(state.orients[i], comp.orients[i]) > 1e-9)
                    lp += std::log(1e-300);
            }
        }
        logp.push_back(lp);
    }
    return logp;
}

LatentCode OracleDenoiser::encode(const CdrState& state, const ComplexContext& ctx, int t) const {
    state.validate();
    ctx.validate(state.size());
    if (t < 0 || t > task_.schedule.T) throw ContractError("oracle encode: t out of range");
    if (static_cast<int>(state.size()) != task_.m)
        throw ContractError("oracle encode: state length does not match the task");

    auto resp = softmax_from_log(component_log_posterior(state, t));

    const int m = task_.m;
    LatentCode z;
    z.t = t;
    z.values = Eigen::MatrixXd::Zero(m, kLatentDim);
    for (int i = 0; i < m; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        z.values(i, kRespOffset + 0) = resp[0];
        z.values(i, kRespOffset + 1) = resp[1];
        z.values(i, kSeqOffset + static_cast<int>(state.types[ui])) = 1.0;
        z.values.block<1, 3>(i, kCoordOffset) = state.coords[ui].transpose();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                z.values(i, kOrientOffset + 3 * r + c) = state.orients[ui](r, c);
    }
    return z;
}

DenoiserOutput OracleDenoiser::decode(const LatentCode& z, int t) const {
    if (z.dim() != kLatentDim) throw ContractError("oracle decode: latent width mismatch");
    if (t < 1 || t > task_.schedule.T) throw ContractError("oracle decode: t out of range");
    const int m = z.residues();
    const auto& sched = task_.schedule;
    const double beta = sched.beta_at(t);
    const double abar_prev = sched.alpha_bar_at(t - 1);
    const double bbar_prev = sched.beta_bar_at(t - 1);
    const double bbar = sched.beta_bar_at(t);
    const double sqrt_abar_prev = std::sqrt(abar_prev);
    const double coef_clean = sqrt_abar_prev * beta / bbar;
    const double coef_noisy = std::sqrt(1.0 - beta) * bbar_prev / bbar;
    const std::size_t ncomp = task_.components.size();

    DenoiserOutput out;
    out.seq_probs = Eigen::MatrixXd::Zero(m, kNumAminoAcids);
    out.coord_means.resize(static_cast<std::size_t>(m));
    out.orient_means.resize(static_cast<std::size_t>(m));

    for (int i = 0; i < m; ++i) {
        // Responsibilities: clamp and renormalize so perturbed codes still
        // decode to valid distributions.
        Eigen::Vector2d r(std::max(z.values(i, kRespOffset + 0), 0.0),
                          std::max(z.values(i, kRespOffset + 1), 0.0));
        double rsum = r.sum();
        if (rsum > 0.0)
            r /= rsum;
        else
            r.setConstant(0.5);

        // Soft observation of the noisy type.
        Eigen::VectorXd obs = z.values.row(i).segment(kSeqOffset, kNumAminoAcids).transpose();
        obs = obs.cwiseMax(0.0);
        double osum = obs.sum();
        if (osum > 0.0)
            obs /= osum;
        else
            obs.setConstant(1.0 / kNumAminoAcids);

        Eigen::Vector3d x = z.values.block<1, 3>(i, kCoordOffset).transpose();

        Eigen::Vector3d coord_mean = Eigen::Vector3d::Zero();
        Eigen::Matrix3d orient_sum = Eigen::Matrix3d::Zero();
        Eigen::VectorXd seq = Eigen::VectorXd::Zero(kNumAminoAcids);

        for (std::size_t c = 0; c < ncomp; ++c) {
            const auto& comp = task_.components[c];
            const int pat = static_cast<int>(comp.pattern[static_cast<std::size_t>(i)]);

            // Posterior over the previous type, summed over the soft noisy
            // observation b: p(a | b, c) ~ step(a, b) * marginal_prev(a, c).
            for (int b = 0; b < kNumAminoAcids; ++b) {
                if (obs(b) <= 0.0) continue;
                double norm = 0.0;
                Eigen::VectorXd post(kNumAminoAcids);
                for (int a = 0; a < kNumAminoAcids; ++a) {
                    double step = (a == b ? 1.0 - beta : 0.0) + beta / kNumAminoAcids;
                    double prior = (a == pat ? abar_prev : 0.0) + bbar_prev / kNumAminoAcids;
                    post(a) = step * prior;
                    norm += post(a);
                }
                seq += r(static_cast<Eigen::Index>(c)) * obs(b) / norm * post;
            }

            coord_mean += r(static_cast<Eigen::Index>(c)) *
                          (coef_clean * comp.coords[static_cast<std::size_t>(i)] + coef_noisy * x);
            orient_sum += r(static_cast<Eigen::Index>(c)) *
                          so3::scale_rot(sqrt_abar_prev, comp.orients[static_cast<std::size_t>(i)]);
        }

        out.seq_probs.row(i) = seq.transpose() / seq.sum();
        out.coord_means[static_cast<std::size_t>(i)] = coord_mean;
        out.orient_means[static_cast<std::size_t>(i)] = so3::project_to_rotation(orient_sum);
    }
    return out;
}

}  // namespace abdesign
