#include "abdesign/toy_denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "abdesign/diffusion.hpp"
#include "abdesign/errors.hpp"

namespace abdesign {

namespace {

constexpr char kCheckpointMagic[8] = {'A', 'B', 'D', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCheckpointVersion = 1;

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    double scale = std::sqrt(2.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
    return p / p.sum();
}

}  // namespace

ToyDenoiser::ToyDenoiser(ToyDenoiserConfig cfg, int total_steps, Rng& rng)
    : cfg_(cfg), total_steps_(total_steps) {
    if (cfg_.latent_dim < 1 || cfg_.hidden_dim < 1 || cfg_.time_freqs < 1 || total_steps_ < 1)
        throw ConfigError("toy denoiser: invalid dimensions");
    const int f = feature_dim();
    params_.w1 = glorot(cfg_.hidden_dim, f, rng);
    params_.b1 = Eigen::VectorXd::Zero(cfg_.hidden_dim);
    params_.w2 = glorot(cfg_.latent_dim, cfg_.hidden_dim, rng);
    params_.b2 = Eigen::VectorXd::Zero(cfg_.latent_dim);
    params_.ws = glorot(kNumAminoAcids, cfg_.latent_dim, rng);
    params_.bs = Eigen::VectorXd::Zero(kNumAminoAcids);
    params_.wx = glorot(3, cfg_.latent_dim, rng);
    params_.bx = Eigen::VectorXd::Zero(3);
    params_.wo = 0.05 * glorot(9, cfg_.latent_dim, rng);
    // Start the rotation head at the identity so the polar projection is
    // well-conditioned from the first step.
    params_.bo = Eigen::VectorXd::Zero(9);
    params_.bo(0) = params_.bo(4) = params_.bo(8) = 1.0;
}

int ToyDenoiser::feature_dim() const {
    return kNumAminoAcids + 3 + 9 + 2 * cfg_.time_freqs + (kNumAminoAcids + 3 + 9);
}

Eigen::VectorXd ToyDenoiser::features(const CdrState& state, const ComplexContext& ctx, int t,
                                      std::size_t residue) const {
    const int obs_dim = kNumAminoAcids + 3 + 9;
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(feature_dim());

    int off = 0;
    phi(off + static_cast<int>(state.types[residue])) = 1.0;
    off += kNumAminoAcids;
    phi.segment<3>(off) = state.coords[residue];
    off += 3;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) phi(off + 3 * r + c) = state.orients[residue](r, c);
    off += 9;

    double u = static_cast<double>(t) / static_cast<double>(total_steps_);
    for (int f = 0; f < cfg_.time_freqs; ++f) {
        double angle = M_PI * u * static_cast<double>(1 << f);
        phi(off++) = std::sin(angle);
        phi(off++) = std::cos(angle);
    }

    // Mean-pooled context summary, shared by every residue.
    if (!ctx.types.empty()) {
        Eigen::VectorXd pooled = Eigen::VectorXd::Zero(obs_dim);
        for (std::size_t j = 0; j < ctx.types.size(); ++j) {
            pooled(static_cast<int>(ctx.types[j])) += 1.0;
            pooled.segment<3>(kNumAminoAcids) += ctx.coords[j];
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c)
                    pooled(kNumAminoAcids + 3 + 3 * r + c) += ctx.orients[j](r, c);
        }
        pooled /= static_cast<double>(ctx.types.size());
        phi.segment(off, obs_dim) = pooled;
    }
    return phi;
}

LatentCode ToyDenoiser::encode(const CdrState& state, const ComplexContext& ctx, int t) const {
    state.validate();
    ctx.validate(state.size());
    LatentCode z;
    z.t = t;
    z.values.resize(static_cast<Eigen::Index>(state.size()), cfg_.latent_dim);
    for (std::size_t i = 0; i < state.size(); ++i) {
        Eigen::VectorXd phi = features(state, ctx, t, i);
        Eigen::VectorXd h = (params_.w1 * phi + params_.b1).array().tanh();
        z.values.row(static_cast<Eigen::Index>(i)) = (params_.w2 * h + params_.b2).transpose();
    }
    return z;
}

DenoiserOutput ToyDenoiser::decode(const LatentCode& z, int /*t*/) const {
    if (z.dim() != cfg_.latent_dim) throw ContractError("toy decode: latent width mismatch");
    const Eigen::Index m = z.values.rows();
    DenoiserOutput out;
    out.seq_probs.resize(m, kNumAminoAcids);
    out.coord_means.resize(static_cast<std::size_t>(m));
    out.orient_means.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::VectorXd zi = z.values.row(i).transpose();
        out.seq_probs.row(i) = softmax(params_.ws * zi + params_.bs).transpose();
        out.coord_means[static_cast<std::size_t>(i)] = params_.wx * zi + params_.bx;
        Eigen::VectorXd o9 = params_.wo * zi + params_.bo;
        Eigen::Matrix3d raw;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) raw(r, c) = o9(3 * r + c);
        out.orient_means[static_cast<std::size_t>(i)] = so3::project_to_rotation(raw);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoint IO

namespace {

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    write_u32(os, static_cast<std::uint32_t>(m.rows()));
    write_u32(os, static_cast<std::uint32_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = m(i, j);
            os.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

Eigen::MatrixXd read_matrix(std::istream& is) {
    std::uint32_t rows = read_u32(is), cols = read_u32(is);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double v = 0;
            is.read(reinterpret_cast<char*>(&v), sizeof(v));
            m(i, j) = v;
        }
    if (!is) throw ConfigError("checkpoint: truncated tensor data");
    return m;
}

}  // namespace

void ToyDenoiser::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open checkpoint for writing: " + path);
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_u32(os, kCheckpointVersion);
    write_u32(os, static_cast<std::uint32_t>(cfg_.latent_dim));
    write_u32(os, static_cast<std::uint32_t>(cfg_.hidden_dim));
    write_u32(os, static_cast<std::uint32_t>(cfg_.time_freqs));
    write_u32(os, static_cast<std::uint32_t>(total_steps_));
    const Eigen::MatrixXd tensors[] = {params_.w1, params_.b1, params_.w2, params_.b2,
                                       params_.ws, params_.bs, params_.wx, params_.bx,
                                       params_.wo, params_.bo};
    write_u32(os, static_cast<std::uint32_t>(std::size(tensors)));
    for (const auto& t : tensors) write_matrix(os, t);
    if (!os) throw ConfigError("checkpoint write failed: " + path);
}

ToyDenoiser ToyDenoiser::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
        throw ConfigError("checkpoint: bad magic header");
    std::uint32_t version = read_u32(is);
    if (version != kCheckpointVersion)
        throw ConfigError("checkpoint: unsupported version " + std::to_string(version));

    ToyDenoiserConfig cfg;
    cfg.latent_dim = static_cast<int>(read_u32(is));
    cfg.hidden_dim = static_cast<int>(read_u32(is));
    cfg.time_freqs = static_cast<int>(read_u32(is));
    int total_steps = static_cast<int>(read_u32(is));

    Rng dummy(0);
    ToyDenoiser model(cfg, total_steps, dummy);
    std::uint32_t count = read_u32(is);
    if (count != 10) throw ConfigError("checkpoint: unexpected tensor count");
    model.params_.w1 = read_matrix(is);
    model.params_.b1 = read_matrix(is);
    model.params_.w2 = read_matrix(is);
    model.params_.b2 = read_matrix(is);
    model.params_.ws = read_matrix(is);
    model.params_.bs = read_matrix(is);
    model.params_.wx = read_matrix(is);
    model.params_.bx = read_matrix(is);
    model.params_.wo = read_matrix(is);
    model.params_.bo = read_matrix(is);
    const int f = model.feature_dim();
    if (model.params_.w1.rows() != cfg.hidden_dim || model.params_.w1.cols() != f ||
        model.params_.w2.rows() != cfg.latent_dim || model.params_.ws.cols() != cfg.latent_dim)
        throw ConfigError("checkpoint: tensor shapes disagree with the header");
    return model;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Adam {
    explicit Adam(const Eigen::MatrixXd& shape)
        : m(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())),
          v(Eigen::MatrixXd::Zero(shape.rows(), shape.cols())) {}
    Eigen::MatrixXd m, v;
    int steps = 0;

    void update(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad, double lr) {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        ++steps;
        m = b1 * m + (1.0 - b1) * grad;
        v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
        double correction =
            std::sqrt(1.0 - std::pow(b2, steps)) / (1.0 - std::pow(b1, steps));
        param -= lr * correction *
                 m.cwiseQuotient((v.cwiseSqrt().array() + eps).matrix());
    }
};

struct NoisedExample {
    CdrState state;                 // at level t
    const ComplexContext* context;
    int t;
    DenoiserOutput target;          // analytic posterior parameters
};

double rotation_loss(const Eigen::VectorXd& o9, const Rotation& target) {
    Eigen::Matrix3d raw;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) raw(r, c) = o9(3 * r + c);
    double g = so3::geodesic_distance(so3::project_to_rotation(raw), target);
    return g * g;
}

// The rotation head goes through a polar decomposition, which has no tidy
// closed-form Jacobian; central differences on the 9 raw outputs are cheap
// at this scale and exact enough for Adam.
Eigen::VectorXd rotation_loss_grad(const Eigen::VectorXd& o9, const Rotation& target) {
    constexpr double h = 1e-5;
    Eigen::VectorXd grad(9);
    Eigen::VectorXd probe = o9;
    for (int k = 0; k < 9; ++k) {
        probe(k) = o9(k) + h;
        double up = rotation_loss(probe, target);
        probe(k) = o9(k) - h;
        double down = rotation_loss(probe, target);
        probe(k) = o9(k);
        grad(k) = (up - down) / (2.0 * h);
    }
    return grad;
}

}  // namespace

TrainResult train_toy_denoiser(const SyntheticTask& task,
                               const std::vector<TrainingExample>& dataset,
                               const NoiseSchedule& sched, const TrainOptions& opts, Rng& rng) {
    if (dataset.empty()) throw ConfigError("train_toy_denoiser: empty dataset");
    const std::size_t m = dataset.front().state.size();
    for (const auto& ex : dataset)
        if (ex.state.size() != m)
            throw ConfigError("train_toy_denoiser: inconsistent state lengths in dataset");

    OracleDenoiser oracle(task);
    so3::IgSo3TableCache noise_tables;
    Rng init_rng = rng.fork(0xA11CE);
    ToyDenoiser model(ToyDenoiserConfig{}, sched.T, init_rng);

    auto make_noised = [&](const TrainingExample& ex, Rng& r) {
        NoisedExample n;
        n.t = 1 + static_cast<int>(r.below(static_cast<std::size_t>(sched.T)));
        n.state = forward_state(ex.state, sched, n.t, r, &noise_tables);
        n.context = &ex.context;
        n.target = oracle.decode(oracle.encode(n.state, ex.context, n.t), n.t);
        return n;
    };

    // Fixed validation set so initial and final losses are comparable.
    std::vector<NoisedExample> val;
    Rng val_rng = rng.fork(0x5A11D);
    for (int i = 0; i < opts.validation_size; ++i)
        val.push_back(make_noised(dataset[val_rng.below(dataset.size())], val_rng));

    auto example_loss = [&](const ToyDenoiser& net, const NoisedExample& n) {
        double loss = 0.0;
        LatentCode z = net.encode(n.state, *n.context, n.t);
        const auto& p = net.params();
        for (std::size_t i = 0; i < n.state.size(); ++i) {
            Eigen::VectorXd zi = z.values.row(static_cast<Eigen::Index>(i)).transpose();
            Eigen::VectorXd probs = softmax(p.ws * zi + p.bs);
            for (int a = 0; a < kNumAminoAcids; ++a)
                loss -= n.target.seq_probs(static_cast<Eigen::Index>(i), a) *
                        std::log(std::max(probs(a), 1e-300));
            Eigen::Vector3d xh = p.wx * zi + p.bx;
            loss += (xh - n.target.coord_means[i]).squaredNorm();
            loss += rotation_loss(p.wo * zi + p.bo, n.target.orient_means[i]);
        }
        return loss / static_cast<double>(n.state.size());
    };

    auto validation_loss = [&](const ToyDenoiser& net) {
        double total = 0.0;
        for (const auto& n : val) total += example_loss(net, n);
        return total / static_cast<double>(val.size());
    };

    TrainResult result{std::move(model), {}, 0.0, 0.0};
    result.initial_validation_loss = validation_loss(result.model);
    result.final_validation_loss = result.initial_validation_loss;
    if (opts.epochs <= 0) return result;

    auto& p = result.model.params();
    Adam opt_w1(p.w1), opt_b1(p.b1), opt_w2(p.w2), opt_b2(p.b2), opt_ws(p.ws), opt_bs(p.bs),
        opt_wx(p.wx), opt_bx(p.bx), opt_wo(p.wo), opt_bo(p.bo);

    Rng train_rng = rng.fork(0x7124);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        // Fisher-Yates driven by the training stream.
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[train_rng.below(i)]);

        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            std::size_t stop = std::min(order.size(), start + opts.batch_size);
            Eigen::MatrixXd gw1 = Eigen::MatrixXd::Zero(p.w1.rows(), p.w1.cols());
            Eigen::VectorXd gb1 = Eigen::VectorXd::Zero(p.b1.size());
            Eigen::MatrixXd gw2 = Eigen::MatrixXd::Zero(p.w2.rows(), p.w2.cols());
            Eigen::VectorXd gb2 = Eigen::VectorXd::Zero(p.b2.size());
            Eigen::MatrixXd gws = Eigen::MatrixXd::Zero(p.ws.rows(), p.ws.cols());
            Eigen::VectorXd gbs = Eigen::VectorXd::Zero(p.bs.size());
            Eigen::MatrixXd gwx = Eigen::MatrixXd::Zero(p.wx.rows(), p.wx.cols());
            Eigen::VectorXd gbx = Eigen::VectorXd::Zero(p.bx.size());
            Eigen::MatrixXd gwo = Eigen::MatrixXd::Zero(p.wo.rows(), p.wo.cols());
            Eigen::VectorXd gbo = Eigen::VectorXd::Zero(p.bo.size());

            double batch_loss = 0.0;
            std::size_t residues = 0;
            for (std::size_t k = start; k < stop; ++k) {
                NoisedExample n = make_noised(dataset[order[k]], train_rng);
                for (std::size_t i = 0; i < n.state.size(); ++i) {
                    Eigen::VectorXd phi =
                        result.model.features(n.state, *n.context, n.t, i);
                    Eigen::VectorXd h = (p.w1 * phi + p.b1).array().tanh();
                    Eigen::VectorXd zi = p.w2 * h + p.b2;

                    Eigen::VectorXd logits = p.ws * zi + p.bs;
                    Eigen::VectorXd probs = softmax(logits);
                    Eigen::VectorXd target =
                        n.target.seq_probs.row(static_cast<Eigen::Index>(i)).transpose();
                    for (int a = 0; a < kNumAminoAcids; ++a)
                        batch_loss -= target(a) * std::log(std::max(probs(a), 1e-300));
                    Eigen::VectorXd dlogits = probs - target;

                    Eigen::Vector3d xh = p.wx * zi + p.bx;
                    Eigen::Vector3d xerr = xh - n.target.coord_means[i];
                    batch_loss += xerr.squaredNorm();
                    Eigen::Vector3d dx = 2.0 * xerr;

                    Eigen::VectorXd o9 = p.wo * zi + p.bo;
                    batch_loss += rotation_loss(o9, n.target.orient_means[i]);
                    Eigen::VectorXd dor = rotation_loss_grad(o9, n.target.orient_means[i]);

                    Eigen::VectorXd dz = p.ws.transpose() * dlogits +
                                         p.wx.transpose() * dx + p.wo.transpose() * dor;
                    gws += dlogits * zi.transpose();
                    gbs += dlogits;
                    gwx += dx * zi.transpose();
                    gbx += dx;
                    gwo += dor * zi.transpose();
                    gbo += dor;

                    Eigen::VectorXd dh = p.w2.transpose() * dz;
                    gw2 += dz * h.transpose();
                    gb2 += dz;
                    Eigen::VectorXd da = dh.cwiseProduct(
                        (1.0 - h.array().square()).matrix());
                    gw1 += da * phi.transpose();
                    gb1 += da;
                    ++residues;
                }
            }
            double inv = 1.0 / static_cast<double>(residues);
            opt_w1.update(p.w1, gw1 * inv, opts.lr);
            opt_b1.update(p.b1, gb1 * inv, opts.lr);
            opt_w2.update(p.w2, gw2 * inv, opts.lr);
            opt_b2.update(p.b2, gb2 * inv, opts.lr);
            opt_ws.update(p.ws, gws * inv, opts.lr);
            opt_bs.update(p.bs, gbs * inv, opts.lr);
            opt_wx.update(p.wx, gwx * inv, opts.lr);
            opt_bx.update(p.bx, gbx * inv, opts.lr);
            opt_wo.update(p.wo, gwo * inv, opts.lr);
            opt_bo.update(p.bo, gbo * inv, opts.lr);

            epoch_loss += batch_loss;
            seen += residues;
        }
        result.epoch_loss.push_back(epoch_loss / static_cast<double>(seen));
    }

    result.final_validation_loss = validation_loss(result.model);
    return result;
}

}  // namespace abdesign
