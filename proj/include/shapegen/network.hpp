#pragma once

// Residual encoder / processor / decoder network mapping the five
// normalized inputs to 2N-1 Fourier coefficients, with its reverse pass,
// the curve loss and the AdamW update.
//
//   h_0 = tanh(W_e x + b_e)
//   h_i = h_{i-1} + tanh(W_i LN_i(h_{i-1}) + b_i),   i = 1..r
//   f   = s (.) (W_d h_r + b_d)
//
// LN_i standardizes each sample across its l features and applies a
// learned per-feature gain and shift. `s` is a fixed per-coefficient output
// scale taken from the training targets (ones by default).

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shapegen/error.hpp"
#include "shapegen/fourier.hpp"
#include "shapegen/random.hpp"

namespace shapegen {

inline constexpr int kInputDim = 5;
inline constexpr double kLayerNormEps = 1e-5;

struct NetworkConfig {
    int latent_dim = 128;
    int residual_layers = 4;
    int harmonics = 8; // N; the network emits 2N-1 coefficients
    double lambda = 0.1;
    double noise_sigma = 0.01;
    int batch_size = 16;
    int epochs = 2000;
    double lr0 = 1e-3;
    double lr_min = 1e-5;
    int n_points = 128;
    int validate_every = 10;
    int target_harmonics = 32; // ground truth fitted with 63 coefficients
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double weight_decay = 1e-4;
    InputScaling input_scaling = InputScaling::log;
    std::uint64_t seed = 0;

    int outputs() const { return 2 * harmonics - 1; }

    /// Defaults per layer count: 15 coefficients for one layer, 31 for two.
    static NetworkConfig for_layers(int layers) {
        NetworkConfig c;
        c.harmonics = layers == 2 ? 16 : 8;
        return c;
    }

    void check() const {
        auto fail = [](const std::string& field, const std::string& what) {
            throw DomainError("invalid network config: " + field + " " + what, field);
        };
        if (harmonics < 2) fail("harmonics", "must be >= 2");
        if (latent_dim < outputs()) fail("latent_dim", "must be >= 2N-1");
        if (residual_layers < 1) fail("residual_layers", "must be >= 1");
        if (batch_size < 1) fail("batch_size", "must be >= 1");
        if (epochs < 1) fail("epochs", "must be >= 1");
        if (!(lr0 > 0.0)) fail("lr0", "must be positive");
        if (!(lr_min >= 0.0 && lr_min <= lr0)) fail("lr_min", "must lie in [0, lr0]");
        if (n_points < 2 * harmonics) fail("n_points", "must be >= 2N");
        if (n_points < 3) fail("n_points", "must be >= 3");
        if (!(lambda >= 0.0)) fail("lambda", "must be non-negative");
        if (!(noise_sigma >= 0.0)) fail("noise_sigma", "must be non-negative");
        if (validate_every < 1) fail("validate_every", "must be >= 1");
        if (target_harmonics < harmonics) fail("target_harmonics", "must be >= harmonics");
    }
};

/// Named slice of the flat parameter vector.
struct ParamBlock {
    std::string name;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    Eigen::Index offset = 0;

    Eigen::Index size() const { return rows * cols; }
};

/// Network weights stored as one flat vector (column-major blocks).
class Network {
public:
    using MatMap = Eigen::Map<Eigen::MatrixXd>;
    using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
    using VecMap = Eigen::Map<Eigen::VectorXd>;
    using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

    Network() = default;

    Network(int latent_dim, int residual_layers, int outputs)
        : latent_(latent_dim), residual_(residual_layers), outputs_(outputs) {
        Eigen::Index off = 0;
        auto add = [&](std::string name, Eigen::Index r, Eigen::Index c) {
            blocks_.push_back({std::move(name), r, c, off});
            off += r * c;
        };
        add("encoder.weight", latent_, kInputDim);
        add("encoder.bias", latent_, 1);
        for (int i = 0; i < residual_; ++i) {
            const std::string p = "residual." + std::to_string(i) + ".";
            add(p + "norm.gain", latent_, 1);
            add(p + "norm.shift", latent_, 1);
            add(p + "weight", latent_, latent_);
            add(p + "bias", latent_, 1);
        }
        add("decoder.weight", outputs_, latent_);
        add("decoder.bias", outputs_, 1);
        params_ = Eigen::VectorXd::Zero(off);
        output_scale_ = Eigen::VectorXd::Ones(outputs_);
    }

    int latent_dim() const { return latent_; }
    int residual_layers() const { return residual_; }
    int outputs() const { return outputs_; }
    const std::vector<ParamBlock>& blocks() const { return blocks_; }

    Eigen::VectorXd& params() { return params_; }
    const Eigen::VectorXd& params() const { return params_; }
    Eigen::VectorXd& output_scale() { return output_scale_; }
    const Eigen::VectorXd& output_scale() const { return output_scale_; }

    // Block indices: 0,1 encoder; 2 + 4i .. 5 + 4i residual i; last two decoder.
    static std::size_t enc_w() { return 0; }
    static std::size_t enc_b() { return 1; }
    static std::size_t res_gain(int i) { return 2 + 4 * static_cast<std::size_t>(i); }
    static std::size_t res_shift(int i) { return 3 + 4 * static_cast<std::size_t>(i); }
    static std::size_t res_w(int i) { return 4 + 4 * static_cast<std::size_t>(i); }
    static std::size_t res_b(int i) { return 5 + 4 * static_cast<std::size_t>(i); }
    std::size_t dec_w() const { return blocks_.size() - 2; }
    std::size_t dec_b() const { return blocks_.size() - 1; }

    template <typename Vec>
    static auto block(Vec& v, const ParamBlock& b) {
        if constexpr (std::is_const_v<Vec>)
            return ConstMatMap(v.data() + b.offset, b.rows, b.cols);
        else
            return MatMap(v.data() + b.offset, b.rows, b.cols);
    }
    MatMap mat(std::size_t i) { return block(params_, blocks_[i]); }
    ConstMatMap mat(std::size_t i) const { return block(params_, blocks_[i]); }

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for affine maps; unit gain,
    /// zero shift for the normalization layers.
    void initialize(std::uint64_t seed) {
        Rng rng(seed);
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
            const auto& b = blocks_[bi];
            auto m = block(params_, b);
            const bool is_gain = b.name.ends_with("norm.gain");
            const bool is_shift = b.name.ends_with("norm.shift");
            if (is_gain) { m.setOnes(); continue; }
            if (is_shift) { m.setZero(); continue; }
            const double fan_in = b.name.starts_with("encoder") ? kInputDim : latent_;
            const double bound = 1.0 / std::sqrt(fan_in);
            for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = (2.0 * rng.uniform() - 1.0) * bound;
        }
    }

    bool finite() const { return params_.allFinite() && output_scale_.allFinite(); }

private:
    int latent_ = 0;
    int residual_ = 0;
    int outputs_ = 0;
    std::vector<ParamBlock> blocks_;
    Eigen::VectorXd params_;
    Eigen::VectorXd output_scale_;
};

// ---------------------------------------------------------------------------
// Forward pass

struct ForwardCache {
    Eigen::MatrixXd input;                 // 5 x B
    Eigen::MatrixXd h0;                    // l x B
    std::vector<Eigen::MatrixXd> h;        // h_{i-1} entering residual i
    std::vector<Eigen::MatrixXd> normed;   // standardized h_{i-1}
    std::vector<Eigen::RowVectorXd> inv_std;
    std::vector<Eigen::MatrixXd> u;        // gain * normed + shift
    std::vector<Eigen::MatrixXd> psi;      // tanh output of residual i
    Eigen::MatrixXd h_last;                // h_r
    Eigen::MatrixXd coeffs;                // outputs x B (scaled)
};

/// Batched forward pass; columns of `x` are samples.
inline Eigen::MatrixXd forward_batch(const Network& net, const Eigen::MatrixXd& x,
                                     ForwardCache* cache = nullptr) {
    Eigen::MatrixXd h = ((net.mat(Network::enc_w()) * x).colwise() +
                         Eigen::VectorXd(net.mat(Network::enc_b())))
                            .array()
                            .tanh()
                            .matrix();
    if (cache) {
        cache->input = x;
        cache->h0 = h;
        cache->h.clear(), cache->normed.clear(), cache->inv_std.clear();
        cache->u.clear(), cache->psi.clear();
    }
    const double l = static_cast<double>(net.latent_dim());
    for (int i = 0; i < net.residual_layers(); ++i) {
        const Eigen::RowVectorXd mean = h.colwise().mean();
        Eigen::MatrixXd centered = h.rowwise() - mean;
        const Eigen::RowVectorXd var = centered.array().square().colwise().sum() / l;
        const Eigen::RowVectorXd inv_std = (var.array() + kLayerNormEps).rsqrt();
        Eigen::MatrixXd normed = centered.array().rowwise() * inv_std.array();
        const Eigen::VectorXd gain = net.mat(Network::res_gain(i));
        const Eigen::VectorXd shift = net.mat(Network::res_shift(i));
        Eigen::MatrixXd u = (normed.array().colwise() * gain.array()).colwise() + shift.array();
        Eigen::MatrixXd psi = ((net.mat(Network::res_w(i)) * u).colwise() +
                               Eigen::VectorXd(net.mat(Network::res_b(i))))
                                  .array()
                                  .tanh()
                                  .matrix();
        if (cache) {
            cache->h.push_back(h);
            cache->normed.push_back(std::move(normed));
            cache->inv_std.push_back(inv_std);
            cache->u.push_back(std::move(u));
        }
        h += psi;
        if (cache) cache->psi.push_back(std::move(psi));
    }
    Eigen::MatrixXd out = (net.mat(net.dec_w()) * h).colwise() + Eigen::VectorXd(net.mat(net.dec_b()));
    out = out.array().colwise() * net.output_scale().array();
    if (cache) {
        cache->h_last = h;
        cache->coeffs = out;
    }
    return out;
}

/// Coefficients for one normalized input vector.
inline FourierShape forward(const Network& net, const std::array<double, 5>& x) {
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("non-finite network input", "inputs");
    if (!net.finite()) throw DomainError("non-finite network weights", "weights");
    Eigen::MatrixXd in(kInputDim, 1);
    for (int i = 0; i < kInputDim; ++i) in(i, 0) = x[static_cast<std::size_t>(i)];
    const Eigen::VectorXd f = forward_batch(net, in).col(0);
    return FourierShape::from_vector(std::span<const double>(f.data(), static_cast<std::size_t>(f.size())));
}

// ---------------------------------------------------------------------------
// Curve basis and loss

/// Maps a coefficient vector to stacked sample coordinates on the uniform
/// grid: rows [0, n) give x_j, rows [n, 2n) give y_j.
inline Eigen::MatrixXd curve_basis(int harmonics, int n_points) {
    const int nc = 2 * harmonics - 1;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2 * n_points, nc);
    const auto t = uniform_grid(static_cast<std::size_t>(n_points));
    for (int j = 0; j < n_points; ++j) {
        b(n_points + j, 0) = 1.0;
        for (int k = 1; k < harmonics; ++k) {
            b(j, k) = std::sin(k * t[static_cast<std::size_t>(j)]);
            b(n_points + j, harmonics - 1 + k) = std::cos(k * t[static_cast<std::size_t>(j)]);
        }
    }
    return b;
}

/// Ground-truth side of the loss, precomputed once per target curve.
struct LossTarget {
    std::vector<Point> points;
    std::vector<Point> derivs; // centered differences at interior points 1..n-2
    double max_norm = 0.0;
    double max_deriv = 0.0;
};

inline std::vector<Point> centered_derivatives(std::span<const Point> pts, std::span<const double> t) {
    std::vector<Point> d;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
        d.push_back((1.0 / (t[i + 1] - t[i - 1])) * (pts[i + 1] - pts[i - 1]));
    return d;
}

inline LossTarget make_loss_target(const SampledCurve& target, double lambda) {
    if (target.size() < 3) throw DomainError("loss needs at least 3 curve points", "n_points");
    LossTarget lt;
    lt.points = target.points;
    lt.derivs = centered_derivatives(target.points, target.t);
    for (const auto& p : lt.points) lt.max_norm = std::max(lt.max_norm, norm(p));
    for (const auto& d : lt.derivs) lt.max_deriv = std::max(lt.max_deriv, norm(d));
    if (!(lt.max_norm > 0.0)) throw DomainError("loss target is identically zero", "target");
    if (lambda > 0.0 && !(lt.max_deriv > 0.0))
        throw DomainError("loss target has zero derivative everywhere", "target");
    return lt;
}

/// L = (1/n) sum |p_i - x_i| / max|x|  +  lambda/(n-2) sum |p'_i - x'_i| / max|x'|.
/// When `grad` is given it receives dL/dp_i.
inline double curve_loss(std::span<const Point> pred, const LossTarget& target, std::span<const double> t,
                         double lambda, std::vector<Point>* grad = nullptr) {
    const std::size_t n = target.points.size();
    if (pred.size() != n || t.size() != n) throw DomainError("loss: curve sizes differ");
    if (grad) grad->assign(n, Point{});
    double recon = 0.0;
    const double w0 = 1.0 / (static_cast<double>(n) * target.max_norm);
    for (std::size_t i = 0; i < n; ++i) {
        const Point e = pred[i] - target.points[i];
        const double d = norm(e);
        recon += d;
        if (grad && d > 0.0) (*grad)[i] = (*grad)[i] + (w0 / d) * e;
    }
    recon *= w0;
    if (lambda == 0.0) return recon;

    double smooth = 0.0;
    const double w1 = lambda / (static_cast<double>(n - 2) * target.max_deriv);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double inv_dt = 1.0 / (t[i + 1] - t[i - 1]);
        const Point dp = inv_dt * (pred[i + 1] - pred[i - 1]);
        const Point e = dp - target.derivs[i - 1];
        const double d = norm(e);
        smooth += d;
        if (grad && d > 0.0) {
            const Point g = (w1 * inv_dt / d) * e;
            (*grad)[i + 1] = (*grad)[i + 1] + g;
            (*grad)[i - 1] = (*grad)[i - 1] - g;
        }
    }
    return recon + w1 * smooth;
}

/// Convenience overload on two sampled curves sharing a parameter grid.
inline double curve_loss(const SampledCurve& predicted, const SampledCurve& target, double lambda) {
    if (predicted.size() != target.size())
        throw DomainError("loss: predicted and target curves have different sizes");
    for (std::size_t i = 0; i < target.size(); ++i)
        if (std::abs(predicted.t[i] - target.t[i]) > 1e-12)
            throw DomainError("loss: parameter grids differ");
    return curve_loss(predicted.points, make_loss_target(target, lambda), target.t, lambda);
}

// ---------------------------------------------------------------------------
// Reverse pass

/// Loss and exact gradient of the batch-mean loss with respect to every
/// parameter (same layout as Network::params()).
struct BatchGradient {
    double loss = 0.0;
    Eigen::VectorXd grad;
};

inline BatchGradient loss_and_gradient(const Network& net, const Eigen::MatrixXd& x,
                                       std::span<const LossTarget* const> targets,
                                       const Eigen::MatrixXd& basis, std::span<const double> t,
                                       double lambda) {
    const Eigen::Index batch = x.cols();
    if (batch == 0) throw DomainError("empty batch");
    if (static_cast<Eigen::Index>(targets.size()) != batch)
        throw DomainError("batch and target counts differ");
    const Eigen::Index n_pts = basis.rows() / 2;
    if (basis.cols() != net.outputs()) throw DomainError("basis and network output sizes differ");

    ForwardCache cache;
    const Eigen::MatrixXd coeffs = forward_batch(net, x, &cache);
    const Eigen::MatrixXd pts = basis * coeffs; // 2n x B

    BatchGradient out;
    out.grad = Eigen::VectorXd::Zero(net.params().size());
    Eigen::MatrixXd d_pts(2 * n_pts, batch);
    std::vector<Point> pred(static_cast<std::size_t>(n_pts)), g;
    const double inv_b = 1.0 / static_cast<double>(batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
        if (static_cast<Eigen::Index>(targets[static_cast<std::size_t>(b)]->points.size()) != n_pts)
            throw DomainError("target point count differs from the basis");
        for (Eigen::Index j = 0; j < n_pts; ++j) pred[static_cast<std::size_t>(j)] = {pts(j, b), pts(n_pts + j, b)};
        out.loss += inv_b * curve_loss(pred, *targets[static_cast<std::size_t>(b)], t, lambda, &g);
        for (Eigen::Index j = 0; j < n_pts; ++j) {
            d_pts(j, b) = inv_b * g[static_cast<std::size_t>(j)].x;
            d_pts(n_pts + j, b) = inv_b * g[static_cast<std::size_t>(j)].y;
        }
    }

    auto grad_block = [&](std::size_t i) { return Network::block(out.grad, net.blocks()[i]); };

    Eigen::MatrixXd d_raw = basis.transpose() * d_pts;
    d_raw = d_raw.array().colwise() * net.output_scale().array();
    grad_block(net.dec_w()) = d_raw * cache.h_last.transpose();
    grad_block(net.dec_b()) = d_raw.rowwise().sum();
    Eigen::MatrixXd d_h = net.mat(net.dec_w()).transpose() * d_raw;

    const double l = static_cast<double>(net.latent_dim());
    for (int i = net.residual_layers() - 1; i >= 0; --i) {
        const auto ui = static_cast<std::size_t>(i);
        const Eigen::MatrixXd d_a = d_h.array() * (1.0 - cache.psi[ui].array().square());
        grad_block(Network::res_w(i)) = d_a * cache.u[ui].transpose();
        grad_block(Network::res_b(i)) = d_a.rowwise().sum();
        const Eigen::MatrixXd d_u = net.mat(Network::res_w(i)).transpose() * d_a;
        grad_block(Network::res_gain(i)) = (d_u.array() * cache.normed[ui].array()).rowwise().sum().matrix();
        grad_block(Network::res_shift(i)) = d_u.rowwise().sum();
        const Eigen::VectorXd gain = net.mat(Network::res_gain(i));
        const Eigen::MatrixXd d_n = d_u.array().colwise() * gain.array();
        const Eigen::RowVectorXd mean_dn = d_n.colwise().sum() / l;
        const Eigen::RowVectorXd mean_dn_n = (d_n.array() * cache.normed[ui].array()).colwise().sum().matrix() / l;
        Eigen::MatrixXd d_in = d_n.rowwise() - mean_dn;
        d_in -= (cache.normed[ui].array().rowwise() * mean_dn_n.array()).matrix();
        d_in = d_in.array().rowwise() * cache.inv_std[ui].array();
        d_h += d_in;
    }
    const Eigen::MatrixXd d_z0 = d_h.array() * (1.0 - cache.h0.array().square());
    grad_block(Network::enc_w()) = d_z0 * cache.input.transpose();
    grad_block(Network::enc_b()) = d_z0.rowwise().sum();
    return out;
}

// ---------------------------------------------------------------------------
// AdamW

class AdamW {
public:
    AdamW(Eigen::Index size, double beta1, double beta2, double eps, double weight_decay)
        : m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)), beta1_(beta1),
          beta2_(beta2), eps_(eps), decay_(weight_decay) {}

    /// Decoupled weight decay, then the bias-corrected Adam step.
    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
        ++t_;
        m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
        v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        params *= 1.0 - lr * decay_;
        params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
    }

    long steps() const { return t_; }

private:
    Eigen::VectorXd m_, v_;
    double beta1_, beta2_, eps_, decay_;
    long t_ = 0;
};

/// Cosine decay from lr0 at epoch 0 to lr_min at the last epoch.
inline double cosine_lr(const NetworkConfig& cfg, int epoch) {
    if (cfg.epochs <= 1) return cfg.lr0;
    const double frac = static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
    return cfg.lr_min + 0.5 * (cfg.lr0 - cfg.lr_min) * (1.0 + std::cos(std::numbers::pi * frac));
}

} // namespace shapegen
