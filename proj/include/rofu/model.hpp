#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rofu/errors.hpp"
#include "rofu/feature_map.hpp"
#include "rofu/linalg.hpp"
#include "rofu/rng.hpp"

namespace rofu {

// Differentiable reward models f_theta(x, a) with exact parameter gradients:
// linear feature models, explicit-feature kernel models and small MLPs.

using ParamVector = std::vector<double>;

struct Transition {
    std::vector<double> context;
    int arm = 0;
    double reward = 0.0;
};

using Dataset = std::vector<Transition>;

enum class Activation { Relu, Tanh };

struct ModelSpec {
    enum class Kind { Linear, KernelFeatures, Mlp };

    Kind kind = Kind::Linear;
    int context_dim = 0;
    int arm_count = 2;

    // Mlp only: all layer sizes [input, hidden..., output]. The input is the
    // context alone (input == context_dim) or the context with a one-hot arm
    // appended (input == context_dim + arm_count). The output is one value
    // per arm (output == arm_count) or a single arm-independent scalar.
    std::vector<int> layer_widths;
    Activation activation = Activation::Relu;

    // Linear / KernelFeatures only.
    FeatureMapSpec feature_map;

    bool is_mlp() const { return kind == Kind::Mlp; }

    void validate() const {
        if (arm_count < 1) throw DimensionError("ModelSpec: arm_count must be >= 1");
        if (context_dim < 0) throw DimensionError("ModelSpec: negative context_dim");
        if (is_mlp()) {
            if (layer_widths.size() < 2) throw DimensionError("ModelSpec: mlp needs at least two layers");
            for (int w : layer_widths)
                if (w < 1) throw DimensionError("ModelSpec: mlp layer width must be >= 1");
            const int in = layer_widths.front();
            if (in != context_dim && in != context_dim + arm_count)
                throw DimensionError("ModelSpec: mlp input width must be context_dim or context_dim + arm_count");
            const int out = layer_widths.back();
            if (out != 1 && out != arm_count)
                throw DimensionError("ModelSpec: mlp output width must be 1 or arm_count");
        }
    }

    int param_count() const {
        if (is_mlp()) {
            int p = 0;
            for (std::size_t l = 1; l < layer_widths.size(); ++l)
                p += layer_widths[l] * (layer_widths[l - 1] + 1);
            return p;
        }
        return FeatureMap(feature_map, context_dim, arm_count).dim();
    }
};

// Scratch buffers for one forward/backward pass; reusable across calls.
struct ModelWorkspace {
    std::vector<std::vector<double>> z;      // activations, z[0] = input
    std::vector<double> delta, delta_next;   // backprop buffers
    std::vector<double> phi;                 // linear/kernel feature buffer
};

// A ModelSpec bound to its materialized feature map and flat parameter
// layout. Pure value type; forward/grad are const and freely concurrent when
// each thread brings its own workspace.
class Model {
  public:
    Model() = default;

    explicit Model(ModelSpec spec) : spec_(std::move(spec)) {
        spec_.validate();
        if (spec_.is_mlp()) {
            layer_offset_.resize(spec_.layer_widths.size(), 0);
            int off = 0;
            // Per layer l >= 1: weight matrix (n_l x n_{l-1}) row-major,
            // then bias vector (n_l).
            for (std::size_t l = 1; l < spec_.layer_widths.size(); ++l) {
                layer_offset_[l] = off;
                off += spec_.layer_widths[l] * (spec_.layer_widths[l - 1] + 1);
            }
            param_count_ = off;
        } else {
            fmap_ = FeatureMap(spec_.feature_map, spec_.context_dim, spec_.arm_count);
            param_count_ = fmap_.dim();
        }
    }

    const ModelSpec& spec() const { return spec_; }
    int param_count() const { return param_count_; }
    int arm_count() const { return spec_.arm_count; }
    const FeatureMap& feature_map() const { return fmap_; }

    ModelWorkspace make_workspace() const {
        ModelWorkspace ws;
        if (spec_.is_mlp()) {
            ws.z.resize(spec_.layer_widths.size());
            for (std::size_t l = 0; l < spec_.layer_widths.size(); ++l)
                ws.z[l].resize(spec_.layer_widths[l]);
            const int widest = *std::max_element(spec_.layer_widths.begin(), spec_.layer_widths.end());
            ws.delta.resize(widest);
            ws.delta_next.resize(widest);
        } else {
            ws.phi.resize(param_count_);
        }
        return ws;
    }

    // f_theta(x, a). Stores activations in ws for a later backward pass.
    double forward(std::span<const double> theta, std::span<const double> x, int arm,
                   ModelWorkspace& ws) const {
        check_inputs(theta, x, arm);
        if (!spec_.is_mlp()) {
            fmap_.compute(x, arm, ws.phi);
            double f = 0.0;
            for (int j = 0; j < param_count_; ++j) f += ws.phi[j] * theta[j];
            return f;
        }
        build_input(x, arm, ws.z[0]);
        const int layers = static_cast<int>(spec_.layer_widths.size()) - 1;
        for (int l = 1; l < layers; ++l) {
            affine(theta, l, ws.z[l - 1], ws.z[l]);
            activate(ws.z[l]);
        }
        // Last layer: only the selected head row is needed.
        const int head = head_index(arm);
        const int n_in = spec_.layer_widths[layers - 1];
        const double* w = theta.data() + layer_offset_[layers] + static_cast<std::size_t>(head) * n_in;
        const double* zin = ws.z[layers - 1].data();
        double f = theta[layer_offset_[layers] + static_cast<std::size_t>(spec_.layer_widths[layers]) * n_in + head];
        for (int j = 0; j < n_in; ++j) f += w[j] * zin[j];
        return f;
    }

    double forward(std::span<const double> theta, std::span<const double> x, int arm) const {
        ModelWorkspace ws = make_workspace();
        return forward(theta, x, arm, ws);
    }

    // acc += weight * d f_theta(x, a) / d theta, reusing the activations left
    // in ws by the immediately preceding forward() with the same arguments.
    void backward_accum(std::span<const double> theta, int arm, double weight,
                        ModelWorkspace& ws, std::span<double> acc) const {
        if (!spec_.is_mlp()) {
            for (int j = 0; j < param_count_; ++j) acc[j] += weight * ws.phi[j];
            return;
        }
        const int layers = static_cast<int>(spec_.layer_widths.size()) - 1;
        const int head = head_index(arm);

        // Head row of the output layer.
        {
            const int n_in = spec_.layer_widths[layers - 1];
            const std::size_t off = layer_offset_[layers];
            double* gw = acc.data() + off + static_cast<std::size_t>(head) * n_in;
            const double* zin = ws.z[layers - 1].data();
            for (int j = 0; j < n_in; ++j) gw[j] += weight * zin[j];
            acc[off + static_cast<std::size_t>(spec_.layer_widths[layers]) * n_in + head] += weight;
            const double* w = theta.data() + off + static_cast<std::size_t>(head) * n_in;
            for (int j = 0; j < n_in; ++j) ws.delta[j] = weight * w[j];
        }

        for (int l = layers - 1; l >= 1; --l) {
            const int n_out = spec_.layer_widths[l];
            const int n_in = spec_.layer_widths[l - 1];
            double* d = ws.delta.data();
            const double* zl = ws.z[l].data();
            if (spec_.activation == Activation::Relu) {
                for (int i = 0; i < n_out; ++i)
                    if (zl[i] <= 0.0) d[i] = 0.0;
            } else {
                for (int i = 0; i < n_out; ++i) d[i] *= 1.0 - zl[i] * zl[i];
            }
            const std::size_t off = layer_offset_[l];
            const double* zin = ws.z[l - 1].data();
            double* gw = acc.data() + off;
            double* gb = acc.data() + off + static_cast<std::size_t>(n_out) * n_in;
            for (int i = 0; i < n_out; ++i) {
                const double di = d[i];
                if (di != 0.0) {
                    double* grow = gw + static_cast<std::size_t>(i) * n_in;
                    for (int j = 0; j < n_in; ++j) grow[j] += di * zin[j];
                }
                gb[i] += di;
            }
            if (l > 1) {
                double* dn = ws.delta_next.data();
                std::fill(dn, dn + n_in, 0.0);
                const double* w = theta.data() + off;
                for (int i = 0; i < n_out; ++i) {
                    const double di = d[i];
                    if (di == 0.0) continue;
                    const double* wrow = w + static_cast<std::size_t>(i) * n_in;
                    for (int j = 0; j < n_in; ++j) dn[j] += di * wrow[j];
                }
                std::swap(ws.delta, ws.delta_next);
            }
        }
    }

    void grad_params(std::span<const double> theta, std::span<const double> x, int arm,
                     std::span<double> grad, ModelWorkspace& ws) const {
        std::fill(grad.begin(), grad.end(), 0.0);
        forward(theta, x, arm, ws);
        backward_accum(theta, arm, 1.0, ws, grad);
    }

    ParamVector grad_params(std::span<const double> theta, std::span<const double> x, int arm) const {
        ModelWorkspace ws = make_workspace();
        ParamVector g(param_count_, 0.0);
        grad_params(theta, x, arm, g, ws);
        return g;
    }

  private:
    void check_inputs(std::span<const double> theta, std::span<const double> x, int arm) const {
        if (static_cast<int>(theta.size()) != param_count_) throw DimensionError("model: theta size mismatch");
        if (static_cast<int>(x.size()) != spec_.context_dim) throw DimensionError("model: context size mismatch");
        if (arm < 0 || arm >= spec_.arm_count) throw DimensionError("model: arm out of range");
    }

    int head_index(int arm) const { return spec_.layer_widths.back() == 1 ? 0 : arm; }

    void build_input(std::span<const double> x, int arm, std::vector<double>& z0) const {
        const int in = spec_.layer_widths.front();
        std::copy(x.begin(), x.end(), z0.begin());
        if (in == spec_.context_dim + spec_.arm_count) {
            std::fill(z0.begin() + spec_.context_dim, z0.end(), 0.0);
            z0[spec_.context_dim + arm] = 1.0;
        }
    }

    void affine(std::span<const double> theta, int l, const std::vector<double>& in,
                std::vector<double>& out) const {
        const int n_out = spec_.layer_widths[l];
        const int n_in = spec_.layer_widths[l - 1];
        const double* w = theta.data() + layer_offset_[l];
        const double* b = w + static_cast<std::size_t>(n_out) * n_in;
        for (int i = 0; i < n_out; ++i) {
            const double* wrow = w + static_cast<std::size_t>(i) * n_in;
            double acc = b[i];
            for (int j = 0; j < n_in; ++j) acc += wrow[j] * in[j];
            out[i] = acc;
        }
    }

    void activate(std::vector<double>& v) const {
        if (spec_.activation == Activation::Relu) {
            for (double& x : v) x = std::max(0.0, x);
        } else {
            for (double& x : v) x = std::tanh(x);
        }
    }

    ModelSpec spec_;
    FeatureMap fmap_;
    std::vector<int> layer_offset_;
    int param_count_ = 0;
};

// MLP initialization: weights ~ Normal(0, 1/fan_in), biases zero. Linear and
// kernel models start at zero.
inline ParamVector init_params(const Model& model, std::uint64_t seed) {
    ParamVector theta(model.param_count(), 0.0);
    if (!model.spec().is_mlp()) return theta;
    RngStream rng(derive(seed, "init"));
    const auto& widths = model.spec().layer_widths;
    std::size_t off = 0;
    for (std::size_t l = 1; l < widths.size(); ++l) {
        const double sd = 1.0 / std::sqrt(static_cast<double>(widths[l - 1]));
        for (int i = 0; i < widths[l] * widths[l - 1]; ++i) theta[off++] = sd * rng.next_gaussian();
        off += widths[l];  // biases stay zero
    }
    return theta;
}

// ---------------------------------------------------------------------------
// Losses and regularizers.

inline double mse(const Model& model, std::span<const double> theta, const Dataset& data,
                  ModelWorkspace& ws) {
    if (data.empty()) throw EmptyDatasetError("mse: empty dataset");
    double s = 0.0;
    for (const Transition& tr : data) {
        const double e = model.forward(theta, tr.context, tr.arm, ws) - tr.reward;
        s += e * e;
    }
    return s / static_cast<double>(data.size());
}

inline double mse(const Model& model, std::span<const double> theta, const Dataset& data) {
    ModelWorkspace ws = model.make_workspace();
    return mse(model, theta, data, ws);
}

struct RegSpec {
    enum class Kind {
        ScaledMse,            // |D| * MSE, i.e. the raw sum of squared errors
        RidgePlusScaledMse,   // ||theta||^2 + |D| * MSE
        AnchoredRidgePlusSse  // anchor_weight * ||theta - anchor||^2 + SSE
    };
    Kind kind = Kind::ScaledMse;
    double anchor_weight = 0.0;
};

// R(theta; D) and its gradient. The data term may be estimated from a batch
// of indices with an unbiased |D|/|B| scaling; batch empty means full data.
// An empty dataset contributes nothing, leaving the ridge term alone.
inline double regularizer_value_and_grad_batch(const Model& model, std::span<const double> theta,
                                               const Dataset& data, std::span<const int> batch,
                                               const RegSpec& reg, std::span<const double> anchor,
                                               ModelWorkspace& ws, std::span<double> grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double value = 0.0;
    const std::size_t n = data.size();
    if (n > 0) {
        const double scale = batch.empty() ? 1.0 : static_cast<double>(n) / static_cast<double>(batch.size());
        auto accumulate = [&](const Transition& tr) {
            const double e = model.forward(theta, tr.context, tr.arm, ws) - tr.reward;
            value += scale * e * e;
            model.backward_accum(theta, tr.arm, scale * 2.0 * e, ws, grad);
        };
        if (batch.empty()) {
            for (const Transition& tr : data) accumulate(tr);
        } else {
            for (int idx : batch) accumulate(data[static_cast<std::size_t>(idx)]);
        }
    }
    switch (reg.kind) {
        case RegSpec::Kind::ScaledMse:
            break;
        case RegSpec::Kind::RidgePlusScaledMse:
            for (std::size_t j = 0; j < theta.size(); ++j) {
                value += theta[j] * theta[j];
                grad[j] += 2.0 * theta[j];
            }
            break;
        case RegSpec::Kind::AnchoredRidgePlusSse:
            if (anchor.size() != theta.size())
                throw DimensionError("regularizer: anchored kind needs an anchor of matching size");
            for (std::size_t j = 0; j < theta.size(); ++j) {
                const double d = theta[j] - anchor[j];
                value += reg.anchor_weight * d * d;
                grad[j] += reg.anchor_weight * 2.0 * d;
            }
            break;
    }
    return value;
}

inline std::pair<double, ParamVector> regularizer_value_and_grad(const Model& model,
                                                                 std::span<const double> theta,
                                                                 const Dataset& data, const RegSpec& reg,
                                                                 std::span<const double> anchor = {}) {
    ModelWorkspace ws = model.make_workspace();
    ParamVector grad(model.param_count(), 0.0);
    const double v = regularizer_value_and_grad_batch(model, theta, data, {}, reg, anchor, ws, grad);
    return {v, std::move(grad)};
}

// Full-data gradient of the sum of squared errors at theta; the control
// variate anchoring minibatched ascent steps.
inline ParamVector sse_grad(const Model& model, std::span<const double> theta, const Dataset& data,
                            ModelWorkspace& ws) {
    ParamVector grad(static_cast<std::size_t>(model.param_count()), 0.0);
    for (const Transition& tr : data) {
        const double e = model.forward(theta, tr.context, tr.arm, ws) - tr.reward;
        model.backward_accum(theta, tr.arm, 2.0 * e, ws, grad);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Per-round training: gradient descent on SSE + ridge, warm-started by
// the caller. The step is taken on the per-sample-averaged objective so a
// fixed step size stays stable as |D| grows; with a full batch this is plain
// gradient descent on (SSE + ridge)/|D|.

struct TrainConfig {
    double step_size = 0.05;
    int steps = 20;
    int batch_size = 0;  // 0 = full batch
    double ridge_weight = 0.0;
    enum class Anchor { None, InitPoint } anchor = Anchor::None;
};

inline ParamVector train(const Model& model, ParamVector theta, const Dataset& data,
                         const TrainConfig& cfg, std::uint64_t seed = 0,
                         std::span<const double> anchor_theta = {}) {
    if (cfg.steps < 0) throw DimensionError("train: negative step count");
    if (cfg.step_size <= 0.0) throw DimensionError("train: step size must be positive");
    if (cfg.steps == 0 || data.empty()) return theta;
    if (cfg.anchor == TrainConfig::Anchor::InitPoint && anchor_theta.size() != theta.size())
        throw DimensionError("train: anchored config needs the initialization point");

    const int p = model.param_count();
    const std::size_t n = data.size();
    const int batch = cfg.batch_size > 0 ? std::min<int>(cfg.batch_size, static_cast<int>(n)) : static_cast<int>(n);
    ModelWorkspace ws = model.make_workspace();
    std::vector<double> grad(static_cast<std::size_t>(p));
    std::vector<int> idx(static_cast<std::size_t>(batch));
    RngStream rng(derive(seed, "train"));

    for (int step = 0; step < cfg.steps; ++step) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double batch_loss = 0.0;
        const double inv_b = 1.0 / static_cast<double>(batch);
        if (batch == static_cast<int>(n)) {
            for (const Transition& tr : data) {
                const double e = model.forward(theta, tr.context, tr.arm, ws) - tr.reward;
                batch_loss += e * e;
                model.backward_accum(theta, tr.arm, 2.0 * e * inv_b, ws, grad);
            }
        } else {
            for (int& k : idx) k = static_cast<int>(rng.next_below(n));
            for (int k : idx) {
                const Transition& tr = data[static_cast<std::size_t>(k)];
                const double e = model.forward(theta, tr.context, tr.arm, ws) - tr.reward;
                batch_loss += e * e;
                model.backward_accum(theta, tr.arm, 2.0 * e * inv_b, ws, grad);
            }
        }
        if (!std::isfinite(batch_loss)) throw NonFiniteError("train: loss diverged at step " + std::to_string(step));
        if (cfg.ridge_weight > 0.0) {
            const double w = 2.0 * cfg.ridge_weight / static_cast<double>(n);
            if (cfg.anchor == TrainConfig::Anchor::InitPoint) {
                for (int j = 0; j < p; ++j) grad[j] += w * (theta[j] - anchor_theta[j]);
            } else {
                for (int j = 0; j < p; ++j) grad[j] += w * theta[j];
            }
        }
        for (int j = 0; j < p; ++j) theta[j] -= cfg.step_size * grad[j];
    }
    for (double v : theta)
        if (!std::isfinite(v)) throw NonFiniteError("train: parameters diverged");
    return theta;
}

// Exact ridge solution (lambda I + sum phi phi')^-1 sum phi r for linear and
// kernel-feature models, via a symmetric solve.
inline ParamVector ridge_fit(const Model& model, const Dataset& data, double lambda) {
    if (model.spec().is_mlp()) throw DimensionError("ridge_fit: linear or kernel_features model required");
    const int p = model.param_count();
    if (data.empty()) return ParamVector(static_cast<std::size_t>(p), 0.0);
    Matrix z = Matrix::identity(p, lambda);
    std::vector<double> b(static_cast<std::size_t>(p), 0.0);
    std::vector<double> phi(static_cast<std::size_t>(p));
    for (const Transition& tr : data) {
        model.feature_map().compute(tr.context, tr.arm, phi);
        z.add_outer(phi);
        for (int j = 0; j < p; ++j) b[j] += phi[j] * tr.reward;
    }
    ParamVector theta = psd_solve(z, b);
    auto zt = z.mul(theta);
    double binf = 0.0;
    for (double v : b) binf = std::max(binf, std::abs(v));
    for (int j = 0; j < p; ++j)
        if (std::abs(zt[j] - b[j]) > 1e-8 * (1.0 + binf))
            throw Error("ridge_fit: residual check failed");
    return theta;
}

// ---------------------------------------------------------------------------
// Flat checkpoint format: 8-byte magic, u32 version, u32 count, then count
// little-endian IEEE-754 doubles.

inline constexpr char kParamMagic[8] = {'R', 'F', 'P', 'A', 'R', 'A', 'M', '1'};

inline void save_params(const std::string& path, const ParamVector& theta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_params: cannot open " + path);
    out.write(kParamMagic, 8);
    const std::uint32_t version = 1;
    const std::uint32_t count = static_cast<std::uint32_t>(theta.size());
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&count), 4);
    out.write(reinterpret_cast<const char*>(theta.data()), static_cast<std::streamsize>(theta.size() * 8));
    if (!out) throw IoError("save_params: write failed for " + path);
}

inline ParamVector load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_params: cannot open " + path);
    char magic[8];
    std::uint32_t version = 0, count = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&count), 4);
    if (!in || std::memcmp(magic, kParamMagic, 8) != 0) throw ParseError("load_params: bad header in " + path);
    if (version != 1) throw ParseError("load_params: unsupported version in " + path);
    ParamVector theta(count);
    in.read(reinterpret_cast<char*>(theta.data()), static_cast<std::streamsize>(count) * 8);
    if (!in) throw ParseError("load_params: truncated file " + path);
    return theta;
}

// ---------------------------------------------------------------------------
// Spec-level convenience wrappers. These rebuild the bound Model per call;
// hot paths hold a Model instead.

inline double forward(const ModelSpec& spec, const ParamVector& theta, std::span<const double> x, int arm) {
    return Model(spec).forward(theta, x, arm);
}

inline ParamVector grad_params(const ModelSpec& spec, const ParamVector& theta, std::span<const double> x, int arm) {
    return Model(spec).grad_params(theta, x, arm);
}

inline double mse(const ModelSpec& spec, const ParamVector& theta, const Dataset& data) {
    return mse(Model(spec), theta, data);
}

}  // namespace rofu
