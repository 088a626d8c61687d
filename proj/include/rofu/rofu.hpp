#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rofu/errors.hpp"
#include "rofu/linalg.hpp"
#include "rofu/model.hpp"
#include "rofu/rng.hpp"

namespace rofu {

// The regularized-optimism loop. Each arm's optimistic value comes from
// maximizing f_theta(x, a) - eta * R(theta; D); the bonus is the improvement
// over f at the trained parameters mapped through g(w) = w^b, clamped at 0.
// Closed forms below reproduce UCB1, LinUCB/KernelUCB and the linearized
// neural-tangent bound without running the ascent.

struct RofuConfig {
    static constexpr int kBatchAuto = -1;  // full if |D| <= 1024, else 256
    static constexpr int kBatchFull = 0;

    double eta = 1.0;
    double g_exponent = 0.5;        // b in g(w) = w^b, b in (0, 1]
    int ascent_steps = 5;           // M
    double ascent_step_size = 1e-3; // kappa
    int ascent_batch = kBatchAuto;
    RegSpec reg;
    bool clamp_bonus_at_zero = true;  // always on; kept for config echoing

    void validate() const {
        if (!(g_exponent > 0.0 && g_exponent <= 1.0)) throw ConfigError("RofuConfig: g exponent must be in (0,1]");
        if (eta <= 0.0) throw ConfigError("RofuConfig: eta must be positive");
        if (ascent_steps < 0) throw ConfigError("RofuConfig: negative ascent step count");
        if (ascent_step_size <= 0.0) throw ConfigError("RofuConfig: ascent step size must be positive");
    }
};

struct OfuEstimate {
    double base_value = 0.0;        // f at the trained parameters
    double optimistic_value = 0.0;  // f at the ascended / closed-form parameters
    double bonus = 0.0;
    double ucb = 0.0;
    std::vector<double> ascent_trace;  // objective per iterate, diagnostic
};

inline OfuEstimate combine_bonus(double base, double optimistic, double b) {
    if (!(b > 0.0 && b <= 1.0)) throw ConfigError("combine_bonus: exponent must be in (0,1]");
    OfuEstimate est;
    est.base_value = base;
    est.optimistic_value = optimistic;
    const double w = std::max(0.0, optimistic - base);
    est.bonus = (b == 0.5) ? std::sqrt(w) : std::pow(w, b);
    est.ucb = base + est.bonus;
    return est;
}

// SVRG-style control variate for minibatched ascent steps: the exact
// data-term gradient `grad_ref` taken at a reference point `theta_ref`
// (usually the current trained parameters; agents may refresh it every few
// rounds). The estimator stays exactly unbiased for any fixed reference.
struct AscentVariate {
    std::span<const double> theta_ref;
    std::span<const double> grad_ref;
};

// The estimator loop: M steps of (stochastic) gradient ascent on f - eta * R
// from the trained parameters.
//
// Full-batch mode takes exact gradients. Minibatch mode re-draws a uniform
// batch every step and estimates the data-term gradient with the unbiased
// |D|/|B| scaling around the control variate, so the noise scales with the
// ascent displacement instead of |D| and the first step is exact.
inline OfuEstimate rofu_ucb_ascent(const Model& model, const ParamVector& theta_prev,
                                   std::span<const double> x, int arm, const Dataset& data,
                                   const RofuConfig& cfg, std::uint64_t seed,
                                   std::span<const double> anchor = {},
                                   const AscentVariate& variate = {}) {
    cfg.validate();
    ModelWorkspace ws = model.make_workspace();
    const double base = model.forward(theta_prev, x, arm, ws);
    if (cfg.ascent_steps == 0) {
        OfuEstimate est = combine_bonus(base, base, cfg.g_exponent);
        return est;
    }

    int batch = cfg.ascent_batch;
    if (batch == RofuConfig::kBatchAuto) batch = data.size() <= 1024 ? 0 : 256;
    if (batch > 0 && static_cast<std::size_t>(batch) >= data.size()) batch = 0;

    const int p = model.param_count();
    ParamVector theta = theta_prev;
    std::vector<double> grad(static_cast<std::size_t>(p));
    RngStream rng(derive(seed, "ascent-batch"));

    std::span<const double> theta_ref = variate.theta_ref.empty() ? std::span<const double>(theta_prev)
                                                                  : variate.theta_ref;
    ParamVector grad_ref_storage;
    std::span<const double> grad_ref = variate.grad_ref;
    if (batch > 0 && grad_ref.empty()) {
        grad_ref_storage = sse_grad(model, theta_ref, data, ws);
        grad_ref = grad_ref_storage;
    }
    if (batch > 0 && (static_cast<int>(theta_ref.size()) != p || static_cast<int>(grad_ref.size()) != p))
        throw DimensionError("rofu_ucb_ascent: variate size mismatch");
    std::vector<int> idx(batch > 0 ? static_cast<std::size_t>(batch) : 0);
    const bool ref_is_start =
        batch > 0 && std::equal(theta_ref.begin(), theta_ref.end(), theta_prev.begin(), theta_prev.end());

    // R value (possibly batch-estimated) and gradient at theta, into `grad`.
    auto reg_value_and_grad = [&](const ParamVector& th, bool at_start) {
        if (batch == 0) return regularizer_value_and_grad_batch(model, th, data, {}, cfg.reg, anchor, ws, grad);
        std::fill(grad.begin(), grad.end(), 0.0);
        double value = 0.0;
        switch (cfg.reg.kind) {
            case RegSpec::Kind::ScaledMse:
                break;
            case RegSpec::Kind::RidgePlusScaledMse:
                for (int j = 0; j < p; ++j) {
                    value += th[j] * th[j];
                    grad[j] += 2.0 * th[j];
                }
                break;
            case RegSpec::Kind::AnchoredRidgePlusSse:
                if (anchor.size() != th.size())
                    throw DimensionError("rofu_ucb_ascent: anchored regularizer needs an anchor");
                for (int j = 0; j < p; ++j) {
                    const double d = th[j] - anchor[j];
                    value += cfg.reg.anchor_weight * d * d;
                    grad[j] += cfg.reg.anchor_weight * 2.0 * d;
                }
                break;
        }
        for (int j = 0; j < p; ++j) grad[j] += grad_ref[static_cast<std::size_t>(j)];
        const double scale = static_cast<double>(data.size()) / static_cast<double>(batch);
        for (int& k : idx) k = static_cast<int>(rng.next_below(data.size()));
        if (at_start && ref_is_start) {
            // at the reference point the batch correction vanishes exactly;
            // the batch only estimates the value term
            for (int k : idx) {
                const Transition& tr = data[static_cast<std::size_t>(k)];
                const double e = model.forward(th, tr.context, tr.arm, ws) - tr.reward;
                value += scale * e * e;
            }
            return value;
        }
        for (int k : idx) {
            const Transition& tr = data[static_cast<std::size_t>(k)];
            const double e_cur = model.forward(th, tr.context, tr.arm, ws) - tr.reward;
            model.backward_accum(th, tr.arm, scale * 2.0 * e_cur, ws, grad);
            value += scale * e_cur * e_cur;
            const double e_ref = model.forward(theta_ref, tr.context, tr.arm, ws) - tr.reward;
            model.backward_accum(theta_ref, tr.arm, -scale * 2.0 * e_ref, ws, grad);
        }
        return value;
    };

    OfuEstimate est;
    est.ascent_trace.reserve(static_cast<std::size_t>(cfg.ascent_steps) + 1);
    for (int step = 0; step <= cfg.ascent_steps; ++step) {
        const double reg_value = reg_value_and_grad(theta, step == 0);
        for (int j = 0; j < p; ++j) grad[j] *= -cfg.eta;
        const double f_value = model.forward(theta, x, arm, ws);
        const double objective = f_value - cfg.eta * reg_value;
        if (!std::isfinite(objective))
            throw NonFiniteError("rofu_ucb_ascent: objective diverged at step " + std::to_string(step));
        est.ascent_trace.push_back(objective);
        if (step == cfg.ascent_steps) break;
        model.backward_accum(theta, arm, 1.0, ws, grad);
        for (int j = 0; j < p; ++j) theta[j] += cfg.ascent_step_size * grad[j];
    }

    const double optimistic = model.forward(theta, x, arm, ws);
    auto trace = std::move(est.ascent_trace);
    est = combine_bonus(base, optimistic, cfg.g_exponent);
    est.ascent_trace = std::move(trace);
    return est;
}

// Closed form for the linear/kernel case with eta = 1/2 and
// R = ||theta||^2 + |D| MSE: the optimum sits at theta_ridge + Z^-1 phi and
// the UCB is phi' theta_ridge + sqrt(phi' Z^-1 phi).
inline OfuEstimate rofu_ucb_linucb(std::span<const double> phi, const ParamVector& theta_ridge,
                                   const PsdInverseState& design) {
    if (phi.size() != theta_ridge.size() || static_cast<int>(phi.size()) != design.dim())
        throw DimensionError("rofu_ucb_linucb: dimension mismatch");
    double base = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) base += phi[j] * theta_ridge[j];
    const double q = design.quad_form(phi);
    OfuEstimate est = combine_bonus(base, base + q, 0.5);
    return est;
}

struct ArmStats {
    long pulls = 0;
    double reward_sum = 0.0;

    double mean() const { return pulls > 0 ? reward_sum / static_cast<double>(pulls) : 0.0; }

    void add(double reward) {
        ++pulls;
        reward_sum += reward;
    }
};

// Closed form for the multi-armed case: optimum at mean + 8 ln t / n_a, so
// the UCB is mean + sqrt(8 ln t / n_a). Natural logarithm.
inline OfuEstimate ucb1_value(const ArmStats& stats, long t) {
    if (stats.pulls < 1) throw UnpulledArmError("ucb1_value: arm has no pulls yet");
    if (t < 2) throw ConfigError("ucb1_value: needs t >= 2");
    const double w = 8.0 * std::log(static_cast<double>(t)) / static_cast<double>(stats.pulls);
    return combine_bonus(stats.mean(), stats.mean() + w, 0.5);
}

// ---------------------------------------------------------------------------
// Linearized neural-tangent specialization.

// Design matrix convention: Z = lambda I + (1/m) sum_h h h', so the stored
// rank-1 updates are h / sqrt(m). gamma relates to eta via eta = 1/(2 gamma^2).
struct NtkState {
    ParamVector theta0;
    ParamVector theta_prev;
    PsdInverseState design;
    double lambda = 1.0;
    int width_m = 1;
    double gamma = 0.1;

    double eta() const { return 1.0 / (2.0 * gamma * gamma); }
};

inline NtkState make_ntk_state(const Model& model, ParamVector theta0, double lambda, int width_m,
                               double gamma) {
    NtkState st;
    st.design = PsdInverseState(model.param_count(), lambda);
    st.theta_prev = theta0;
    st.theta0 = std::move(theta0);
    st.lambda = lambda;
    st.width_m = width_m;
    st.gamma = gamma;
    return st;
}

// OFU value via the closed form of the linearized objective:
//   bonus = gamma * sqrt(h' Z^-1 h / m),
//   optimistic value = f + h' Z^-1 h / (2 eta m)  (the value of f-tilde at
//   theta_hat = theta_prev + Z^-1 h / (2 eta m)).
inline OfuEstimate rofu_ucb_ntk_linearized(const NtkState& state, const Model& model,
                                           std::span<const double> x, int arm,
                                           ModelWorkspace& ws, std::vector<double>& h) {
    h.assign(static_cast<std::size_t>(model.param_count()), 0.0);
    const double base = model.forward(state.theta_prev, x, arm, ws);
    model.backward_accum(state.theta_prev, arm, 1.0, ws, h);
    const double q = state.design.quad_form(h);
    const double m = static_cast<double>(state.width_m);
    OfuEstimate est;
    est.base_value = base;
    est.optimistic_value = base + q / (2.0 * state.eta() * m);
    est.bonus = state.gamma * std::sqrt(q / m);
    est.ucb = base + est.bonus;
    return est;
}

inline OfuEstimate rofu_ucb_ntk_linearized(const NtkState& state, const Model& model,
                                           std::span<const double> x, int arm) {
    ModelWorkspace ws = model.make_workspace();
    std::vector<double> h;
    return rofu_ucb_ntk_linearized(state, model, x, arm, ws, h);
}

enum class NtkDesignMode {
    RecomputeAtCurrent,  // the analysis object: all gradients at theta_prev
    Running              // the NeuralUCB variant: decision-time gradients only
};

// Maintain the design matrix after appending a transition. `Running` must be
// called before retraining so the appended gradient is taken at the
// parameters that made the decision; `RecomputeAtCurrent` rebuilds the whole
// sum at the current theta_prev and costs O(|D| p^2).
inline void ntk_design_update(NtkState& state, const Model& model, const Dataset& data,
                              NtkDesignMode mode) {
    const int p = model.param_count();
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(state.width_m));
    ModelWorkspace ws = model.make_workspace();
    std::vector<double> h(static_cast<std::size_t>(p));
    if (mode == NtkDesignMode::RecomputeAtCurrent) {
        Matrix z = Matrix::identity(p, state.lambda);
        for (const Transition& tr : data) {
            model.grad_params(state.theta_prev, tr.context, tr.arm, h, ws);
            for (double& v : h) v *= inv_sqrt_m;
            z.add_outer(h);
        }
        state.design = PsdInverseState(std::move(z));
    } else {
        if (data.empty()) {
            state.design = PsdInverseState(p, state.lambda);
            return;
        }
        const Transition& tr = data.back();
        model.grad_params(state.theta_prev, tr.context, tr.arm, h, ws);
        for (double& v : h) v *= inv_sqrt_m;
        state.design.rank1_update(h);
    }
}

// Smallest index attaining the maximum.
inline int select_action(std::span<const double> ucbs) {
    if (ucbs.empty()) throw DimensionError("select_action: no arms");
    int best = 0;
    for (std::size_t a = 0; a < ucbs.size(); ++a) {
        if (!std::isfinite(ucbs[a]))
            throw NonFiniteError("select_action: non-finite ucb for arm " + std::to_string(a));
        if (ucbs[a] > ucbs[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
    }
    return best;
}

}  // namespace rofu
