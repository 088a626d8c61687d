#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rofu/linalg.hpp"
#include "rofu/model.hpp"
#include "rofu/rng.hpp"
#include "rofu/rofu.hpp"

namespace rofu {

// Comparison agents: epsilon-greedy, pure greedy and the NeuralUCB bound in
// its full-matrix and diagonal-approximation variants.

struct BaselineConfig {
    enum class Kind { EpsilonGreedy, Greedy, NeuralUcbFull, NeuralUcbDiag };
    Kind kind = Kind::EpsilonGreedy;
    double epsilon = 0.1;  // epsilon_greedy only
    double gamma = 0.1;    // neural_ucb only
    double lambda = 1.0;   // neural_ucb only
    TrainConfig train;
};

// With probability epsilon pick uniformly, otherwise the greedy argmax with
// lowest-index tie-break. Deterministic given `seed`; callers key the seed by
// round so replays reproduce the action sequence.
inline int epsilon_greedy_select(const Model& model, const ParamVector& theta,
                                 std::span<const double> x, double epsilon, std::uint64_t seed) {
    if (epsilon < 0.0 || epsilon > 1.0) throw ConfigError("epsilon_greedy_select: epsilon outside [0,1]");
    RngStream rng(derive(seed, "eps-greedy"));
    const int arms = model.arm_count();
    if (epsilon > 0.0 && rng.next_double() < epsilon) return static_cast<int>(rng.next_below(arms));
    ModelWorkspace ws = model.make_workspace();
    std::vector<double> vals(static_cast<std::size_t>(arms));
    for (int a = 0; a < arms; ++a) vals[static_cast<std::size_t>(a)] = model.forward(theta, x, a, ws);
    return select_action(vals);
}

// U_{t,a} = f_{theta}(x,a) + gamma * sqrt(h' Z~^-1 h / m) with the running Z~
// built from decision-time gradients.
inline double neural_ucb_value(const Model& model, const ParamVector& theta_prev,
                               std::span<const double> x, int arm, const PsdInverseState& design,
                               double gamma, int m, ModelWorkspace& ws, std::vector<double>& h) {
    h.assign(static_cast<std::size_t>(model.param_count()), 0.0);
    const double f = model.forward(theta_prev, x, arm, ws);
    model.backward_accum(theta_prev, arm, 1.0, ws, h);
    return f + gamma * std::sqrt(design.quad_form(h) / static_cast<double>(m));
}

inline double neural_ucb_value(const Model& model, const ParamVector& theta_prev,
                               std::span<const double> x, int arm, const PsdInverseState& design,
                               double gamma, int m) {
    ModelWorkspace ws = model.make_workspace();
    std::vector<double> h;
    return neural_ucb_value(model, theta_prev, x, arm, design, gamma, m, ws, h);
}

// Diagonal variant: the stored vector is diag(Z~) and the quadratic form uses
// its elementwise reciprocal. This is the acceleration that trades away the
// full-matrix geometry.
inline double neural_ucb_value(const Model& model, const ParamVector& theta_prev,
                               std::span<const double> x, int arm, std::span<const double> diag,
                               double gamma, int m, ModelWorkspace& ws, std::vector<double>& h) {
    if (static_cast<int>(diag.size()) != model.param_count())
        throw DimensionError("neural_ucb_value: diagonal size mismatch");
    h.assign(static_cast<std::size_t>(model.param_count()), 0.0);
    const double f = model.forward(theta_prev, x, arm, ws);
    model.backward_accum(theta_prev, arm, 1.0, ws, h);
    double q = 0.0;
    for (std::size_t j = 0; j < h.size(); ++j) q += h[j] * h[j] / diag[j];
    return f + gamma * std::sqrt(std::max(0.0, q) / static_cast<double>(m));
}

inline double neural_ucb_value(const Model& model, const ParamVector& theta_prev,
                               std::span<const double> x, int arm, std::span<const double> diag,
                               double gamma, int m) {
    ModelWorkspace ws = model.make_workspace();
    std::vector<double> h;
    return neural_ucb_value(model, theta_prev, x, arm, diag, gamma, m, ws, h);
}

}  // namespace rofu
