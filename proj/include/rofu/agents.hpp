#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rofu/baselines.hpp"
#include "rofu/model.hpp"
#include "rofu/rofu.hpp"

namespace rofu {

// Agents own their model parameters and logged data. Every agent, whatever
// its bound, plays forced round-robin for the first |A| rounds so each arm is
// pulled once before any score is computed.
//
// Per-arm scoring within act() is pure given the agent's current snapshot;
// learn() is the single-writer round commit (append, design update, retrain).

struct AgentSeeds {
    std::uint64_t decision = 0;
    std::uint64_t trainer = 0;
};

struct RoundScores {
    int chosen = 0;
    std::vector<OfuEstimate> per_arm;  // empty during forced round-robin
};

class Agent {
  public:
    virtual ~Agent() = default;
    virtual RoundScores act(std::span<const double> x, long round) = 0;
    virtual void learn(Transition tr) = 0;
    virtual std::string fingerprint() const = 0;
};

using AgentFactory = std::function<std::unique_ptr<Agent>(AgentSeeds)>;

inline bool forced_round_robin(long round, int arms, RoundScores& out) {
    if (round <= arms) {
        out.chosen = static_cast<int>(round - 1);
        return true;
    }
    return false;
}

namespace detail {
inline std::string format_train(const TrainConfig& t) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "train(lr=%g,steps=%d,batch=%d,ridge=%g,anchor=%d)", t.step_size,
                  t.steps, t.batch_size, t.ridge_weight, static_cast<int>(t.anchor));
    return buf;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// The generic agent: per-arm gradient-ascent UCB over any differentiable
// model, retrained a fixed budget per round warm-started from the previous
// parameters.
class RofuAscentAgent final : public Agent {
  public:
    RofuAscentAgent(Model model, RofuConfig cfg, TrainConfig tcfg, AgentSeeds seeds)
        : model_(std::move(model)), cfg_(cfg), tcfg_(tcfg), seeds_(seeds) {
        cfg_.validate();
        theta_ = init_params(model_, seeds.trainer);
        theta0_ = theta_;
    }

    RoundScores act(std::span<const double> x, long round) override {
        RoundScores out;
        if (forced_round_robin(round, model_.arm_count(), out)) return out;
        const int arms = model_.arm_count();
        out.per_arm.resize(static_cast<std::size_t>(arms));
        std::vector<double> ucbs(static_cast<std::size_t>(arms));
        for (int a = 0; a < arms; ++a) {
            out.per_arm[static_cast<std::size_t>(a)] =
                rofu_ucb_ascent(model_, theta_, x, a, data_, cfg_,
                                derive(seeds_.decision, "round-arm", static_cast<std::uint64_t>(round),
                                       static_cast<std::uint64_t>(a)),
                                theta0_, AscentVariate{anchor_theta_, anchor_grad_});
            ucbs[static_cast<std::size_t>(a)] = out.per_arm[static_cast<std::size_t>(a)].ucb;
        }
        out.chosen = select_action(ucbs);
        return out;
    }

    void learn(Transition tr) override {
        data_.push_back(std::move(tr));
        theta_ = train(model_, std::move(theta_), data_, tcfg_,
                       derive(seeds_.trainer, "round", static_cast<std::uint64_t>(data_.size())), theta0_);
        // Variance-reduction anchor for minibatched ascent: the exact data
        // gradient at the freshly trained parameters, shared by every arm and
        // step of the coming round. A stale anchor would stay unbiased but
        // its drift re-inflates the estimator variance, so refresh each round.
        if (will_minibatch()) {
            ModelWorkspace ws = model_.make_workspace();
            anchor_theta_ = theta_;
            anchor_grad_ = sse_grad(model_, anchor_theta_, data_, ws);
        }
    }

    std::string fingerprint() const override {
        char buf[256];
        std::snprintf(buf, sizeof buf, "rofu(eta=%g,b=%g,M=%d,kappa=%g,batch=%d,reg=%d,aw=%g)|", cfg_.eta,
                      cfg_.g_exponent, cfg_.ascent_steps, cfg_.ascent_step_size, cfg_.ascent_batch,
                      static_cast<int>(cfg_.reg.kind), cfg_.reg.anchor_weight);
        return buf + detail::format_train(tcfg_);
    }

    const ParamVector& theta() const { return theta_; }
    const Dataset& data() const { return data_; }
    const Model& model() const { return model_; }

  private:
    bool will_minibatch() const {
        const std::size_t next = data_.size() + 1;
        if (cfg_.ascent_batch == RofuConfig::kBatchFull) return false;
        if (cfg_.ascent_batch == RofuConfig::kBatchAuto) return next > 1024;
        return next > static_cast<std::size_t>(cfg_.ascent_batch);
    }

    Model model_;
    RofuConfig cfg_;
    TrainConfig tcfg_;
    AgentSeeds seeds_;
    ParamVector theta_, theta0_;
    ParamVector anchor_theta_, anchor_grad_;
    Dataset data_;
};

// ---------------------------------------------------------------------------
// Closed-form agent for linear / kernel-feature models (Z = I + sum phi phi',
// exact ridge parameters re-solved each round).
class RofuLinUcbAgent final : public Agent {
  public:
    explicit RofuLinUcbAgent(Model model)
        : model_(std::move(model)),
          design_(model_.param_count(), 1.0),
          bvec_(static_cast<std::size_t>(model_.param_count()), 0.0),
          theta_(static_cast<std::size_t>(model_.param_count()), 0.0),
          phi_(static_cast<std::size_t>(model_.param_count())) {
        if (model_.spec().is_mlp()) throw ConfigError("RofuLinUcbAgent: linear or kernel model required");
    }

    RoundScores act(std::span<const double> x, long round) override {
        RoundScores out;
        if (forced_round_robin(round, model_.arm_count(), out)) return out;
        const int arms = model_.arm_count();
        out.per_arm.resize(static_cast<std::size_t>(arms));
        std::vector<double> ucbs(static_cast<std::size_t>(arms));
        for (int a = 0; a < arms; ++a) {
            model_.feature_map().compute(x, a, phi_);
            out.per_arm[static_cast<std::size_t>(a)] = rofu_ucb_linucb(phi_, theta_, design_);
            ucbs[static_cast<std::size_t>(a)] = out.per_arm[static_cast<std::size_t>(a)].ucb;
        }
        out.chosen = select_action(ucbs);
        return out;
    }

    void learn(Transition tr) override {
        model_.feature_map().compute(tr.context, tr.arm, phi_);
        design_.rank1_update(phi_);
        for (std::size_t j = 0; j < bvec_.size(); ++j) bvec_[j] += phi_[j] * tr.reward;
        theta_ = design_.solve(bvec_);
    }

    std::string fingerprint() const override {
        char buf[96];
        std::snprintf(buf, sizeof buf, "linucb(fmap=%d,p=%d)",
                      static_cast<int>(model_.spec().feature_map.kind), model_.param_count());
        return buf;
    }

    const ParamVector& theta() const { return theta_; }
    const PsdInverseState& design() const { return design_; }

  private:
    Model model_;
    PsdInverseState design_;
    std::vector<double> bvec_;
    ParamVector theta_;
    std::vector<double> phi_;
};

// ---------------------------------------------------------------------------
// Closed-form multi-armed agent (mean + sqrt(8 ln t / n_a)).
class RofuUcb1Agent final : public Agent {
  public:
    explicit RofuUcb1Agent(int arm_count) : stats_(static_cast<std::size_t>(arm_count)) {}

    RoundScores act(std::span<const double>, long round) override {
        RoundScores out;
        const int arms = static_cast<int>(stats_.size());
        if (forced_round_robin(round, arms, out)) return out;
        out.per_arm.resize(stats_.size());
        std::vector<double> ucbs(stats_.size());
        for (int a = 0; a < arms; ++a) {
            out.per_arm[static_cast<std::size_t>(a)] = ucb1_value(stats_[static_cast<std::size_t>(a)], round);
            ucbs[static_cast<std::size_t>(a)] = out.per_arm[static_cast<std::size_t>(a)].ucb;
        }
        out.chosen = select_action(ucbs);
        return out;
    }

    void learn(Transition tr) override { stats_[static_cast<std::size_t>(tr.arm)].add(tr.reward); }

    std::string fingerprint() const override { return "ucb1"; }

    const std::vector<ArmStats>& stats() const { return stats_; }

  private:
    std::vector<ArmStats> stats_;
};

// ---------------------------------------------------------------------------
// Linearized neural-tangent agent: running design over parameter gradients,
// anchored ridge training (loss SSE + m*lambda*||theta - theta0||^2).
class RofuNtkAgent final : public Agent {
  public:
    RofuNtkAgent(Model model, double lambda, double gamma, int width_m, TrainConfig tcfg,
                 AgentSeeds seeds)
        : model_(std::move(model)), tcfg_(tcfg), seeds_(seeds) {
        ParamVector theta0 = init_params(model_, seeds.trainer);
        state_ = make_ntk_state(model_, std::move(theta0), lambda, width_m, gamma);
        ws_ = model_.make_workspace();
    }

    RoundScores act(std::span<const double> x, long round) override {
        RoundScores out;
        if (forced_round_robin(round, model_.arm_count(), out)) return out;
        const int arms = model_.arm_count();
        out.per_arm.resize(static_cast<std::size_t>(arms));
        std::vector<double> ucbs(static_cast<std::size_t>(arms));
        for (int a = 0; a < arms; ++a) {
            out.per_arm[static_cast<std::size_t>(a)] = rofu_ucb_ntk_linearized(state_, model_, x, a, ws_, h_);
            ucbs[static_cast<std::size_t>(a)] = out.per_arm[static_cast<std::size_t>(a)].ucb;
        }
        out.chosen = select_action(ucbs);
        return out;
    }

    void learn(Transition tr) override {
        data_.push_back(std::move(tr));
        // Design first: the appended gradient must be taken at the
        // decision-time parameters, before retraining moves them.
        ntk_design_update(state_, model_, data_, NtkDesignMode::Running);
        state_.theta_prev = train(model_, std::move(state_.theta_prev), data_, tcfg_,
                                  derive(seeds_.trainer, "round", static_cast<std::uint64_t>(data_.size())),
                                  state_.theta0);
    }

    std::string fingerprint() const override {
        char buf[200];
        std::snprintf(buf, sizeof buf, "rofu_ntk(lambda=%g,gamma=%g,m=%d)|", state_.lambda, state_.gamma,
                      state_.width_m);
        return buf + detail::format_train(tcfg_);
    }

    const NtkState& state() const { return state_; }

  private:
    Model model_;
    TrainConfig tcfg_;
    AgentSeeds seeds_;
    NtkState state_;
    Dataset data_;
    ModelWorkspace ws_;
    std::vector<double> h_;
};

// ---------------------------------------------------------------------------
// Baseline agents.

class EpsilonGreedyAgent final : public Agent {
  public:
    EpsilonGreedyAgent(Model model, BaselineConfig cfg, AgentSeeds seeds)
        : model_(std::move(model)), cfg_(cfg), seeds_(seeds) {
        if (cfg_.kind == BaselineConfig::Kind::Greedy) cfg_.epsilon = 0.0;
        theta_ = init_params(model_, seeds.trainer);
        theta0_ = theta_;
        ws_ = model_.make_workspace();
    }

    RoundScores act(std::span<const double> x, long round) override {
        RoundScores out;
        if (forced_round_robin(round, model_.arm_count(), out)) return out;
        const int arms = model_.arm_count();
        out.per_arm.resize(static_cast<std::size_t>(arms));
        for (int a = 0; a < arms; ++a) {
            const double f = model_.forward(theta_, x, a, ws_);
            auto& est = out.per_arm[static_cast<std::size_t>(a)];
            est.base_value = est.optimistic_value = est.ucb = f;
            est.bonus = 0.0;
        }
        out.chosen = epsilon_greedy_select(model_, theta_, x, cfg_.epsilon,
                                           derive(seeds_.decision, "round", static_cast<std::uint64_t>(round)));
        return out;
    }

    void learn(Transition tr) override {
        data_.push_back(std::move(tr));
        theta_ = train(model_, std::move(theta_), data_, cfg_.train,
                       derive(seeds_.trainer, "round", static_cast<std::uint64_t>(data_.size())), theta0_);
    }

    std::string fingerprint() const override {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s(eps=%g)|",
                      cfg_.kind == BaselineConfig::Kind::Greedy ? "greedy" : "eps_greedy", cfg_.epsilon);
        return buf + detail::format_train(cfg_.train);
    }

  private:
    Model model_;
    BaselineConfig cfg_;
    AgentSeeds seeds_;
    ParamVector theta_, theta0_;
    Dataset data_;
    ModelWorkspace ws_;
};

class NeuralUcbAgent final : public Agent {
  public:
    NeuralUcbAgent(Model model, BaselineConfig cfg, int width_m, AgentSeeds seeds)
        : model_(std::move(model)), cfg_(cfg), width_m_(width_m), seeds_(seeds) {
        theta_ = init_params(model_, seeds.trainer);
        theta0_ = theta_;
        if (cfg_.kind == BaselineConfig::Kind::NeuralUcbFull)
            design_ = PsdInverseState(model_.param_count(), cfg_.lambda);
        else
            diag_.assign(static_cast<std::size_t>(model_.param_count()), cfg_.lambda);
        ws_ = model_.make_workspace();
    }

    RoundScores act(std::span<const double> x, long round) override {
        RoundScores out;
        if (forced_round_robin(round, model_.arm_count(), out)) return out;
        const int arms = model_.arm_count();
        out.per_arm.resize(static_cast<std::size_t>(arms));
        std::vector<double> ucbs(static_cast<std::size_t>(arms));
        for (int a = 0; a < arms; ++a) {
            const double u = full() ? neural_ucb_value(model_, theta_, x, a, design_, cfg_.gamma, width_m_, ws_, h_)
                                    : neural_ucb_value(model_, theta_, x, a, diag_, cfg_.gamma, width_m_, ws_, h_);
            auto& est = out.per_arm[static_cast<std::size_t>(a)];
            est.base_value = model_.forward(theta_, x, a, ws_);
            est.ucb = est.optimistic_value = u;
            est.bonus = u - est.base_value;
            ucbs[static_cast<std::size_t>(a)] = u;
        }
        out.chosen = select_action(ucbs);
        return out;
    }

    void learn(Transition tr) override {
        data_.push_back(std::move(tr));
        // Decision-time gradient into the running design, then retrain.
        h_.assign(static_cast<std::size_t>(model_.param_count()), 0.0);
        model_.grad_params(theta_, data_.back().context, data_.back().arm, h_, ws_);
        const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(width_m_));
        if (full()) {
            for (double& v : h_) v *= inv_sqrt_m;
            design_.rank1_update(h_);
        } else {
            const double inv_m = 1.0 / static_cast<double>(width_m_);
            for (std::size_t j = 0; j < diag_.size(); ++j) diag_[j] += h_[j] * h_[j] * inv_m;
        }
        theta_ = train(model_, std::move(theta_), data_, cfg_.train,
                       derive(seeds_.trainer, "round", static_cast<std::uint64_t>(data_.size())), theta0_);
    }

    std::string fingerprint() const override {
        char buf[200];
        std::snprintf(buf, sizeof buf, "neural_ucb_%s(gamma=%g,lambda=%g,m=%d)|", full() ? "full" : "diag",
                      cfg_.gamma, cfg_.lambda, width_m_);
        return buf + detail::format_train(cfg_.train);
    }

  private:
    bool full() const { return cfg_.kind == BaselineConfig::Kind::NeuralUcbFull; }

    Model model_;
    BaselineConfig cfg_;
    int width_m_ = 1;
    AgentSeeds seeds_;
    ParamVector theta_, theta0_;
    Dataset data_;
    PsdInverseState design_;
    std::vector<double> diag_;
    ModelWorkspace ws_;
    std::vector<double> h_;
};

}  // namespace rofu
