#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "rofu/rofu.hpp"
#include "rofu/verify.hpp"

using rofu::ArmStats;
using rofu::Dataset;
using rofu::FeatureMapSpec;
using rofu::Model;
using rofu::ModelSpec;
using rofu::OfuEstimate;
using rofu::ParamVector;
using rofu::RegSpec;
using rofu::RofuConfig;
using rofu::Transition;

namespace {

ModelSpec mab_model(int arms) {
    // One scalar parameter per arm: phi(x, a) = onehot(a).
    ModelSpec s;
    s.kind = ModelSpec::Kind::Linear;
    s.context_dim = 0;
    s.arm_count = arms;
    s.feature_map.kind = FeatureMapSpec::Kind::Shared;
    return s;
}

}  // namespace

TEST_CASE("combine_bonus: clamp and square root") {
    auto a = rofu::combine_bonus(1.0, 1.0, 0.5);
    CHECK(a.bonus == 0.0);
    CHECK(a.ucb == 1.0);

    auto b = rofu::combine_bonus(1.0, 0.5, 0.5);  // pessimistic ascent clamped at zero
    CHECK(b.bonus == 0.0);
    CHECK(b.ucb == 1.0);

    auto c = rofu::combine_bonus(0.0, 4.0, 0.5);
    CHECK(c.bonus == Approx(2.0));
    CHECK(c.ucb == Approx(2.0));

    auto d = rofu::combine_bonus(0.5, 2.5, 1.0);
    CHECK(d.bonus == Approx(2.0));
}

TEST_CASE("rofu_ucb_ascent with zero steps returns the base value") {
    Model m(mab_model(3));
    ParamVector theta{0.2, -0.1, 0.7};
    RofuConfig cfg;
    cfg.ascent_steps = 0;
    Dataset data{{{}, 0, 0.3}};
    auto est = rofu::rofu_ucb_ascent(m, theta, {}, 2, data, cfg, 1);
    CHECK(est.bonus == 0.0);
    CHECK(est.ucb == Approx(0.7));
}

TEST_CASE("rofu_ucb_ascent reproduces the UCB1 closed form on a bandit model") {
    const int arms = 3;
    Model m(mab_model(arms));
    rofu::RngStream rng(rofu::derive(21, "mab"));
    Dataset data;
    std::vector<ArmStats> stats(arms);
    for (int i = 0; i < 30; ++i) {
        Transition tr;
        tr.arm = static_cast<int>(rng.next_below(arms));
        tr.reward = 0.5 * rng.next_gaussian() + 0.1 * tr.arm;
        stats[tr.arm].add(tr.reward);
        data.push_back(tr);
    }
    const long t = static_cast<long>(data.size());
    ParamVector theta_means = rofu::ridge_fit(m, data, 0.0);  // per-arm empirical means
    for (int a = 0; a < arms; ++a) CHECK(theta_means[a] == Approx(stats[a].mean()).margin(1e-12));

    RofuConfig cfg;
    cfg.eta = 1.0 / (16.0 * std::log(static_cast<double>(t)));
    cfg.g_exponent = 0.5;
    cfg.ascent_steps = 3000;
    cfg.ascent_step_size = 0.5;
    cfg.ascent_batch = RofuConfig::kBatchFull;
    cfg.reg.kind = RegSpec::Kind::ScaledMse;
    for (int a = 0; a < arms; ++a) {
        auto est = rofu::rofu_ucb_ascent(m, theta_means, {}, a, data, cfg, 5);
        auto closed = rofu::ucb1_value(stats[a], t);
        CHECK(std::abs(est.ucb - closed.ucb) <= 1e-6);
    }
}

TEST_CASE("rofu_ucb_linucb trivial cases") {
    rofu::PsdInverseState design(3, 1.0);  // Z = I, empty data
    ParamVector theta(3, 0.0);
    auto est = rofu::rofu_ucb_linucb(std::vector<double>{1.0, 0.0, 0.0}, theta, design);
    CHECK(est.ucb == Approx(1.0));
    CHECK(est.bonus == Approx(1.0));

    auto zero = rofu::rofu_ucb_linucb(std::vector<double>{0.0, 0.0, 0.0}, theta, design);
    CHECK(zero.ucb == 0.0);
    CHECK(zero.bonus == 0.0);
}

TEST_CASE("rofu_ucb_linucb: optimistic gain equals the quadratic form") {
    rofu::RngStream rng(rofu::derive(23, "linucb"));
    rofu::PsdInverseState design(6, 1.0);
    ParamVector theta(6);
    for (double& v : theta) v = rng.next_gaussian();
    for (int i = 0; i < 80; ++i) {
        std::vector<double> u(6);
        for (double& v : u) v = rng.next_gaussian();
        design.rank1_update(u);
    }
    std::vector<double> phi(6);
    for (double& v : phi) v = rng.next_gaussian();
    auto est = rofu::rofu_ucb_linucb(phi, theta, design);
    CHECK(est.optimistic_value - est.base_value == Approx(design.quad_form(phi)).margin(1e-15));
    CHECK(est.ucb == Approx(est.base_value + std::sqrt(design.quad_form(phi))).margin(1e-12));
}

TEST_CASE("ucb1_value forced-arithmetic cases") {
    const long t = 100;
    ArmStats stats;
    stats.pulls = 37;  // ~ 8 ln 100
    stats.reward_sum = 0.5 * stats.pulls;
    auto est = rofu::ucb1_value(stats, t);
    const double w = 8.0 * std::log(100.0) / static_cast<double>(stats.pulls);
    CHECK(est.base_value == Approx(0.5));
    CHECK(est.optimistic_value == Approx(0.5 + w));
    CHECK(est.ucb == Approx(0.5 + std::sqrt(w)));
    CHECK(est.optimistic_value - est.base_value == Approx(est.bonus * est.bonus));

    ArmStats two;
    two.pulls = 2;
    two.reward_sum = 0.0;
    auto e2 = rofu::ucb1_value(two, 3);
    CHECK(e2.ucb == Approx(std::sqrt(8.0 * std::log(3.0) / 2.0)));

    ArmStats unpulled;
    CHECK_THROWS_AS(rofu::ucb1_value(unpulled, 5), rofu::UnpulledArmError);
}

TEST_CASE("ntk closed form: identity design gives gradient norm bonus") {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::Mlp;
    spec.context_dim = 3;
    spec.arm_count = 2;
    spec.layer_widths = {5, 6, 1};
    spec.activation = rofu::Activation::Tanh;
    Model model(spec);
    // eta = 1/2  <=>  gamma = 1; Z = I (lambda = 1, no data), m = 1.
    auto state = rofu::make_ntk_state(model, rofu::init_params(model, 4), 1.0, 1, 1.0);
    std::vector<double> x{0.1, -0.4, 0.9};
    auto est = rofu::rofu_ucb_ntk_linearized(state, model, x, 1);
    auto h = model.grad_params(state.theta_prev, x, 1);
    double norm = 0.0;
    for (double v : h) norm += v * v;
    CHECK(est.bonus == Approx(std::sqrt(norm)).margin(1e-12));
    CHECK(est.ucb >= est.base_value);
}

TEST_CASE("ntk design update modes coincide when parameters are frozen") {
    ModelSpec spec;
    spec.kind = ModelSpec::Kind::Mlp;
    spec.context_dim = 2;
    spec.arm_count = 2;
    spec.layer_widths = {4, 5, 2};
    spec.activation = rofu::Activation::Tanh;
    Model model(spec);
    rofu::RngStream rng(rofu::derive(29, "ntk"));

    auto theta0 = rofu::init_params(model, 11);
    auto running = rofu::make_ntk_state(model, theta0, 0.7, 5, 0.3);
    auto recompute = rofu::make_ntk_state(model, theta0, 0.7, 5, 0.3);

    // empty data: both are lambda I
    rofu::ntk_design_update(recompute, model, {}, rofu::NtkDesignMode::RecomputeAtCurrent);
    CHECK(recompute.design.inverse().frobenius_distance(running.design.inverse()) <= 1e-12);

    Dataset data;
    for (int i = 0; i < 10; ++i) {
        Transition tr;
        tr.context = {rng.next_gaussian(), rng.next_gaussian()};
        tr.arm = static_cast<int>(rng.next_below(2));
        tr.reward = rng.next_gaussian();
        data.push_back(tr);
        rofu::ntk_design_update(running, model, data, rofu::NtkDesignMode::Running);
        if (i == 0) {
            rofu::ntk_design_update(recompute, model, data, rofu::NtkDesignMode::RecomputeAtCurrent);
            CHECK(recompute.design.inverse().frobenius_distance(running.design.inverse()) <= 1e-12);
        }
    }
    rofu::ntk_design_update(recompute, model, data, rofu::NtkDesignMode::RecomputeAtCurrent);
    CHECK(recompute.design.inverse().frobenius_distance(running.design.inverse()) <= 1e-9);
}

TEST_CASE("select_action basics and shift invariance") {
    CHECK(rofu::select_action(std::vector<double>{0.1, 0.9, 0.3}) == 1);
    CHECK(rofu::select_action(std::vector<double>{0.5, 0.5}) == 0);

    rofu::RngStream rng(rofu::derive(31, "argmax"));
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> ucbs(1 + rng.next_below(8));
        for (double& v : ucbs) v = rng.next_gaussian();
        const double c = std::abs(rng.next_gaussian()) + 0.1;
        std::vector<double> shifted = ucbs;
        for (double& v : shifted) v += c;
        CHECK(rofu::select_action(ucbs) == rofu::select_action(shifted));
    }

    CHECK_THROWS_AS(rofu::select_action(std::vector<double>{1.0, std::nan("")}), rofu::NonFiniteError);
    CHECK_THROWS_AS(rofu::select_action(std::vector<double>{}), rofu::DimensionError);
}

TEST_CASE("verify suites: linucb equivalence at reduced instance count") {
    auto rep = rofu::verify::verify_linucb(77, 6);
    for (const auto& line : rep.lines) INFO(line);
    CHECK(rep.pass);
}

TEST_CASE("verify suites: ntk equivalence at reduced instance count") {
    auto rep = rofu::verify::verify_ntk(78, 4);
    for (const auto& line : rep.lines) INFO(line);
    CHECK(rep.pass);
}
