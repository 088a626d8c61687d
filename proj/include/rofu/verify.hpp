#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rofu/linalg.hpp"
#include "rofu/model.hpp"
#include "rofu/rng.hpp"
#include "rofu/rofu.hpp"

namespace rofu::verify {

// Oracle-equivalence suites. Every suite re-derives its expected values
// through an independent computational route (dense elimination, finite
// differences, scalar search, linearized ascent) and reports the maximum
// observed deviation against the pinned tolerance. These back the CLI
// `verify` command and the acceptance gate.

struct SuiteReport {
    std::string name;
    bool pass = true;
    double runtime_s = 0.0;
    std::vector<std::string> lines;
    std::string failure_dump;

    void check(const std::string& what, double max_dev, double tol, const std::string& dump) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-34s max dev %.3e  (tol %.1e)  %s", what.c_str(), max_dev, tol,
                      max_dev <= tol ? "ok" : "FAIL");
        lines.push_back(buf);
        if (max_dev > tol) {
            pass = false;
            if (failure_dump.empty()) failure_dump = dump;
        }
    }
};

namespace detail {

// Dense Gaussian elimination with partial pivoting; the deliberate
// counterpart to the Cholesky used on the production path.
inline std::vector<double> gauss_solve(Matrix a, std::vector<double> b) {
    const int n = a.rows();
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / a(i, i);
    }
    return x;
}

inline std::vector<double> random_vec(int n, RngStream& rng, double scale = 1.0) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = scale * rng.next_gaussian();
    return v;
}

// Maximize a concave scalar function on [lo, hi] by golden-section search.
template <typename F>
double golden_section_max(F f, double lo, double hi, int iters = 200) {
    const double phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

struct Timer {
    std::chrono::steady_clock::time_point begin = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// linalg: Sherman-Morrison chains against dense re-inversion, and solve
// residuals.
inline SuiteReport verify_linalg(std::uint64_t seed = 1001) {
    detail::Timer timer;
    SuiteReport rep;
    rep.name = "linalg";

    double max_frob = 0.0;
    std::string dump_frob;
    for (int inst = 0; inst < 10; ++inst) {
        RngStream rng(derive(seed, "sm-chain", static_cast<std::uint64_t>(inst)));
        const int d = 5;
        PsdInverseState s(d, 1.0);
        Matrix z = Matrix::identity(d, 1.0);
        for (int k = 0; k < 20; ++k) {
            auto u = detail::random_vec(d, rng);
            s.rank1_update(u);
            z.add_outer(u);
        }
        Matrix zinv(d, d);
        for (int j = 0; j < d; ++j) {
            std::vector<double> e(static_cast<std::size_t>(d), 0.0);
            e[static_cast<std::size_t>(j)] = 1.0;
            auto col = detail::gauss_solve(z, e);
            for (int i = 0; i < d; ++i) zinv(i, j) = col[static_cast<std::size_t>(i)];
        }
        const double dev = s.inverse().frobenius_distance(zinv);
        if (dev > max_frob) {
            max_frob = dev;
            dump_frob = "sm-chain instance " + std::to_string(inst) + " (seed " + std::to_string(seed) + ")";
        }
    }
    rep.check("sherman-morrison vs re-inversion", max_frob, 1e-8, dump_frob);

    double max_res = 0.0;
    std::string dump_res;
    for (int inst = 0; inst < 20; ++inst) {
        RngStream rng(derive(seed, "solve", static_cast<std::uint64_t>(inst)));
        const int d = 6;
        Matrix g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = rng.next_gaussian();
        Matrix a = Matrix::identity(d, 0.5);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) s += g(i, k) * g(j, k);
                a(i, j) += s;
            }
        auto b = detail::random_vec(d, rng);
        auto x = psd_solve(a, b);
        auto ax = a.mul(x);
        for (int i = 0; i < d; ++i) {
            const double r = std::abs(ax[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
            if (r > max_res) {
                max_res = r;
                dump_res = "solve instance " + std::to_string(inst) + " (seed " + std::to_string(seed) + ")";
            }
        }
    }
    rep.check("psd_solve residual", max_res, 1e-8, dump_res);

    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// gradcheck: analytical gradients against central finite differences, 100
// random draws per model kind. The MLP draw uses tanh so the objective is
// differentiable everywhere a difference quotient lands.
inline SuiteReport verify_gradcheck(std::uint64_t seed = 1002) {
    detail::Timer timer;
    SuiteReport rep;
    rep.name = "gradcheck";

    ModelSpec linear;
    linear.kind = ModelSpec::Kind::Linear;
    linear.context_dim = 5;
    linear.arm_count = 3;
    linear.feature_map.kind = FeatureMapSpec::Kind::DisjointOnehot;

    ModelSpec kernel;
    kernel.kind = ModelSpec::Kind::KernelFeatures;
    kernel.context_dim = 4;
    kernel.arm_count = 3;
    kernel.feature_map = {FeatureMapSpec::Kind::RandomFourier, 24, 1.2, 7};

    ModelSpec mlp;
    mlp.kind = ModelSpec::Kind::Mlp;
    mlp.context_dim = 4;
    mlp.arm_count = 3;
    mlp.layer_widths = {7, 9, 3};
    mlp.activation = Activation::Tanh;

    const char* names[3] = {"linear", "kernel_features", "mlp"};
    const ModelSpec* specs[3] = {&linear, &kernel, &mlp};
    for (int k = 0; k < 3; ++k) {
        Model m(*specs[k]);
        RngStream rng(derive(seed, names[k]));
        double max_rel = 0.0;
        std::string dump;
        for (int draw = 0; draw < 100; ++draw) {
            ParamVector theta = m.spec().is_mlp() ? init_params(m, rng.next_u64())
                                                  : detail::random_vec(m.param_count(), rng);
            auto x = detail::random_vec(m.spec().context_dim, rng);
            const int arm = static_cast<int>(rng.next_below(m.spec().arm_count));
            auto g = m.grad_params(theta, x, arm);
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double h = 1e-5;
                ParamVector up = theta, dn = theta;
                up[j] += h;
                dn[j] -= h;
                const double fd = (m.forward(up, x, arm) - m.forward(dn, x, arm)) / (2.0 * h);
                const double rel = std::abs(g[j] - fd) / std::max(1.0, std::abs(fd));
                if (rel > max_rel) {
                    max_rel = rel;
                    dump = std::string(names[k]) + " draw " + std::to_string(draw) + " coordinate " +
                           std::to_string(j) + " (seed " + std::to_string(seed) + ")";
                }
            }
        }
        rep.check(std::string("grad vs central fd, ") + names[k], max_rel, 1e-4, dump);
    }
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// ucb1: the closed form against the analytic expression, and against a
// golden-section maximization of theta - eta * sum (theta - r_i)^2 with
// eta = 1/(16 ln t).
inline SuiteReport verify_ucb1(std::uint64_t seed = 1003) {
    detail::Timer timer;
    SuiteReport rep;
    rep.name = "ucb1";

    RngStream rng(derive(seed, "ucb1"));
    double max_closed = 0.0, max_gs = 0.0;
    std::string dump_closed, dump_gs;
    for (int trial = 0; trial < 10000; ++trial) {
        const long n = 1 + static_cast<long>(rng.next_below(50));
        const long t = std::max<long>(n, 2) + static_cast<long>(rng.next_below(1000000));
        const double mean = rng.next_uniform(-1.0, 1.0);

        // rewards with empirical mean == mean (noise centered exactly)
        std::vector<double> rewards(static_cast<std::size_t>(n));
        double acc = 0.0;
        for (double& r : rewards) {
            r = rng.next_gaussian();
            acc += r;
        }
        for (double& r : rewards) r = mean + (r - acc / static_cast<double>(n));

        ArmStats stats;
        for (double r : rewards) stats.add(r);

        const OfuEstimate est = ucb1_value(stats, t);
        const double analytic =
            stats.mean() + std::sqrt(8.0 * std::log(static_cast<double>(t)) / static_cast<double>(n));
        const double dev = std::abs(est.ucb - analytic);
        if (dev > max_closed) {
            max_closed = dev;
            dump_closed = "trial " + std::to_string(trial) + ": n=" + std::to_string(n) +
                          " t=" + std::to_string(t) + " mean=" + std::to_string(mean);
        }

        const double eta = 1.0 / (16.0 * std::log(static_cast<double>(t)));
        auto objective = [&](double th) {
            double v = th;
            for (double r : rewards) v -= eta * (th - r) * (th - r);
            return v;
        };
        const double width = 8.0 * std::log(static_cast<double>(t)) / static_cast<double>(n);
        const double th_hat = detail::golden_section_max(objective, stats.mean() - 1.0,
                                                         stats.mean() + width + 1.0);
        const double gs_ucb = stats.mean() + std::sqrt(std::max(0.0, th_hat - stats.mean()));
        const double gdev = std::abs(gs_ucb - est.ucb);
        if (gdev > max_gs) {
            max_gs = gdev;
            dump_gs = "trial " + std::to_string(trial) + ": n=" + std::to_string(n) +
                      " t=" + std::to_string(t) + " mean=" + std::to_string(mean);
        }
    }
    rep.check("closed form vs analytic", max_closed, 1e-12, dump_closed);
    rep.check("closed form vs golden-section", max_gs, 1e-6, dump_gs);
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// linucb: the closed form against a from-scratch dense computation, and the
// gradient-ascent path (M = 2000, kappa = 1e-3, full batch) against the
// closed form. eta = 1/2, R = ||theta||^2 + |D| MSE, lambda = 1.
inline SuiteReport verify_linucb(std::uint64_t seed = 1004, int instances = 50) {
    detail::Timer timer;
    SuiteReport rep;
    rep.name = "linucb";

    double max_closed = 0.0, max_ascent = 0.0, worst_trace_drop = 0.0;
    std::string dump_closed, dump_ascent, dump_trace;
    for (int inst = 0; inst < instances; ++inst) {
        RngStream rng(derive(seed, "linucb", static_cast<std::uint64_t>(inst)));
        const int d = 2 + static_cast<int>(rng.next_below(7));     // <= 8
        const int n = 40 + static_cast<int>(rng.next_below(161));  // <= 200

        ModelSpec spec;
        spec.kind = ModelSpec::Kind::Linear;
        spec.context_dim = d;
        spec.arm_count = 1;  // phi(x, 0) = x
        spec.feature_map.kind = FeatureMapSpec::Kind::DisjointOnehot;
        Model model(spec);

        auto theta_star = detail::random_vec(d, rng);
        Dataset data;
        PsdInverseState design(d, 1.0);
        for (int i = 0; i < n; ++i) {
            Transition tr;
            tr.context = detail::random_vec(d, rng);
            tr.arm = 0;
            double f = 0.0;
            for (int j = 0; j < d; ++j) f += tr.context[static_cast<std::size_t>(j)] * theta_star[static_cast<std::size_t>(j)];
            tr.reward = f + 0.3 * rng.next_gaussian();
            design.rank1_update(tr.context);
            data.push_back(std::move(tr));
        }
        const ParamVector theta_ridge = ridge_fit(model, data, 1.0);
        const auto x_query = detail::random_vec(d, rng);

        const OfuEstimate closed = rofu_ucb_linucb(x_query, theta_ridge, design);

        // dense oracle from scratch
        Matrix z = Matrix::identity(d, 1.0);
        std::vector<double> b(static_cast<std::size_t>(d), 0.0);
        for (const auto& tr : data) {
            z.add_outer(tr.context);
            for (int j = 0; j < d; ++j) b[static_cast<std::size_t>(j)] += tr.context[static_cast<std::size_t>(j)] * tr.reward;
        }
        const auto theta_dense = detail::gauss_solve(z, b);
        const auto zinv_x = detail::gauss_solve(z, x_query);
        double base = 0.0, quad = 0.0;
        for (int j = 0; j < d; ++j) {
            base += x_query[static_cast<std::size_t>(j)] * theta_dense[static_cast<std::size_t>(j)];
            quad += x_query[static_cast<std::size_t>(j)] * zinv_x[static_cast<std::size_t>(j)];
        }
        const double oracle_ucb = base + std::sqrt(std::max(0.0, quad));
        const double dev = std::abs(closed.ucb - oracle_ucb);
        if (dev > max_closed) {
            max_closed = dev;
            dump_closed = "instance " + std::to_string(inst) + ": d=" + std::to_string(d) +
                          " n=" + std::to_string(n) + " (seed " + std::to_string(seed) + ")";
        }

        RofuConfig cfg;
        cfg.eta = 0.5;
        cfg.g_exponent = 0.5;
        cfg.ascent_steps = 2000;
        cfg.ascent_step_size = 1e-3;
        cfg.ascent_batch = RofuConfig::kBatchFull;
        cfg.reg.kind = RegSpec::Kind::RidgePlusScaledMse;
        const OfuEstimate ascent = rofu_ucb_ascent(model, theta_ridge, x_query, 0, data, cfg, seed);
        const double adev = std::abs(ascent.ucb - closed.ucb);
        if (adev > max_ascent) {
            max_ascent = adev;
            dump_ascent = "instance " + std::to_string(inst) + ": d=" + std::to_string(d) +
                          " n=" + std::to_string(n) + " (seed " + std::to_string(seed) + ")";
        }
        for (std::size_t k = 1; k < ascent.ascent_trace.size(); ++k) {
            const double drop = ascent.ascent_trace[k - 1] - ascent.ascent_trace[k];
            if (drop > worst_trace_drop) {
                worst_trace_drop = drop;
                dump_trace = "instance " + std::to_string(inst);
            }
        }
    }
    rep.check("closed form vs dense oracle", max_closed, 1e-10, dump_closed);
    rep.check("ascent vs closed form", max_ascent, 1e-4, dump_ascent);
    rep.check("ascent trace monotone", worst_trace_drop, 1e-12, dump_trace);
    rep.runtime_s = timer.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// ntk: the two closed-form routes (explicit theta-hat substitution vs the
// direct gamma*sqrt(h'Z^-1 h/m) formula) and gradient ascent on the
// linearized objective. Instances are built at first-order optimality
// (residuals zero, theta0 = theta_prev) so the closed form is exact.
inline SuiteReport verify_ntk(std::uint64_t seed = 1005, int instances = 20) {
    detail::Timer timer;
    SuiteReport rep;
    rep.name = "ntk";

    double max_two_path = 0.0, max_ascent = 0.0;
    std::string dump_two, dump_ascent;
    for (int inst = 0; inst < instances; ++inst) {
        RngStream rng(derive(seed, "ntk", static_cast<std::uint64_t>(inst)));
        const int d = 3 + static_cast<int>(rng.next_below(3));
        const int arms = 2 + static_cast<int>(rng.next_below(3));
        const int hidden = 8 + static_cast<int>(rng.next_below(9));
        const int n = 10 + static_cast<int>(rng.next_below(41));  // <= 50

        ModelSpec spec;
        spec.kind = ModelSpec::Kind::Mlp;
        spec.context_dim = d;
        spec.arm_count = arms;
        spec.layer_widths = {d + arms, hidden, 1};
        spec.activation = Activation::Tanh;
        Model model(spec);
        if (model.param_count() > 200) throw Error("verify_ntk: instance too large");

        const double gamma = 0.5 + rng.next_double() * 1.5;
        const double lambda = 1.0;
        const int width_m = hidden;
        NtkState state = make_ntk_state(model, init_params(model, rng.next_u64()), lambda, width_m, gamma);

        Dataset data;
        ModelWorkspace ws = model.make_workspace();
        for (int i = 0; i < n; ++i) {
            Transition tr;
            tr.context = detail::random_vec(d, rng);
            tr.arm = static_cast<int>(rng.next_below(arms));
            tr.reward = model.forward(state.theta_prev, tr.context, tr.arm, ws);  // zero residual
            data.push_back(std::move(tr));
        }
        ntk_design_update(state, model, data, NtkDesignMode::RecomputeAtCurrent);

        const auto x_query = detail::random_vec(d, rng);
        const int arm_query = static_cast<int>(rng.next_below(arms));
        const OfuEstimate est = rofu_ucb_ntk_linearized(state, model, x_query, arm_query);

        // Path A: build theta-hat explicitly and evaluate the linearized f.
        ParamVector h = model.grad_params(state.theta_prev, x_query, arm_query);
        const auto zinv_h = state.design.solve(h);
        const double m = static_cast<double>(width_m);
        const double scale = 1.0 / (2.0 * state.eta() * m);
        double gain = 0.0;
        for (std::size_t j = 0; j < h.size(); ++j) gain += h[j] * zinv_h[j] * scale;
        const double bonus_a = std::sqrt(std::max(0.0, gain));
        const double dev = std::abs(bonus_a - est.bonus);
        if (dev > max_two_path) {
            max_two_path = dev;
            dump_two = "instance " + std::to_string(inst) + ": p=" + std::to_string(model.param_count()) +
                       " n=" + std::to_string(n) + " (seed " + std::to_string(seed) + ")";
        }

        // Ascent oracle on the linearized objective
        //   f~ - eta [ sum (f~_i - r_i)^2 + m lambda ||theta - theta0||^2 ].
        const int p = model.param_count();
        std::vector<ParamVector> hs;
        std::vector<double> errs;
        for (const auto& tr : data) {
            hs.push_back(model.grad_params(state.theta_prev, tr.context, tr.arm));
            errs.push_back(model.forward(state.theta_prev, tr.context, tr.arm, ws) - tr.reward);
        }
        const double eta = state.eta();
        auto apply_curvature = [&](const std::vector<double>& v, std::vector<double>& out) {
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t i = 0; i < hs.size(); ++i) {
                double dot = 0.0;
                for (int j = 0; j < p; ++j) dot += hs[i][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
                for (int j = 0; j < p; ++j) out[static_cast<std::size_t>(j)] += dot * hs[i][static_cast<std::size_t>(j)];
            }
            for (int j = 0; j < p; ++j)
                out[static_cast<std::size_t>(j)] =
                    2.0 * eta * (out[static_cast<std::size_t>(j)] + m * lambda * v[static_cast<std::size_t>(j)]);
        };
        // power iteration for the top curvature eigenvalue
        std::vector<double> v = detail::random_vec(p, rng), tmp(static_cast<std::size_t>(p));
        double lam_max = 0.0;
        for (int it = 0; it < 60; ++it) {
            apply_curvature(v, tmp);
            double nrm = 0.0;
            for (double q : tmp) nrm += q * q;
            nrm = std::sqrt(nrm);
            lam_max = nrm;
            for (int j = 0; j < p; ++j) v[static_cast<std::size_t>(j)] = tmp[static_cast<std::size_t>(j)] / nrm;
        }
        const double lam_min = 2.0 * eta * m * lambda;
        const double kappa = 2.0 / (lam_min + lam_max * 1.05);

        std::vector<double> delta(static_cast<std::size_t>(p), 0.0), grad(static_cast<std::size_t>(p));
        const int m_steps = 3000;
        for (int step = 0; step < m_steps; ++step) {
            // grad of f~ - eta R~ at theta_prev + delta:
            //   h - 2 eta [ sum h_i (<h_i, delta> + e_i) + m lambda delta ]
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < hs.size(); ++i) {
                double dot = errs[i];
                for (int j = 0; j < p; ++j) dot += hs[i][static_cast<std::size_t>(j)] * delta[static_cast<std::size_t>(j)];
                for (int j = 0; j < p; ++j) grad[static_cast<std::size_t>(j)] += dot * hs[i][static_cast<std::size_t>(j)];
            }
            for (int j = 0; j < p; ++j)
                grad[static_cast<std::size_t>(j)] =
                    h[static_cast<std::size_t>(j)] -
                    2.0 * eta * (grad[static_cast<std::size_t>(j)] + m * lambda * delta[static_cast<std::size_t>(j)]);
            for (int j = 0; j < p; ++j) delta[static_cast<std::size_t>(j)] += kappa * grad[static_cast<std::size_t>(j)];
        }
        double gain_ascent = 0.0;
        for (int j = 0; j < p; ++j) gain_ascent += h[static_cast<std::size_t>(j)] * delta[static_cast<std::size_t>(j)];
        const double ucb_ascent = est.base_value + std::sqrt(std::max(0.0, gain_ascent));
        const double adev = std::abs(ucb_ascent - est.ucb);
        if (adev > max_ascent) {
            max_ascent = adev;
            dump_ascent = "instance " + std::to_string(inst) + ": p=" + std::to_string(p) +
                          " n=" + std::to_string(n) + " (seed " + std::to_string(seed) + ")";
        }
    }
    rep.check("closed-form two-path identity", max_two_path, 1e-10, dump_two);
    rep.check("linearized ascent vs closed form", max_ascent, 1e-4, dump_ascent);
    rep.runtime_s = timer.seconds();
    return rep;
}

inline SuiteReport run_suite(const std::string& name) {
    if (name == "linalg") return verify_linalg();
    if (name == "gradcheck") return verify_gradcheck();
    if (name == "ucb1") return verify_ucb1();
    if (name == "linucb") return verify_linucb();
    if (name == "ntk") return verify_ntk();
    throw ConfigError("unknown verify suite '" + name + "' (valid: linucb, ucb1, ntk, gradcheck, linalg)");
}

}  // namespace rofu::verify
