#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rofu/agents.hpp"
#include "rofu/env.hpp"
#include "rofu/errors.hpp"

namespace rofu {

// Experiment orchestration: seeded (env x agent) runs, regret accounting on
// true means, the offline-reference regret decomposition, multi-seed
// aggregation and persistence. Run seed s spawns three independent
// sub-streams: derive(s, "env"), derive(s, "agent"), derive(s, "trainer").

struct RoundRecord {
    int arm = 0;
    double reward = 0.0;
    double ucb = 0.0;    // of the chosen arm; 0 during forced round-robin
    double bonus = 0.0;  // of the chosen arm; 0 during forced round-robin
};

struct RunResult {
    std::string env_fingerprint;
    std::string agent_fingerprint;
    std::uint64_t seed = 0;
    long horizon = 0;
    std::vector<RoundRecord> rounds;
    std::vector<double> cumulative_regret;  // non-decreasing, length horizon
    double wall_time_ms = 0.0;
};

inline RunResult run_experiment(const EnvSpec& env_spec, const AgentFactory& make_agent, long horizon,
                                std::uint64_t seed) {
    if (horizon < 1) throw ConfigError("run_experiment: horizon must be >= 1");
    const auto t_begin = std::chrono::steady_clock::now();

    Env env(env_spec, derive(seed, "env"));
    std::unique_ptr<Agent> agent = make_agent(AgentSeeds{derive(seed, "agent"), derive(seed, "trainer")});

    RunResult result;
    result.env_fingerprint = env_spec.fingerprint();
    result.agent_fingerprint = agent->fingerprint();
    result.seed = seed;
    result.horizon = horizon;
    result.rounds.reserve(static_cast<std::size_t>(horizon));
    result.cumulative_regret.reserve(static_cast<std::size_t>(horizon));

    double regret = 0.0;
    for (long t = 1; t <= horizon; ++t) {
        try {
            const std::vector<double> x = env.context(t);
            RoundScores scores = agent->act(x, t);
            const int arm = scores.chosen;
            regret += env.best_mean(t, x) - env.mean(t, x, arm);
            const double reward = env.reward(t, x, arm);
            agent->learn(Transition{x, arm, reward});

            RoundRecord rec;
            rec.arm = arm;
            rec.reward = reward;
            if (!scores.per_arm.empty()) {
                rec.ucb = scores.per_arm[static_cast<std::size_t>(arm)].ucb;
                rec.bonus = scores.per_arm[static_cast<std::size_t>(arm)].bonus;
            }
            result.rounds.push_back(rec);
            result.cumulative_regret.push_back(regret);
        } catch (const ExhaustedError&) {
            throw;
        } catch (const Error& e) {
            throw Error(std::string(e.what()) + " (round " + std::to_string(t) + ")");
        }
    }
    result.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
}

// Runs are independent; seeds execute in parallel worker threads, never
// splitting a single run.
inline std::vector<RunResult> run_many(const EnvSpec& env_spec, const AgentFactory& make_agent,
                                       long horizon, const std::vector<std::uint64_t>& seeds) {
    std::vector<RunResult> results(seeds.size());
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()), static_cast<unsigned>(seeds.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i)
            results[i] = run_experiment(env_spec, make_agent, horizon, seeds[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1))
                    results[i] = run_experiment(env_spec, make_agent, horizon, seeds[i]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

// ---------------------------------------------------------------------------
// Regret decomposition against an offline reference parameter theta'
// (model-induced part vs exploration part; the two sum to the run's regret).

struct RegretSplit {
    double model_induced = 0.0;  // best mean minus the offline policy's mean
    double exploration = 0.0;    // offline policy's mean minus the agent's mean
};

// Train theta' on the virtual dataset: `horizon` fresh contexts, every arm,
// true means as targets. The optimizer budget is declared by `cfg`.
inline ParamVector train_offline_reference(const Model& agent_model, const EnvSpec& env_spec,
                                           long horizon, std::uint64_t seed, const TrainConfig& cfg) {
    Env env(env_spec, derive(seed, "virtual-env"));
    Dataset virtual_data;
    virtual_data.reserve(static_cast<std::size_t>(horizon) * env.arm_count());
    for (long t = 1; t <= horizon; ++t) {
        const std::vector<double> x = env.context(t);
        for (int a = 0; a < env.arm_count(); ++a)
            virtual_data.push_back(Transition{x, a, env.mean(t, x, a)});
    }
    ParamVector theta0 = init_params(agent_model, derive(seed, "virtual-init"));
    return train(agent_model, theta0, virtual_data, cfg, derive(seed, "virtual-train"), theta0);
}

inline RegretSplit regret_decomposition(const RunResult& run, const Model& offline_model,
                                        const ParamVector& theta_prime, const EnvSpec& env_spec) {
    Env env(env_spec, derive(run.seed, "env"));
    ModelWorkspace ws = offline_model.make_workspace();
    RegretSplit split;
    std::vector<double> vals(static_cast<std::size_t>(env.arm_count()));
    for (long t = 1; t <= run.horizon; ++t) {
        const std::vector<double> x = env.context(t);
        for (int a = 0; a < env.arm_count(); ++a)
            vals[static_cast<std::size_t>(a)] = offline_model.forward(theta_prime, x, a, ws);
        const int ref_arm = select_action(vals);
        const double best = env.best_mean(t, x);
        const double ref_mean = env.mean(t, x, ref_arm);
        const double got_mean = env.mean(t, x, run.rounds[static_cast<std::size_t>(t - 1)].arm);
        split.model_induced += best - ref_mean;
        split.exploration += ref_mean - got_mean;
    }
    return split;
}

// ---------------------------------------------------------------------------
// Aggregation across seeds: pointwise mean and sample std (n-1 denominator)
// of the regret curve plus the mean bonus curve.

struct AggregateResult {
    std::string env_fingerprint;
    std::string agent_fingerprint;
    long horizon = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> mean_regret;
    std::vector<double> std_regret;
    std::vector<double> mean_bonus;
    std::vector<double> final_regrets;  // per seed
    double total_wall_ms = 0.0;
};

inline AggregateResult aggregate(const std::vector<RunResult>& runs) {
    if (runs.size() < 2) throw FingerprintError("aggregate: needs at least two runs");
    AggregateResult agg;
    agg.env_fingerprint = runs.front().env_fingerprint;
    agg.agent_fingerprint = runs.front().agent_fingerprint;
    agg.horizon = runs.front().horizon;
    for (const RunResult& r : runs) {
        if (r.env_fingerprint != agg.env_fingerprint || r.agent_fingerprint != agg.agent_fingerprint)
            throw FingerprintError("aggregate: mixed env/agent fingerprints");
        if (r.horizon != agg.horizon) throw FingerprintError("aggregate: mixed horizons");
        agg.seeds.push_back(r.seed);
        agg.final_regrets.push_back(r.cumulative_regret.back());
        agg.total_wall_ms += r.wall_time_ms;
    }
    const std::size_t T = static_cast<std::size_t>(agg.horizon);
    const double n = static_cast<double>(runs.size());
    agg.mean_regret.resize(T);
    agg.std_regret.resize(T);
    agg.mean_bonus.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        double s = 0.0, s2 = 0.0, sb = 0.0;
        for (const RunResult& r : runs) {
            const double v = r.cumulative_regret[t];
            s += v;
            s2 += v * v;
            sb += r.rounds[t].bonus;
        }
        const double mean = s / n;
        agg.mean_regret[t] = mean;
        const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
        agg.std_regret[t] = std::sqrt(var);
        agg.mean_bonus[t] = sb / n;
    }
    return agg;
}

// ---------------------------------------------------------------------------
// Persistence. curves.csv is byte-stable given identical inputs; every float
// is printed with 17 significant digits.

namespace detail {
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string git_describe() {
    FILE* pipe = ::popen("git describe --always --dirty 2>/dev/null", "r");
    if (!pipe) return "unknown";
    char buf[128] = {0};
    std::string out;
    while (std::fgets(buf, sizeof buf, pipe)) out += buf;
    ::pclose(pipe);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "unknown" : out;
}
}  // namespace detail

inline void persist(const AggregateResult& agg, const nlohmann::json& config_echo,
                    const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const std::string curves_path = out_dir + "/curves.csv";
    std::ofstream curves(curves_path, std::ios::binary);
    if (!curves) throw IoError("persist: cannot open " + curves_path);
    curves << "round,mean_regret,std_regret,mean_bonus\n";
    for (long t = 0; t < agg.horizon; ++t) {
        curves << (t + 1) << ',' << detail::fmt17(agg.mean_regret[static_cast<std::size_t>(t)]) << ','
               << detail::fmt17(agg.std_regret[static_cast<std::size_t>(t)]) << ','
               << detail::fmt17(agg.mean_bonus[static_cast<std::size_t>(t)]) << '\n';
    }
    if (!curves) throw IoError("persist: write failed for " + curves_path);
    curves.close();

    nlohmann::json meta;
    meta["config"] = config_echo;
    meta["env_fingerprint"] = agg.env_fingerprint;
    meta["agent_fingerprint"] = agg.agent_fingerprint;
    meta["horizon"] = agg.horizon;
    meta["seeds"] = agg.seeds;
    meta["final_regrets"] = agg.final_regrets;
    meta["git_describe"] = detail::git_describe();
    meta["wall_time_ms"] = agg.total_wall_ms;
    const std::string meta_path = out_dir + "/run_meta.json";
    std::ofstream mf(meta_path, std::ios::binary);
    if (!mf) throw IoError("persist: cannot open " + meta_path);
    mf << meta.dump(2) << '\n';
    if (!mf) throw IoError("persist: write failed for " + meta_path);
}

inline void persist(const RunResult& run, const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const std::string path = out_dir + "/run_" + std::to_string(run.seed) + ".csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("persist: cannot open " + path);
    out << "round,arm,reward,ucb,bonus,cumulative_regret\n";
    for (std::size_t t = 0; t < run.rounds.size(); ++t) {
        const RoundRecord& r = run.rounds[t];
        out << (t + 1) << ',' << r.arm << ',' << detail::fmt17(r.reward) << ',' << detail::fmt17(r.ucb)
            << ',' << detail::fmt17(r.bonus) << ',' << detail::fmt17(run.cumulative_regret[t]) << '\n';
    }
    if (!out) throw IoError("persist: write failed for " + path);
}

}  // namespace rofu
