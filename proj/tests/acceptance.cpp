// Acceptance gate: runs every criterion end to end and prints one PASS/FAIL
// line per criterion. Exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rofu/cli.hpp"
#include "rofu/config.hpp"
#include "rofu/harness.hpp"
#include "rofu/verify.hpp"

namespace {

int g_failures = 0;

rofu::verify::SuiteReport linucb_full(std::uint64_t seed) { return rofu::verify::verify_linucb(seed); }
rofu::verify::SuiteReport ntk_full(std::uint64_t seed) { return rofu::verify::verify_ntk(seed); }

struct Timer {
    std::chrono::steady_clock::time_point begin = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    }
};

void report(int id, const std::string& label, bool pass, double seconds, const std::string& detail) {
    std::printf("[%s] criterion %d: %-28s (%.1f s)  %s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                seconds, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void suite_criterion(int id, const std::string& label, rofu::verify::SuiteReport (*suite)(std::uint64_t),
                     std::uint64_t seed, double budget_s) {
    Timer timer;
    auto rep = suite(seed);
    const double secs = timer.seconds();
    std::string detail;
    for (const auto& line : rep.lines) detail += "\n    " + line;
    const bool in_budget = secs < budget_s;
    if (!in_budget) detail += "\n    runtime over budget";
    report(id, label, rep.pass && in_budget, secs, detail);
    if (!rep.pass) std::printf("    failing case: %s\n", rep.failure_dump.c_str());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

double mean_final(const std::vector<rofu::RunResult>& runs) {
    double s = 0;
    for (const auto& r : runs) s += r.cumulative_regret.back();
    return s / static_cast<double>(runs.size());
}

double mean_bonus_window(const std::vector<rofu::RunResult>& runs, long lo, long hi) {
    double s = 0;
    for (const auto& r : runs)
        for (long t = lo; t < hi; ++t) s += r.rounds[static_cast<std::size_t>(t)].bonus;
    return s / (static_cast<double>(runs.size()) * static_cast<double>(hi - lo));
}

void criterion6_mab_regret() {
    Timer timer;
    rofu::EnvSpec spec;
    spec.kind = rofu::EnvSpec::Kind::Mab;
    spec.arm_count = 10;
    spec.mab_means = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
    spec.noise_std = 0.1;
    const long T = 20000;
    rofu::AgentFactory factory = [](rofu::AgentSeeds) -> std::unique_ptr<rofu::Agent> {
        return std::make_unique<rofu::RofuUcb1Agent>(10);
    };
    std::vector<std::uint64_t> seeds;
    for (int s = 1; s <= 16; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
    const auto runs = rofu::run_many(spec, factory, T, seeds);
    double final_mean = 0, half_mean = 0;
    for (const auto& r : runs) {
        final_mean += r.cumulative_regret.back();
        half_mean += r.cumulative_regret[static_cast<std::size_t>(T / 2 - 1)];
    }
    final_mean /= 16.0;
    half_mean /= 16.0;
    const double budget = 0.02 * static_cast<double>(T);
    const bool below = final_mean <= budget;
    const bool decelerating = (final_mean - half_mean) < half_mean;
    const double secs = timer.seconds();
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "mean R(T)=%.1f vs budget %.0f (%s); R(T)-R(T/2)=%.1f < R(T/2)=%.1f (%s)", final_mean,
                  budget, below ? "ok" : "FAIL", final_mean - half_mean, half_mean,
                  decelerating ? "ok" : "FAIL");
    report(6, "mab regret shape", below && decelerating && secs < 120.0, secs, detail);
}

struct MlpRuns {
    std::vector<std::string> names;
    std::vector<std::vector<rofu::RunResult>> runs;
    rofu::ExperimentConfig cfg;
    bool ok = false;
};

MlpRuns criterion7_fig1() {
    Timer timer;
    MlpRuns out;
    out.cfg = rofu::parse_experiment_config(*rofu::preset_text("mlp_table2"));
    for (const auto& section : out.cfg.agent_sections) {
        out.names.push_back(section.name);
        auto factory = rofu::build_agent_factory(section, out.cfg.env);
        out.runs.push_back(rofu::run_many(out.cfg.env, factory, out.cfg.horizon, out.cfg.seeds));
    }
    const long T = out.cfg.horizon;

    auto idx_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < out.names.size(); ++i)
            if (out.names[i] == name) return i;
        throw rofu::ConfigError("mlp_table2 preset is missing agent " + name);
    };
    const auto& m1 = out.runs[idx_of("rofu_m1")];
    const auto& m5 = out.runs[idx_of("rofu_m5")];
    const auto& m10 = out.runs[idx_of("rofu_m10")];
    const auto& eps = out.runs[idx_of("eps_greedy")];

    const double f1 = mean_final(m1), f5 = mean_final(m5), f10 = mean_final(m10), fe = mean_final(eps);
    const bool a = f5 < fe && f10 < fe && f5 < f1 && f10 < f1;

    const double b1 = mean_bonus_window(m1, 0, 500);
    const double b5 = mean_bonus_window(m5, 0, 500);
    const double b10 = mean_bonus_window(m10, 0, 500);
    const bool b = b10 >= b5 && b5 >= b1;

    bool c = true;
    char cbuf[160] = "";
    for (const auto* runs : {&m1, &m5, &m10}) {
        const double early = mean_bonus_window(*runs, 0, T / 10);
        const double late = mean_bonus_window(*runs, T - T / 10, T);
        const bool ok = late < 0.5 * early;
        c = c && ok;
        std::snprintf(cbuf + std::strlen(cbuf), sizeof cbuf - std::strlen(cbuf), " %.3f/%.3f%s", late,
                      early, ok ? "" : "(FAIL)");
    }

    const double secs = timer.seconds();
    char detail[512];
    std::snprintf(detail, sizeof detail,
                  "\n    (a) finals m1=%.1f m5=%.1f m10=%.1f eps=%.1f  %s"
                  "\n    (b) bonus rounds 1-500: m1=%.4f m5=%.4f m10=%.4f  %s"
                  "\n    (c) late/early per M:%s  %s",
                  f1, f5, f10, fe, a ? "ok" : "FAIL", b1, b5, b10, b ? "ok" : "FAIL", cbuf,
                  c ? "ok" : "FAIL");
    const bool in_budget = secs < 900.0;
    report(7, "mlp bandit ablation", a && b && c && in_budget, secs,
           std::string(detail) + (in_budget ? "" : "\n    runtime over budget"));
    out.ok = true;
    return out;
}

void criterion8_determinism() {
    Timer timer;
    namespace fs = std::filesystem;
    const std::string dir_a = "acceptance_det_a", dir_b = "acceptance_det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    rofu::cli::Overrides ov_a;
    ov_a.out = dir_a;
    rofu::cli::Overrides ov_b;
    ov_b.out = dir_b;
    bool pass = rofu::cli::cmd_run("mab10", ov_a) == 0 && rofu::cli::cmd_run("mab10", ov_b) == 0;
    std::string detail = "mab10 preset run twice";
    if (pass) {
        for (const auto& entry : fs::directory_iterator(dir_a)) {
            if (!entry.is_directory()) continue;
            const std::string name = entry.path().filename().string();
            const std::string a = read_file(dir_a + "/" + name + "/curves.csv");
            const std::string bfile = read_file(dir_b + "/" + name + "/curves.csv");
            if (a.empty() || a != bfile) {
                pass = false;
                detail = "curves.csv differs for agent " + name;
            }
        }
        if (pass) detail += ": byte-identical curves.csv";
    } else {
        detail = "preset run failed";
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    report(8, "byte-identical reruns", pass, timer.seconds(), detail);
}

void criterion9_decomposition(const MlpRuns& mlp) {
    Timer timer;
    if (!mlp.ok) {
        report(9, "regret decomposition", false, 0.0, "criterion 7 runs unavailable");
        return;
    }
    // One offline reference per seed, shared across agents; declared budget.
    rofu::ModelSpec ref_spec;
    ref_spec.kind = rofu::ModelSpec::Kind::Mlp;
    ref_spec.context_dim = mlp.cfg.env.context_dim;
    ref_spec.arm_count = mlp.cfg.env.arm_count;
    ref_spec.layer_widths = {mlp.cfg.env.context_dim, 20, 20, mlp.cfg.env.arm_count};
    rofu::Model ref_model(ref_spec);
    rofu::TrainConfig ref_cfg;
    ref_cfg.steps = 4000;
    ref_cfg.step_size = 0.05;
    ref_cfg.batch_size = 64;

    double worst = 0.0;
    for (std::uint64_t seed : mlp.cfg.seeds) {
        const auto theta_prime =
            rofu::train_offline_reference(ref_model, mlp.cfg.env, mlp.cfg.horizon, seed, ref_cfg);
        for (const auto& agent_runs : mlp.runs) {
            for (const auto& run : agent_runs) {
                if (run.seed != seed) continue;
                const auto split = rofu::regret_decomposition(run, ref_model, theta_prime, mlp.cfg.env);
                const double gap =
                    std::abs(split.model_induced + split.exploration - run.cumulative_regret.back());
                worst = std::max(worst, gap);
            }
        }
    }
    char detail[128];
    std::snprintf(detail, sizeof detail, "max |I + II - R_T| = %.2e (tol 1e-9) over %zu runs", worst,
                  mlp.cfg.seeds.size() * mlp.runs.size());
    report(9, "regret decomposition", worst <= 1e-9, timer.seconds(), detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    suite_criterion(1, "linucb equivalence", linucb_full, 1004, 30.0);
    suite_criterion(2, "ucb1 equivalence", rofu::verify::verify_ucb1, 1003, 5.0);
    suite_criterion(3, "ntk two-path identity", ntk_full, 1005, 60.0);
    suite_criterion(4, "gradient correctness", rofu::verify::verify_gradcheck, 1002, 10.0);
    suite_criterion(5, "linalg oracles", rofu::verify::verify_linalg, 1001, 1.0);
    criterion6_mab_regret();
    MlpRuns mlp = criterion7_fig1();
    criterion8_determinism();
    criterion9_decomposition(mlp);

    std::printf("%d criterion(s) failing\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
