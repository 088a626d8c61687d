#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rofu/config.hpp"
#include "rofu/harness.hpp"
#include "rofu/verify.hpp"

namespace rofu::cli {

// Exit codes: 0 success, 1 runtime failure, 2 configuration/usage error.

struct Overrides {
    std::optional<long> seeds;
    std::optional<long> horizon;
    std::optional<std::string> out;
};

inline std::string resolve_config_text(const std::string& arg) {
    if (auto preset = preset_text(arg)) return *preset;
    std::ifstream in(arg);
    if (!in) {
        std::string names;
        for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("cannot open config '" + arg + "' (bundled presets: " + names + ")");
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void override_entry(ConfigSection& s, const std::string& key, const std::string& value) {
    for (auto& [k, v] : s.entries) {
        if (k == key) {
            v = value;
            return;
        }
    }
    s.entries.emplace_back(key, value);
    s.lines[key] = 0;
}

inline int cmd_run(const std::string& config_arg, const Overrides& ov = {}) {
    ExperimentConfig cfg;
    std::vector<std::pair<std::string, AgentFactory>> agents;
    try {
        cfg = parse_experiment_config(resolve_config_text(config_arg));
        if (ov.seeds || ov.horizon || ov.out) {
            if (ov.seeds) override_entry(cfg.run_section, "seeds", std::to_string(*ov.seeds));
            if (ov.horizon) override_entry(cfg.run_section, "horizon", std::to_string(*ov.horizon));
            if (ov.out) override_entry(cfg.run_section, "output", *ov.out);
            cfg = parse_experiment_config(cfg.to_text());
        }
        for (const auto& section : cfg.agent_sections)
            agents.emplace_back(section.name, build_agent_factory(section, cfg.env));
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        nlohmann::json echo;
        echo["text"] = cfg.to_text();
        echo["structured"] = cfg.to_json();
        for (const auto& [name, factory] : agents) {
            const auto runs = run_many(cfg.env, factory, cfg.horizon, cfg.seeds);
            double final_mean = 0.0;
            if (runs.size() >= 2) {
                const AggregateResult agg = aggregate(runs);
                persist(agg, echo, cfg.output + "/" + name);
                final_mean = agg.mean_regret.back();
            } else {
                persist(runs.front(), cfg.output + "/" + name);
                final_mean = runs.front().cumulative_regret.back();
            }
            std::printf("%-16s seeds=%zu horizon=%ld final mean regret %.4f\n", name.c_str(),
                        cfg.seeds.size(), cfg.horizon, final_mean);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "run failed: %s\n", e.what());
        return 1;
    }
    return 0;
}

inline int cmd_verify(const std::string& suite) {
    verify::SuiteReport rep;
    try {
        rep = verify::run_suite(suite);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    for (const auto& line : rep.lines) std::printf("%s\n", line.c_str());
    std::printf("suite %-10s %s  (%.2f s)\n", rep.name.c_str(), rep.pass ? "PASS" : "FAIL", rep.runtime_s);
    if (!rep.pass) {
        std::fprintf(stderr, "failing case: %s\n", rep.failure_dump.c_str());
        return 1;
    }
    return 0;
}

inline int cmd_plotdata(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> names;
    try {
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_directory() && fs::exists(entry.path() / "curves.csv"))
                names.push_back(entry.path().filename().string());
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "plot-data: %s\n", e.what());
        return 1;
    }
    std::sort(names.begin(), names.end());
    if (names.empty()) {
        std::fprintf(stderr, "plot-data: no <agent>/curves.csv found under %s\n", dir.c_str());
        return 1;
    }

    // columns are carried as the original strings so output is byte-stable
    std::vector<std::vector<std::array<std::string, 3>>> cols;  // per agent: (mean, std, bonus)
    std::size_t rows = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::ifstream in(dir + "/" + names[i] + "/curves.csv");
        std::string line;
        std::getline(in, line);  // header
        std::vector<std::array<std::string, 3>> col;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::array<std::string, 3> cells;
            std::stringstream ss(line);
            std::string tok;
            std::getline(ss, tok, ',');  // round
            for (auto& c : cells)
                if (!std::getline(ss, c, ',')) {
                    std::fprintf(stderr, "plot-data: corrupt row in %s/curves.csv\n", names[i].c_str());
                    return 1;
                }
            col.push_back(cells);
        }
        if (i == 0) {
            rows = col.size();
        } else if (col.size() != rows) {
            std::fprintf(stderr, "plot-data: horizon mismatch: %s has %zu rows, %s has %zu rows\n",
                         names[0].c_str(), rows, names[i].c_str(), col.size());
            return 1;
        }
        cols.push_back(std::move(col));
    }

    const std::string out_path = dir + "/comparison.csv";
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::fprintf(stderr, "plot-data: cannot open %s\n", out_path.c_str());
        return 1;
    }
    out << "round";
    for (const auto& n : names) out << ',' << n << "_mean," << n << "_std";
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        out << (r + 1);
        for (std::size_t i = 0; i < names.size(); ++i)
            out << ',' << cols[i][r][0] << ',' << cols[i][r][1];
        out << '\n';
    }
    if (!out) {
        std::fprintf(stderr, "plot-data: write failed for %s\n", out_path.c_str());
        return 1;
    }
    std::printf("wrote %s (%zu agents, %zu rounds)\n", out_path.c_str(), names.size(), rows);
    return 0;
}

}  // namespace rofu::cli
