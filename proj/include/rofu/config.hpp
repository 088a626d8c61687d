#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rofu/agents.hpp"
#include "rofu/env.hpp"
#include "rofu/errors.hpp"

namespace rofu {

// Experiment configuration: a sectioned plain-text file.
//
//   # comment
//   [env]
//   kind = mab | linear | kernel | mlp_sim | dataset
//   ...
//   [run]
//   horizon = 5000
//   seeds = 16
//   seed_base = 1
//   output = out/my_experiment
//   [agent <name>]
//   kind = ucb1 | linucb | kernelucb | rofu | rofu_ntk | epsilon_greedy |
//          greedy | neural_ucb_full | neural_ucb_diag
//   ...
//
// Keys are validated strictly; unknown keys fail with their line number.

struct ConfigSection {
    std::string kind;  // "env", "run" or "agent"
    std::string name;  // agent name
    std::vector<std::pair<std::string, std::string>> entries;
    std::map<std::string, long> lines;  // key -> line number

    bool has(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return true;
        return false;
    }

    std::string get(const std::string& key, const std::string& fallback = "") const {
        for (const auto& [k, v] : entries)
            if (k == key) return v;
        return fallback;
    }

    std::string require(const std::string& key) const {
        if (!has(key)) throw ConfigError("[" + kind + (name.empty() ? "" : " " + name) + "] missing required key '" + key + "'");
        return get(key);
    }

    double get_num(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const std::string v = get(key);
        try {
            std::size_t used = 0;
            const double x = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' (line " + std::to_string(lines.at(key)) + "): not a number: '" + v + "'");
        }
    }

    long get_int(const std::string& key, long fallback) const {
        const double x = get_num(key, static_cast<double>(fallback));
        const long i = static_cast<long>(x);
        if (static_cast<double>(i) != x)
            throw ConfigError("key '" + key + "' (line " + std::to_string(lines.at(key)) + "): expected an integer");
        return i;
    }
};

struct ExperimentConfig {
    ConfigSection env_section;
    ConfigSection run_section;
    std::vector<ConfigSection> agent_sections;

    EnvSpec env;
    long horizon = 0;
    std::vector<std::uint64_t> seeds;
    std::string output;

    nlohmann::json to_json() const {
        nlohmann::json j;
        auto section_json = [](const ConfigSection& s) {
            nlohmann::json o = nlohmann::json::object();
            for (const auto& [k, v] : s.entries) o[k] = v;
            return o;
        };
        j["env"] = section_json(env_section);
        j["run"] = section_json(run_section);
        j["agents"] = nlohmann::json::object();
        for (const auto& a : agent_sections) j["agents"][a.name] = section_json(a);
        return j;
    }

    // Canonical text form; re-parsing it reproduces this configuration.
    std::string to_text() const {
        std::string out;
        auto emit = [&out](const ConfigSection& s) {
            out += "[" + s.kind + (s.name.empty() ? "" : " " + s.name) + "]\n";
            for (const auto& [k, v] : s.entries) out += k + " = " + v + "\n";
            out += "\n";
        };
        emit(env_section);
        emit(run_section);
        for (const auto& a : agent_sections) emit(a);
        return out;
    }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

inline const std::vector<std::string>& env_keys() {
    static const std::vector<std::string> keys{
        "kind", "arms", "context_dim", "noise_std", "context_law", "means",   "gen_seed",
        "gen_hidden", "gen_hidden_layers", "rff_dim", "rff_bandwidth", "dataset", "label_column"};
    return keys;
}

inline const std::vector<std::string>& run_keys() {
    static const std::vector<std::string> keys{"horizon", "seeds", "seed_base", "output"};
    return keys;
}

inline const std::vector<std::string>& agent_keys() {
    static const std::vector<std::string> keys{
        "kind",        "model",        "hidden",          "hidden_layers", "activation",
        "eta",         "g_exponent",   "ascent_steps",    "ascent_step_size", "ascent_batch",
        "reg",         "anchor_weight", "train_steps",    "train_step_size",  "train_batch",
        "train_ridge", "train_anchor", "epsilon",         "gamma",            "lambda",
        "width_m",     "rff_dim",      "rff_bandwidth",   "rff_seed"};
    return keys;
}

inline void check_keys(const ConfigSection& s, const std::vector<std::string>& allowed) {
    for (const auto& [k, v] : s.entries) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("unknown key '" + k + "' in [" + s.kind +
                              (s.name.empty() ? "" : " " + s.name) + "] (line " +
                              std::to_string(s.lines.at(k)) + ")");
    }
}

}  // namespace config_detail

inline ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<ConfigSection> sections;
    ConfigSection* current = nullptr;

    long line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = config_detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            const std::string inner = config_detail::trim(line.substr(1, line.size() - 2));
            ConfigSection s;
            const std::size_t sp = inner.find(' ');
            s.kind = sp == std::string::npos ? inner : inner.substr(0, sp);
            s.name = sp == std::string::npos ? "" : config_detail::trim(inner.substr(sp + 1));
            if (s.kind != "env" && s.kind != "run" && s.kind != "agent")
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + inner + "]");
            if (s.kind == "agent" && s.name.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": agent section needs a name");
            sections.push_back(std::move(s));
            current = &sections.back();
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        if (!current) throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        const std::string key = config_detail::trim(line.substr(0, eq));
        const std::string value = config_detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (current->has(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        current->entries.emplace_back(key, value);
        current->lines[key] = line_no;
    }

    bool saw_env = false, saw_run = false;
    for (auto& s : sections) {
        if (s.kind == "env") {
            if (saw_env) throw ConfigError("duplicate [env] section");
            cfg.env_section = s;
            saw_env = true;
        } else if (s.kind == "run") {
            if (saw_run) throw ConfigError("duplicate [run] section");
            cfg.run_section = s;
            saw_run = true;
        } else {
            for (const auto& other : cfg.agent_sections)
                if (other.name == s.name) throw ConfigError("duplicate agent name '" + s.name + "'");
            cfg.agent_sections.push_back(s);
        }
    }
    if (!saw_env) throw ConfigError("missing [env] section");
    if (!saw_run) throw ConfigError("missing [run] section");
    if (cfg.agent_sections.empty()) throw ConfigError("at least one [agent <name>] section required");

    config_detail::check_keys(cfg.env_section, config_detail::env_keys());
    config_detail::check_keys(cfg.run_section, config_detail::run_keys());
    for (const auto& a : cfg.agent_sections) config_detail::check_keys(a, config_detail::agent_keys());

    // [run]
    cfg.horizon = cfg.run_section.get_int("horizon", -1);
    if (!cfg.run_section.has("horizon")) throw ConfigError("[run] missing required key 'horizon'");
    if (cfg.horizon < 1) throw ConfigError("[run] horizon must be >= 1");
    const long n_seeds = cfg.run_section.get_int("seeds", 2);
    const long seed_base = cfg.run_section.get_int("seed_base", 1);
    if (n_seeds < 1) throw ConfigError("[run] seeds must be >= 1");
    for (long s = 0; s < n_seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(seed_base + s));
    cfg.output = cfg.run_section.get("output", "out");

    // [env]
    const ConfigSection& e = cfg.env_section;
    const std::string kind = e.require("kind");
    EnvSpec& env = cfg.env;
    if (kind == "mab") {
        env.kind = EnvSpec::Kind::Mab;
        const std::string means = e.require("means");
        std::size_t p = 0;
        while (p < means.size()) {
            std::size_t c = means.find(',', p);
            const std::string tok = config_detail::trim(means.substr(p, c == std::string::npos ? std::string::npos : c - p));
            if (!tok.empty()) {
                try {
                    env.mab_means.push_back(std::stod(tok));
                } catch (const std::exception&) {
                    throw ConfigError("[env] means: not a number: '" + tok + "'");
                }
            }
            p = c == std::string::npos ? means.size() : c + 1;
        }
        env.arm_count = static_cast<int>(env.mab_means.size());
        env.context_dim = 0;
    } else if (kind == "linear" || kind == "kernel") {
        env.kind = kind == "linear" ? EnvSpec::Kind::Linear : EnvSpec::Kind::Kernel;
        env.arm_count = static_cast<int>(e.get_int("arms", 5));
        env.context_dim = static_cast<int>(e.get_int("context_dim", 6));
        env.gen_model.context_dim = env.context_dim;
        env.gen_model.arm_count = env.arm_count;
        if (kind == "linear") {
            env.gen_model.kind = ModelSpec::Kind::Linear;
            env.gen_model.feature_map.kind = FeatureMapSpec::Kind::DisjointOnehot;
        } else {
            env.gen_model.kind = ModelSpec::Kind::KernelFeatures;
            env.gen_model.feature_map.kind = FeatureMapSpec::Kind::RandomFourier;
            env.gen_model.feature_map.output_dim =
                static_cast<int>(e.get_int("rff_dim", 32L * env.arm_count));
            env.gen_model.feature_map.bandwidth = e.get_num("rff_bandwidth", 1.0);
            env.gen_model.feature_map.seed = static_cast<std::uint64_t>(e.get_int("gen_seed", 1));
        }
    } else if (kind == "mlp_sim") {
        env = make_mlp_sim(static_cast<std::uint64_t>(e.get_int("gen_seed", 1)),
                           static_cast<int>(e.get_int("context_dim", 10)),
                           static_cast<int>(e.get_int("arms", 10)),
                           static_cast<int>(e.get_int("gen_hidden", 32)),
                           static_cast<int>(e.get_int("gen_hidden_layers", 1)));
    } else if (kind == "dataset") {
        env = load_dataset_bandit(e.require("dataset"), e.get("label_column", "label"),
                                  static_cast<std::uint64_t>(e.get_int("gen_seed", 1)));
    } else {
        throw ConfigError("[env] unknown kind '" + kind + "'");
    }
    env.gen_seed = static_cast<std::uint64_t>(e.get_int("gen_seed", static_cast<long>(env.gen_seed)));
    env.noise_std = e.get_num("noise_std", env.noise_std);
    const std::string law = e.get("context_law", "");
    if (!law.empty()) {
        if (law == "gaussian")
            env.law = ContextLaw::Gaussian;
        else if (law == "uniform")
            env.law = ContextLaw::Uniform;
        else
            throw ConfigError("[env] unknown context_law '" + law + "'");
    }
    env.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Agent construction from a parsed section, with env-aware model defaults.

namespace config_detail {

inline ModelSpec agent_model_spec(const ConfigSection& a, const EnvSpec& env) {
    std::string model = a.get("model", "auto");
    if (model == "auto") {
        if (env.kind == EnvSpec::Kind::Mab)
            model = "linear";
        else if (env.kind == EnvSpec::Kind::Linear)
            model = "linear";
        else if (env.kind == EnvSpec::Kind::Kernel)
            model = "kernel";
        else
            model = "mlp";
    }
    ModelSpec spec;
    spec.context_dim = env.context_dim;
    spec.arm_count = env.arm_count;
    if (model == "linear") {
        spec.kind = ModelSpec::Kind::Linear;
        spec.feature_map.kind = env.context_dim == 0 ? FeatureMapSpec::Kind::Shared
                                                     : FeatureMapSpec::Kind::DisjointOnehot;
    } else if (model == "kernel") {
        spec.kind = ModelSpec::Kind::KernelFeatures;
        spec.feature_map.kind = FeatureMapSpec::Kind::RandomFourier;
        spec.feature_map.output_dim = static_cast<int>(a.get_int("rff_dim", 32L * env.arm_count));
        spec.feature_map.bandwidth = a.get_num("rff_bandwidth", 1.0);
        spec.feature_map.seed = static_cast<std::uint64_t>(a.get_int("rff_seed", 1));
    } else if (model == "mlp") {
        spec.kind = ModelSpec::Kind::Mlp;
        const int hidden = static_cast<int>(a.get_int("hidden", 24));
        const int layers = static_cast<int>(a.get_int("hidden_layers", 2));
        spec.layer_widths.push_back(env.context_dim);
        for (int l = 0; l < layers; ++l) spec.layer_widths.push_back(hidden);
        spec.layer_widths.push_back(env.arm_count);
        const std::string act = a.get("activation", "relu");
        if (act == "relu")
            spec.activation = Activation::Relu;
        else if (act == "tanh")
            spec.activation = Activation::Tanh;
        else
            throw ConfigError("agent '" + a.name + "': unknown activation '" + act + "'");
    } else {
        throw ConfigError("agent '" + a.name + "': unknown model '" + model + "'");
    }
    return spec;
}

inline TrainConfig agent_train_config(const ConfigSection& a) {
    TrainConfig t;
    t.step_size = a.get_num("train_step_size", 0.05);
    t.steps = static_cast<int>(a.get_int("train_steps", 20));
    t.batch_size = static_cast<int>(a.get_int("train_batch", 32));
    t.ridge_weight = a.get_num("train_ridge", 0.0);
    const std::string anchor = a.get("train_anchor", "none");
    if (anchor == "none")
        t.anchor = TrainConfig::Anchor::None;
    else if (anchor == "init")
        t.anchor = TrainConfig::Anchor::InitPoint;
    else
        throw ConfigError("agent '" + a.name + "': unknown train_anchor '" + anchor + "'");
    return t;
}

}  // namespace config_detail

inline AgentFactory build_agent_factory(const ConfigSection& a, const EnvSpec& env) {
    const std::string kind = a.require("kind");
    if (kind == "ucb1") {
        const int arms = env.arm_count;
        return [arms](AgentSeeds) -> std::unique_ptr<Agent> {
            return std::make_unique<RofuUcb1Agent>(arms);
        };
    }
    if (kind == "linucb" || kind == "kernelucb") {
        ConfigSection section = a;
        if (kind == "kernelucb" && !section.has("model")) section.entries.emplace_back("model", "kernel");
        if (kind == "linucb" && !section.has("model")) section.entries.emplace_back("model", "linear");
        section.lines["model"] = 0;
        const ModelSpec spec = config_detail::agent_model_spec(section, env);
        return [spec](AgentSeeds) -> std::unique_ptr<Agent> {
            return std::make_unique<RofuLinUcbAgent>(Model(spec));
        };
    }
    if (kind == "rofu") {
        const ModelSpec spec = config_detail::agent_model_spec(a, env);
        RofuConfig cfg;
        cfg.eta = a.get_num("eta", 1.0);
        cfg.g_exponent = a.get_num("g_exponent", 0.5);
        cfg.ascent_steps = static_cast<int>(a.get_int("ascent_steps", 5));
        cfg.ascent_step_size = a.get_num("ascent_step_size", 1e-3);
        const std::string batch = a.get("ascent_batch", "auto");
        if (batch == "auto")
            cfg.ascent_batch = RofuConfig::kBatchAuto;
        else if (batch == "full")
            cfg.ascent_batch = RofuConfig::kBatchFull;
        else
            cfg.ascent_batch = static_cast<int>(a.get_int("ascent_batch", RofuConfig::kBatchAuto));
        const std::string reg = a.get("reg", "scaled_mse");
        if (reg == "scaled_mse")
            cfg.reg.kind = RegSpec::Kind::ScaledMse;
        else if (reg == "ridge_scaled_mse")
            cfg.reg.kind = RegSpec::Kind::RidgePlusScaledMse;
        else if (reg == "anchored")
            cfg.reg.kind = RegSpec::Kind::AnchoredRidgePlusSse;
        else
            throw ConfigError("agent '" + a.name + "': unknown reg '" + reg + "'");
        cfg.reg.anchor_weight = a.get_num("anchor_weight", 0.0);
        const TrainConfig tcfg = config_detail::agent_train_config(a);
        return [spec, cfg, tcfg](AgentSeeds seeds) -> std::unique_ptr<Agent> {
            return std::make_unique<RofuAscentAgent>(Model(spec), cfg, tcfg, seeds);
        };
    }
    if (kind == "rofu_ntk") {
        const ModelSpec spec = config_detail::agent_model_spec(a, env);
        const double lambda = a.get_num("lambda", 1.0);
        const double gamma = a.get_num("gamma", 0.1);
        const int width_m = static_cast<int>(a.get_int("width_m", a.get_int("hidden", 24)));
        TrainConfig tcfg = config_detail::agent_train_config(a);
        if (!a.has("train_ridge")) tcfg.ridge_weight = lambda * width_m;
        if (!a.has("train_anchor")) tcfg.anchor = TrainConfig::Anchor::InitPoint;
        return [spec, lambda, gamma, width_m, tcfg](AgentSeeds seeds) -> std::unique_ptr<Agent> {
            return std::make_unique<RofuNtkAgent>(Model(spec), lambda, gamma, width_m, tcfg, seeds);
        };
    }
    if (kind == "epsilon_greedy" || kind == "greedy") {
        const ModelSpec spec = config_detail::agent_model_spec(a, env);
        BaselineConfig cfg;
        cfg.kind = kind == "greedy" ? BaselineConfig::Kind::Greedy : BaselineConfig::Kind::EpsilonGreedy;
        cfg.epsilon = a.get_num("epsilon", 0.05);
        if (cfg.epsilon < 0.0 || cfg.epsilon > 1.0)
            throw ConfigError("agent '" + a.name + "': epsilon outside [0,1]");
        cfg.train = config_detail::agent_train_config(a);
        return [spec, cfg](AgentSeeds seeds) -> std::unique_ptr<Agent> {
            return std::make_unique<EpsilonGreedyAgent>(Model(spec), cfg, seeds);
        };
    }
    if (kind == "neural_ucb_full" || kind == "neural_ucb_diag") {
        const ModelSpec spec = config_detail::agent_model_spec(a, env);
        BaselineConfig cfg;
        cfg.kind = kind == "neural_ucb_full" ? BaselineConfig::Kind::NeuralUcbFull
                                             : BaselineConfig::Kind::NeuralUcbDiag;
        cfg.gamma = a.get_num("gamma", 0.1);
        cfg.lambda = a.get_num("lambda", 1.0);
        cfg.train = config_detail::agent_train_config(a);
        const int width_m = static_cast<int>(a.get_int("width_m", a.get_int("hidden", 24)));
        return [spec, cfg, width_m](AgentSeeds seeds) -> std::unique_ptr<Agent> {
            return std::make_unique<NeuralUcbAgent>(Model(spec), cfg, width_m, seeds);
        };
    }
    throw ConfigError("agent '" + a.name + "': unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Bundled presets, one per environment family.

inline std::optional<std::string> preset_text(const std::string& name) {
    if (name == "mab10")
        return std::string(
            "# Ten-arm Gaussian bandit, staircase means with 0.1 gaps\n"
            "[env]\n"
            "kind = mab\n"
            "means = 1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1\n"
            "noise_std = 0.1\n"
            "[run]\n"
            "horizon = 2000\n"
            "seeds = 8\n"
            "output = out/mab10\n"
            "[agent ucb1_rofu]\n"
            "kind = ucb1\n"
            "[agent greedy]\n"
            "kind = greedy\n"
            "train_steps = 10\n"
            "train_step_size = 0.5\n");
    if (name == "linear_d6")
        return std::string(
            "# Linear contextual bandit, 6-dim contexts, 4 arms\n"
            "[env]\n"
            "kind = linear\n"
            "arms = 4\n"
            "context_dim = 6\n"
            "noise_std = 0.1\n"
            "gen_seed = 7\n"
            "[run]\n"
            "horizon = 2000\n"
            "seeds = 8\n"
            "output = out/linear_d6\n"
            "[agent linucb_rofu]\n"
            "kind = linucb\n"
            "[agent eps_greedy]\n"
            "kind = epsilon_greedy\n"
            "model = linear\n"
            "epsilon = 0.05\n"
            "train_steps = 20\n"
            "train_step_size = 0.3\n");
    if (name == "kernel_rbf")
        return std::string(
            "# RBF kernel bandit via random Fourier features\n"
            "[env]\n"
            "kind = kernel\n"
            "arms = 4\n"
            "context_dim = 4\n"
            "noise_std = 0.1\n"
            "gen_seed = 11\n"
            "rff_dim = 128\n"
            "rff_bandwidth = 1.0\n"
            "[run]\n"
            "horizon = 1000\n"
            "seeds = 8\n"
            "output = out/kernel_rbf\n"
            "[agent kernelucb_rofu]\n"
            "kind = kernelucb\n"
            "rff_dim = 128\n"
            "rff_bandwidth = 1.0\n"
            "rff_seed = 11\n"
            "[agent eps_greedy]\n"
            "kind = epsilon_greedy\n"
            "model = kernel\n"
            "rff_dim = 128\n"
            "rff_bandwidth = 1.0\n"
            "rff_seed = 11\n"
            "epsilon = 0.05\n"
            "train_steps = 20\n"
            "train_step_size = 0.3\n");
    if (name == "mlp_table2")
        return std::string(
            "# MLP simulator bandit: 10-dim Gaussian contexts, 10 arms,\n"
            "# 2-layer random generator, reward noise N(0, 0.05).\n"
            "# gen_seed 3 is a hard instance: mean best-vs-second gap ~0.23\n"
            "# and the best arm depends on the context in ~85% of rounds.\n"
            "[env]\n"
            "kind = mlp_sim\n"
            "context_dim = 10\n"
            "arms = 10\n"
            "gen_hidden = 32\n"
            "gen_hidden_layers = 1\n"
            "noise_std = 0.05\n"
            "gen_seed = 3\n"
            "[run]\n"
            "horizon = 5000\n"
            "seeds = 16\n"
            "output = out/mlp_table2\n"
            "[agent rofu_m1]\n"
            "kind = rofu\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "eta = 0.06\n"
            "ascent_steps = 1\n"
            "ascent_step_size = 0.0006\n"
            "ascent_batch = 8\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n"
            "[agent rofu_m5]\n"
            "kind = rofu\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "eta = 0.06\n"
            "ascent_steps = 5\n"
            "ascent_step_size = 0.0006\n"
            "ascent_batch = 8\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n"
            "[agent rofu_m10]\n"
            "kind = rofu\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "eta = 0.06\n"
            "ascent_steps = 10\n"
            "ascent_step_size = 0.0006\n"
            "ascent_batch = 8\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n"
            "[agent eps_greedy]\n"
            "kind = epsilon_greedy\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "epsilon = 0.05\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n");
    if (name == "mlp_sim_deep")
        return std::string(
            "# Deeper MLP simulator: 4-layer generator, uniform contexts\n"
            "[env]\n"
            "kind = mlp_sim\n"
            "context_dim = 20\n"
            "arms = 10\n"
            "gen_hidden = 32\n"
            "gen_hidden_layers = 3\n"
            "noise_std = 0.5\n"
            "context_law = uniform\n"
            "gen_seed = 17\n"
            "[run]\n"
            "horizon = 2000\n"
            "seeds = 8\n"
            "output = out/mlp_sim_deep\n"
            "[agent rofu_m5]\n"
            "kind = rofu\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "eta = 0.06\n"
            "ascent_steps = 5\n"
            "ascent_step_size = 0.0006\n"
            "ascent_batch = 8\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n"
            "[agent eps_greedy]\n"
            "kind = epsilon_greedy\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "epsilon = 0.05\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n");
    if (name == "dataset_csv")
        return std::string(
            "# Classification-dataset bandit; point `dataset` at your CSV\n"
            "# (header row, integer `label` column, numeric features).\n"
            "[env]\n"
            "kind = dataset\n"
            "dataset = bandit_data.csv\n"
            "label_column = label\n"
            "gen_seed = 3\n"
            "[run]\n"
            "horizon = 500\n"
            "seeds = 4\n"
            "output = out/dataset_csv\n"
            "[agent rofu_m5]\n"
            "kind = rofu\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "eta = 0.06\n"
            "ascent_steps = 5\n"
            "ascent_step_size = 0.0006\n"
            "ascent_batch = 8\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n"
            "[agent eps_greedy]\n"
            "kind = epsilon_greedy\n"
            "hidden = 20\n"
            "hidden_layers = 2\n"
            "epsilon = 0.05\n"
            "train_steps = 20\n"
            "train_step_size = 0.05\n"
            "train_batch = 24\n");
    return std::nullopt;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"mab10",      "linear_d6",    "kernel_rbf",
                                                "mlp_table2", "mlp_sim_deep", "dataset_csv"};
    return names;
}

}  // namespace rofu
