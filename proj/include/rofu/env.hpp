#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rofu/errors.hpp"
#include "rofu/model.hpp"
#include "rofu/rng.hpp"

namespace rofu {

// Bandit environments. The (context, noise) streams are pure functions of
// (spec, run seed, round, arm): contexts come from a per-round keyed stream
// and reward noise is counter-keyed by (seed, round, arm), so agent decisions
// can never perturb environment randomness. Two agents on the same
// (spec, seed) therefore face identical worlds.

enum class ContextLaw { Gaussian, Uniform, DatasetOrder };

struct DatasetRows {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    int classes = 0;
    int feature_dim = 0;
};

struct EnvSpec {
    enum class Kind { Mab, Linear, Kernel, MlpSim, Dataset };

    Kind kind = Kind::Mab;
    int arm_count = 2;
    int context_dim = 0;
    double noise_std = 0.0;
    ContextLaw law = ContextLaw::Gaussian;

    std::vector<double> mab_means;  // mab
    ModelSpec gen_model;            // linear / kernel / mlp_sim generator
    ParamVector gen_theta;          // explicit theta*; empty = drawn from gen_seed
    std::uint64_t gen_seed = 0;     // generator parameters, dataset shuffle

    std::string dataset_path;
    std::string label_column = "label";
    std::shared_ptr<const DatasetRows> dataset;

    void validate() const {
        if (arm_count < 2) throw ConfigError("EnvSpec: at least two arms required");
        if (!std::isfinite(noise_std) || noise_std < 0.0) throw ConfigError("EnvSpec: bad noise_std");
        if (kind == Kind::Mab && static_cast<int>(mab_means.size()) != arm_count)
            throw ConfigError("EnvSpec: mab needs one mean per arm");
        if (kind == Kind::Dataset && !dataset) throw ConfigError("EnvSpec: dataset rows not loaded");
    }

    std::string fingerprint() const {
        std::uint64_t h = hash_label("env");
        h = mix(h, static_cast<std::uint64_t>(kind));
        h = mix(h, static_cast<std::uint64_t>(arm_count));
        h = mix(h, static_cast<std::uint64_t>(context_dim));
        h = mix(h, static_cast<std::uint64_t>(law));
        h = mix(h, gen_seed);
        auto mix_double = [&h](double v) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, 8);
            h = mix(h, bits);
        };
        mix_double(noise_std);
        for (double v : mab_means) mix_double(v);
        for (double v : gen_theta) mix_double(v);
        for (int w : gen_model.layer_widths) h = mix(h, static_cast<std::uint64_t>(w));
        h = mix(h, hash_label(dataset_path));
        char buf[32];
        std::snprintf(buf, sizeof buf, "env-%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

// ---------------------------------------------------------------------------
// CSV ingestion for classification-dataset bandits: UTF-8, header row, one
// integer label column, remaining columns numeric features, comma delimiter.

inline DatasetRows load_csv_dataset(const std::string& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw IoError("load_csv_dataset: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("load_csv_dataset: missing header row in " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    int label_idx = -1;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == label_column) label_idx = static_cast<int>(c);
    if (label_idx < 0) throw ParseError("load_csv_dataset: no column named '" + label_column + "' in " + path);

    DatasetRows rows;
    rows.feature_dim = static_cast<int>(header.size()) - 1;
    if (rows.feature_dim < 1) throw ParseError("load_csv_dataset: no feature columns in " + path);

    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> feats;
        feats.reserve(rows.feature_dim);
        int label = -1;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != cell.size() || cell.empty())
                throw ParseError("load_csv_dataset: non-numeric cell at row " + std::to_string(line_no) +
                                 ", column " + std::to_string(col + 1) + " ('" + header[col] + "')");
            if (col == label_idx) {
                const double rounded = std::nearbyint(v);
                if (v != rounded || rounded < 0.0)
                    throw LabelOutOfRangeError("load_csv_dataset: label must be a nonnegative integer at row " +
                                               std::to_string(line_no));
                label = static_cast<int>(rounded);
            } else {
                feats.push_back(v);
            }
            ++col;
        }
        if (col != static_cast<int>(header.size()))
            throw ParseError("load_csv_dataset: row " + std::to_string(line_no) + " has " + std::to_string(col) +
                             " cells, expected " + std::to_string(header.size()));
        rows.features.push_back(std::move(feats));
        rows.labels.push_back(label);
    }
    if (rows.features.empty()) throw ParseError("load_csv_dataset: no data rows in " + path);
    rows.classes = 1 + *std::max_element(rows.labels.begin(), rows.labels.end());

    // Standardize each feature column over the whole file (constant columns
    // are centered and left unscaled).
    for (int j = 0; j < rows.feature_dim; ++j) {
        double mean = 0.0;
        for (const auto& f : rows.features) mean += f[j];
        mean /= static_cast<double>(rows.features.size());
        double var = 0.0;
        for (const auto& f : rows.features) var += (f[j] - mean) * (f[j] - mean);
        var /= static_cast<double>(rows.features.size());
        const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
        for (auto& f : rows.features) f[j] = (f[j] - mean) / sd;
    }
    return rows;
}

// Dataset-to-bandit construction: arm = predicted class, reward 1 on the true
// label and 0 otherwise. Rows are shuffled exactly once by `seed`.
inline EnvSpec load_dataset_bandit(const std::string& path, const std::string& label_column,
                                   std::uint64_t seed) {
    DatasetRows rows = load_csv_dataset(path, label_column);
    const std::size_t n = rows.features.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    RngStream rng(derive(seed, "dataset-shuffle"));
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_below(i)]);
    DatasetRows shuffled;
    shuffled.classes = rows.classes;
    shuffled.feature_dim = rows.feature_dim;
    shuffled.features.reserve(n);
    shuffled.labels.reserve(n);
    for (std::size_t i : perm) {
        shuffled.features.push_back(std::move(rows.features[i]));
        shuffled.labels.push_back(rows.labels[i]);
    }

    EnvSpec spec;
    spec.kind = EnvSpec::Kind::Dataset;
    spec.arm_count = std::max(2, shuffled.classes);
    spec.context_dim = shuffled.feature_dim;
    spec.noise_std = 0.0;
    spec.law = ContextLaw::DatasetOrder;
    spec.gen_seed = seed;
    spec.dataset_path = path;
    spec.label_column = label_column;
    spec.dataset = std::make_shared<const DatasetRows>(std::move(shuffled));
    return spec;
}

// The Table-2-style MLP simulator: 10-dim Gaussian contexts, 10 arms, a
// 2-layer random MLP generator and N(0, 0.05) reward noise.
inline EnvSpec make_mlp_sim(std::uint64_t gen_seed, int context_dim = 10, int arm_count = 10,
                            int hidden = 32, int hidden_layers = 1, double noise_std = 0.05,
                            ContextLaw law = ContextLaw::Gaussian) {
    EnvSpec spec;
    spec.kind = EnvSpec::Kind::MlpSim;
    spec.arm_count = arm_count;
    spec.context_dim = context_dim;
    spec.noise_std = noise_std;
    spec.law = law;
    spec.gen_seed = gen_seed;
    spec.gen_model.kind = ModelSpec::Kind::Mlp;
    spec.gen_model.context_dim = context_dim;
    spec.gen_model.arm_count = arm_count;
    spec.gen_model.layer_widths.push_back(context_dim);
    for (int l = 0; l < hidden_layers; ++l) spec.gen_model.layer_widths.push_back(hidden);
    spec.gen_model.layer_widths.push_back(arm_count);
    spec.gen_model.activation = Activation::Relu;
    return spec;
}

// ---------------------------------------------------------------------------

class Env {
  public:
    Env(EnvSpec spec, std::uint64_t run_seed) : spec_(std::move(spec)), seed_(run_seed) {
        spec_.validate();
        switch (spec_.kind) {
            case EnvSpec::Kind::Mab:
                break;
            case EnvSpec::Kind::Linear:
            case EnvSpec::Kind::Kernel:
            case EnvSpec::Kind::MlpSim: {
                gen_ = Model(spec_.gen_model);
                if (!spec_.gen_theta.empty()) {
                    if (static_cast<int>(spec_.gen_theta.size()) != gen_.param_count())
                        throw ConfigError("Env: gen_theta size mismatch");
                    theta_star_ = spec_.gen_theta;
                } else if (spec_.gen_model.is_mlp()) {
                    theta_star_ = init_params(gen_, derive(spec_.gen_seed, "env-theta"));
                } else {
                    theta_star_.resize(static_cast<std::size_t>(gen_.param_count()));
                    RngStream rng(derive(spec_.gen_seed, "env-theta"));
                    const double scale =
                        spec_.kind == EnvSpec::Kind::Linear
                            ? 1.0 / std::sqrt(static_cast<double>(std::max(1, spec_.context_dim)))
                            : 1.0;
                    for (double& v : theta_star_) v = scale * rng.next_gaussian();
                }
                ws_ = gen_.make_workspace();
                break;
            }
            case EnvSpec::Kind::Dataset:
                break;
        }
    }

    const EnvSpec& spec() const { return spec_; }
    int arm_count() const { return spec_.arm_count; }
    int context_dim() const { return spec_.context_dim; }
    const ParamVector& theta_star() const { return theta_star_; }
    const Model& generator() const { return gen_; }
    std::uint64_t seed() const { return seed_; }

    long rounds_available() const {
        if (spec_.kind == EnvSpec::Kind::Dataset) return static_cast<long>(spec_.dataset->features.size());
        return std::numeric_limits<long>::max();
    }

    // Context for 1-based round t.
    std::vector<double> context(long round) const {
        if (spec_.kind == EnvSpec::Kind::Dataset) {
            const auto& rows = *spec_.dataset;
            if (round < 1 || round > static_cast<long>(rows.features.size()))
                throw ExhaustedError("env: dataset exhausted at round " + std::to_string(round));
            return rows.features[static_cast<std::size_t>(round - 1)];
        }
        std::vector<double> x(static_cast<std::size_t>(spec_.context_dim));
        RngStream rng(derive(seed_, "env-ctx", static_cast<std::uint64_t>(round)));
        if (spec_.law == ContextLaw::Gaussian) {
            for (double& v : x) v = rng.next_gaussian();
        } else {
            for (double& v : x) v = rng.next_uniform(-1.0, 1.0);
        }
        return x;
    }

    // True mean reward; deterministic.
    double mean(long round, std::span<const double> x, int arm) const {
        if (arm < 0 || arm >= spec_.arm_count) throw DimensionError("env: arm out of range");
        switch (spec_.kind) {
            case EnvSpec::Kind::Mab:
                return spec_.mab_means[static_cast<std::size_t>(arm)];
            case EnvSpec::Kind::Dataset:
                return spec_.dataset->labels[static_cast<std::size_t>(round - 1)] == arm ? 1.0 : 0.0;
            default:
                return gen_.forward(theta_star_, x, arm, ws_);
        }
    }

    double best_mean(long round, std::span<const double> x) const {
        double best = mean(round, x, 0);
        for (int a = 1; a < spec_.arm_count; ++a) best = std::max(best, mean(round, x, a));
        return best;
    }

    // Sampled reward: mean plus counter-keyed Gaussian noise.
    double reward(long round, std::span<const double> x, int arm) const {
        double r = mean(round, x, arm);
        if (spec_.noise_std > 0.0)
            r += spec_.noise_std * keyed_gaussian(seed_, "env-noise", static_cast<std::uint64_t>(round),
                                                  static_cast<std::uint64_t>(arm));
        return r;
    }

  private:
    EnvSpec spec_;
    std::uint64_t seed_ = 0;
    Model gen_;
    ParamVector theta_star_;
    mutable ModelWorkspace ws_;
};

}  // namespace rofu
