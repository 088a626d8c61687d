#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rofu/errors.hpp"
#include "rofu/linalg.hpp"
#include "rofu/rng.hpp"

namespace rofu {

// Feature construction phi(x, a) for linear and kernel-feature models.
//
//   disjoint_onehot  x copied into block a of a (d * arms)-vector (the
//                    standard LinUCB lift)
//   shared           [x ; onehot(a)], shared weights plus per-arm intercepts
//   random_fourier   per-arm block of cosine features approximating an RBF
//                    kernel on x, frequencies drawn once from `seed`
struct FeatureMapSpec {
    enum class Kind { DisjointOnehot, Shared, RandomFourier };
    Kind kind = Kind::DisjointOnehot;
    int output_dim = 0;  // total phi dimension; 0 means derived from context/arms
    double bandwidth = 1.0;
    std::uint64_t seed = 0;
};

class FeatureMap {
  public:
    FeatureMap() = default;

    FeatureMap(const FeatureMapSpec& spec, int context_dim, int arm_count)
        : spec_(spec), context_dim_(context_dim), arm_count_(arm_count) {
        switch (spec.kind) {
            case FeatureMapSpec::Kind::DisjointOnehot:
                dim_ = context_dim * arm_count;
                break;
            case FeatureMapSpec::Kind::Shared:
                dim_ = context_dim + arm_count;
                break;
            case FeatureMapSpec::Kind::RandomFourier: {
                if (spec.output_dim <= 0 || spec.output_dim % arm_count != 0)
                    throw DimensionError("random_fourier: output_dim must be a positive multiple of arm_count");
                if (spec.bandwidth <= 0.0) throw DimensionError("random_fourier: bandwidth must be positive");
                dim_ = spec.output_dim;
                block_ = spec.output_dim / arm_count;
                freqs_ = Matrix(block_, context_dim);
                offsets_.resize(block_);
                RngStream rng(derive(spec.seed, "rff"));
                for (int i = 0; i < block_; ++i) {
                    for (int j = 0; j < context_dim; ++j)
                        freqs_(i, j) = rng.next_gaussian() / spec.bandwidth;
                    offsets_[i] = rng.next_uniform(0.0, 6.283185307179586477);
                }
                break;
            }
        }
        if (spec.output_dim > 0 && spec.output_dim != dim_)
            throw DimensionError("feature map: output_dim inconsistent with context_dim/arm_count");
        if (dim_ < 1) throw DimensionError("feature map: empty feature vector");
    }

    int dim() const { return dim_; }

    void compute(std::span<const double> x, int arm, std::span<double> out) const {
        if (static_cast<int>(x.size()) != context_dim_) throw DimensionError("feature map: context size mismatch");
        if (arm < 0 || arm >= arm_count_) throw DimensionError("feature map: arm out of range");
        std::fill(out.begin(), out.end(), 0.0);
        switch (spec_.kind) {
            case FeatureMapSpec::Kind::DisjointOnehot:
                for (int j = 0; j < context_dim_; ++j) out[arm * context_dim_ + j] = x[j];
                break;
            case FeatureMapSpec::Kind::Shared:
                for (int j = 0; j < context_dim_; ++j) out[j] = x[j];
                out[context_dim_ + arm] = 1.0;
                break;
            case FeatureMapSpec::Kind::RandomFourier: {
                const double scale = std::sqrt(2.0 / block_);
                for (int i = 0; i < block_; ++i) {
                    const double* w = freqs_.row(i);
                    double t = offsets_[i];
                    for (int j = 0; j < context_dim_; ++j) t += w[j] * x[j];
                    out[arm * block_ + i] = scale * std::cos(t);
                }
                break;
            }
        }
    }

    std::vector<double> operator()(std::span<const double> x, int arm) const {
        std::vector<double> out(dim_);
        compute(x, arm, out);
        return out;
    }

  private:
    FeatureMapSpec spec_;
    int context_dim_ = 0;
    int arm_count_ = 0;
    int dim_ = 0;
    int block_ = 0;
    Matrix freqs_;
    std::vector<double> offsets_;
};

}  // namespace rofu
