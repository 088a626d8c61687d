#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rofu/errors.hpp"

namespace rofu {

// Small dense kernel backing every closed-form UCB: PSD solves, incremental
// rank-1 inverse updates and quadratic forms. All arithmetic is 64-bit.

class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(static_cast<std::size_t>(rows) * cols, fill) {}

    static Matrix identity(int n, double scale = 1.0) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = scale;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * cols_ + j]; }

    double* row(int i) { return v_.data() + static_cast<std::size_t>(i) * cols_; }
    const double* row(int i) const { return v_.data() + static_cast<std::size_t>(i) * cols_; }

    const std::vector<double>& data() const { return v_; }

    void add_outer(std::span<const double> u, double scale = 1.0) {
        for (int i = 0; i < rows_; ++i) {
            const double ui = scale * u[static_cast<std::size_t>(i)];
            double* r = row(i);
            for (int j = 0; j < cols_; ++j) r[j] += ui * u[static_cast<std::size_t>(j)];
        }
    }

    std::vector<double> mul(std::span<const double> x) const {
        std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
        for (int i = 0; i < rows_; ++i) {
            const double* r = row(i);
            double acc = 0.0;
            for (int j = 0; j < cols_; ++j) acc += r[j] * x[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = acc;
        }
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    double frobenius_distance(const Matrix& other) const {
        double s = 0.0;
        for (std::size_t k = 0; k < v_.size(); ++k) {
            const double d = v_[k] - other.v_[k];
            s += d * d;
        }
        return std::sqrt(s);
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> v_;
};

namespace detail {

// Lower-triangular Cholesky factor of a symmetric PSD matrix.
// Throws NotPsdError when a pivot drops to or below `pivot_tol`.
inline Matrix cholesky(const Matrix& a, double pivot_tol = 1e-12) {
    const int n = a.rows();
    Matrix l(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= pivot_tol) throw NotPsdError("cholesky: pivot " + std::to_string(s) + " at index " + std::to_string(i));
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

inline void check_square_symmetric(const Matrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("psd_solve: matrix not square");
    const double scale = 1.0 + a.max_abs();
    for (int i = 0; i < a.rows(); ++i)
        for (int j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-9 * scale)
                throw DimensionError("psd_solve: matrix not symmetric within tolerance");
}

inline std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
    const int n = l.rows();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = b[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= l(i, k) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = y[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < n; ++k) s -= l(k, i) * y[static_cast<std::size_t>(k)];
        y[static_cast<std::size_t>(i)] = s / l(i, i);
    }
    return y;
}

}  // namespace detail

// Solve a x = b for symmetric PSD a via Cholesky (never cofactor inversion).
inline std::vector<double> psd_solve(const Matrix& a, std::span<const double> b) {
    detail::check_square_symmetric(a);
    if (a.rows() != static_cast<int>(b.size())) throw DimensionError("psd_solve: size mismatch");
    const Matrix l = detail::cholesky(a);
    return detail::cholesky_solve(l, b);
}

// Running inverse of Z = lambda*I + sum of rank-1 outer products.
//
// The inverse is maintained by the Sherman-Morrison identity and the raw Z is
// kept alongside so the state can re-factorize from scratch every
// `kRebuildEvery` updates, bounding floating-point drift. Single writer;
// quad_form on an immutable snapshot is safe to call concurrently.
class PsdInverseState {
  public:
    static constexpr int kRebuildEvery = 512;

    PsdInverseState() = default;

    PsdInverseState(int dim, double lambda)
        : dim_(dim),
          zmat_(Matrix::identity(dim, lambda)),
          inv_(Matrix::identity(dim, 1.0 / lambda)),
          log_det_(dim * std::log(lambda)) {
        if (lambda <= 0.0) throw NotPsdError("PsdInverseState: lambda must be positive");
    }

    explicit PsdInverseState(Matrix z) : dim_(z.rows()), zmat_(std::move(z)) {
        refactorize();
    }

    int dim() const { return dim_; }
    const Matrix& inverse() const { return inv_; }
    const Matrix& z() const { return zmat_; }
    double log_det() const { return log_det_; }

    // Z <- Z + u u'; inverse via Z^-1 - (Z^-1 u u' Z^-1)/(1 + u' Z^-1 u).
    void rank1_update(std::span<const double> u) {
        if (static_cast<int>(u.size()) != dim_) throw DimensionError("rank1_update: size mismatch");
        std::vector<double> w = inv_.mul(u);
        double denom = 1.0;
        for (int i = 0; i < dim_; ++i) denom += u[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        if (denom <= 1e-12)
            throw DegenerateUpdateError("rank1_update: 1 + u'Z^-1 u = " + std::to_string(denom));
        const double inv_denom = 1.0 / denom;
        for (int i = 0; i < dim_; ++i) {
            const double wi = w[static_cast<std::size_t>(i)] * inv_denom;
            double* r = inv_.row(i);
            for (int j = 0; j < dim_; ++j) r[j] -= wi * w[static_cast<std::size_t>(j)];
        }
        zmat_.add_outer(u);
        log_det_ += std::log(denom);
        if (++updates_since_rebuild_ >= kRebuildEvery) refactorize();
    }

    // max(0, v' Z^-1 v); nonnegative by construction for PSD Z.
    double quad_form(std::span<const double> v) const {
        if (static_cast<int>(v.size()) != dim_) throw DimensionError("quad_form: size mismatch");
        double q = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double* r = inv_.row(i);
            double acc = 0.0;
            for (int j = 0; j < dim_; ++j) acc += r[j] * v[static_cast<std::size_t>(j)];
            q += v[static_cast<std::size_t>(i)] * acc;
        }
        return std::max(0.0, q);
    }

    // Exact solve against the accumulated Z (not the running inverse).
    std::vector<double> solve(std::span<const double> b) const { return psd_solve(zmat_, b); }

  private:
    void refactorize() {
        const Matrix l = detail::cholesky(zmat_);
        log_det_ = 0.0;
        for (int i = 0; i < dim_; ++i) log_det_ += 2.0 * std::log(l(i, i));
        // Invert via n solves against unit vectors.
        inv_ = Matrix(dim_, dim_);
        std::vector<double> e(static_cast<std::size_t>(dim_), 0.0);
        for (int j = 0; j < dim_; ++j) {
            e[static_cast<std::size_t>(j)] = 1.0;
            std::vector<double> col = detail::cholesky_solve(l, e);
            for (int i = 0; i < dim_; ++i) inv_(i, j) = col[static_cast<std::size_t>(i)];
            e[static_cast<std::size_t>(j)] = 0.0;
        }
        // Symmetrize to kill solve round-off.
        for (int i = 0; i < dim_; ++i)
            for (int j = i + 1; j < dim_; ++j) {
                const double s = 0.5 * (inv_(i, j) + inv_(j, i));
                inv_(i, j) = s;
                inv_(j, i) = s;
            }
        updates_since_rebuild_ = 0;
    }

    int dim_ = 0;
    Matrix zmat_;
    Matrix inv_;
    double log_det_ = 0.0;
    int updates_since_rebuild_ = 0;
};

// Value-returning form of PsdInverseState::rank1_update.
inline PsdInverseState rank1_inverse_update(PsdInverseState state, std::span<const double> u) {
    state.rank1_update(u);
    return state;
}

inline double quad_form(const PsdInverseState& state, std::span<const double> v) {
    return state.quad_form(v);
}

}  // namespace rofu
