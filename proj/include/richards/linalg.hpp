/**
 * @file linalg.hpp
 * @brief Row-compressed sparse matrices and linear solvers.
 *
 * The default path is BiCGStab right-preconditioned with ILU(0). When the
 * Krylov iteration breaks down or stalls, systems with n <= 2000 are
 * handed to a dense partial-pivoting LU and larger ones to a sparse LU.
 * The reported residual is always recomputed from the returned solution.
 */

#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace richards {

using Vector = std::vector<double>;

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Square CSR matrix with sorted column indices and a structurally present
/// diagonal in every row.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Duplicate entries are summed. Missing diagonal entries are inserted
    /// as explicit zeros.
    static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet> entries)
    {
        for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 0.0});
        std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        SparseMatrix m;
        m.n_ = n;
        m.row_ptr_.assign(n + 1, 0);
        for (std::size_t k = 0; k < entries.size();) {
            const Triplet& t = entries[k];
            if (t.row >= n || t.col >= n) throw std::out_of_range("triplet index outside matrix");
            double sum = 0.0;
            std::size_t j = k;
            while (j < entries.size() && entries[j].row == t.row && entries[j].col == t.col)
                sum += entries[j++].value;
            m.col_.push_back(t.col);
            m.val_.push_back(sum);
            ++m.row_ptr_[t.row + 1];
            k = j;
        }
        for (std::size_t i = 0; i < n; ++i) m.row_ptr_[i + 1] += m.row_ptr_[i];
        return m;
    }

    std::size_t size() const { return n_; }
    std::size_t nonzeros() const { return val_.size(); }

    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::size_t> col() const { return col_; }
    std::span<const double> values() const { return val_; }
    std::span<double> values() { return val_; }

    /// Entry (i, j), zero if not stored.
    double operator()(std::size_t i, std::size_t j) const
    {
        auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
        auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
        auto it = std::lower_bound(first, last, j);
        if (it == last || *it != j) return 0.0;
        return val_[static_cast<std::size_t>(it - col_.begin())];
    }

    std::size_t diagonal_index(std::size_t i) const
    {
        auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
        auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
        return static_cast<std::size_t>(std::lower_bound(first, last, i) - col_.begin());
    }

    void multiply(std::span<const double> x, std::span<double> y) const
    {
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += val_[k] * x[col_[k]];
            y[i] = s;
        }
    }

    Vector operator*(std::span<const double> x) const
    {
        Vector y(n_);
        multiply(x, y);
        return y;
    }

    bool same_pattern(const SparseMatrix& o) const
    {
        return n_ == o.n_ && row_ptr_ == o.row_ptr_ && col_ == o.col_;
    }

    bool operator==(const SparseMatrix& o) const { return same_pattern(o) && val_ == o.val_; }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_;
    std::vector<double> val_;
};

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a)
{
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

/// ||b - A x||_2
inline double residual_norm(const SparseMatrix& A, std::span<const double> x, std::span<const double> b)
{
    Vector r = A * x;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
}

enum class LinearMethod { None, BiCGStab, DenseLU, SparseLU };

inline const char* to_string(LinearMethod m)
{
    switch (m) {
    case LinearMethod::BiCGStab: return "bicgstab";
    case LinearMethod::DenseLU: return "dense-lu";
    case LinearMethod::SparseLU: return "sparse-lu";
    default: return "none";
    }
}

struct LinearSolveReport {
    std::size_t iterations = 0;
    /// ||A x - b||_2 / ||b||_2, recomputed after the solve
    double relative_residual = 0.0;
    bool breakdown = false;
    bool converged = false;
    LinearMethod method = LinearMethod::None;

    bool operator==(const LinearSolveReport&) const = default;
};

struct LinearSolverOptions {
    double tol = 1e-12;
    std::size_t maxit = 2000;
    bool precondition = true;
    /// Systems up to this size fall back to dense LU.
    std::size_t dense_limit = 2000;
    bool allow_fallback = true;
};

/// Zero-fill incomplete LU of a CSR matrix, stored in the matrix pattern.
class Ilu0 {
public:
    explicit Ilu0(const SparseMatrix& A) : A_(A)
    {
        const std::size_t n = A.size();
        auto rp = A_.row_ptr();
        auto cl = A_.col();
        auto v = A_.values();
        diag_.resize(n);
        std::vector<std::ptrdiff_t> pos(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) pos[cl[k]] = static_cast<std::ptrdiff_t>(k);
            for (std::size_t k = rp[i]; k < rp[i + 1] && cl[k] < i; ++k) {
                const std::size_t j = cl[k];
                v[k] /= v[diag_[j]];
                for (std::size_t kk = diag_[j] + 1; kk < rp[j + 1]; ++kk)
                    if (pos[cl[kk]] >= 0) v[static_cast<std::size_t>(pos[cl[kk]])] -= v[k] * v[kk];
            }
            diag_[i] = A_.diagonal_index(i);
            for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) pos[cl[k]] = -1;
            if (v[diag_[i]] == 0.0 || !std::isfinite(v[diag_[i]])) ok_ = false;
        }
    }

    bool ok() const { return ok_; }

    void apply(std::span<const double> r, std::span<double> z) const
    {
        const std::size_t n = A_.size();
        auto rp = A_.row_ptr();
        auto cl = A_.col();
        auto v = A_.values();
        for (std::size_t i = 0; i < n; ++i) {
            double s = r[i];
            for (std::size_t k = rp[i]; k < diag_[i]; ++k) s -= v[k] * z[cl[k]];
            z[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = z[i];
            for (std::size_t k = diag_[i] + 1; k < rp[i + 1]; ++k) s -= v[k] * z[cl[k]];
            z[i] = s / v[diag_[i]];
        }
    }

private:
    SparseMatrix A_;
    std::vector<std::size_t> diag_;
    bool ok_ = true;
};

/// Right-preconditioned BiCGStab from a zero initial guess.
inline LinearSolveReport bicgstab(const SparseMatrix& A, std::span<const double> b, std::span<double> x,
                                  const LinearSolverOptions& opt)
{
    const std::size_t n = A.size();
    LinearSolveReport rep;
    rep.method = LinearMethod::BiCGStab;
    std::fill(x.begin(), x.end(), 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        rep.converged = true;
        return rep;
    }

    std::optional<Ilu0> ilu;
    if (opt.precondition) {
        ilu.emplace(A);
        if (!ilu->ok()) ilu.reset();
    }
    auto precond = [&](std::span<const double> in, std::span<double> out) {
        if (ilu) ilu->apply(in, out);
        else std::copy(in.begin(), in.end(), out.begin());
    };

    Vector r(b.begin(), b.end()), rhat = r, p(n, 0.0), v(n, 0.0), phat(n), s(n), shat(n), t(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    const double target = opt.tol * bnorm;

    // A couple of restarts from the true residual guard against drift of
    // the recursively updated residual.
    for (int restart = 0; restart < 3 && rep.iterations < opt.maxit; ++restart) {
        if (restart > 0) {
            Vector ax = A * std::span<const double>(x);
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
            rhat = r;
            std::fill(p.begin(), p.end(), 0.0);
            std::fill(v.begin(), v.end(), 0.0);
            rho = alpha = omega = 1.0;
        }
        bool done = false;
        while (rep.iterations < opt.maxit) {
            ++rep.iterations;
            const double rho_new = dot(rhat, r);
            if (rho_new == 0.0 || !std::isfinite(rho_new)) {
                rep.breakdown = true;
                break;
            }
            const double beta = (rho_new / rho) * (alpha / omega);
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
            precond(p, phat);
            A.multiply(phat, v);
            const double rv = dot(rhat, v);
            if (rv == 0.0 || !std::isfinite(rv)) {
                rep.breakdown = true;
                break;
            }
            alpha = rho_new / rv;
            for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
            if (norm2(s) <= target) {
                for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i];
                done = true;
                break;
            }
            precond(s, shat);
            A.multiply(shat, t);
            const double tt = dot(t, t);
            omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
            for (std::size_t i = 0; i < n; ++i) x[i] += alpha * phat[i] + omega * shat[i];
            for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
            rho = rho_new;
            if (norm2(r) <= target) {
                done = true;
                break;
            }
            if (omega == 0.0 || !std::isfinite(omega)) {
                rep.breakdown = true;
                break;
            }
        }
        rep.relative_residual = residual_norm(A, x, b) / bnorm;
        if (rep.breakdown || !done) break;
        if (rep.relative_residual <= opt.tol) {
            rep.converged = true;
            break;
        }
    }
    if (!std::isfinite(rep.relative_residual)) rep.breakdown = true;
    return rep;
}

/// Dense partial-pivoting LU. Throws SingularMatrixError on a zero pivot.
inline LinearSolveReport dense_lu_solve(const SparseMatrix& A, std::span<const double> b, std::span<double> x)
{
    const std::size_t n = A.size();
    std::vector<double> M(n * n, 0.0);
    auto rp = A.row_ptr();
    auto cl = A.col();
    auto v = A.values();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) M[i * n + cl[k]] = v[k];
    std::copy(b.begin(), b.end(), x.begin());

    double scale = 0.0;
    for (double a : M) scale = std::max(scale, std::abs(a));
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(M[r * n + c]) > std::abs(M[piv * n + c])) piv = r;
        if (!(std::abs(M[piv * n + c]) > scale * 1e-300) || scale == 0.0)
            throw SingularMatrixError("matrix is singular (zero pivot in column " + std::to_string(c) + ")");
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(M[c * n + k], M[piv * n + k]);
            std::swap(x[c], x[piv]);
        }
        const double d = M[c * n + c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = M[r * n + c] / d;
            if (f == 0.0) continue;
            M[r * n + c] = 0.0;
            for (std::size_t k = c + 1; k < n; ++k) M[r * n + k] -= f * M[c * n + k];
            x[r] -= f * x[c];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = x[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= M[i * n + k] * x[k];
        x[i] = s / M[i * n + i];
    }
    LinearSolveReport rep;
    rep.method = LinearMethod::DenseLU;
    const double bnorm = norm2(b);
    rep.relative_residual = bnorm > 0.0 ? residual_norm(A, x, b) / bnorm : 0.0;
    return rep;
}

inline LinearSolveReport sparse_lu_solve(const SparseMatrix& A, std::span<const double> b, std::span<double> x)
{
    const std::size_t n = A.size();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.nonzeros());
    auto rp = A.row_ptr();
    auto cl = A.col();
    auto v = A.values();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
            trips.emplace_back(static_cast<int>(i), static_cast<int>(cl[k]), v[k]);
    Eigen::SparseMatrix<double> M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    M.setFromTriplets(trips.begin(), trips.end());
    M.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) throw SingularMatrixError("sparse LU factorization failed: " + lu.lastErrorMessage());
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd sol = lu.solve(rhs);
    std::copy(sol.data(), sol.data() + n, x.begin());
    LinearSolveReport rep;
    rep.method = LinearMethod::SparseLU;
    const double bnorm = norm2(b);
    rep.relative_residual = bnorm > 0.0 ? residual_norm(A, x, b) / bnorm : 0.0;
    return rep;
}

/// Solves A x = b. Throws SingularMatrixError for a matrix with an empty
/// (all-zero) row or a singular direct factorization.
inline std::pair<Vector, LinearSolveReport> solve(const SparseMatrix& A, std::span<const double> b,
                                                  const LinearSolverOptions& opt = {})
{
    const std::size_t n = A.size();
    if (b.size() != n) throw std::invalid_argument("right-hand side size does not match matrix");
    auto rp = A.row_ptr();
    auto v = A.values();
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) any = any || v[k] != 0.0;
        if (!any) throw SingularMatrixError("matrix row " + std::to_string(i) + " is zero");
    }

    Vector x(n, 0.0);
    LinearSolveReport rep = bicgstab(A, b, x, opt);
    if (rep.converged || !opt.allow_fallback) return {std::move(x), rep};

    const std::size_t krylov_its = rep.iterations;
    const bool krylov_breakdown = rep.breakdown;
    rep = n <= opt.dense_limit ? dense_lu_solve(A, b, x) : sparse_lu_solve(A, b, x);
    rep.iterations = krylov_its;
    rep.breakdown = krylov_breakdown;
    // A direct solve is accepted up to the recompute guard.
    rep.converged = std::isfinite(rep.relative_residual) && rep.relative_residual <= 10.0 * opt.tol;
    return {std::move(x), rep};
}

} // namespace richards
