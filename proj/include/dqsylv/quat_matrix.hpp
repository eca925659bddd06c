#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"
#include "quaternion.hpp"

namespace dqsylv {

/// Dense row-major matrix over the quaternions.
class QuatMatrix {
public:
    QuatMatrix() = default;
    QuatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    QuatMatrix(std::size_t rows, std::size_t cols, std::vector<Quaternion> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionError("QuatMatrix: " + std::to_string(data_.size()) +
                                 " entries for shape " + shape_str(rows, cols));
    }

    static QuatMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static QuatMatrix identity(std::size_t n) {
        QuatMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Quaternion(1.0);
        return m;
    }
    static QuatMatrix scalar(const Quaternion& q) { return {1, 1, {q}}; }

    /// Assemble a block matrix. Every block in a block row must share its row count,
    /// and every block row must have the same total column count.
    static QuatMatrix blocks(std::initializer_list<std::initializer_list<QuatMatrix>> grid) {
        std::size_t total_rows = 0;
        std::size_t total_cols = 0;
        bool first = true;
        for (const auto& row : grid) {
            std::size_t h = row.size() ? row.begin()->rows() : 0;
            std::size_t w = 0;
            for (const auto& b : row) {
                if (b.rows() != h) throw DimensionError("blocks: ragged block row heights");
                w += b.cols();
            }
            if (first) {
                total_cols = w;
                first = false;
            } else if (w != total_cols) {
                throw DimensionError("blocks: block rows have different widths");
            }
            total_rows += h;
        }
        QuatMatrix out(total_rows, total_cols);
        std::size_t r0 = 0;
        for (const auto& row : grid) {
            std::size_t c0 = 0;
            for (const auto& b : row) {
                out.set_block(r0, c0, b);
                c0 += b.cols();
            }
            r0 += row.size() ? row.begin()->rows() : 0;
        }
        return out;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    Quaternion& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Quaternion& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Quaternion> entries() { return data_; }
    std::span<const Quaternion> entries() const { return data_; }

    void set_block(std::size_t r0, std::size_t c0, const QuatMatrix& b) {
        if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
            throw DimensionError("set_block: block out of range");
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
    }

    QuatMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("block: out of range");
        QuatMatrix out(nr, nc);
        for (std::size_t r = 0; r < nr; ++r)
            for (std::size_t c = 0; c < nc; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
        return out;
    }

    double frobenius_norm2() const {
        double s = 0.0;
        for (const auto& q : data_) s += q.norm2();
        return s;
    }
    double frobenius_norm() const { return std::sqrt(frobenius_norm2()); }

    /// Conjugate transpose A*.
    QuatMatrix ctranspose() const {
        QuatMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c).conj();
        return out;
    }

    QuatMatrix& operator+=(const QuatMatrix& o) {
        require_same_shape(o, "+");
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
        return *this;
    }
    QuatMatrix& operator-=(const QuatMatrix& o) {
        require_same_shape(o, "-");
        for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
        return *this;
    }
    QuatMatrix& operator*=(double s) {
        for (auto& q : data_) q *= s;
        return *this;
    }

    friend bool operator==(const QuatMatrix&, const QuatMatrix&) = default;

private:
    void require_same_shape(const QuatMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError(std::string("operator") + op + ": " + shape_str(rows_, cols_) +
                                 " vs " + shape_str(o.rows_, o.cols_));
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Quaternion> data_;
};

inline QuatMatrix operator+(QuatMatrix a, const QuatMatrix& b) { return a += b; }
inline QuatMatrix operator-(QuatMatrix a, const QuatMatrix& b) { return a -= b; }
inline QuatMatrix operator-(QuatMatrix a) { return a *= -1.0; }
inline QuatMatrix operator*(QuatMatrix a, double s) { return a *= s; }
inline QuatMatrix operator*(double s, QuatMatrix a) { return a *= s; }

inline QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) {
    if (a.cols() != b.rows())
        throw DimensionError("matrix product: " + shape_str(a.rows(), a.cols()) + " * " +
                             shape_str(b.rows(), b.cols()));
    QuatMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Quaternion aij = a(i, j);
            if (aij == Quaternion{}) continue;
            for (std::size_t k = 0; k < b.cols(); ++k) c(i, k) += aij * b(j, k);
        }
    }
    return c;
}

inline QuatMatrix conj_transpose(const QuatMatrix& a) { return a.ctranspose(); }

// ---------------------------------------------------------------------------
// Complex adjoint: A = A1 + A2 j  ->  [[A1, A2], [-conj(A2), conj(A1)]]
// with A1 = w + x i and A2 = y + z i.
// ---------------------------------------------------------------------------

using ComplexAdjoint = Eigen::MatrixXcd;

inline ComplexAdjoint complex_adjoint(const QuatMatrix& a) {
    const auto m = static_cast<Eigen::Index>(a.rows());
    const auto n = static_cast<Eigen::Index>(a.cols());
    ComplexAdjoint out(2 * m, 2 * n);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const Quaternion& q = a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            const std::complex<double> a1(q.w, q.x);
            const std::complex<double> a2(q.y, q.z);
            out(r, c) = a1;
            out(r, n + c) = a2;
            out(m + r, c) = -std::conj(a2);
            out(m + r, n + c) = std::conj(a1);
        }
    }
    return out;
}

/// Inverse of complex_adjoint. The redundant blocks are averaged; a symmetry
/// violation above `tol * (1 + |M|_F)` is rejected.
inline QuatMatrix from_adjoint(const ComplexAdjoint& mat, double tol = 1e-10) {
    if (mat.rows() % 2 != 0 || mat.cols() % 2 != 0)
        throw DimensionError("from_adjoint: odd dimensions " +
                             shape_str(static_cast<std::size_t>(mat.rows()),
                                       static_cast<std::size_t>(mat.cols())));
    const Eigen::Index m = mat.rows() / 2;
    const Eigen::Index n = mat.cols() / 2;
    QuatMatrix out(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    double asym2 = 0.0;
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const std::complex<double> tl = mat(r, c);
            const std::complex<double> tr = mat(r, n + c);
            const std::complex<double> bl = mat(m + r, c);
            const std::complex<double> br = mat(m + r, n + c);
            asym2 += std::norm(tl - std::conj(br)) + std::norm(tr + std::conj(bl));
            const std::complex<double> a1 = (tl + std::conj(br)) * 0.5;
            const std::complex<double> a2 = (tr - std::conj(bl)) * 0.5;
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                Quaternion(a1.real(), a1.imag(), a2.real(), a2.imag());
        }
    }
    if (std::sqrt(asym2) > tol * (1.0 + mat.norm()))
        throw NumericalError("from_adjoint: matrix is not in the image of the complex adjoint map");
    return out;
}

// ---------------------------------------------------------------------------
// SVD-backed rank, pseudoinverse and projectors
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::BDCSVD<ComplexAdjoint> adjoint_svd(const QuatMatrix& a, bool vectors) {
    Eigen::BDCSVD<ComplexAdjoint> svd;
    if (vectors)
        svd.compute(complex_adjoint(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
    else
        svd.compute(complex_adjoint(a));
    if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
    return svd;
}

/// max(2m, 2n) * eps * sigma_max
inline double default_rank_tol(std::size_t rows, std::size_t cols, double sigma_max) {
    return static_cast<double>(2 * std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
           sigma_max;
}

}  // namespace detail

/// Singular values of the complex adjoint (each quaternion singular value appears twice).
inline Eigen::VectorXd adjoint_singular_values(const QuatMatrix& a) {
    if (a.empty()) return {};
    return detail::adjoint_svd(a, false).singularValues();
}

/// Rank decision together with the singular values that bracket the threshold.
struct RankInfo {
    std::size_t rank = 0;
    double tol = 0.0;
    double smallest_kept = 0.0;    ///< 0 when rank is 0
    double largest_dropped = 0.0;  ///< 0 when nothing was dropped
};

/// `rel_tol`, when given, replaces the default threshold by rel_tol * sigma_max.
/// `abs_tol` is a floor on the threshold.
inline RankInfo rank_info(const QuatMatrix& a, std::optional<double> rel_tol = std::nullopt, double abs_tol = 0.0) {
    RankInfo info;
    if (a.empty()) return info;
    const Eigen::VectorXd s = adjoint_singular_values(a);
    const double smax = s.size() ? s(0) : 0.0;
    info.tol = std::max(abs_tol, rel_tol ? *rel_tol * smax : detail::default_rank_tol(a.rows(), a.cols(), smax));
    std::size_t kept = 0;
    for (Eigen::Index n = 0; n < s.size(); ++n) {
        if (s(n) > info.tol) {
            ++kept;
            info.smallest_kept = s(n);
        } else {
            info.largest_dropped = std::max(info.largest_dropped, s(n));
        }
    }
    if (kept % 2 != 0)
        throw NumericalError("rank: odd number of adjoint singular values above threshold");
    info.rank = kept / 2;
    return info;
}

inline std::size_t rank(const QuatMatrix& a, std::optional<double> rel_tol = std::nullopt, double abs_tol = 0.0) {
    return rank_info(a, rel_tol, abs_tol).rank;
}

/// Moore-Penrose inverse via the SVD of the complex adjoint. Singular values at or
/// below max(abs_tol, rank threshold) are treated as zero.
inline QuatMatrix pinv(const QuatMatrix& a, std::optional<double> rel_tol = std::nullopt, double abs_tol = 0.0) {
    if (a.empty()) return QuatMatrix::zeros(a.cols(), a.rows());
    const auto svd = detail::adjoint_svd(a, true);
    const Eigen::VectorXd& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    const double tol =
        std::max(abs_tol, rel_tol ? *rel_tol * smax : detail::default_rank_tol(a.rows(), a.cols(), smax));
    // Adjoint singular values come in equal pairs; decide each pair together so the
    // result stays in the adjoint image when a pair straddles the threshold.
    Eigen::VectorXd inv_s = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index n = 0; n + 1 < s.size(); n += 2) {
        if (0.5 * (s(n) + s(n + 1)) > tol) {
            inv_s(n) = 1.0 / s(n);
            inv_s(n + 1) = 1.0 / s(n + 1);
        }
    }
    const ComplexAdjoint x = svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().adjoint();
    return from_adjoint(x, 1e-8);
}

/// L_A = I - A^+ A (cols x cols).
inline QuatMatrix proj_L(const QuatMatrix& a, const QuatMatrix& a_pinv) {
    return QuatMatrix::identity(a.cols()) - a_pinv * a;
}
inline QuatMatrix proj_L(const QuatMatrix& a) { return proj_L(a, pinv(a)); }

/// R_A = I - A A^+ (rows x rows).
inline QuatMatrix proj_R(const QuatMatrix& a, const QuatMatrix& a_pinv) {
    return QuatMatrix::identity(a.rows()) - a * a_pinv;
}
inline QuatMatrix proj_R(const QuatMatrix& a) { return proj_R(a, pinv(a)); }

}  // namespace dqsylv
