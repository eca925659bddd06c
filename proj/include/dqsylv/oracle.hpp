#pragma once

// Brute-force cross-check for AX - YB = C: expand both quaternion equations
//   A0 X0 - Y0 B0 = C0
//   A0 X1 + A1 X0 - Y0 B1 - Y1 B0 = C1
// into one real linear system over the components of (X0, X1, Y0, Y1) and solve it
// by minimum-norm least squares.

#include <array>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "dual_quat_matrix.hpp"
#include "sylvester.hpp"

namespace dqsylv {

/// 4x4 real matrix of q -> a q.
inline Eigen::Matrix4d left_mult_matrix(const Quaternion& a) {
    Eigen::Matrix4d m;
    m << a.w, -a.x, -a.y, -a.z,
         a.x,  a.w, -a.z,  a.y,
         a.y,  a.z,  a.w, -a.x,
         a.z, -a.y,  a.x,  a.w;
    return m;
}

/// 4x4 real matrix of q -> q b.
inline Eigen::Matrix4d right_mult_matrix(const Quaternion& b) {
    Eigen::Matrix4d m;
    m << b.w, -b.x, -b.y, -b.z,
         b.x,  b.w,  b.z, -b.y,
         b.y, -b.z,  b.w,  b.x,
         b.z,  b.y, -b.x,  b.w;
    return m;
}

/// Real 4m x 4n matrix of left multiplication by A on quaternion column vectors.
inline Eigen::MatrixXd realify(const QuatMatrix& a) {
    Eigen::MatrixXd m(4 * a.rows(), 4 * a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            m.block<4, 4>(static_cast<Eigen::Index>(4 * r), static_cast<Eigen::Index>(4 * c)) =
                left_mult_matrix(a(r, c));
    return m;
}

/// Column-major stacking of the real components: entry (r, c) lands at 4 (c rows + r).
inline Eigen::VectorXd realvec(const QuatMatrix& a) {
    Eigen::VectorXd v(4 * a.size());
    for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t r = 0; r < a.rows(); ++r) {
            const Quaternion& q = a(r, c);
            const auto o = static_cast<Eigen::Index>(4 * (c * a.rows() + r));
            v(o) = q.w;
            v(o + 1) = q.x;
            v(o + 2) = q.y;
            v(o + 3) = q.z;
        }
    return v;
}

inline QuatMatrix unrealvec(const Eigen::Ref<const Eigen::VectorXd>& v, std::size_t rows, std::size_t cols) {
    if (static_cast<std::size_t>(v.size()) != 4 * rows * cols)
        throw DimensionError("unrealvec: length " + std::to_string(v.size()) + " for shape " + shape_str(rows, cols));
    QuatMatrix a(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) {
            const auto o = static_cast<Eigen::Index>(4 * (c * rows + r));
            a(r, c) = Quaternion(v(o), v(o + 1), v(o + 2), v(o + 3));
        }
    return a;
}

/// Where each unknown block lives inside the real unknown vector.
struct UnknownLayout {
    struct Slot {
        std::size_t offset = 0;
        std::size_t rows = 0;
        std::size_t cols = 0;
        std::size_t length() const { return 4 * rows * cols; }
    };
    Slot x0, x1, y0, y1;
    std::size_t total() const { return y1.offset + y1.length(); }
};

struct RealSystem {
    Eigen::MatrixXd coeff;
    Eigen::VectorXd rhs;
    UnknownLayout layout;
};

namespace detail {

/// coeff[rows of (i, c) in block at row_off] += left-multiplication of unknown block by A.
inline void add_left_product(Eigen::MatrixXd& m, std::size_t row_off, const QuatMatrix& a,
                             const UnknownLayout::Slot& x, double sign) {
    const std::size_t n_out = a.rows();
    for (std::size_t c = 0; c < x.cols; ++c)
        for (std::size_t i = 0; i < n_out; ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) {
                const auto r = static_cast<Eigen::Index>(row_off + 4 * (c * n_out + i));
                const auto col = static_cast<Eigen::Index>(x.offset + 4 * (c * x.rows + j));
                m.block<4, 4>(r, col) += sign * left_mult_matrix(a(i, j));
            }
}

/// coeff += sign * (unknown block) * B.
inline void add_right_product(Eigen::MatrixXd& m, std::size_t row_off, const UnknownLayout::Slot& y,
                              const QuatMatrix& b, double sign) {
    const std::size_t n_out = y.rows;
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t i = 0; i < n_out; ++i)
            for (std::size_t j = 0; j < b.rows(); ++j) {
                const auto r = static_cast<Eigen::Index>(row_off + 4 * (c * n_out + i));
                const auto col = static_cast<Eigen::Index>(y.offset + 4 * (j * y.rows + i));
                m.block<4, 4>(r, col) += sign * right_mult_matrix(b(j, c));
            }
}

}  // namespace detail

/// Real form of the pair of quaternion equations. A n x k, B l x m, C n x m.
inline RealSystem build_system(const DualQuatMatrix& a, const DualQuatMatrix& b, const DualQuatMatrix& c) {
    if (a.rows() != c.rows() || b.cols() != c.cols())
        throw DimensionError("build_system: A " + shape_str(a.rows(), a.cols()) + ", B " +
                             shape_str(b.rows(), b.cols()) + ", C " + shape_str(c.rows(), c.cols()));
    const std::size_t n = a.rows(), k = a.cols(), l = b.rows(), m = b.cols();
    RealSystem sys;
    auto& L = sys.layout;
    L.x0 = {0, k, m};
    L.x1 = {L.x0.offset + L.x0.length(), k, m};
    L.y0 = {L.x1.offset + L.x1.length(), n, l};
    L.y1 = {L.y0.offset + L.y0.length(), n, l};

    const std::size_t eq_rows = 4 * n * m;
    sys.coeff = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * eq_rows), static_cast<Eigen::Index>(L.total()));
    sys.rhs.resize(static_cast<Eigen::Index>(2 * eq_rows));
    sys.rhs << realvec(c.standard()), realvec(c.infinitesimal());

    // A0 X0 - Y0 B0
    detail::add_left_product(sys.coeff, 0, a.standard(), L.x0, 1.0);
    detail::add_right_product(sys.coeff, 0, L.y0, b.standard(), -1.0);
    // A0 X1 + A1 X0 - Y0 B1 - Y1 B0
    detail::add_left_product(sys.coeff, eq_rows, a.standard(), L.x1, 1.0);
    detail::add_left_product(sys.coeff, eq_rows, a.infinitesimal(), L.x0, 1.0);
    detail::add_right_product(sys.coeff, eq_rows, L.y0, b.infinitesimal(), -1.0);
    detail::add_right_product(sys.coeff, eq_rows, L.y1, b.standard(), -1.0);
    return sys;
}

struct OracleOptions {
    /// CONSISTENT iff residual <= oracle_tol * (1 + |rhs|).
    double oracle_tol = 1e-7;
};

struct OracleResult {
    double residual = 0.0;   ///< |coeff x - rhs|
    double threshold = 0.0;  ///< oracle_tol * (1 + |rhs|)
    bool consistent = false;
    Eigen::VectorXd unknowns;
    std::optional<SylvesterPair> solution;  ///< present when consistent
};

/// Minimum-norm least squares through a complete orthogonal decomposition
/// (column-pivoted Householder QR), independent of the SVD path used by pinv.
inline OracleResult oracle_solve(const RealSystem& sys, const OracleOptions& opt = {}) {
    OracleResult out;
    out.threshold = opt.oracle_tol * (1.0 + sys.rhs.norm());
    if (sys.coeff.cols() == 0) {
        out.unknowns = Eigen::VectorXd(0);
        out.residual = sys.rhs.norm();
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.coeff);
        out.unknowns = cod.solve(sys.rhs);
        out.residual = (sys.coeff * out.unknowns - sys.rhs).norm();
    }
    out.consistent = out.residual <= out.threshold;
    if (out.consistent) {
        const auto& L = sys.layout;
        auto slice = [&](const UnknownLayout::Slot& s) {
            return unrealvec(out.unknowns.segment(static_cast<Eigen::Index>(s.offset),
                                                  static_cast<Eigen::Index>(s.length())),
                             s.rows, s.cols);
        };
        out.solution = SylvesterPair{DualQuatMatrix(slice(L.x0), slice(L.x1)), DualQuatMatrix(slice(L.y0), slice(L.y1))};
    }
    return out;
}

inline OracleResult oracle_solve(const DualQuatMatrix& a, const DualQuatMatrix& b, const DualQuatMatrix& c,
                                 const OracleOptions& opt = {}) {
    return oracle_solve(build_system(a, b, c), opt);
}

}  // namespace dqsylv
