#pragma once

#include <cmath>

#include "quat_matrix.hpp"

namespace dqsylv {

/// Dual quaternion matrix D = D0 + D1 eps with eps^2 = 0.
class DualQuatMatrix {
public:
    DualQuatMatrix() = default;
    DualQuatMatrix(std::size_t rows, std::size_t cols) : std_(rows, cols), inf_(rows, cols) {}
    DualQuatMatrix(QuatMatrix standard, QuatMatrix infinitesimal)
        : std_(std::move(standard)), inf_(std::move(infinitesimal)) {
        if (std_.rows() != inf_.rows() || std_.cols() != inf_.cols())
            throw DimensionError("DualQuatMatrix: standard part " + shape_str(std_.rows(), std_.cols()) +
                                 " vs infinitesimal part " + shape_str(inf_.rows(), inf_.cols()));
    }
    /// Matrix with zero infinitesimal part.
    explicit DualQuatMatrix(QuatMatrix standard)
        : std_(std::move(standard)), inf_(std_.rows(), std_.cols()) {}

    static DualQuatMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
    static DualQuatMatrix identity(std::size_t n) { return DualQuatMatrix(QuatMatrix::identity(n)); }

    std::size_t rows() const { return std_.rows(); }
    std::size_t cols() const { return std_.cols(); }

    const QuatMatrix& standard() const { return std_; }
    const QuatMatrix& infinitesimal() const { return inf_; }
    QuatMatrix& standard() { return std_; }
    QuatMatrix& infinitesimal() { return inf_; }

    DualQuatMatrix& operator+=(const DualQuatMatrix& o) {
        std_ += o.std_;
        inf_ += o.inf_;
        return *this;
    }
    DualQuatMatrix& operator-=(const DualQuatMatrix& o) {
        std_ -= o.std_;
        inf_ -= o.inf_;
        return *this;
    }

    /// Componentwise equality of both parts.
    friend bool operator==(const DualQuatMatrix&, const DualQuatMatrix&) = default;

private:
    QuatMatrix std_;
    QuatMatrix inf_;
};

inline DualQuatMatrix operator+(DualQuatMatrix a, const DualQuatMatrix& b) { return a += b; }
inline DualQuatMatrix operator-(DualQuatMatrix a, const DualQuatMatrix& b) { return a -= b; }
inline DualQuatMatrix operator-(const DualQuatMatrix& a) { return {-a.standard(), -a.infinitesimal()}; }

// (P0 + P1 eps)(Q0 + Q1 eps) = P0 Q0 + (P0 Q1 + P1 Q0) eps
inline DualQuatMatrix operator*(const DualQuatMatrix& p, const DualQuatMatrix& q) {
    return {p.standard() * q.standard(),
            p.standard() * q.infinitesimal() + p.infinitesimal() * q.standard()};
}

inline DualQuatMatrix dq_add(const DualQuatMatrix& p, const DualQuatMatrix& q) { return p + q; }
inline DualQuatMatrix dq_mul(const DualQuatMatrix& p, const DualQuatMatrix& q) { return p * q; }

/// sqrt(|P0|_F^2 + |P1|_F^2)
inline double dq_norm(const DualQuatMatrix& p) {
    return std::sqrt(p.standard().frobenius_norm2() + p.infinitesimal().frobenius_norm2());
}

inline bool dq_equal(const DualQuatMatrix& p, const DualQuatMatrix& q) { return p == q; }

}  // namespace dqsylv
