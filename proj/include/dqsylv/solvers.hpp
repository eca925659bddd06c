#pragma once

// Building blocks for the dual quaternion Sylvester solver:
//   AXB = C                              over H
//   AX = B                               over DQ
//   A0 X0 B0 + A0 X1 B1 + A1 X2 B1 = C   over H
// and the block-rank identity used to turn projector conditions into rank conditions.

#include <memory>
#include <utility>

#include "conditions.hpp"
#include "dual_quat_matrix.hpp"

namespace dqsylv {

// ===========================================================================
// AXB = C
// ===========================================================================

/// X = A^+ C B^+ + L_A U1 + U2 R_B
class AxbSolution {
public:
    AxbSolution(detail::Pinv a, detail::Pinv b, const QuatMatrix& c)
        : a_(std::move(a)), b_(std::move(b)), particular_(a_.inv * c * b_.inv) {}

    std::vector<ParamShape> param_shapes() const {
        return {{"U1", a_.a.cols(), b_.a.rows()}, {"U2", a_.a.cols(), b_.a.rows()}};
    }

    QuatMatrix instantiate(const QuatMatrix& u1, const QuatMatrix& u2) const {
        validate_params(param_shapes(), {u1, u2});
        return particular_ + a_.L * u1 + u2 * b_.R;
    }
    QuatMatrix instantiate(const ParamSet& p) const {
        validate_params(param_shapes(), p);
        return instantiate(p[0], p[1]);
    }
    const QuatMatrix& particular() const { return particular_; }

private:
    detail::Pinv a_;
    detail::Pinv b_;
    QuatMatrix particular_;
};

inline ConditionReport check_axb_eq_c(const detail::Pinv& a, const detail::Pinv& b, const QuatMatrix& c,
                                      const SolverOptions& opt, bool with_ranks = true) {
    ConditionReport rep;
    const double scale = c.frobenius_norm();
    rep.projector.push_back(detail::projector_check("R_A C = 0", a.R * c, scale, opt));
    rep.projector.push_back(detail::projector_check("C L_B = 0", c * b.L, scale, opt));
    if (with_ranks) {
        using detail::RankTally;
        rep.rank.push_back(detail::rank_check("r[A C] = r(A)",
                                              RankTally(opt).add(QuatMatrix::blocks({{a.a, c}})),
                                              RankTally(opt).add(a.a)));
        rep.rank.push_back(detail::rank_check("r[C; B] = r(B)",
                                              RankTally(opt).add(QuatMatrix::blocks({{c}, {b.a}})),
                                              RankTally(opt).add(b.a)));
        detail::note_disagreement(rep, "AXB=C");
    }
    return rep;
}

inline SolveResult<AxbSolution> solve_axb_eq_c(const QuatMatrix& a, const QuatMatrix& b, const QuatMatrix& c,
                                               const SolverOptions& opt = {}) {
    if (a.rows() != c.rows() || b.cols() != c.cols())
        throw DimensionError("AXB=C: A " + shape_str(a.rows(), a.cols()) + ", B " + shape_str(b.rows(), b.cols()) +
                             ", C " + shape_str(c.rows(), c.cols()));
    detail::Pinv pa(a, opt);
    detail::Pinv pb(b, opt);
    SolveResult<AxbSolution> out;
    out.report = check_axb_eq_c(pa, pb, c, opt);
    if (out.report.solvable()) out.solution.emplace(std::move(pa), std::move(pb), c);
    return out;
}

// ===========================================================================
// AX = B over dual quaternions
// ===========================================================================

/// Everything about AX = B that depends on A alone:
///   A2 = A1 L_A0, A3 = R_A0 A2, with pseudoinverses and projectors.
struct DualLeftFactor {
    detail::Pinv a0;
    QuatMatrix a1;
    QuatMatrix a2;  // A1 L_A0
    detail::Pinv a3;  // R_A0 A2

    DualLeftFactor(const DualQuatMatrix& a, const SolverOptions& opt)
        : a0(a.standard(), opt), a1(a.infinitesimal()) {
        a2 = a1 * a0.L;
        a3 = detail::Pinv(a0.R * a2, opt, a1.frobenius_norm());
    }

    /// X0 = A0^+ B0 + L_A0 U, X1 = A0^+ (B2 - A2 U) + L_A0 U1, U = A3^+ C11 + L_A3 U2,
    /// where B2 = B1 - A1 A0^+ B0 and C11 = R_A0 B2. No solvability test.
    DualQuatMatrix construct(const DualQuatMatrix& b, const QuatMatrix& u1, const QuatMatrix& u2) const {
        const QuatMatrix b2 = b.infinitesimal() - a1 * (a0.inv * b.standard());
        const QuatMatrix c11 = a0.R * b2;
        const QuatMatrix u = a3.inv * c11 + a3.L * u2;
        QuatMatrix x0 = a0.inv * b.standard() + a0.L * u;
        QuatMatrix x1 = a0.inv * (b2 - a2 * u) + a0.L * u1;
        return {std::move(x0), std::move(x1)};
    }

    /// Only projector conditions; rank forms are added by check_dq_ax_eq_b.
    ConditionReport check(const DualQuatMatrix& b, const SolverOptions& opt) const {
        ConditionReport rep;
        const QuatMatrix a1_a0p_b0 = a1 * (a0.inv * b.standard());
        const QuatMatrix c11 = a0.R * (b.infinitesimal() - a1_a0p_b0);
        rep.projector.push_back(
            detail::projector_check("R_A0 B0 = 0", a0.R * b.standard(), b.standard().frobenius_norm(), opt));
        rep.projector.push_back(detail::projector_check(
            "R_A3 C11 = 0", a3.R * c11, b.infinitesimal().frobenius_norm() + a1_a0p_b0.frobenius_norm(), opt));
        return rep;
    }
};

class DualAxbSolution {
public:
    DualAxbSolution(std::shared_ptr<const DualLeftFactor> left, DualQuatMatrix b)
        : left_(std::move(left)), b_(std::move(b)) {}

    std::vector<ParamShape> param_shapes() const {
        const std::size_t n = left_->a0.a.cols();
        const std::size_t p = b_.cols();
        return {{"U1", n, p}, {"U2", n, p}};
    }
    DualQuatMatrix instantiate(const ParamSet& p) const {
        validate_params(param_shapes(), p);
        return left_->construct(b_, p[0], p[1]);
    }
    DualQuatMatrix particular() const { return instantiate(zero_params(param_shapes())); }

private:
    std::shared_ptr<const DualLeftFactor> left_;
    DualQuatMatrix b_;
};

inline ConditionReport check_dq_ax_eq_b(const DualLeftFactor& left, const DualQuatMatrix& b,
                                        const SolverOptions& opt) {
    ConditionReport rep = left.check(b, opt);
    using detail::RankTally;
    const QuatMatrix& a0 = left.a0.a;
    const QuatMatrix& a1 = left.a1;
    const QuatMatrix z = QuatMatrix::zeros(a0.rows(), a0.cols());
    rep.rank.push_back(detail::rank_check("r[A0 B0] = r(A0)",
                                          RankTally(opt).add(QuatMatrix::blocks({{a0, b.standard()}})),
                                          RankTally(opt).add(a0)));
    rep.rank.push_back(detail::rank_check(
        "r[A0 B1 A1; 0 B0 A0] = r[A0 A1; 0 A0]",
        RankTally(opt).add(QuatMatrix::blocks({{a0, b.infinitesimal(), a1}, {z, b.standard(), a0}})),
        RankTally(opt).add(QuatMatrix::blocks({{a0, a1}, {z, a0}}))));
    detail::note_disagreement(rep, "AX=B");
    return rep;
}

inline SolveResult<DualAxbSolution> solve_dq_ax_eq_b(const DualQuatMatrix& a, const DualQuatMatrix& b,
                                                     const SolverOptions& opt = {}) {
    if (a.rows() != b.rows())
        throw DimensionError("AX=B: A " + shape_str(a.rows(), a.cols()) + ", B " + shape_str(b.rows(), b.cols()));
    auto left = std::make_shared<const DualLeftFactor>(a, opt);
    SolveResult<DualAxbSolution> out;
    out.report = check_dq_ax_eq_b(*left, b, opt);
    if (out.report.solvable()) out.solution.emplace(std::move(left), b);
    return out;
}

// ===========================================================================
// A0 X0 B0 + A0 X1 B1 + A1 X2 B1 = C
// ===========================================================================

struct ThreeTermTriple {
    QuatMatrix x0;
    QuatMatrix x1;
    QuatMatrix x2;
};

/// Natural scales of the operands when they are themselves derived quantities
/// (zero for raw inputs). See SolverOptions::derived_rank_tol.
struct ThreeTermScales {
    double a0 = 0.0;
    double a1 = 0.0;
    double b0 = 0.0;
    double b1 = 0.0;
};

/// Intermediates A = R_A0 A1, A2 = R_A0 C, B2 = B0 L_B1, B3 = C L_B1.
struct ThreeTermWorkspace {
    detail::Pinv a0;
    QuatMatrix a1;
    QuatMatrix b0;
    detail::Pinv b1;
    QuatMatrix c;
    detail::Pinv a;   // R_A0 A1
    QuatMatrix a2;    // R_A0 C
    detail::Pinv b2;  // B0 L_B1
    QuatMatrix b3;    // C L_B1

    ThreeTermWorkspace(const QuatMatrix& a0_, const QuatMatrix& a1_, const QuatMatrix& b0_, const QuatMatrix& b1_,
                       const QuatMatrix& c_, const SolverOptions& opt, const ThreeTermScales& scales = {})
        : a1(a1_), b0(b0_), c(c_) {
        if (a0_.rows() != c_.rows() || a1_.rows() != c_.rows() || b0_.cols() != c_.cols() ||
            b1_.cols() != c_.cols())
            throw DimensionError("three-term equation: nonconformable operands");
        a0 = detail::Pinv(a0_, opt, scales.a0);
        b1 = detail::Pinv(b1_, opt, scales.b1);
        a = detail::Pinv(a0.R * a1, opt, std::max(scales.a1, a1.frobenius_norm()));
        a2 = a0.R * c;
        b2 = detail::Pinv(b0 * b1.L, opt, std::max(scales.b0, b0.frobenius_norm()));
        b3 = c * b1.L;
    }
};

class ThreeTermSolution {
public:
    explicit ThreeTermSolution(std::shared_ptr<const ThreeTermWorkspace> ws) : ws_(std::move(ws)) {}

    const ThreeTermWorkspace& workspace() const { return *ws_; }

    /// U1, U2 feed X1; U3, U4 feed X2; U5, U6 feed X0.
    std::vector<ParamShape> param_shapes() const {
        const auto& w = *ws_;
        const std::size_t q0 = w.a0.a.cols();
        const std::size_t q2 = w.a1.cols();
        const std::size_t r0 = w.b0.rows();
        const std::size_t r1 = w.b1.a.rows();
        return {{"U1", q0, r1}, {"U2", q0, r1}, {"U3", q2, r1}, {"U4", q2, r1}, {"U5", q0, r0}, {"U6", q0, r0}};
    }

    ThreeTermTriple instantiate(const ParamSet& u) const {
        validate_params(param_shapes(), u);
        const auto& w = *ws_;
        ThreeTermTriple t;
        // X2 and X0 first: the X1 formula consumes both.
        t.x2 = w.a.inv * w.a2 * w.b1.inv + w.a.L * u[2] + u[3] * w.b1.R;
        t.x0 = w.a0.inv * w.b3 * w.b2.inv + w.a0.L * u[4] + u[5] * w.b2.R;
        t.x1 = w.a0.inv * (w.c - w.a0.a * t.x0 * w.b0 - w.a1 * t.x2 * w.b1.a) * w.b1.inv + w.a0.L * u[0] +
               u[1] * w.b1.R;
        return t;
    }
    ThreeTermTriple particular() const { return instantiate(zero_params(param_shapes())); }

private:
    std::shared_ptr<const ThreeTermWorkspace> ws_;
};

inline ConditionReport check_three_term(const ThreeTermWorkspace& w, const SolverOptions& opt,
                                        bool with_ranks = true) {
    ConditionReport rep;
    const double scale = w.c.frobenius_norm();
    rep.projector.push_back(detail::projector_check("R_A A2 = 0", w.a.R * w.a2, scale, opt));
    rep.projector.push_back(detail::projector_check("R_A0 B3 = 0", w.a0.R * w.b3, scale, opt));
    rep.projector.push_back(detail::projector_check("B3 L_B2 = 0", w.b3 * w.b2.L, scale, opt));
    if (with_ranks) {
        using detail::RankTally;
        const QuatMatrix& a0 = w.a0.a;
        const QuatMatrix& b0 = w.b0;
        const QuatMatrix& b1 = w.b1.a;
        rep.rank.push_back(detail::rank_check("r[A0 A1 C] = r[A0 A1]",
                                              RankTally(opt).add(QuatMatrix::blocks({{a0, w.a1, w.c}})),
                                              RankTally(opt).add(QuatMatrix::blocks({{a0, w.a1}}))));
        rep.rank.push_back(detail::rank_check(
            "r[B1 0; C A0] = r(B1) + r(A0)",
            RankTally(opt).add(QuatMatrix::blocks({{b1, QuatMatrix::zeros(b1.rows(), a0.cols())}, {w.c, a0}})),
            RankTally(opt).add(b1).add(a0)));
        rep.rank.push_back(detail::rank_check("r[C; B0; B1] = r[B0; B1]",
                                              RankTally(opt).add(QuatMatrix::blocks({{w.c}, {b0}, {b1}})),
                                              RankTally(opt).add(QuatMatrix::blocks({{b0}, {b1}}))));
        detail::note_disagreement(rep, "A0X0B0+A0X1B1+A1X2B1=C");
    }
    return rep;
}

inline SolveResult<ThreeTermSolution> solve_three_term(const QuatMatrix& a0, const QuatMatrix& a1,
                                                       const QuatMatrix& b0, const QuatMatrix& b1,
                                                       const QuatMatrix& c, const SolverOptions& opt = {}) {
    auto ws = std::make_shared<const ThreeTermWorkspace>(a0, a1, b0, b1, c, opt);
    SolveResult<ThreeTermSolution> out;
    out.report = check_three_term(*ws, opt);
    if (out.report.solvable()) out.solution.emplace(std::move(ws));
    return out;
}

// ===========================================================================
// r[A, M L_F; R_K N, 0] = r[A M 0; N 0 K; 0 F 0] - r(K) - r(F)
// ===========================================================================

struct RankIdentity {
    long lhs = 0;
    long rhs = 0;
    double margin = 0.0;
};

/// A p x q, M p x s, N u x q, F t x s, K u x v.
inline RankIdentity check_rank_identity(const QuatMatrix& a, const QuatMatrix& m, const QuatMatrix& n,
                                        const QuatMatrix& f, const QuatMatrix& k, const SolverOptions& opt = {}) {
    if (m.rows() != a.rows() || n.cols() != a.cols() || f.cols() != m.cols() || k.rows() != n.rows())
        throw DimensionError("rank identity: nonconformable blocks");
    using detail::RankTally;
    const QuatMatrix ml = m * proj_L(f);
    const QuatMatrix rn = proj_R(k) * n;
    RankTally lhs(opt);
    const double scale = a.frobenius_norm() + m.frobenius_norm() + n.frobenius_norm();
    lhs.add(QuatMatrix::blocks({{a, ml}, {rn, QuatMatrix::zeros(n.rows(), m.cols())}}), 1, scale);
    RankTally rhs(opt);
    rhs.add(QuatMatrix::blocks({{a, m, QuatMatrix::zeros(a.rows(), k.cols())},
                                {n, QuatMatrix::zeros(n.rows(), m.cols()), k},
                                {QuatMatrix::zeros(f.rows(), a.cols()), f, QuatMatrix::zeros(f.rows(), k.cols())}}))
        .add(k, -1)
        .add(f, -1);
    return {lhs.value(), rhs.value(), std::min(lhs.margin(), rhs.margin())};
}

}  // namespace dqsylv
