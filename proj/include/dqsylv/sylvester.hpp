#pragma once

// General solution of AX - YB = C over dual quaternions, with A n x k, B l x m,
// C n x m, X k x m and Y n x l.
//
// Splitting into standard and infinitesimal parts gives
//   A0 X0 - Y0 B0 = C0
//   A0 X1 + A1 X0 - Y0 B1 - Y1 B0 = C1.
// Treating Y as known, the pair is the dual equation AX = C + YB. Its first
// solvability condition is an AXB = C equation in Y0; its second, after
// substituting the general Y0, is a three-term equation in (U2, Y1, U1).

#include <memory>
#include <utility>

#include "solvers.hpp"

namespace dqsylv {

/// Intermediates of the construction, all recomputable from (A, B, C).
struct SylvesterWorkspace {
    DualQuatMatrix A;
    DualQuatMatrix B;
    DualQuatMatrix C;

    std::shared_ptr<const DualLeftFactor> left;  // A0^+, L_A0, R_A0, A11, A2 and their inverses
    detail::Pinv b0;
    detail::Pinv a3;  // R_A0

    QuatMatrix A11;  // A1 L_A0
    QuatMatrix A2;   // R_A0 A11
    QuatMatrix A3;   // R_A0
    QuatMatrix C3;   // -R_A0 C0
    QuatMatrix B2;   // R_B0 B1
    QuatMatrix A4;   // R_A2 R_A0
    QuatMatrix A5;   // -A4 A1 A0^+
    QuatMatrix C4;   // A4 (A1 A0^+ C0 + C0 B0^+ B1 - C1)
    QuatMatrix A6;   // R_A4 A5
    QuatMatrix C5;   // R_A4 C4
    QuatMatrix B3;   // B2 L_B0
    QuatMatrix B4;   // C4 L_B0

    /// A4 U2 B2 + A4 Y1 B0 + A5 U1 B0 = C4, in three-term form.
    std::shared_ptr<const ThreeTermWorkspace> y_equation;

    double c4_scale = 0.0;  // |A1 A0^+ C0| + |C0 B0^+ B1| + |C1|

    SylvesterWorkspace(DualQuatMatrix a, DualQuatMatrix b, DualQuatMatrix c, const SolverOptions& opt)
        : A(std::move(a)), B(std::move(b)), C(std::move(c)) {
        if (A.rows() != C.rows() || B.cols() != C.cols())
            throw DimensionError("AX-YB=C: A " + shape_str(A.rows(), A.cols()) + ", B " +
                                 shape_str(B.rows(), B.cols()) + ", C " + shape_str(C.rows(), C.cols()));
        const QuatMatrix& a1 = A.infinitesimal();
        const QuatMatrix& b1 = B.infinitesimal();
        const QuatMatrix& c0 = C.standard();
        const QuatMatrix& c1 = C.infinitesimal();

        left = std::make_shared<const DualLeftFactor>(A, opt);
        b0 = detail::Pinv(B.standard(), opt);
        const detail::Pinv& pa0 = left->a0;

        A11 = left->a2;
        A2 = left->a3.a;
        A3 = pa0.R;
        a3 = detail::Pinv(A3, opt, 1.0);
        C3 = -(pa0.R * c0);
        B2 = b0.R * b1;
        A4 = left->a3.R * pa0.R;
        const QuatMatrix a1_a0p = a1 * pa0.inv;
        A5 = -(A4 * a1_a0p);
        const QuatMatrix t1 = a1_a0p * c0;
        const QuatMatrix t2 = c0 * b0.inv * b1;
        C4 = A4 * (t1 + t2 - c1);
        c4_scale = t1.frobenius_norm() + t2.frobenius_norm() + c1.frobenius_norm();

        ThreeTermScales scales;
        scales.a0 = 1.0;  // A4 is an orthogonal projector
        scales.a1 = a1.frobenius_norm() * pa0.inv.frobenius_norm();
        scales.b0 = b1.frobenius_norm();
        y_equation = std::make_shared<const ThreeTermWorkspace>(A4, A5, B2, b0.a, C4, opt, scales);
        A6 = y_equation->a.a;
        C5 = y_equation->a2;
        B3 = y_equation->b2.a;
        B4 = y_equation->b3;
    }
};

struct SylvesterReport {
    /// Projector conditions "C3 L_B0 = 0", "B4 L_B3 = 0" and the two block-rank
    /// conditions, with their agreement.
    ConditionReport conditions;
    /// R_A6 C5 and R_A4 B4, which vanish for every input.
    ProjectorCheck identity_a6_c5;
    ProjectorCheck identity_a4_b4;
    /// Block-rank test with a zero lower-left corner; informational, never part of the verdict.
    RankCheck zero_corner_variant;

    bool solvable() const { return conditions.solvable(); }
    bool agree() const { return conditions.agree(); }
    bool identities_hold() const { return identity_a6_c5.holds && identity_a4_b4.holds; }
};

inline SylvesterReport check_sylvester(const SylvesterWorkspace& w, const SolverOptions& opt = {}) {
    SylvesterReport rep;
    auto& cr = rep.conditions;
    const double c0n = w.C.standard().frobenius_norm();
    cr.projector.push_back(detail::projector_check("C3 L_B0 = 0", w.C3 * w.b0.L, c0n, opt));
    cr.projector.push_back(detail::projector_check("B4 L_B3 = 0", w.B4 * w.y_equation->b2.L, w.c4_scale, opt));

    SolverOptions loose = opt;
    loose.solver_tol *= 1e3;
    rep.identity_a6_c5 = detail::projector_check("R_A6 C5 = 0", w.y_equation->a.R * w.C5, w.c4_scale, loose);
    rep.identity_a4_b4 = detail::projector_check("R_A4 B4 = 0", w.y_equation->a0.R * w.B4, w.c4_scale, loose);

    using detail::RankTally;
    const QuatMatrix& a0 = w.A.standard();
    const QuatMatrix& a1 = w.A.infinitesimal();
    const QuatMatrix& b0 = w.B.standard();
    const QuatMatrix& b1 = w.B.infinitesimal();
    const QuatMatrix& c0 = w.C.standard();
    const QuatMatrix& c1 = w.C.infinitesimal();
    const std::size_t n = a0.rows(), k = a0.cols(), l = b0.rows(), m = b0.cols();
    const auto Z = [](std::size_t r, std::size_t c) { return QuatMatrix::zeros(r, c); };

    cr.rank.push_back(detail::rank_check("r[B0 0; -C0 A0] = r(B0) + r(A0)",
                                         RankTally(opt).add(QuatMatrix::blocks({{b0, Z(l, k)}, {-c0, a0}})),
                                         RankTally(opt).add(b0).add(a0)));
    // With a dual matrix embedded as [M0 M1; 0 M0], the equation becomes an ordinary
    // AX - YB = C between the embeddings. The matrix below is the Roth block matrix of
    // that equation up to row and column permutations; together with the standard-part
    // condition it characterises solvability.
    const QuatMatrix rhs_b = QuatMatrix::blocks({{b0, Z(l, m)}, {b1, b0}});
    const QuatMatrix rhs_a = QuatMatrix::blocks({{a0, a1}, {Z(n, k), a0}});
    const QuatMatrix big = QuatMatrix::blocks({{b0, Z(l, m), Z(l, k), Z(l, k)},
                                               {b1, b0, Z(l, k), Z(l, k)},
                                               {-c1, -c0, a0, a1},
                                               {-c0, Z(n, m), Z(n, k), a0}});
    cr.rank.push_back(detail::rank_check(
        "r[B0 0 0 0; B1 B0 0 0; -C1 -C0 A0 A1; -C0 0 0 A0] = r[B0 0; B1 B0] + r[A0 A1; 0 A0]",
        RankTally(opt).add(big), RankTally(opt).add(rhs_b).add(rhs_a)));

    // Same matrix with the lower-left block zeroed. It is not equivalent to solvability
    // (consistent instances can fail it); reported for comparison only.
    QuatMatrix zero_corner = big;
    zero_corner.set_block(2 * l + n, 0, Z(n, m));
    rep.zero_corner_variant = detail::rank_check(
        "r[B0 0 0 0; B1 B0 0 0; -C1 -C0 A0 A1; 0 0 0 A0] = r[B0 0; B1 B0] + r[A0 A1; 0 A0]",
        RankTally(opt).add(zero_corner), RankTally(opt).add(rhs_b).add(rhs_a));
    detail::note_disagreement(cr, "AX-YB=C");
    return rep;
}

inline SylvesterReport check_sylvester(const DualQuatMatrix& a, const DualQuatMatrix& b, const DualQuatMatrix& c,
                                       const SolverOptions& opt = {}) {
    return check_sylvester(SylvesterWorkspace(a, b, c, opt), opt);
}

struct SylvesterPair {
    DualQuatMatrix X;
    DualQuatMatrix Y;
};

/// General solution generator. Free parameters W1, W2 (k x m) and W3..W8 (n x l).
class SylvesterSolution {
public:
    explicit SylvesterSolution(std::shared_ptr<const SylvesterWorkspace> ws) : ws_(std::move(ws)) {}

    const SylvesterWorkspace& workspace() const { return *ws_; }

    std::vector<ParamShape> param_shapes() const {
        const std::size_t k = ws_->A.cols();
        const std::size_t m = ws_->B.cols();
        const std::size_t n = ws_->A.rows();
        const std::size_t l = ws_->B.rows();
        return {{"W1", k, m}, {"W2", k, m}, {"W3", n, l}, {"W4", n, l},
                {"W5", n, l}, {"W6", n, l}, {"W7", n, l}, {"W8", n, l}};
    }

    SylvesterPair instantiate(const ParamSet& w) const {
        validate_params(param_shapes(), w);
        const SylvesterWorkspace& ws = *ws_;
        // Three-term parameters: (U1, U2) -> Y1 terms W3, W4; (U3, U4) -> U1 terms W5, W6;
        // (U5, U6) -> U2 terms W7, W8.
        const ThreeTermTriple t = ThreeTermSolution(ws.y_equation).instantiate({w[2], w[3], w[4], w[5], w[6], w[7]});
        const QuatMatrix& u2 = t.x0;
        const QuatMatrix& y1 = t.x1;
        const QuatMatrix& u1 = t.x2;

        QuatMatrix y0 = ws.a3.inv * ws.C3 * ws.b0.inv + ws.a3.L * u1 + u2 * ws.b0.R;

        // AX = (C0 + Y0 B0) + (C1 + Y0 B1 + Y1 B0) eps
        const QuatMatrix& b0 = ws.B.standard();
        const QuatMatrix& b1 = ws.B.infinitesimal();
        const DualQuatMatrix rhs(ws.C.standard() + y0 * b0, ws.C.infinitesimal() + y0 * b1 + y1 * b0);
        SylvesterPair out;
        out.X = ws.left->construct(rhs, w[0], w[1]);
        out.Y = DualQuatMatrix(std::move(y0), y1);
        return out;
    }

    SylvesterPair particular() const { return instantiate(zero_params(param_shapes())); }
    SylvesterPair random(Rng& rng) const { return instantiate(random_params(param_shapes(), rng)); }

private:
    std::shared_ptr<const SylvesterWorkspace> ws_;
};

/// AX - YB - C
inline DualQuatMatrix sylvester_residual(const DualQuatMatrix& a, const DualQuatMatrix& b, const DualQuatMatrix& c,
                                         const SylvesterPair& s) {
    return a * s.X - s.Y * b - c;
}

struct SylvesterResult {
    std::optional<SylvesterSolution> solution;
    SylvesterReport report;

    bool solvable() const { return solution.has_value(); }
    const SylvesterSolution& value() const {
        if (!solution) throw std::logic_error("SylvesterResult::value on an unsolvable instance");
        return *solution;
    }
};

/// Throws NumericalError when the identities R_A6 C5 = 0, R_A4 B4 = 0 are violated
/// beyond 1e3 * solver_tol.
inline SylvesterResult solve_sylvester(const DualQuatMatrix& a, const DualQuatMatrix& b, const DualQuatMatrix& c,
                                       const SolverOptions& opt = {}) {
    auto ws = std::make_shared<const SylvesterWorkspace>(a, b, c, opt);
    SylvesterResult out;
    out.report = check_sylvester(*ws, opt);
    if (!out.report.identities_hold())
        throw NumericalError("AX-YB=C: internal identities violated (R_A6 C5 = " +
                             std::to_string(out.report.identity_a6_c5.residual) +
                             ", R_A4 B4 = " + std::to_string(out.report.identity_a4_b4.residual) + ")");
    if (out.report.solvable()) out.solution.emplace(std::move(ws));
    return out;
}

// ===========================================================================
// YB = C
// ===========================================================================

/// Y0 = C0 B0^+ + W R_B0, Y1 = (C2 - W B2) B0^+ + W1 R_B0, W = C00 B00^+ + W2 R_B00,
/// with B2 = R_B0 B1, C2 = C1 - C0 B0^+ B1, B00 = B2 L_B0, C00 = C2 L_B0.
struct YbWorkspace {
    detail::Pinv b0;
    QuatMatrix b1;
    DualQuatMatrix c;
    QuatMatrix B2;
    QuatMatrix C2;
    detail::Pinv b00;
    QuatMatrix C00;
    double c2_scale = 0.0;

    YbWorkspace(const DualQuatMatrix& b, DualQuatMatrix c_, const SolverOptions& opt)
        : b0(b.standard(), opt), b1(b.infinitesimal()), c(std::move(c_)) {
        if (c.cols() != b.cols())
            throw DimensionError("YB=C: B " + shape_str(b.rows(), b.cols()) + ", C " + shape_str(c.rows(), c.cols()));
        B2 = b0.R * b1;
        const QuatMatrix t = c.standard() * b0.inv * b1;
        C2 = c.infinitesimal() - t;
        b00 = detail::Pinv(B2 * b0.L, opt, b1.frobenius_norm());
        C00 = C2 * b0.L;
        c2_scale = c.infinitesimal().frobenius_norm() + t.frobenius_norm();
    }
};

class YbSolution {
public:
    explicit YbSolution(std::shared_ptr<const YbWorkspace> ws) : ws_(std::move(ws)) {}

    std::vector<ParamShape> param_shapes() const {
        const std::size_t n = ws_->c.rows();
        const std::size_t k = ws_->b0.a.rows();
        return {{"W1", n, k}, {"W2", n, k}};
    }
    DualQuatMatrix instantiate(const ParamSet& p) const {
        validate_params(param_shapes(), p);
        const YbWorkspace& w = *ws_;
        const QuatMatrix wm = w.C00 * w.b00.inv + p[1] * w.b00.R;
        QuatMatrix y0 = w.c.standard() * w.b0.inv + wm * w.b0.R;
        QuatMatrix y1 = (w.C2 - wm * w.B2) * w.b0.inv + p[0] * w.b0.R;
        return {std::move(y0), std::move(y1)};
    }
    DualQuatMatrix particular() const { return instantiate(zero_params(param_shapes())); }

private:
    std::shared_ptr<const YbWorkspace> ws_;
};

inline SolveResult<YbSolution> solve_yb_eq_c(const DualQuatMatrix& b, const DualQuatMatrix& c,
                                             const SolverOptions& opt = {}) {
    auto ws = std::make_shared<const YbWorkspace>(b, c, opt);
    SolveResult<YbSolution> out;
    auto& rep = out.report;
    rep.projector.push_back(
        detail::projector_check("C0 L_B0 = 0", c.standard() * ws->b0.L, c.standard().frobenius_norm(), opt));
    rep.projector.push_back(detail::projector_check("C00 L_B00 = 0", ws->C00 * ws->b00.L, ws->c2_scale, opt));

    using detail::RankTally;
    const QuatMatrix& b0 = b.standard();
    const QuatMatrix& b1 = b.infinitesimal();
    const QuatMatrix z = QuatMatrix::zeros(b0.rows(), b0.cols());
    rep.rank.push_back(detail::rank_check("r[B0; C0] = r(B0)",
                                          RankTally(opt).add(QuatMatrix::blocks({{b0}, {c.standard()}})),
                                          RankTally(opt).add(b0)));
    rep.rank.push_back(detail::rank_check(
        "r[C1 C0; B0 0; B1 B0] = r[B0 0; B1 B0]",
        RankTally(opt).add(QuatMatrix::blocks({{c.infinitesimal(), c.standard()}, {b0, z}, {b1, b0}})),
        RankTally(opt).add(QuatMatrix::blocks({{b0, z}, {b1, b0}}))));
    detail::note_disagreement(rep, "YB=C");
    if (rep.solvable()) out.solution.emplace(std::move(ws));
    return out;
}

// ===========================================================================
// AX = YB
// ===========================================================================

/// Always solvable: the C = 0 case of the general construction. Zero free
/// parameters give X = 0, Y = 0.
inline SylvesterSolution solve_ax_eq_yb(const DualQuatMatrix& a, const DualQuatMatrix& b,
                                        const SolverOptions& opt = {}) {
    auto ws = std::make_shared<const SylvesterWorkspace>(a, b, DualQuatMatrix::zeros(a.rows(), b.cols()), opt);
    return SylvesterSolution(std::move(ws));
}

}  // namespace dqsylv
