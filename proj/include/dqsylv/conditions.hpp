#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "quat_matrix.hpp"
#include "random.hpp"

namespace dqsylv {

struct SolverOptions {
    /// Relative tolerance for "projector expression = 0" tests.
    double solver_tol = 1e-8;
    /// Overrides the default rank threshold (max(2m,2n) eps sigma_max) with rel * sigma_max.
    std::optional<double> rank_rel_tol;
    /// Intermediates such as R_A0 A1 L_A0 are products with projectors and carry
    /// rounding noise even when they vanish exactly. Their singular values below
    /// derived_rank_tol times the scale of the originating factor count as zero.
    double derived_rank_tol = 1e-10;
    /// Relative rank threshold for the block-rank solvability conditions. Block
    /// matrices assembled from a consistent C are rank deficient only up to rounding,
    /// which the eps-based default can mistake for full rank. nullopt falls back to
    /// rank_rel_tol / the default.
    std::optional<double> condition_rank_rel_tol = 1e-10;
};

/// One "projector expression = 0" test.
struct ProjectorCheck {
    std::string name;
    double residual = 0.0;   ///< Frobenius norm of the expression
    double threshold = 0.0;  ///< solver_tol * (1 + scale)
    bool holds = false;

    double ratio() const { return threshold > 0.0 ? residual / threshold : 0.0; }
};

/// One "rank(lhs) = rank(rhs)" test. The margin is the distance (as a ratio) between
/// the rank threshold and the nearest singular value on either side, minimised over
/// every rank computation the test used.
struct RankCheck {
    std::string name;
    long lhs = 0;
    long rhs = 0;
    bool holds = false;
    double margin = std::numeric_limits<double>::infinity();
};

struct ConditionReport {
    std::vector<ProjectorCheck> projector;
    std::vector<RankCheck> rank;
    std::vector<std::string> diagnostics;

    bool projector_ok() const {
        for (const auto& c : projector)
            if (!c.holds) return false;
        return true;
    }
    bool rank_ok() const {
        for (const auto& c : rank)
            if (!c.holds) return false;
        return true;
    }
    bool agree() const { return rank.empty() || projector_ok() == rank_ok(); }
    /// Verdict. On disagreement the projector form wins.
    bool solvable() const { return projector_ok(); }

    /// A residual between the threshold and `band` times the threshold, or a rank
    /// decision with margin below `rank_band`, makes the verdict numerically fragile.
    bool in_dead_zone(double band = 1e3, double rank_band = 10.0) const {
        for (const auto& c : projector)
            if (c.residual > c.threshold && c.residual < band * c.threshold) return true;
        for (const auto& c : rank)
            if (c.margin < rank_band) return true;
        return false;
    }

    std::vector<std::string> failed() const {
        std::vector<std::string> out;
        for (const auto& c : projector)
            if (!c.holds) out.push_back(c.name);
        for (const auto& c : rank)
            if (!c.holds) out.push_back(c.name);
        return out;
    }
};

template <class T>
struct SolveResult {
    std::optional<T> solution;
    ConditionReport report;

    bool solvable() const { return solution.has_value(); }
    const T& value() const {
        if (!solution) throw std::logic_error("SolveResult::value on an unsolvable instance");
        return *solution;
    }
};

// ---------------------------------------------------------------------------
// Free parameters of general solutions
// ---------------------------------------------------------------------------

struct ParamShape {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

using ParamSet = std::vector<QuatMatrix>;

inline ParamSet zero_params(const std::vector<ParamShape>& shapes) {
    ParamSet out;
    out.reserve(shapes.size());
    for (const auto& s : shapes) out.push_back(QuatMatrix::zeros(s.rows, s.cols));
    return out;
}

inline ParamSet random_params(const std::vector<ParamShape>& shapes, Rng& rng) {
    ParamSet out;
    out.reserve(shapes.size());
    for (const auto& s : shapes) out.push_back(random_matrix(rng, s.rows, s.cols));
    return out;
}

inline void validate_params(const std::vector<ParamShape>& shapes, const ParamSet& params) {
    if (params.size() != shapes.size())
        throw DimensionError("expected " + std::to_string(shapes.size()) + " free parameters, got " +
                             std::to_string(params.size()));
    for (std::size_t n = 0; n < shapes.size(); ++n)
        if (params[n].rows() != shapes[n].rows || params[n].cols() != shapes[n].cols)
            throw DimensionError("free parameter " + shapes[n].name + " must be " +
                                 shape_str(shapes[n].rows, shapes[n].cols) + ", got " +
                                 shape_str(params[n].rows(), params[n].cols()));
}

// ---------------------------------------------------------------------------
// Helpers shared by the solvers
// ---------------------------------------------------------------------------

namespace detail {

inline ProjectorCheck projector_check(std::string name, const QuatMatrix& expr, double scale,
                                      const SolverOptions& opt) {
    ProjectorCheck c;
    c.name = std::move(name);
    c.residual = expr.frobenius_norm();
    c.threshold = opt.solver_tol * (1.0 + scale);
    // An infinite threshold would make every condition hold.
    if (!std::isfinite(c.residual) || !std::isfinite(c.threshold))
        throw NumericalError(c.name + ": non-finite residual or scale (overflow in the input?)");
    c.holds = c.residual <= c.threshold;
    return c;
}

inline double rank_margin(const RankInfo& r) {
    double m = std::numeric_limits<double>::infinity();
    if (r.tol <= 0.0) return m;
    if (r.rank > 0) m = std::min(m, r.smallest_kept / r.tol);
    if (r.largest_dropped > 0.0) m = std::min(m, r.tol / r.largest_dropped);
    return m;
}

/// Sums ranks of `plus` and subtracts ranks of `minus`, tracking the worst margin.
class RankTally {
public:
    explicit RankTally(const SolverOptions& opt) : opt_(opt) {}
    /// `reference` > 0 marks a matrix built from projector products, as for Pinv.
    RankTally& add(const QuatMatrix& m, long sign = 1, double reference = 0.0) {
        const RankInfo r = rank_info(m, opt_.condition_rank_rel_tol ? opt_.condition_rank_rel_tol : opt_.rank_rel_tol,
                                     opt_.derived_rank_tol * reference);
        value_ += sign * static_cast<long>(r.rank);
        margin_ = std::min(margin_, rank_margin(r));
        return *this;
    }
    long value() const { return value_; }
    double margin() const { return margin_; }

private:
    const SolverOptions& opt_;
    long value_ = 0;
    double margin_ = std::numeric_limits<double>::infinity();
};

inline RankCheck rank_check(std::string name, const RankTally& lhs, const RankTally& rhs) {
    RankCheck c;
    c.name = std::move(name);
    c.lhs = lhs.value();
    c.rhs = rhs.value();
    c.holds = c.lhs == c.rhs;
    c.margin = std::min(lhs.margin(), rhs.margin());
    return c;
}

inline void note_disagreement(ConditionReport& rep, const char* what) {
    if (!rep.agree())
        rep.diagnostics.push_back(std::string(what) +
                                  ": projector and rank conditions disagree; trusting the projector form");
}

/// Cached A^+, L_A, R_A for one operand.
struct Pinv {
    QuatMatrix a;
    QuatMatrix inv;
    QuatMatrix L;
    QuatMatrix R;

    Pinv() = default;
    /// `reference` > 0 marks a derived intermediate whose natural scale is `reference`.
    Pinv(QuatMatrix m, const SolverOptions& opt, double reference = 0.0) : a(std::move(m)) {
        inv = pinv(a, opt.rank_rel_tol, opt.derived_rank_tol * reference);
        L = proj_L(a, inv);
        R = proj_R(a, inv);
    }
};

}  // namespace detail

}  // namespace dqsylv
