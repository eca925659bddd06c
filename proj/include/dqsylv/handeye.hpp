#pragma once

// Hand-eye relation a x = y b between rigid motions, solved as the 1 x 1 case of AX = YB.

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "random.hpp"
#include "sylvester.hpp"

namespace dqsylv {

using Vec3 = std::array<double, 3>;

/// Scalar dual quaternion r + d eps.
struct DualQuaternion {
    Quaternion real;
    Quaternion dual;

    DualQuatMatrix to_matrix() const { return {QuatMatrix(1, 1, {real}), QuatMatrix(1, 1, {dual})}; }
    static DualQuaternion from_matrix(const DualQuatMatrix& m) {
        if (m.rows() != 1 || m.cols() != 1)
            throw DimensionError("expected a 1x1 dual quaternion matrix, got " + shape_str(m.rows(), m.cols()));
        return {m.standard()(0, 0), m.infinitesimal()(0, 0)};
    }

    friend bool operator==(const DualQuaternion&, const DualQuaternion&) = default;
};

inline DualQuaternion operator*(const DualQuaternion& p, const DualQuaternion& q) {
    return {p.real * q.real, p.real * q.dual + p.dual * q.real};
}
inline DualQuaternion operator-(const DualQuaternion& p, const DualQuaternion& q) {
    return {p.real - q.real, p.dual - q.dual};
}
inline DualQuaternion operator+(const DualQuaternion& p, const DualQuaternion& q) {
    return {p.real + q.real, p.dual + q.dual};
}

/// Quaternion conjugate of both parts; the inverse of a unit dual quaternion.
inline DualQuaternion conj(const DualQuaternion& q) { return {q.real.conj(), q.dual.conj()}; }

inline double dq_norm(const DualQuaternion& q) { return std::sqrt(q.real.norm2() + q.dual.norm2()); }

/// Real part of conj(r) d, which vanishes for unit dual quaternions.
inline double unit_defect(const DualQuaternion& q) { return (q.real.conj() * q.dual).w; }

/// |r| = 1 and Re(conj(r) d) = 0, both to `tol`.
inline bool is_unit(const DualQuaternion& q, double tol = 1e-10) {
    return std::abs(q.real.norm() - 1.0) <= tol && std::abs(unit_defect(q)) <= tol;
}

/// Closest unit dual quaternion: divide by |r|, then remove the component of d along r.
/// Requires r != 0.
inline DualQuaternion normalize_udq(const DualQuaternion& q) {
    const double n = q.real.norm();
    if (!(n > 0.0)) throw NumericalError("normalize_udq: zero standard part");
    DualQuaternion u{q.real * (1.0 / n), q.dual * (1.0 / n)};
    u.dual -= u.real * unit_defect(u);
    return u;
}

/// Rotation by `angle` about unit `axis`, followed by translation t:
/// r = cos(angle/2) + sin(angle/2) axis, d = t r / 2.
inline DualQuaternion pose_to_udq(const Vec3& axis, double angle, const Vec3& translation) {
    const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(len - 1.0) > 1e-9) throw std::invalid_argument("pose_to_udq: axis must be a unit vector");
    const double s = std::sin(angle / 2.0);
    const Quaternion r(std::cos(angle / 2.0), s * axis[0], s * axis[1], s * axis[2]);
    const Quaternion t(0.0, translation[0], translation[1], translation[2]);
    return {r, 0.5 * (t * r)};
}

/// Rotation axis/angle, translation and screw displacement of a unit dual quaternion.
struct ScrewParams {
    Vec3 axis{1.0, 0.0, 0.0};  ///< arbitrary when angle = 0
    double angle = 0.0;        ///< radians in [0, 2 pi]
    Vec3 translation{};
    double displacement = 0.0;  ///< translation along the axis
};

inline ScrewParams screw_params(const DualQuaternion& q) {
    ScrewParams p;
    const double v = std::sqrt(q.real.x * q.real.x + q.real.y * q.real.y + q.real.z * q.real.z);
    p.angle = 2.0 * std::atan2(v, q.real.w);
    if (v > 1e-12) p.axis = {q.real.x / v, q.real.y / v, q.real.z / v};
    const Quaternion t = 2.0 * (q.dual * q.real.conj());
    p.translation = {t.x, t.y, t.z};
    p.displacement = p.translation[0] * p.axis[0] + p.translation[1] * p.axis[1] + p.translation[2] * p.axis[2];
    return p;
}

inline DualQuaternion random_udq(Rng& rng, double translation_scale = 1.0) {
    const Quaternion r = random_unit_quaternion(rng);
    const Quaternion t(0.0, translation_scale * rng.normal(), translation_scale * rng.normal(),
                       translation_scale * rng.normal());
    return {r, 0.5 * (t * r)};
}

struct HandEyePair {
    DualQuaternion a;
    DualQuaternion b;
};

/// b random unit, a = y b x^-1; with noise > 0 every component of a is perturbed by
/// noise * N(0, 1) and a is renormalized.
inline std::vector<HandEyePair> gen_handeye_instance(const DualQuaternion& x, const DualQuaternion& y,
                                                     std::size_t count, double noise, std::uint64_t seed) {
    Rng rng = Rng(seed).split("handeye");
    std::vector<HandEyePair> out;
    out.reserve(count);
    const DualQuaternion x_inv = conj(x);
    for (std::size_t n = 0; n < count; ++n) {
        Rng r = rng.split(n);
        HandEyePair p;
        p.b = random_udq(r);
        p.a = y * p.b * x_inv;
        if (noise > 0.0) {
            auto jitter = [&](Quaternion& q) {
                q += noise * Quaternion(r.normal(), r.normal(), r.normal(), r.normal());
            };
            jitter(p.a.real);
            jitter(p.a.dual);
            p.a = normalize_udq(p.a);
        }
        out.push_back(p);
    }
    return out;
}

struct HandEyeOptions {
    std::size_t retries = 32;
    double unit_tol = 1e-10;      ///< input validation
    double min_standard = 1e-8;   ///< smallest acceptable |x0| before normalizing
    SolverOptions solver;
};

struct HandEyeSolution {
    DualQuaternion x;
    DualQuaternion y;
    double residual = 0.0;      ///< |a x - y b| after normalization
    double raw_residual = 0.0;  ///< same, before normalization
    std::size_t attempts = 0;
};

/// Draws random members of the general solution of a x = y b until one has a
/// usable standard part, then scales x and y by the same dual number 1/|x| so that x is
/// unit (y follows, since |a x| = |y b| for unit a, b). Empty when an input is not a
/// unit dual quaternion or the retry budget runs out.
inline std::optional<HandEyeSolution> solve_handeye_pair(const DualQuaternion& a, const DualQuaternion& b,
                                                         std::uint64_t seed, const HandEyeOptions& opt = {}) {
    if (!is_unit(a, opt.unit_tol) || !is_unit(b, opt.unit_tol)) return std::nullopt;
    const DualQuatMatrix am = a.to_matrix();
    const DualQuatMatrix bm = b.to_matrix();
    const SylvesterSolution family = solve_ax_eq_yb(am, bm, opt.solver);
    Rng rng = Rng(seed).split("handeye-solve");
    for (std::size_t attempt = 1; attempt <= opt.retries; ++attempt) {
        Rng r = rng.split(attempt);
        const SylvesterPair s = family.random(r);
        const DualQuaternion x = DualQuaternion::from_matrix(s.X);
        const DualQuaternion y = DualQuaternion::from_matrix(s.Y);
        const double n0 = x.real.norm();
        if (!(n0 > opt.min_standard) || y.real.norm() <= opt.min_standard) continue;

        // 1 / (n0 + n1 eps) = 1/n0 - n1/n0^2 eps, with n1 = Re(conj(x0) x1) / n0.
        const double n1 = unit_defect(x) / n0;
        const double s0 = 1.0 / n0;
        const double s1 = -n1 / (n0 * n0);
        auto scale = [&](const DualQuaternion& q) { return DualQuaternion{s0 * q.real, s0 * q.dual + s1 * q.real}; };

        HandEyeSolution out;
        out.raw_residual = dq_norm(a * x - y * b);
        out.x = scale(x);
        out.y = scale(y);
        out.residual = dq_norm(a * out.x - out.y * b);
        out.attempts = attempt;
        return out;
    }
    return std::nullopt;
}

}  // namespace dqsylv
