#pragma once

// Randomized end-to-end checks shared by the acceptance binary and `dqsylv selftest`.
// Each check is deterministic in its seed and reports a one-line summary.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "handeye.hpp"
#include "imagecipher.hpp"
#include "oracle.hpp"
#include "sylvester.hpp"

namespace dqsylv {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct CheckConfig {
    std::uint64_t seed = 20240611;
    /// Instance count; 0 means the check's default.
    std::size_t trials = 0;
    SolverOptions solver;
    OracleOptions oracle;
};

// ---------------------------------------------------------------------------
// Instance generation
// ---------------------------------------------------------------------------

enum class InstanceKind {
    consistent,           ///< C = A X - Y B for random X, Y
    standard_consistent,  ///< standard part consistent, infinitesimal part random
    random,               ///< C random
};

struct SylvesterInstance {
    DualQuatMatrix A;
    DualQuatMatrix B;
    DualQuatMatrix C;
    InstanceKind kind = InstanceKind::random;
};

/// Rank min(r, c) - deficit, clamped at 0.
inline QuatMatrix random_deficient_matrix(Rng& rng, std::size_t r, std::size_t c, std::size_t deficit) {
    const std::size_t full = std::min(r, c);
    return random_rank_matrix(rng, r, c, full > deficit ? full - deficit : 0);
}

/// Dimensions uniform in [1, max_dim]. With `deficient`, A0 and B0 lose 1-2 ranks.
inline SylvesterInstance random_sylvester_instance(Rng& rng, std::size_t max_dim, InstanceKind kind,
                                                   bool deficient) {
    const std::size_t n = rng.index(1, max_dim), k = rng.index(1, max_dim);
    const std::size_t l = rng.index(1, max_dim), m = rng.index(1, max_dim);
    SylvesterInstance s;
    s.kind = kind;
    QuatMatrix a0 = deficient ? random_deficient_matrix(rng, n, k, rng.index(1, 2)) : random_matrix(rng, n, k);
    QuatMatrix b0 = deficient ? random_deficient_matrix(rng, l, m, rng.index(1, 2)) : random_matrix(rng, l, m);
    s.A = DualQuatMatrix(std::move(a0), random_matrix(rng, n, k));
    s.B = DualQuatMatrix(std::move(b0), random_matrix(rng, l, m));
    const DualQuatMatrix x = random_dq_matrix(rng, k, m);
    const DualQuatMatrix y = random_dq_matrix(rng, n, l);
    s.C = s.A * x - y * s.B;
    if (kind == InstanceKind::standard_consistent) s.C.infinitesimal() = random_matrix(rng, n, m);
    if (kind == InstanceKind::random) s.C = random_dq_matrix(rng, n, m);
    return s;
}

/// Smooth gradients plus seeded texture, so SSIM windows see real structure.
inline ColorImage synthetic_image(std::size_t width, std::size_t height, std::uint64_t seed) {
    Rng rng(seed);
    const double fx = rng.uniform(0.05, 0.3), fy = rng.uniform(0.05, 0.3), phase = rng.uniform(0.0, 6.283);
    ColorImage img(width, height);
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t c = 0; c < width; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const double base = 127.5 + 100.0 * std::sin(fx * c + fy * r + phase + 2.0 * ch);
                img.at(r, c, ch) = quantize_channel((base + rng.uniform(-25.0, 25.0)) / 255.0);
            }
    return img;
}

namespace detail {

inline std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

template <class F>
CheckResult timed(std::string name, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r = body();
    r.name = std::move(name);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline std::size_t trials_or(const CheckConfig& cfg, std::size_t fallback) {
    return cfg.trials ? cfg.trials : fallback;
}

/// PPM bytes -> image, through the on-disk encoding.
inline ColorImage ppm_round_trip(const ColorImage& img) {
    std::stringstream ss;
    write_ppm(ss, img);
    return read_ppm(ss);
}

inline DualQuatMatrix dqm_round_trip(const DualQuatMatrix& m) {
    std::stringstream ss;
    write_dqm(ss, m);
    return read_dqm(ss);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Image cipher pipeline
// ---------------------------------------------------------------------------

struct CipherPipelineStats {
    double ssim0 = 0.0;
    double ssim1 = 0.0;
    int max_channel_error = 0;
    double relative_error = 0.0;  ///< |X_decrypted - X| / |X|
    bool plausible = false;
    double seconds = 0.0;
};

/// keygen -> encrypt -> .dqm -> decrypt -> decode on two synthetic PPM images.
inline CipherPipelineStats run_cipher_pipeline(std::size_t size, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const Rng root(seed);
    const ColorImage img0 = detail::ppm_round_trip(synthetic_image(size, size, root.split("image-0").seed()));
    const ColorImage img1 = detail::ppm_round_trip(synthetic_image(size, size, root.split("image-1").seed()));
    const CipherKeys keys = keygen(size, size, root.split("keys").seed());
    const DualQuatMatrix x = encode_pair(img0, img1);
    const DualQuatMatrix c = detail::dqm_round_trip(encrypt(x, keys.book, keys.Y));
    const DecryptResult d = decrypt(c, keys.book, keys.Y);
    const auto [out0, out1] = decode_pair(d.X);

    CipherPipelineStats s;
    s.ssim0 = ssim(img0, out0);
    s.ssim1 = ssim(img1, out1);
    for (std::size_t n = 0; n < img0.rgb.size(); ++n) {
        s.max_channel_error = std::max(s.max_channel_error, std::abs(int(img0.rgb[n]) - int(out0.rgb[n])));
        s.max_channel_error = std::max(s.max_channel_error, std::abs(int(img1.rgb[n]) - int(out1.rgb[n])));
    }
    s.relative_error = dq_norm(d.X - x) / dq_norm(x);
    s.plausible = d.plausible;
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

inline CheckResult check_cipher_ssim(const CheckConfig& cfg) {
    return detail::timed("cipher-ssim", [&] {
        const CipherPipelineStats s = run_cipher_pipeline(64, cfg.seed);
        CheckResult r;
        r.passed = s.ssim0 >= 0.99 && s.ssim1 >= 0.99 && s.seconds <= 10.0;
        r.detail = detail::fmt("64x64 pair: ssim %.6f / %.6f (need >= 0.99), %.2f s (limit 10 s)", s.ssim0,
                               s.ssim1, s.seconds);
        return r;
    });
}

inline CheckResult check_cipher_exactness(const CheckConfig& cfg) {
    return detail::timed("cipher-exactness", [&] {
        const CipherPipelineStats s = run_cipher_pipeline(64, cfg.seed);
        CheckResult r;
        r.passed = s.max_channel_error <= 1 && s.relative_error <= 1e-9 && s.plausible;
        r.detail = detail::fmt("max channel error %d (limit 1), relative float error %.3e (limit 1e-9)",
                               s.max_channel_error, s.relative_error);
        return r;
    });
}

// ---------------------------------------------------------------------------
// General equation
// ---------------------------------------------------------------------------

/// Constructed-consistent instances with rank-deficient A0, B0: solvable verdict and
/// small residual over random free parameters.
inline CheckResult check_sylvester_solver(const CheckConfig& cfg, std::size_t draws = 10) {
    return detail::timed("sylvester-solver", [&] {
        const std::size_t count = detail::trials_or(cfg, 100);
        const Rng root = Rng(cfg.seed).split("sylvester-solver");
        std::size_t unsolvable = 0, over = 0;
        double worst = 0.0;
        for (std::size_t t = 0; t < count; ++t) {
            Rng rng = root.split(t);
            const SylvesterInstance s = random_sylvester_instance(rng, 6, InstanceKind::consistent, true);
            const SylvesterResult res = solve_sylvester(s.A, s.B, s.C, cfg.solver);
            if (!res.solvable()) {
                ++unsolvable;
                continue;
            }
            const double bound = 1e-8 * (1.0 + dq_norm(s.C));
            Rng free = rng.split("free");
            for (std::size_t d = 0; d < draws; ++d) {
                const double e = dq_norm(sylvester_residual(s.A, s.B, s.C, res.value().random(free)));
                worst = std::max(worst, e / (1.0 + dq_norm(s.C)));
                if (e > bound) ++over;
            }
        }
        CheckResult r;
        r.passed = unsolvable == 0 && over == 0;
        r.detail = detail::fmt("%zu instances x %zu draws: %zu unsolvable verdicts, %zu residuals over bound, "
                               "worst relative residual %.3e (limit 1e-8)",
                               count, draws, unsolvable, over, worst);
        return r;
    });
}

struct EquivalenceStats {
    std::size_t total = 0;
    std::size_t dead_zone = 0;
    std::size_t disagreements = 0;  ///< outside the dead zone
    std::size_t consistent = 0;
    std::size_t zero_corner_mismatch = 0;  ///< informational
    std::vector<std::string> log;
};

/// Oracle residual within a factor `band` of its threshold, either side.
inline bool oracle_in_dead_zone(const OracleResult& o, double band = 1e3) {
    return o.residual > o.threshold / band && o.residual < o.threshold * band;
}

inline EquivalenceStats run_equivalence_sweep(const CheckConfig& cfg, std::size_t count) {
    EquivalenceStats st;
    const Rng root = Rng(cfg.seed).split("equivalence");
    for (std::size_t t = 0; t < count; ++t) {
        Rng rng = root.split(t);
        const auto kind = static_cast<InstanceKind>(t % 3);
        const SylvesterInstance s = random_sylvester_instance(rng, 5, kind, rng.coin());
        const SylvesterReport rep = check_sylvester(s.A, s.B, s.C, cfg.solver);
        const OracleResult o = oracle_solve(s.A, s.B, s.C, cfg.oracle);
        const bool cond2 = rep.conditions.projector_ok();
        const bool cond3 = rep.conditions.rank_ok();
        ++st.total;
        if (o.consistent) ++st.consistent;
        const bool zero_corner = rep.conditions.rank[0].holds && rep.zero_corner_variant.holds;
        if (zero_corner != o.consistent) ++st.zero_corner_mismatch;
        if (rep.conditions.in_dead_zone() || oracle_in_dead_zone(o)) {
            ++st.dead_zone;
            st.log.push_back(detail::fmt("instance %zu in dead zone (oracle residual %.3e, threshold %.3e)", t,
                                         o.residual, o.threshold));
            continue;
        }
        if (cond2 != cond3 || cond2 != o.consistent) {
            ++st.disagreements;
            st.log.push_back(detail::fmt("instance %zu: projector %d, rank %d, oracle %d", t, int(cond2),
                                         int(cond3), int(o.consistent)));
        }
    }
    return st;
}

inline CheckResult check_equivalence(const CheckConfig& cfg) {
    return detail::timed("equivalence", [&] {
        const EquivalenceStats st = run_equivalence_sweep(cfg, detail::trials_or(cfg, 200));
        CheckResult r;
        const double dz = st.total ? double(st.dead_zone) / double(st.total) : 0.0;
        r.passed = st.disagreements == 0 && dz <= 0.05;
        r.detail = detail::fmt("%zu instances (%zu consistent): %zu three-way disagreements, %zu in dead zone "
                               "(%.1f%%, limit 5%%); zero-corner rank variant wrong on %zu",
                               st.total, st.consistent, st.disagreements, st.dead_zone, 100.0 * dz,
                               st.zero_corner_mismatch);
        for (const auto& line : st.log) r.detail += "\n    " + line;
        return r;
    });
}

// ---------------------------------------------------------------------------
// Rank identity and pseudoinverse
// ---------------------------------------------------------------------------

inline CheckResult check_rank_identity_sweep(const CheckConfig& cfg) {
    return detail::timed("rank-identity", [&] {
        const std::size_t count = detail::trials_or(cfg, 50);
        const Rng root = Rng(cfg.seed).split("rank-identity");
        std::size_t bad = 0;
        for (std::size_t t = 0; t < count; ++t) {
            Rng rng = root.split(t);
            auto dim = [&] { return rng.index(1, 5); };
            const std::size_t p = dim(), q = dim(), s = dim(), u = dim(), tt = dim(), v = dim();
            auto block = [&](std::size_t r, std::size_t c) {
                return random_rank_matrix(rng, r, c, rng.index(0, std::min(r, c)));
            };
            const QuatMatrix a = block(p, q), m = block(p, s), n = block(u, q), f = block(tt, s), k = block(u, v);
            const RankIdentity id = check_rank_identity(a, m, n, f, k, cfg.solver);
            if (id.lhs != id.rhs) ++bad;
        }
        CheckResult r;
        r.passed = bad == 0;
        r.detail = detail::fmt("%zu block instances: %zu with lhs rank != rhs rank", count, bad);
        return r;
    });
}

inline CheckResult check_penrose(const CheckConfig& cfg) {
    return detail::timed("penrose", [&] {
        const std::size_t count = detail::trials_or(cfg, 100);
        const Rng root = Rng(cfg.seed).split("penrose");
        std::size_t bad = 0;
        double worst = 0.0, worst_double = 0.0;
        for (std::size_t t = 0; t < count; ++t) {
            Rng rng = root.split(t);
            const std::size_t r = rng.index(1, 20), c = rng.index(1, 15);
            const std::size_t full = std::min(r, c);
            const QuatMatrix a = t % 2 == 0 ? random_matrix(rng, r, c) : random_rank_matrix(rng, r, c, rng.index(0, full));
            const QuatMatrix x = pinv(a);
            const double scale = 1.0 + a.frobenius_norm();
            const double res = std::max({(a * x * a - a).frobenius_norm(), (x * a * x - x).frobenius_norm(),
                                         (conj_transpose(a * x) - a * x).frobenius_norm(),
                                         (conj_transpose(x * a) - x * a).frobenius_norm()}) /
                               scale;
            const double back = (pinv(x) - a).frobenius_norm() / scale;
            worst = std::max(worst, res);
            worst_double = std::max(worst_double, back);
            if (res > 1e-10 || back > 1e-9) ++bad;
        }
        CheckResult r;
        r.passed = bad == 0;
        r.detail = detail::fmt("%zu matrices up to 20x15: worst Penrose residual %.3e (limit 1e-10), "
                               "worst |pinv(pinv(A)) - A| %.3e (limit 1e-9), %zu failures",
                               count, worst, worst_double, bad);
        return r;
    });
}

// ---------------------------------------------------------------------------
// Special cases
// ---------------------------------------------------------------------------

inline CheckResult check_special_cases(const CheckConfig& cfg) {
    return detail::timed("special-cases", [&] {
        const std::size_t count = detail::trials_or(cfg, 50);
        const Rng root = Rng(cfg.seed).split("special-cases");
        std::size_t ax_fail = 0, yb_fail = 0, axyb_fail = 0, axyb_unsolvable = 0;
        double ax_worst = 0.0, yb_worst = 0.0, axyb_worst = 0.0;
        for (std::size_t t = 0; t < count; ++t) {
            Rng rng = root.split(t);
            auto dim = [&] { return rng.index(1, 6); };
            {  // A X = B
                const std::size_t m = dim(), n = dim(), p = dim();
                const DualQuatMatrix a(random_deficient_matrix(rng, m, n, rng.index(0, 1)), random_matrix(rng, m, n));
                const DualQuatMatrix b = a * random_dq_matrix(rng, n, p);
                const auto res = solve_dq_ax_eq_b(a, b, cfg.solver);
                if (!res.solvable()) {
                    ++ax_fail;
                } else {
                    Rng free = rng.split("ax");
                    const double e = dq_norm(a * res.value().instantiate(random_params(res.value().param_shapes(), free)) - b);
                    ax_worst = std::max(ax_worst, e);
                    if (e > 1e-9) ++ax_fail;
                }
            }
            {  // Y B = C
                const std::size_t n = dim(), k = dim(), l = dim();
                const DualQuatMatrix b(random_deficient_matrix(rng, k, l, rng.index(0, 1)), random_matrix(rng, k, l));
                const DualQuatMatrix c = random_dq_matrix(rng, n, k) * b;
                const auto res = solve_yb_eq_c(b, c, cfg.solver);
                if (!res.solvable()) {
                    ++yb_fail;
                } else {
                    Rng free = rng.split("yb");
                    const double e = dq_norm(res.value().instantiate(random_params(res.value().param_shapes(), free)) * b - c);
                    yb_worst = std::max(yb_worst, e);
                    if (e > 1e-9) ++yb_fail;
                }
            }
            {  // A X = Y B
                const std::size_t n = dim(), k = dim(), l = dim(), m = dim();
                const DualQuatMatrix a = random_dq_matrix(rng, n, k);
                const DualQuatMatrix b = random_dq_matrix(rng, l, m);
                const DualQuatMatrix zero = DualQuatMatrix::zeros(n, m);
                if (!check_sylvester(a, b, zero, cfg.solver).solvable()) ++axyb_unsolvable;
                Rng free = rng.split("axyb");
                const SylvesterPair s = solve_ax_eq_yb(a, b, cfg.solver).random(free);
                const double e = dq_norm(a * s.X - s.Y * b);
                axyb_worst = std::max(axyb_worst, e);
                if (e > 1e-9) ++axyb_fail;
            }
        }
        CheckResult r;
        r.passed = ax_fail == 0 && yb_fail == 0 && axyb_fail == 0 && axyb_unsolvable == 0;
        r.detail = detail::fmt("%zu each: AX=B worst %.3e (%zu fail), YB=C worst %.3e (%zu fail), "
                               "AX=YB worst %.3e (%zu fail, %zu unsolvable verdicts); limit 1e-9",
                               count, ax_worst, ax_fail, yb_worst, yb_fail, axyb_worst, axyb_fail, axyb_unsolvable);
        return r;
    });
}

// ---------------------------------------------------------------------------
// Hand-eye
// ---------------------------------------------------------------------------

inline CheckResult check_handeye(const CheckConfig& cfg) {
    return detail::timed("handeye", [&] {
        const std::size_t count = detail::trials_or(cfg, 20);
        Rng rng = Rng(cfg.seed).split("handeye-truth");
        const DualQuaternion x = random_udq(rng), y = random_udq(rng);
        double worst_clean = 0.0, worst_noisy = 0.0;
        std::size_t degenerate = 0;
        auto run = [&](double noise, double& worst) {
            const auto pairs = gen_handeye_instance(x, y, count, noise, cfg.seed);
            for (std::size_t n = 0; n < pairs.size(); ++n) {
                const auto s = solve_handeye_pair(pairs[n].a, pairs[n].b, cfg.seed + n);
                if (!s) {
                    ++degenerate;
                    continue;
                }
                worst = std::max(worst, s->residual);
            }
        };
        run(0.0, worst_clean);
        run(1e-3, worst_noisy);
        CheckResult r;
        r.passed = degenerate == 0 && worst_clean <= 1e-8 && worst_noisy <= 1e-2;
        r.detail = detail::fmt("%zu pairs: noiseless worst residual %.3e (limit 1e-8), noise 1e-3 worst %.3e "
                               "(limit 1e-2), %zu degenerate",
                               count, worst_clean, worst_noisy, degenerate);
        return r;
    });
}

// ---------------------------------------------------------------------------
// Generality of the construction at desk scale
// ---------------------------------------------------------------------------

/// Least-squares fit of the free parameters so that the construction reproduces `target`.
/// Returns the reconstruction residual |instantiate(W) - target|.
inline double fit_free_parameters(const SylvesterSolution& family, const SylvesterPair& target) {
    const auto shapes = family.param_shapes();
    auto flatten = [](const SylvesterPair& p) {
        Eigen::VectorXd v(realvec(p.X.standard()).size() * 2 + realvec(p.Y.standard()).size() * 2);
        v << realvec(p.X.standard()), realvec(p.X.infinitesimal()), realvec(p.Y.standard()),
            realvec(p.Y.infinitesimal());
        return v;
    };
    const ParamSet zero = zero_params(shapes);
    const Eigen::VectorXd base = flatten(family.instantiate(zero));
    std::size_t nparams = 0;
    for (const auto& s : shapes) nparams += 4 * s.rows * s.cols;
    Eigen::MatrixXd jac(base.size(), static_cast<Eigen::Index>(nparams));
    Eigen::Index col = 0;
    for (std::size_t p = 0; p < shapes.size(); ++p)
        for (std::size_t e = 0; e < shapes[p].rows * shapes[p].cols; ++e)
            for (int comp = 0; comp < 4; ++comp) {
                ParamSet w = zero;
                Quaternion& q = w[p].entries()[e];
                (comp == 0 ? q.w : comp == 1 ? q.x : comp == 2 ? q.y : q.z) = 1.0;
                jac.col(col++) = flatten(family.instantiate(w)) - base;
            }
    const Eigen::VectorXd rhs = flatten(target) - base;
    const Eigen::VectorXd w = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(jac).solve(rhs);
    return (jac * w - rhs).norm();
}

inline CheckResult check_generality(const CheckConfig& cfg) {
    return detail::timed("generality", [&] {
        const std::size_t count = detail::trials_or(cfg, 20);
        const Rng root = Rng(cfg.seed).split("generality");
        std::size_t bad = 0;
        double worst = 0.0;
        for (std::size_t t = 0; t < count; ++t) {
            Rng rng = root.split(t);
            const SylvesterInstance s = random_sylvester_instance(rng, 2, InstanceKind::consistent, rng.coin());
            const SylvesterResult res = solve_sylvester(s.A, s.B, s.C, cfg.solver);
            const OracleResult o = oracle_solve(s.A, s.B, s.C, cfg.oracle);
            if (!res.solvable() || !o.solution) {
                ++bad;
                continue;
            }
            const double e = fit_free_parameters(res.value(), *o.solution);
            worst = std::max(worst, e);
            if (e > 1e-8) ++bad;
        }
        CheckResult r;
        r.passed = bad == 0;
        r.detail = detail::fmt("%zu instances with dims <= 2: worst reconstruction residual of the oracle "
                               "solution inside the solution family %.3e (limit 1e-8), %zu failures",
                               count, worst, bad);
        return r;
    });
}

}  // namespace dqsylv
