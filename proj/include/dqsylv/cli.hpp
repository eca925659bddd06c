#pragma once

// `dqsylv` command line: solve, check, cipher, selftest, handeye.
//
// Exit codes: 0 success, 1 unsolvable / mismatch / rejected, 2 usage or input error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "handeye.hpp"
#include "imagecipher.hpp"
#include "matrix_io.hpp"
#include "report.hpp"
#include "selftest.hpp"

namespace dqsylv::cli {

enum ExitCode : int { kOk = 0, kUnsolvable = 1, kUsage = 2, kNumerical = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

using dqsylv::detail::fmt;

inline void write_json(const std::string& path, const nlohmann::json& j) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline std::string shape(const DualQuatMatrix& m) { return shape_str(m.rows(), m.cols()); }

inline std::string vec3(const Vec3& v) { return fmt("(%.6f, %.6f, %.6f)", v[0], v[1], v[2]); }

inline void expect_files(const std::vector<std::string>& files, std::size_t n, const std::string& what) {
    if (files.size() != n)
        throw UsageError(what + " expects " + std::to_string(n) + " input files, got " + std::to_string(files.size()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
    std::string equation = "axmyb";
    std::vector<std::string> files;
    std::string free = "zero";
    std::uint64_t seed = 0;
    double tol = 1e-8;
    std::string report;
    std::string out_dir = ".";
};

inline int cmd_solve(const SolveArgs& a, std::ostream& out) {
    using detail::fmt;
    SolverOptions opt;
    opt.solver_tol = a.tol;
    Rng free_rng = Rng(a.seed).split("free-parameters");
    const bool random_free = a.free == "random";
    auto params = [&](const std::vector<ParamShape>& shapes) {
        return random_free ? random_params(shapes, free_rng) : zero_params(shapes);
    };
    const std::filesystem::path dir(a.out_dir);
    nlohmann::json rep = {{"command", "solve"}, {"equation", a.equation}, {"free", a.free}, {"seed", a.seed}};
    std::vector<std::string> written;
    auto save = [&](const char* name, const auto& m) {
        std::filesystem::create_directories(dir);
        const std::string p = (dir / name).string();
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, QuatMatrix>)
            save_qm(p, m);
        else
            save_dqm(p, m);
        written.push_back(p);
    };

    double residual = 0.0, scale = 0.0;
    bool solvable = false;
    if (a.equation == "axb") {
        detail::expect_files(a.files, 3, "axb");
        const QuatMatrix A = load_qm(a.files[0]), B = load_qm(a.files[1]), C = load_qm(a.files[2]);
        out << "equation: A X B = C  (A " << shape_str(A.rows(), A.cols()) << ", B " << shape_str(B.rows(), B.cols())
            << ", C " << shape_str(C.rows(), C.cols()) << ")\n";
        const auto res = solve_axb_eq_c(A, B, C, opt);
        print_report(out, res.report);
        rep["conditions"] = to_json(res.report);
        if ((solvable = res.solvable())) {
            const QuatMatrix X = res.value().instantiate(params(res.value().param_shapes()));
            residual = (A * X * B - C).frobenius_norm();
            scale = 1.0 + C.frobenius_norm();
            save("X.qm", X);
        }
    } else if (a.equation == "ax-b") {
        detail::expect_files(a.files, 2, "ax-b");
        const DualQuatMatrix A = load_dqm(a.files[0]), B = load_dqm(a.files[1]);
        out << "equation: A X = B  (A " << detail::shape(A) << ", B " << detail::shape(B) << ")\n";
        const auto res = solve_dq_ax_eq_b(A, B, opt);
        print_report(out, res.report);
        rep["conditions"] = to_json(res.report);
        if ((solvable = res.solvable())) {
            const DualQuatMatrix X = res.value().instantiate(params(res.value().param_shapes()));
            residual = dq_norm(A * X - B);
            scale = 1.0 + dq_norm(B);
            save("X.dqm", X);
        }
    } else if (a.equation == "yb-c") {
        detail::expect_files(a.files, 2, "yb-c");
        const DualQuatMatrix B = load_dqm(a.files[0]), C = load_dqm(a.files[1]);
        out << "equation: Y B = C  (B " << detail::shape(B) << ", C " << detail::shape(C) << ")\n";
        const auto res = solve_yb_eq_c(B, C, opt);
        print_report(out, res.report);
        rep["conditions"] = to_json(res.report);
        if ((solvable = res.solvable())) {
            const DualQuatMatrix Y = res.value().instantiate(params(res.value().param_shapes()));
            residual = dq_norm(Y * B - C);
            scale = 1.0 + dq_norm(C);
            save("Y.dqm", Y);
        }
    } else if (a.equation == "ax-yb") {
        detail::expect_files(a.files, 2, "ax-yb");
        const DualQuatMatrix A = load_dqm(a.files[0]), B = load_dqm(a.files[1]);
        out << "equation: A X = Y B  (A " << detail::shape(A) << ", B " << detail::shape(B) << ")\n";
        out << "always solvable";
        if (!random_free) out << "; zero free parameters give X = 0, Y = 0 (use --free random)";
        out << '\n';
        const SylvesterSolution sol = solve_ax_eq_yb(A, B, opt);
        const SylvesterPair s = sol.instantiate(params(sol.param_shapes()));
        solvable = true;
        residual = dq_norm(A * s.X - s.Y * B);
        scale = 1.0 + dq_norm(A) * dq_norm(B);
        save("X.dqm", s.X);
        save("Y.dqm", s.Y);
    } else if (a.equation == "axmyb") {
        detail::expect_files(a.files, 3, "axmyb");
        const DualQuatMatrix A = load_dqm(a.files[0]), B = load_dqm(a.files[1]), C = load_dqm(a.files[2]);
        out << "equation: A X - Y B = C  (A " << detail::shape(A) << ", B " << detail::shape(B) << ", C "
            << detail::shape(C) << ")\n";
        const SylvesterResult res = solve_sylvester(A, B, C, opt);
        print_report(out, res.report);
        rep["conditions"] = to_json(res.report);
        if ((solvable = res.solvable())) {
            const SylvesterPair s = res.value().instantiate(params(res.value().param_shapes()));
            residual = dq_norm(sylvester_residual(A, B, C, s));
            scale = 1.0 + dq_norm(C);
            save("X.dqm", s.X);
            save("Y.dqm", s.Y);
        }
    } else {
        throw UsageError("unknown equation '" + a.equation + "'");
    }

    rep["verdict"] = solvable ? "solvable" : "unsolvable";
    if (!solvable) {
        out << "verdict: UNSOLVABLE\n";
        detail::write_json(a.report, rep);
        return kUnsolvable;
    }
    const double bound = a.tol * scale;
    rep["residual"] = residual;
    rep["residual_bound"] = bound;
    rep["outputs"] = written;
    out << "verdict: solvable\n" << fmt("residual: %.3e (bound %.3e)\n", residual, bound);
    for (const auto& p : written) out << "wrote " << p << '\n';
    detail::write_json(a.report, rep);
    if (!(residual <= bound)) {
        out << "numerical failure: residual exceeds bound\n";
        return kNumerical;
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct CheckArgs {
    std::vector<std::string> files;
    std::size_t random = 0;
    std::uint64_t seed = 0;
    double tol = 1e-8;
    bool oracle = false;
    std::string report;
};

inline int cmd_check(const CheckArgs& a, std::ostream& out) {
    using detail::fmt;
    SolverOptions opt;
    opt.solver_tol = a.tol;
    if (a.random > 0) {
        if (!a.files.empty()) throw UsageError("check: give either input files or --random, not both");
        CheckConfig cfg;
        cfg.seed = a.seed;
        cfg.solver = opt;
        const EquivalenceStats st = run_equivalence_sweep(cfg, a.random);
        for (const auto& line : st.log) out << line << '\n';
        out << fmt("agreement: projector form = rank form = oracle on %zu/%zu instances (%zu consistent, %zu in "
                   "dead zone)\n",
                   st.total - st.disagreements - st.dead_zone, st.total - st.dead_zone, st.consistent,
                   st.dead_zone);
        detail::write_json(a.report, {{"command", "check"},
                                      {"instances", st.total},
                                      {"consistent", st.consistent},
                                      {"dead_zone", st.dead_zone},
                                      {"disagreements", st.disagreements},
                                      {"log", st.log}});
        return st.disagreements == 0 ? kOk : kUnsolvable;
    }
    detail::expect_files(a.files, 3, "check");
    const DualQuatMatrix A = load_dqm(a.files[0]), B = load_dqm(a.files[1]), C = load_dqm(a.files[2]);
    out << "equation: A X - Y B = C  (A " << detail::shape(A) << ", B " << detail::shape(B) << ", C "
        << detail::shape(C) << ")\n";
    const SylvesterReport rep = check_sylvester(A, B, C, opt);
    print_report(out, rep);
    const ConditionReport& cr = rep.conditions;
    out << "projector form: " << (cr.projector_ok() ? "holds" : "fails") << '\n'
        << "rank form: " << (cr.rank_ok() ? "holds" : "fails") << '\n';
    nlohmann::json j = {{"command", "check"}, {"conditions", to_json(rep)}};
    if (a.oracle) {
        const OracleResult o = oracle_solve(A, B, C);
        out << fmt("oracle: %s (residual %.3e, threshold %.3e)\n", o.consistent ? "consistent" : "inconsistent",
                   o.residual, o.threshold);
        j["oracle"] = {{"consistent", o.consistent}, {"residual", o.residual}, {"threshold", o.threshold}};
    }
    out << "verdict: " << (rep.solvable() ? "solvable" : "UNSOLVABLE") << '\n';
    j["verdict"] = rep.solvable() ? "solvable" : "unsolvable";
    detail::write_json(a.report, j);
    return rep.solvable() ? kOk : kUnsolvable;
}

// ---------------------------------------------------------------------------
// cipher
// ---------------------------------------------------------------------------

struct CipherArgs {
    std::string action;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string like;
    std::uint64_t seed = 0;
    std::string book;
    std::string key;
    std::vector<std::string> files;
    std::string out;
    std::string out0;
    std::string out1;
    std::string ref0;
    std::string ref1;
};

inline int cmd_cipher(const CipherArgs& a, std::ostream& out) {
    using detail::fmt;
    const std::filesystem::path book_dir(a.book);
    const std::string key_path = a.key.empty() ? (book_dir / "Y.dqm").string() : a.key;
    if (a.action == "keygen") {
        std::size_t rows = a.rows, cols = a.cols;
        if (!a.like.empty()) {
            const ColorImage img = load_ppm(a.like);
            rows = img.height;
            cols = img.width;
        }
        if (rows == 0 || cols == 0) throw UsageError("keygen: give --rows and --cols, or --like IMAGE");
        const CipherKeys k = keygen(rows, cols, a.seed);
        save_book(book_dir, k.book);
        std::filesystem::path kp(key_path);
        if (kp.has_parent_path()) std::filesystem::create_directories(kp.parent_path());
        save_dqm(key_path, k.Y);
        out << fmt("book: %s (A %zux%zu, B %zux%zu, seed %llu)\n", a.book.c_str(), rows, rows, cols, cols,
                   static_cast<unsigned long long>(a.seed))
            << fmt("condition numbers: A0 %.3e, B0 %.3e\n", real_condition(k.book.A.standard()),
                   real_condition(k.book.B.standard()))
            << "key: " << key_path << '\n';
        return kOk;
    }
    if (a.action == "encrypt") {
        detail::expect_files(a.files, 2, "encrypt");
        if (a.out.empty()) throw UsageError("encrypt: --out is required");
        const CipherBook book = load_book(book_dir);
        const DualQuatMatrix y = load_dqm(key_path);
        const DualQuatMatrix x = encode_pair(load_ppm(a.files[0]), load_ppm(a.files[1]));
        save_dqm(a.out, encrypt(x, book, y));
        out << "wrote " << a.out << '\n';
        return kOk;
    }
    if (a.action == "decrypt") {
        detail::expect_files(a.files, 1, "decrypt");
        if (a.out0.empty() || a.out1.empty()) throw UsageError("decrypt: --out0 and --out1 are required");
        const CipherBook book = load_book(book_dir);
        const DecryptResult d = decrypt(load_dqm(a.files[0]), book, load_dqm(key_path));
        out << fmt("equation residual: %.3e\n", d.residual)
            << fmt("largest real part: %.3e, largest channel overflow: %.3e\n", d.max_real_part, d.max_out_of_range);
        if (!d.plausible) {
            out << "decryption rejected: the recovered matrix is not an encoded image pair (wrong key or book)\n";
            return kUnsolvable;
        }
        const auto [img0, img1] = decode_pair(d.X);
        save_ppm(a.out0, img0);
        save_ppm(a.out1, img1);
        out << "wrote " << a.out0 << '\n' << "wrote " << a.out1 << '\n';
        if (!a.ref0.empty()) out << fmt("ssim image 0: %.6f\n", ssim(load_ppm(a.ref0), img0));
        if (!a.ref1.empty()) out << fmt("ssim image 1: %.6f\n", ssim(load_ppm(a.ref1), img1));
        return kOk;
    }
    if (a.action == "ssim") {
        if (a.files.size() != 2 && a.files.size() != 4)
            throw UsageError("ssim expects REF TEST [REF TEST] image paths");
        for (std::size_t n = 0; n < a.files.size(); n += 2)
            out << fmt("ssim image %zu: %.6f\n", n / 2, ssim(load_ppm(a.files[n]), load_ppm(a.files[n + 1])));
        return kOk;
    }
    throw UsageError("unknown cipher action '" + a.action + "'");
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

struct SelftestArgs {
    std::size_t trials = 0;
    std::uint64_t seed = 20240611;
    bool force_fail = false;
    bool timing = false;
    std::string report;
};

inline int cmd_selftest(const SelftestArgs& a, std::ostream& out) {
    CheckConfig cfg;
    cfg.seed = a.seed;
    cfg.trials = a.trials;
    std::vector<CheckResult> results = {
        check_penrose(cfg),         check_rank_identity_sweep(cfg), check_equivalence(cfg),
        check_sylvester_solver(cfg), check_special_cases(cfg),      check_generality(cfg),
        check_handeye(cfg),         check_cipher_exactness(cfg),
    };
    if (a.force_fail) results.push_back({"forced-failure", false, "failure requested with --force-fail", 0.0});
    bool all = true;
    nlohmann::json j = {{"command", "selftest"}, {"seed", a.seed}, {"suites", nlohmann::json::array()}};
    for (const auto& r : results) {
        all = all && r.passed;
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name;
        if (a.timing) out << detail::fmt(" (%.2f s)", r.seconds);
        out << ": " << r.detail << '\n';
        j["suites"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    }
    out << (all ? "all suites passed\n" : "some suites FAILED\n");
    detail::write_json(a.report, j);
    return all ? kOk : kUnsolvable;
}

// ---------------------------------------------------------------------------
// handeye
// ---------------------------------------------------------------------------

struct HandeyeArgs {
    std::vector<std::string> files;
    std::size_t pairs = 5;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

inline void print_screw(std::ostream& out, const char* label, const DualQuaternion& q) {
    const ScrewParams p = screw_params(q);
    out << detail::fmt("  %s: angle %.6f rad, axis %s, translation %s, displacement %.6f\n", label, p.angle,
                       detail::vec3(p.axis).c_str(), detail::vec3(p.translation).c_str(), p.displacement);
}

inline int cmd_handeye(const HandeyeArgs& a, std::ostream& out) {
    using detail::fmt;
    std::vector<HandEyePair> pairs;
    if (!a.files.empty()) {
        detail::expect_files(a.files, 2, "handeye");
        pairs.push_back({DualQuaternion::from_matrix(load_dqm(a.files[0])),
                         DualQuaternion::from_matrix(load_dqm(a.files[1]))});
    } else {
        Rng rng = Rng(a.seed).split("handeye-truth");
        const DualQuaternion x = random_udq(rng), y = random_udq(rng);
        out << "ground truth:\n";
        print_screw(out, "x", x);
        print_screw(out, "y", y);
        pairs = gen_handeye_instance(x, y, a.pairs, a.noise, a.seed);
    }
    std::size_t degenerate = 0;
    for (std::size_t n = 0; n < pairs.size(); ++n) {
        const auto s = solve_handeye_pair(pairs[n].a, pairs[n].b, a.seed + n);
        if (!s) {
            out << fmt("pair %zu: DEGENERATE (input not unit or no usable draw)\n", n);
            ++degenerate;
            continue;
        }
        out << fmt("pair %zu: residual %.3e (before normalization %.3e)\n", n, s->residual, s->raw_residual);
        print_screw(out, "x", s->x);
        print_screw(out, "y", s->y);
    }
    return degenerate == 0 ? kOk : kUnsolvable;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dual quaternion matrix equation toolkit: AX - YB = C and its special cases"};
    app.name("dqsylv");
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Solve a matrix equation and write the solution");
    s->add_option("--equation", solve.equation, "axb | ax-b | yb-c | ax-yb | axmyb")
        ->check(CLI::IsMember({"axb", "ax-b", "yb-c", "ax-yb", "axmyb"}));
    s->add_option("files", solve.files, "Input matrices (.qm for axb, .dqm otherwise)")->required();
    s->add_option("--free", solve.free, "Free parameters: zero | random")->check(CLI::IsMember({"zero", "random"}));
    s->add_option("--seed", solve.seed, "Seed for --free random");
    s->add_option("--tol", solve.tol, "Relative tolerance of the projector conditions")->check(CLI::PositiveNumber);
    s->add_option("--report", solve.report, "Write a JSON report");
    s->add_option("--out", solve.out_dir, "Output directory");

    CheckArgs check;
    auto* c = app.add_subcommand("check", "Evaluate the solvability conditions of AX - YB = C");
    c->add_option("files", check.files, "A.dqm B.dqm C.dqm");
    c->add_option("--random", check.random, "Sweep N random instances instead");
    c->add_option("--seed", check.seed, "Seed for --random");
    c->add_option("--tol", check.tol, "Relative tolerance of the projector conditions")->check(CLI::PositiveNumber);
    c->add_flag("--oracle", check.oracle, "Also run the real least-squares cross-check");
    c->add_option("--report", check.report, "Write a JSON report");

    CipherArgs cipher;
    auto* ci = app.add_subcommand("cipher", "Two-image cipher built on C = AX - YB");
    ci->require_subcommand(1);
    auto* kg = ci->add_subcommand("keygen", "Generate a book (A, B) and a key Y");
    kg->add_option("--rows", cipher.rows, "Image height");
    kg->add_option("--cols", cipher.cols, "Image width");
    kg->add_option("--like", cipher.like, "Take the size from this PPM image");
    kg->add_option("--seed", cipher.seed, "Seed");
    kg->add_option("--book", cipher.book, "Book directory")->required();
    kg->add_option("--key", cipher.key, "Key path (default BOOK/Y.dqm)");
    auto* en = ci->add_subcommand("encrypt", "Encrypt two images of the book's size");
    en->add_option("images", cipher.files, "IMAGE0.ppm IMAGE1.ppm")->required();
    en->add_option("--book", cipher.book, "Book directory")->required();
    en->add_option("--key", cipher.key, "Key path (default BOOK/Y.dqm)");
    en->add_option("--out", cipher.out, "Ciphertext .dqm")->required();
    auto* de = ci->add_subcommand("decrypt", "Recover both images from a ciphertext");
    de->add_option("cipher", cipher.files, "C.dqm")->required();
    de->add_option("--book", cipher.book, "Book directory")->required();
    de->add_option("--key", cipher.key, "Key path (default BOOK/Y.dqm)");
    de->add_option("--out0", cipher.out0, "First image output")->required();
    de->add_option("--out1", cipher.out1, "Second image output")->required();
    de->add_option("--ref0", cipher.ref0, "Original first image, to report SSIM");
    de->add_option("--ref1", cipher.ref1, "Original second image, to report SSIM");
    auto* ss = ci->add_subcommand("ssim", "SSIM between image pairs");
    ss->add_option("images", cipher.files, "REF TEST [REF TEST]")->required();

    SelftestArgs self;
    auto* st = app.add_subcommand("selftest", "Randomized self-checks of every component");
    st->add_option("--trials", self.trials, "Instances per suite (default: full sweep)");
    st->add_option("--seed", self.seed, "Seed");
    st->add_flag("--timing", self.timing, "Print per-suite wall time");
    st->add_option("--report", self.report, "Write a JSON report");
    st->add_flag("--force-fail", self.force_fail, "Append a failing suite (tests the failure path)")
        ->group("");

    HandeyeArgs hand;
    auto* he = app.add_subcommand("handeye", "Solve a x = y b for unit dual quaternion pairs");
    he->add_option("files", hand.files, "a.dqm b.dqm (1x1); omit to generate pairs");
    he->add_option("--pairs", hand.pairs, "Number of generated pairs");
    he->add_option("--noise", hand.noise, "Noise added to generated a")->check(CLI::NonNegativeNumber);
    he->add_option("--seed", hand.seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (s->parsed()) return cmd_solve(solve, out);
        if (c->parsed()) return cmd_check(check, out);
        if (ci->parsed()) {
            for (auto* sub : {kg, en, de, ss})
                if (sub->parsed()) cipher.action = sub->get_name();
            return cmd_cipher(cipher, out);
        }
        if (st->parsed()) return cmd_selftest(self, out);
        if (he->parsed()) return cmd_handeye(hand, out);
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace dqsylv::cli
