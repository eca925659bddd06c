// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit if any fails.
//
//   acceptance [--seed N] [--verbose]

#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <dqsylv/dqsylv.hpp>

using namespace dqsylv;

namespace {

struct Criterion {
    int id;
    const char* title;
    std::function<CheckResult(const CheckConfig&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    CheckConfig cfg;
    bool verbose = false;
    for (int n = 1; n < argc; ++n) {
        if (std::strcmp(argv[n], "--verbose") == 0) {
            verbose = true;
        } else if (std::strcmp(argv[n], "--seed") == 0 && n + 1 < argc) {
            cfg.seed = std::strtoull(argv[++n], nullptr, 10);
        } else {
            std::cerr << "usage: acceptance [--seed N] [--verbose]\n";
            return 2;
        }
    }

    const std::vector<Criterion> criteria = {
        {1, "cipher round trip keeps SSIM >= 0.99 on 64x64 images", check_cipher_ssim},
        {2, "decryption error within one 8-bit level, float path within 1e-9", check_cipher_exactness},
        {3, "AX - YB = C solver on 100 consistent instances x 10 draws",
         [](const CheckConfig& c) { return check_sylvester_solver(c); }},
        {4, "projector form, rank form and real oracle agree on 200 instances", check_equivalence},
        {5, "block rank identity on 50 random instances", check_rank_identity_sweep},
        {6, "Penrose equations for pinv on 100 matrices up to 20x15", check_penrose},
        {7, "dual AX = B, YB = C and AX = YB round trips", check_special_cases},
        {8, "hand-eye a x = y b, noiseless and with noise 1e-3", check_handeye},
        {9, "oracle solutions reproduced inside the general solution family", check_generality},
    };

    std::cout << "acceptance seed " << cfg.seed << '\n';
    int failed = 0;
    double total = 0.0;
    for (const auto& c : criteria) {
        CheckResult r;
        try {
            r = c.run(cfg);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        total += r.seconds;
        if (!r.passed) ++failed;
        std::string detail = r.detail;
        // Per-instance logs only on request or failure.
        if (!verbose && r.passed) {
            const auto cut = detail.find('\n');
            if (cut != std::string::npos) detail.resize(cut);
        }
        std::cout << (r.passed ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.title << " -- "
                  << detail << detail::fmt(" [%.2f s]", r.seconds) << '\n';
    }
    std::cout << detail::fmt("%zu/%zu criteria passed in %.1f s\n", criteria.size() - failed, criteria.size(),
                             total);
    return failed == 0 ? 0 : 1;
}
