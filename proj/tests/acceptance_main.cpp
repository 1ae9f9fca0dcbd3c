// Acceptance suite driver.  Runs all criteria (no arguments) or a single
// one (index 1..10), printing one PASS/FAIL line per criterion.

#include <cstdio>
#include <cstdlib>
#include <string>

#include <invstat/verify.hpp>

int main(int argc, char** argv) {
    using namespace invstat;
    using namespace invstat::verify;

    unsigned threads = 0;
    if (const char* env = std::getenv("INVSTAT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) threads = static_cast<unsigned>(v);
    }

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    std::vector<CriterionResult> results;
    auto want = [&](int idx) { return only == 0 || only == idx; };
    if (want(1)) results.push_back(oracle_equivalence());
    if (want(2)) results.push_back(dominance());
    if (want(3)) results.push_back(independence(threads));
    if (want(4)) results.push_back(identity());
    if (want(5)) results.push_back(series_totals());
    if (want(6)) results.push_back(quadrature_constants());
    if (want(7)) results.push_back(regime_scaling(threads));
    if (want(8)) results.push_back(random_weight_limits(threads));
    if (want(9)) results.push_back(structural(threads));
    if (want(10)) results.push_back(reproducibility());

    if (results.empty()) {
        std::fprintf(stderr, "usage: %s [criterion 1..10]\n", argv[0]);
        return 2;
    }

    bool all = true;
    for (const auto& r : results) {
        std::printf("%s criterion %d: %s\n", r.passed ? "PASS" : "FAIL", r.index,
                    r.title.c_str());
        for (const auto& line : r.lines) std::printf("    %s\n", line.c_str());
        all = all && r.passed;
    }
    return all ? 0 : 1;
}
