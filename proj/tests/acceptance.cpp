// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure.

#include "hamshade/acceptance.hpp"

#include <chrono>
#include <cstdio>

int main() {
    using clock = std::chrono::steady_clock;
    hamshade::AcceptanceConfig cfg;
    bool all = true;
    auto t0 = clock::now();
    const auto results = hamshade::run_acceptance(cfg, [&](const hamshade::CriterionResult& r) {
        const double sec = std::chrono::duration<double>(clock::now() - t0).count();
        std::printf("%-4s criterion %2d: %s  (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), sec);
        std::fflush(stdout);
        if (!r.pass) std::printf("     details: %s\n", r.details.dump().c_str());
        all = all && r.pass;
        t0 = clock::now();
    });
    std::printf("%zu criteria, %s\n", results.size(), all ? "all passed" : "FAILURES present");
    return all ? 0 : 1;
}
