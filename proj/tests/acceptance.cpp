// One line per acceptance criterion; nonzero exit if any fails.
#include <cstdio>

#include "cylcm/acceptance.hpp"

int main() {
    auto results = cylcm::run_acceptance();
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s %2d %s: %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
        failed += r.pass ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failed);
    return failed == 0 && results.size() == 12 ? 0 : 1;
}
