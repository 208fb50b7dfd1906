#include <cstdio>

#include "vicious/validation.hpp"

int main() {
    vicious::AcceptanceSuite suite;
    int failed = 0;
    suite.run_all([&](const vicious::CriterionResult& r) {
        std::printf("%s\n", vicious::AcceptanceSuite::format(r).c_str());
        std::fflush(stdout);
        if (!r.passed) ++failed;
    });
    std::printf("%d of %d criteria passed\n", vicious::AcceptanceSuite::criterion_count - failed,
                vicious::AcceptanceSuite::criterion_count);
    return failed == 0 ? 0 : 1;
}
