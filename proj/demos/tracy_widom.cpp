// Prints F1 on a coarse grid by both routes, then its mean and standard deviation.
#include <cstdio>

#include "vicious/fredholm_oracle.hpp"
#include "vicious/painleve.hpp"

int main() {
    using namespace vicious;
    const PainleveSolution sol = solve_hastings_mcleod();
    std::printf("%6s %22s %22s\n", "s", "F1 (Painleve)", "F1 (Fredholm)");
    for (double s = -5.0; s <= 3.0 + 1e-9; s += 1.0)
        std::printf("%6.2f %22.15e %22.15e\n", s, tracy_widom_f1(s, sol), fredholm_f1(s));

    // moments from the density dF1/ds on [-10, 8]
    const QuadratureRule rule = composite_gauss_legendre(-10.0, 8.0, 36, 12);
    const double h = 1e-4;
    double m0 = 0, m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double s = rule.nodes[i];
        const double p = (tracy_widom_f1(s + h, sol) - tracy_widom_f1(s - h, sol)) / (2 * h);
        m0 += rule.weights[i] * p;
        m1 += rule.weights[i] * p * s;
        m2 += rule.weights[i] * p * s * s;
    }
    std::printf("mass %.10f  mean %.10f  std %.10f\n", m0, m1 / m0, std::sqrt(m2 / m0 - m1 * m1 / (m0 * m0)));
}
