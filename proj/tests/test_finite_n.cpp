#include <gtest/gtest.h>

#include "vicious/airy2_density.hpp"
#include "vicious/finite_n.hpp"

using namespace vicious;

namespace {

const PainleveSolution& sol() {
    static const PainleveSolution s = solve_hastings_mcleod();
    return s;
}

// Direct N = 2 multi-sum over the lattice, no orthogonal polynomials involved.
long double brute_force_n2(long double M, long double tau, int L) {
    const long double pi = std::numbers::pi_v<long double>, a = pi * pi / (2 * M * M);
    long double sum = 0;
    for (int n1 = -L; n1 <= L; ++n1) {
        long double w1 = n1 * n1 * std::exp(-a * n1 * n1);
        if (n1 == 0) continue;
        long double left = 0, right = 0;
        for (int n = -L; n <= L; ++n) {
            long double sign = (n % 2 == 0) ? 1 : -1, nn = n;
            left += sign * nn * nn * (nn * nn - n1 * n1) * std::exp(-a * tau * nn * nn);
            right += sign * nn * nn * (nn * nn - n1 * n1) * std::exp(-a * (1 - tau) * nn * nn);
        }
        sum += w1 * left * right;
    }
    const int N = 2;
    long double prefactor = N * std::pow(pi, 2 * N * N + N + 2) / std::pow(2.0L, N * N - N / 2.0L);
    for (int j = 0; j < N; ++j) prefactor /= std::tgamma(2.0L + j) * std::tgamma(1.5L + j);
    return prefactor / (std::pow(2.0L, N + 1) * std::pow(M, N * (2 * N + 1) + 3)) * sum;
}

// maximum of one Brownian excursion of unit duration
double excursion_max_cdf(double M) {
    double s = 1;
    for (int k = 1; k <= 40; ++k) s += 2 * (1 - 4.0 * k * k * M * M) * std::exp(-2.0 * k * k * M * M);
    return s;
}

double rel(double a, double b) { return std::abs(a / b - 1); }

}  // namespace

TEST(FiniteNTable, LowOrderRecursionAgainstContinuumLimit) {
    // for large M the lattice sums become Gaussian integrals
    auto m = build_op_table(10.0, 7);
    EXPECT_NEAR(std::exp(static_cast<double>(m.log_h(0))) / (10.0 * std::sqrt(2 / constants::pi)), 1.0, 1e-12);
    auto m20 = build_op_table(20.0, 25);
    EXPECT_NEAR(static_cast<double>(m20.recursion_coefficient(3)) / (3 * 400 / (constants::pi * constants::pi)), 1.0,
                1e-10);
}

TEST(FiniteNTable, WaveFunctionsOrthonormalAndOfDefiniteParity) {
    for (int N : {2, 8, 32}) {
        auto m = build_op_table(std::min(max_height(N), std::sqrt(2.0 * N) + 1), N);
        EXPECT_LE(m.orthonormality_defect(), 1e-10) << N;
        EXPECT_EQ(m.wave_function(3, 0), 0.0);
        EXPECT_EQ(m.wave_function(3, -7), -m.wave_function(3, 7));
        for (int k = 1; k <= 2 * N; ++k)
            EXPECT_NEAR(2 * static_cast<double>(std::log(m.gamma(k))),
                        static_cast<double>(m.log_h(k) - m.log_h(k - 1)), 1e-12);
    }
    auto m = build_op_table(3.0, 3);
    for (int j = 0; j <= 5; ++j)
        for (int k = j; k <= 5; ++k) {
            double s = 0;
            for (long n = -m.n_max(); n <= m.n_max(); ++n) s += m.wave_function(j, n) * m.wave_function(k, n);
            EXPECT_NEAR(s, j == k ? 1.0 : 0.0, 1e-12) << j << " " << k;
        }
}

TEST(FiniteNTable, Preconditions) {
    EXPECT_THROW(build_op_table(2.0, 0), DomainError);
    EXPECT_THROW(build_op_table(2.0, 65), DomainError);
    EXPECT_THROW(build_op_table(0.4, 2), RangeError);
    EXPECT_THROW(build_op_table(8.5, 2), RangeError);
    auto m = build_op_table(2.0, 2);
    EXPECT_THROW(m.g(1, 0.5), DomainError);
    EXPECT_THROW(m.g(3, 0.1), DomainError);
    EXPECT_THROW(jpdf_finite_n(m, 1.0), DomainError);
}

TEST(GFunction, FrozenValuesAndHermiteClosedForm) {
    // independent 50-digit evaluation
    auto m = build_op_table(8.0, 3);
    GValue g0 = m.g(3, 0.0), g1 = m.g(3, 0.1);
    EXPECT_LE(rel(g0.value, -4.1256516476605279708e-21), 1e-9);
    EXPECT_LE(rel(g1.value, -5.375211199655537856e-17), 1e-9);
    EXPECT_LE(rel(g0.value, g_asymptotics::hermite_u0(8.0, 3)), 1e-4);
    EXPECT_LE(rel(g1.value, g_asymptotics::hermite_finite_u(8.0, 3, 0.1)), 1e-3);
}

TEST(GFunction, TruncationOfLatticeSum) {
    for (auto [M, N] : {std::pair{4.0, 3}, {8.0, 6}}) {
        auto m = build_op_table(M, N);
        auto wide = with_lattice_cutoff(m, 2 * m.n_max());
        ASSERT_EQ(wide.n_max(), 2 * m.n_max());
        const double a = constants::pi * constants::pi / (2 * M * M);
        for (double u : {-0.2, 0.0, 0.3})
            for (int k = 1; k <= N; ++k) {
                GValue g = m.g(k, u), gw = wide.g(k, u);
                EXPECT_NEAR(g.value, gw.value, 1e-13 * std::abs(g.value) + g.abs_error + gw.abs_error) << u << " " << k;
                // plain double sum of wave functions, accurate only up to cancellation
                double direct = 0, magnitude = 0;
                for (long n = 1; n <= 2 * m.n_max(); ++n) {
                    double psi = m.wave_function(2 * k - 1, n);
                    if (psi == 0) break;
                    double term = 2 * n * psi * std::exp(-u * a * n * n);
                    direct += (n % 2 ? -term : term);
                    magnitude += std::abs(term);
                }
                EXPECT_NEAR(g.value, direct, 1e-14 * magnitude) << u << " " << k;
            }
    }
}

TEST(GFunction, HermiteFormApproachesEdgeAsymptotics) {
    const int k15 = 113;
    EXPECT_LE(rel(g_asymptotics::hermite_u0(15.0, k15), g_asymptotics::plancherel_rotach(15.0, k15, 0.0)), 0.05);
    double prev = 1;
    for (double M : {15.0, 30.0, 60.0}) {
        int k = static_cast<int>(std::ceil(M * M / 2));
        double r = rel(g_asymptotics::hermite_finite_u(M, k, scaling::u_of(0.2, M)),
                       g_asymptotics::plancherel_rotach(M, k, 0.2));
        EXPECT_LT(r, prev) << M;
        prev = r;
    }
}

TEST(GFunction, ExactValuesApproachDoubleScalingForm) {
    // G_{2k-1} ~ (-1)^k M^{5/3} f(2^{2/3} x, 2^{7/3} v) with f the building block of the limiting density
    static const JointDensity jd = JointDensity::build();
    std::vector<double> err15, err30;
    for (double M : {15.0, 30.0}) {
        int k = static_cast<int>(std::ceil(M * M / 2));
        auto m = build_recursion_table(M, 2 * k + 1);
        for (double v : {0.0, 0.2, -0.2}) {
            double exact = m.g(k, scaling::u_of(v, M)).value;
            double limit = (k % 2 ? -1 : 1) * std::pow(M, 5.0 / 3) *
                           jd.f(std::pow(2.0, 2.0 / 3) * scaling::x_of(2 * k, M), std::pow(2.0, 7.0 / 3) * v);
            (M == 15.0 ? err15 : err30).push_back(rel(exact, limit));
        }
    }
    for (std::size_t i = 0; i < err15.size(); ++i) {
        EXPECT_LT(err30[i], err15[i]) << i;
        EXPECT_LE(err30[i], 0.05) << i;
    }
}

TEST(FiniteNCdf, FrozenValues) {
    EXPECT_LE(rel(cdf_max_finite_n(4.0, 8), 0.7807995597355927816172297), 1e-12);
    EXPECT_LE(rel(cdf_max_finite_n(2.0, 3), 0.152552787125185653251351), 1e-12);
    EXPECT_LE(rel(cdf_max_finite_n(2.0, 2), 0.75710778844525812046), 1e-12);
}

TEST(FiniteNCdf, CertifiedZeroDeepInLeftTail) {
    EXPECT_THROW(build_op_table(2.0, 64), PrecisionError);
    EXPECT_EQ(cdf_max_finite_n(2.0, 64), 0.0);
    EXPECT_EQ(cdf_max_finite_n(0.8, 16), 0.0);
}

TEST(FiniteNCdf, SingleWalkerIsExcursionMaximum) {
    for (double M : {0.6, 1.0, 1.5, 3.0}) EXPECT_LE(rel(cdf_max_finite_n(M, 1), excursion_max_cdf(M)), 1e-12) << M;
}

TEST(FiniteNCdf, MonotoneAndSaturating) {
    for (int N : {1, 4, 16}) {
        double prev = 0;
        for (double M = 0.8; M <= max_height(N); M += 0.1) {
            double F = cdf_max_finite_n(M, N);
            EXPECT_GE(F, prev - 1e-14) << N << " " << M;
            prev = F;
        }
        double top = std::min(max_height(N), 4 * std::sqrt(2.0 * N));
        EXPECT_GE(cdf_max_finite_n(top, N), 1 - 1e-10) << N;
    }
}

TEST(FiniteNCdf, EdgeConvergenceToTracyWidom) {
    double prev = 1;
    for (int N : {8, 16, 32}) {
        double d = edge_distance(N, sol());
        EXPECT_LT(d, prev) << N;
        prev = d;
    }
    EXPECT_LE(prev, 0.1);
}

TEST(FiniteNDensity, AgreesWithBruteForceMultiSum) {
    double live = static_cast<double>(brute_force_n2(2.0L, 0.5L, 40));
    EXPECT_LE(rel(live, 2.7030525897418810521), 1e-12);
    EXPECT_LE(rel(jpdf_finite_n(2.0, 0.5, 2), live), 1e-8);
    double off = static_cast<double>(brute_force_n2(2.5L, 0.3L, 40));
    EXPECT_LE(rel(jpdf_finite_n(2.5, 0.3, 2), off), 1e-8);
}

TEST(FiniteNDensity, FrozenValues) {
    // independent 50-digit evaluation
    EXPECT_LE(rel(jpdf_finite_n(1.0, 0.3, 1), 1.673186053923017866120624), 1e-10);
    EXPECT_LE(rel(jpdf_finite_n(2.5, 0.4, 3), 2.208295975917863925824082), 1e-10);
    EXPECT_LE(rel(jpdf_finite_n(3.0, 0.2, 2), 2.457678581745567082410806e-06), 1e-10);
}

TEST(FiniteNDensity, SymmetricAndNonNegative) {
    for (int N : {1, 3, 6}) {
        auto m = build_op_table(std::sqrt(2.0 * N), N);
        for (double tau = 0.02; tau < 0.5; tau += 0.04) {
            auto a = jpdf_finite_n_detail(m, tau), b = jpdf_finite_n_detail(m, 1 - tau);
            EXPECT_NEAR(a.value, b.value, 1e-12 * std::abs(a.value) + a.abs_error + b.abs_error) << N << " " << tau;
            EXPECT_GE(a.value, -a.abs_error);
        }
    }
}

TEST(FiniteNDensity, Normalised) {
    // lower M limit sits where F_N is already below 1e-6
    const QuadratureRule t_rule = gauss_legendre(48, 0.0, 1.0);
    for (auto [N, m_lo] : {std::pair{1, 0.5}, {2, 0.5}, {3, 0.6}}) {
        EXPECT_LT(cdf_max_finite_n(m_lo, N), 1e-6);
        const QuadratureRule m_rule = composite_gauss_legendre(m_lo, max_height(N), 24, 16);
        double total = 0;
        for (std::size_t i = 0; i < m_rule.nodes.size(); ++i) {
            auto model = build_op_table(m_rule.nodes[i], N);
            double inner = 0;
            for (std::size_t j = 0; j < t_rule.nodes.size(); ++j)
                inner += t_rule.weights[j] * jpdf_finite_n(model, t_rule.nodes[j]);
            total += m_rule.weights[i] * inner;
        }
        EXPECT_NEAR(total, 1.0, 1e-4) << N;
    }
}

TEST(LargeDeviation, RateFunction) {
    EXPECT_NEAR(large_deviation_eval(1.0, 0.0, 10.0).varphi, 0.0, 1e-15);
    const double u = 1e-2;
    EXPECT_NEAR(large_deviation_eval(1.0, u, 10.0).varphi / (u * u * u), 32.0 / 3, 0.01 * 32 / 3);
    double prev = std::numeric_limits<double>::infinity();
    for (double c = 0.2; c <= 1.0; c += 0.2) {
        double v = large_deviation_eval(c, 0.1, 10.0).varphi;
        EXPECT_LT(v, prev) << c;
        prev = v;
    }
    EXPECT_THROW(large_deviation_eval(1.0, 0.6, 10.0), DomainError);
    EXPECT_THROW(large_deviation_eval(1.2, 0.0, 10.0), DomainError);
}

TEST(LargeDeviation, SaddlePoint) {
    for (auto [c, u] : {std::pair{0.5, 0.1}, {0.9, -0.3}, {1.0, 0.2}}) {
        const double rho = scaling::rho_of(u), b = 2 * std::sqrt(2 / rho);
        auto phi = [&](double y) { return y * y - b * y + c * std::log(y); };
        LargeDeviation ld = large_deviation_eval(c, u, 10.0);
        const double y = ld.y_star, h = 1e-5;
        EXPECT_NEAR((phi(y + h) - phi(y - h)) / (2 * h), 0.0, 1e-8) << c << " " << u;
        EXPECT_NEAR(ld.phi_star, phi(y), 1e-12) << c << " " << u;
        EXPECT_NEAR(ld.phi_pp, 2 - c / (y * y), 1e-10);
        EXPECT_LT(ld.phi_pp, 0.0);
        double other = 2 * (c / 2 * (1 - std::log(c / 2)) + 1 / rho + ld.phi_star);
        EXPECT_NEAR(ld.varphi, other, 1e-12) << c << " " << u;
        EXPECT_NEAR(ld.log_jpdf_estimate, -100 * ld.varphi, 1e-10);
    }
}

TEST(DoubleScaling, RecursionCoefficientsNearTheEdge) {
    EXPECT_NEAR(double_scaling_f1(2.0, sol()) /
                    (-std::pow(2.0, 5.0 / 3) / (constants::pi * constants::pi) * airy_ai(std::pow(2.0, 5.0 / 3))),
                1.0, 1e-3);
    auto r = double_scaling_check(15.0, 112, sol());
    EXPECT_TRUE(r.signs_alternate);
    EXPECT_LE(r.relative_even, std::pow(15.0, -2.0 / 3));
    EXPECT_LE(r.relative_odd, std::pow(15.0, -2.0 / 3));
    EXPECT_THROW(double_scaling_check(8.0, 30, sol()), DomainError);
}

TEST(DoubleScaling, CorrectionShrinksLikeTwoThirdsPower) {
    // x = 0 exactly: odd index 225 at M = 15, even index 900 at M = 30
    auto a = double_scaling_check(15.0, 112, sol());
    auto b = double_scaling_check(30.0, 450, sol());
    ASSERT_EQ(a.x_odd, 0.0);
    ASSERT_EQ(b.x_even, 0.0);
    double err15 = std::abs(a.deviation_odd - a.expected_odd), err30 = std::abs(b.deviation_even - b.expected_even);
    double ratio = err15 / err30 / std::pow(2.0, 2.0 / 3);
    EXPECT_GE(ratio, 0.5);
    EXPECT_LE(ratio, 2.0);
}

TEST(Scaling, RoundTrips) {
    for (int N : {1, 7, 64}) {
        EXPECT_NEAR(scaling::height_from_s(scaling::s_from_height(3.1, N), N), 3.1, 1e-13);
        EXPECT_NEAR(scaling::location_from_w(scaling::w_from_location(0.37, N), N), 0.37, 1e-14);
        EXPECT_DOUBLE_EQ(scaling::s_from_height(std::sqrt(2.0 * N), N), 0.0);
    }
    EXPECT_NEAR(scaling::u_of(scaling::v_of(0.1, 12.0), 12.0), 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(scaling::x_of(225, 15.0), 0.0);
}
