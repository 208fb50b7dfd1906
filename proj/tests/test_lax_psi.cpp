#include <gtest/gtest.h>

#include <cstdio>

#include "vicious/lax_psi.hpp"

using namespace vicious;

namespace {

const PainleveSolution& sol() {
    static const PainleveSolution s = solve_hastings_mcleod();
    return s;
}

// fourth-order central first and second differences on a uniform grid
double d1(const std::vector<double>& v, std::size_t j, double h) {
    return (v[j - 2] - 8 * v[j - 1] + 8 * v[j + 1] - v[j + 2]) / (12 * h);
}
double d2(const std::vector<double>& v, std::size_t j, double h) {
    return (-v[j - 2] + 16 * v[j - 1] - 30 * v[j] + 16 * v[j + 1] - v[j + 2]) / (12 * h * h);
}

}  // namespace

TEST(LaxPsi, FreeCaseIsExactPhase) {
    SGrid g = SGrid::span(-6.0, 6.0, 0.05);
    for (double zeta : {0.0, 0.4, 1.7, 3.2}) {
        auto [p1, p2] = solve_psi_column(zeta, ZeroPotential{}, g);
        for (std::size_t j = 0; j < g.count; j += 7) {
            double th = 4 * zeta * zeta * zeta / 3 + g.at(j) * zeta;
            EXPECT_NEAR(p1[j], std::cos(th), 1e-10);
            EXPECT_NEAR(p2[j], -std::sin(th), 1e-10);
        }
    }
}

TEST(LaxPsi, NormAndSchroedingerIdentities) {
    SGrid g = SGrid::span(-8.0, 12.0, 0.01);
    for (double zeta : {0.3, 1.3, 2.9}) {
        auto [p1, p2] = solve_psi_column(zeta, PainlevePotential{&sol()}, g);
        std::vector<double> norm(g.count);
        for (std::size_t j = 0; j < g.count; ++j) norm[j] = p1[j] * p1[j] + p2[j] * p2[j];
        for (std::size_t j = 2; j + 2 < g.count; j += 37) {
            double s = g.at(j), q = sol().q(s), v = q * q - sol().q_prime(s);
            EXPECT_NEAR(d1(norm, j, g.step), 2 * q * (p1[j] * p1[j] - p2[j] * p2[j]), 1e-6) << zeta << " " << s;
            EXPECT_NEAR(d2(p2, j, g.step) - v * p2[j], -zeta * zeta * p2[j], 2e-6 * (1 + std::pow(zeta, 6)))
                << zeta << " " << s;
        }
    }
}

TEST(LaxPsi, PhaseAdvanceAtLargeS) {
    SGrid g = SGrid::span(6.0, 12.0, 0.01);
    auto [p1, p2] = solve_psi_column(1.0, PainlevePotential{&sol()}, g);
    std::size_t j = g.nearest(10.0);
    double th = 4.0 / 3 + 10.0;
    EXPECT_NEAR(d1(p2, j, g.step), -std::cos(th), 1e-3);
}

TEST(LaxPsi, ZetaCompatibility) {
    const double zeta = 1.1, dz = 1e-4, s = 0.0;
    PainlevePotential pot{&sol()};
    auto plus = psi_at(zeta + dz, s, pot, 12.0);
    auto minus = psi_at(zeta - dz, s, pot, 12.0);
    auto mid = psi_at(zeta, s, pot, 12.0);
    LaxMatrices m = lax_matrices(zeta, s, sol().q(s), sol().q_prime(s));
    for (int i = 0; i < 2; ++i) {
        double fd = (plus[i] - minus[i]) / (2 * dz);
        double ap = m.A[i][0] * mid[0] + m.A[i][1] * mid[1];
        EXPECT_NEAR(fd, ap, 1e-6 * std::max(1.0, std::abs(ap))) << i;
    }
}

TEST(LaxPsi, GridParityAndCache) {
    QuadratureRule r = gauss_legendre(6, 0.0, 2.0);
    SGrid g = SGrid::span(-2.0, 10.0, 0.05);
    PsiGrid grid = build_psi_grid(r, sol(), g);
    auto pos = grid.at(3, 40, false), neg = grid.at(3, 40, true);
    EXPECT_EQ(pos[0], neg[0]);
    EXPECT_EQ(pos[1], -neg[1]);
    // a direct solve at -zeta agrees with the parity relation
    auto direct = solve_psi_column(-r.nodes[3], PainlevePotential{&sol()}, g);
    EXPECT_NEAR(direct.first[40], neg[0], 1e-10);
    EXPECT_NEAR(direct.second[40], neg[1], 1e-10);

    std::string path = ::testing::TempDir() + "psi_cache_test.bin";
    grid.save(path);
    PsiGrid back = PsiGrid::load(path, grid.hash, grid.tolerance);
    EXPECT_EQ(back.phi2(5, 100), grid.phi2(5, 100));
    EXPECT_THROW(PsiGrid::load(path, grid.hash + 1, grid.tolerance), CacheError);
    PsiGrid cached = build_psi_grid(r, sol(), g, {}, path);
    EXPECT_EQ(cached.phi1(2, 7), grid.phi1(2, 7));
    std::remove(path.c_str());
}

TEST(LaxPsi, RangeChecks) {
    QuadratureRule r = gauss_legendre(2, 0.0, 1.0);
    EXPECT_THROW(build_psi_grid(r, sol(), SGrid::span(-20.0, 0.0, 0.1)), RangeError);
}

TEST(RayPsi, RealPartOfComplexSeedIsRealColumn) {
    SGrid g = SGrid::span(-4.0, 12.0, 0.02);
    std::vector<std::complex<double>> y1(g.count), y2(g.count);
    const double z = 1.4, th = 4 * z * z * z / 3 + 12.0 * z;
    std::complex<double> e = std::polar(1.0, th);
    detail::integrate_column<std::complex<double>>(z, PainlevePotential{&sol()}, g, {}, {e, std::complex<double>(0, 1) * e},
                                                   y1.data(), y2.data());
    auto [p1, p2] = solve_psi_column(z, PainlevePotential{&sol()}, g);
    for (std::size_t j = 0; j < g.count; j += 50) {
        EXPECT_NEAR(y1[j].real(), p1[j], 1e-9);
        EXPECT_NEAR(y2[j].real(), p2[j], 1e-9);
    }
}

TEST(RayPsi, DecaysAlongRayAndMatchesFreeSolutionAtLargeS) {
    RayPsiConfig cfg;
    cfg.panels = 6;
    cfg.order = 8;
    cfg.grid = SGrid::span(-4.0, 12.0, 0.05);
    RayPsiGrid g = build_ray_psi_grid(sol(), cfg);
    std::size_t j = cfg.grid.nearest(8.0);
    for (std::size_t k = 0; k < g.node_count(); k += 5) {
        std::complex<double> z = g.zeta(k), th = 4.0 * z * z * z / 3.0 + 8.0 * z;
        std::complex<double> ex = std::complex<double>(0, 1) * std::exp(std::complex<double>(0, 1) * th);
        EXPECT_LT(std::abs(g.y2(k, j) - ex), 1e-6 * std::abs(ex) + 1e-300) << k;
    }
    std::size_t j0 = cfg.grid.nearest(0.0);
    double r = 4.0;
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.radial_rule().nodes[k] > r) {
            EXPECT_LT(std::abs(g.y2(k, j0)), std::exp(-4.0 / 3 * r * r * r + 2.0));
            break;
        }
}
