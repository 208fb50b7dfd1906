#ifndef VICIOUS_LAX_PSI_HPP
#define VICIOUS_LAX_PSI_HPP

#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "errors.hpp"
#include "painleve.hpp"
#include "special_basis.hpp"

namespace vicious {

// Uniform grid s_min + i * step, i < count.
struct SGrid {
    double s_min = -12.0;
    double step = 0.01;
    std::size_t count = 2401;

    double at(std::size_t i) const { return s_min + step * static_cast<double>(i); }
    double s_max() const { return at(count - 1); }
    std::size_t nearest(double s) const {
        double k = std::round((s - s_min) / step);
        return static_cast<std::size_t>(std::clamp(k, 0.0, double(count - 1)));
    }
    static SGrid span(double lo, double hi, double step) {
        std::size_t cells = static_cast<std::size_t>(std::llround((hi - lo) / step));
        return {lo, (hi - lo) / cells, cells + 1};
    }
};

struct PainlevePotential {
    const PainleveSolution* sol;
    double q(double s) const { return sol->q(s); }
    double q_prime(double s) const { return sol->q_prime(s); }
};

struct ZeroPotential {
    double q(double) const { return 0.0; }
    double q_prime(double) const { return 0.0; }
};

// Lax pair: dPsi/ds = B Psi, dPsi/dzeta = A Psi.
struct LaxMatrices {
    std::array<std::array<double, 2>, 2> A, B;
};

inline LaxMatrices lax_matrices(double zeta, double s, double q, double r) {
    LaxMatrices m;
    m.B = {{{q, zeta}, {-zeta, -q}}};
    m.A = {{{4 * zeta * q, 4 * zeta * zeta + s + 2 * q * q + 2 * r},
             {-4 * zeta * zeta - s - 2 * q * q + 2 * r, -4 * zeta * q}}};
    return m;
}

struct PsiSolveOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
};

namespace detail {

template <class Scalar, class Potential>
struct LaxSystem {
    Scalar zeta;
    const Potential& pot;
    void operator()(const std::array<Scalar, 2>& y, std::array<Scalar, 2>& dy, double s) const {
        double q = pot.q(s);
        dy[0] = q * y[0] + zeta * y[1];
        dy[1] = -zeta * y[0] - q * y[1];
    }
};

// Integrate from grid.s_max() down to the first grid point, recording every node.
template <class Scalar, class Potential>
void integrate_column(Scalar zeta, const Potential& pot, const SGrid& grid, const PsiSolveOptions& opt,
                      std::array<Scalar, 2> seed, Scalar* out1, Scalar* out2, std::size_t first = 0) {
    namespace ode = boost::numeric::odeint;
    using state = std::array<Scalar, 2>;
    std::vector<double> times;
    for (std::size_t i = grid.count; i-- > first;) times.push_back(grid.at(i));
    LaxSystem<Scalar, Potential> sys{zeta, pot};
    auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_fehlberg78<state>());
    std::size_t idx = grid.count;
    auto observer = [&](const state& y, double s) {
        --idx;
        if (!std::isfinite(std::abs(y[0])) || !std::isfinite(std::abs(y[1])))
            throw IntegrationError("Lax system diverged at s=" + std::to_string(s));
        out1[idx - first] = y[0];
        out2[idx - first] = y[1];
    };
    try {
        ode::integrate_times(stepper, sys, seed, times.begin(), times.end(), -grid.step / 4, observer,
                             ode::max_step_checker(200000));
    } catch (const ode::step_adjustment_error& e) {
        throw IntegrationError(std::string("Lax system step size underflow: ") + e.what());
    } catch (const ode::no_progress_error& e) {
        throw IntegrationError(std::string("Lax system made no progress: ") + e.what());
    }
}

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) h = (h ^ p[i]) * 1099511628211ull;
    return h;
}

template <class T>
void write_le(std::ostream& os, const T* v, std::size_t n) {
    static_assert(std::endian::native == std::endian::little, "cache writer assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(n * sizeof(T)));
}
template <class T>
void read_le(std::istream& is, T* v, std::size_t n) {
    is.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(n * sizeof(T)));
    if (!is) throw CacheError("truncated cache file");
}

}  // namespace detail

// Real-zeta column (Phi1, Phi2) over the grid, seeded with (cos theta, -sin theta), theta = 4 zeta^3/3 + s zeta.
template <class Potential>
std::pair<std::vector<double>, std::vector<double>> solve_psi_column(double zeta, const Potential& pot,
                                                                     const SGrid& grid,
                                                                     const PsiSolveOptions& opt = {}) {
    std::vector<double> p1(grid.count), p2(grid.count);
    const double top = grid.s_max(), theta = 4 * zeta * zeta * zeta / 3 + top * zeta;
    detail::integrate_column<double>(zeta, pot, grid, opt, {std::cos(theta), -std::sin(theta)}, p1.data(), p2.data());
    return {p1, p2};
}

// Single value of (Phi1, Phi2) at s, integrating down from s_top.
template <class Potential>
std::array<double, 2> psi_at(double zeta, double s, const Potential& pot, double s_top,
                             const PsiSolveOptions& opt = {}) {
    SGrid g{s, s_top - s, 2};
    std::array<double, 2> out1, out2;
    const double theta = 4 * zeta * zeta * zeta / 3 + s_top * zeta;
    detail::integrate_column<double>(zeta, pot, g, opt, {std::cos(theta), -std::sin(theta)}, out1.data(), out2.data());
    return {out1[0], out2[0]};
}

class PsiGrid {
public:
    PsiGrid() = default;
    PsiGrid(QuadratureRule rule, SGrid grid) : rule_(std::move(rule)), grid_(grid) {
        phi1_.assign(rule_.size() * grid_.count, 0.0);
        phi2_.assign(rule_.size() * grid_.count, 0.0);
    }

    const QuadratureRule& zeta_rule() const { return rule_; }
    const SGrid& s_grid() const { return grid_; }
    std::size_t zeta_count() const { return rule_.size(); }

    double phi1(std::size_t k, std::size_t j) const { return phi1_[k * grid_.count + j]; }
    double phi2(std::size_t k, std::size_t j) const { return phi2_[k * grid_.count + j]; }
    // Node -zeta_k: Phi1 is even and Phi2 odd in zeta.
    std::array<double, 2> at(std::size_t k, std::size_t j, bool negative) const {
        return {phi1(k, j), negative ? -phi2(k, j) : phi2(k, j)};
    }
    double* column1(std::size_t k) { return phi1_.data() + k * grid_.count; }
    double* column2(std::size_t k) { return phi2_.data() + k * grid_.count; }

    std::uint64_t hash = 0;
    double tolerance = 0.0;

    void save(const std::string& path) const {
        std::ofstream os(path, std::ios::binary);
        if (!os) throw CacheError("cannot write " + path);
        const char magic[8] = {'V', 'X', 'P', 'S', 'I', 'R', '0', '1'};
        os.write(magic, 8);
        std::uint64_t header[3] = {hash, rule_.size(), grid_.count};
        detail::write_le(os, header, 3);
        double meta[3] = {tolerance, grid_.s_min, grid_.step};
        detail::write_le(os, meta, 3);
        detail::write_le(os, rule_.nodes.data(), rule_.size());
        detail::write_le(os, rule_.weights.data(), rule_.size());
        detail::write_le(os, phi1_.data(), phi1_.size());
        detail::write_le(os, phi2_.data(), phi2_.size());
    }

    static PsiGrid load(const std::string& path, std::uint64_t expected_hash, double expected_tol) {
        std::ifstream is(path, std::ios::binary);
        if (!is) throw CacheError("cannot open " + path);
        char magic[8];
        is.read(magic, 8);
        if (!is || std::memcmp(magic, "VXPSIR01", 8) != 0) throw CacheError("bad magic or version in " + path);
        std::uint64_t header[3];
        detail::read_le(is, header, 3);
        double meta[3];
        detail::read_le(is, meta, 3);
        if (header[0] != expected_hash || meta[0] != expected_tol)
            throw CacheError("cache key mismatch in " + path);
        QuadratureRule r;
        r.nodes.resize(header[1]);
        r.weights.resize(header[1]);
        detail::read_le(is, r.nodes.data(), header[1]);
        detail::read_le(is, r.weights.data(), header[1]);
        PsiGrid g(std::move(r), SGrid{meta[1], meta[2], header[2]});
        detail::read_le(is, g.phi1_.data(), g.phi1_.size());
        detail::read_le(is, g.phi2_.data(), g.phi2_.size());
        g.hash = header[0];
        g.tolerance = meta[0];
        return g;
    }

private:
    QuadratureRule rule_;
    SGrid grid_;
    std::vector<double> phi1_, phi2_;
};

inline std::uint64_t psi_grid_key(const QuadratureRule& rule, const SGrid& grid, const PainleveSolution& sol) {
    std::uint64_t h = detail::fnv1a(rule.nodes.data(), rule.nodes.size() * sizeof(double));
    double g[3] = {grid.s_min, grid.step, double(grid.count)};
    h = detail::fnv1a(g, sizeof g, h);
    return detail::fnv1a(sol.q_values().data(), sol.q_values().size() * sizeof(double), h);
}

// zeta nodes on [0, zeta_max]: composite Gauss-Legendre panels holding a bounded amount of phase.
inline QuadratureRule default_zeta_rule(double zeta_max = 12.0, double s_abs_max = 12.0, double radians = 10.0) {
    return composite_gauss_legendre(
        oscillation_breaks(0.0, zeta_max, [&](double z) { return 4 * z * z + s_abs_max; }, radians, 0.5), 16);
}

inline PsiGrid build_psi_grid(const QuadratureRule& zeta_rule, const PainleveSolution& sol, const SGrid& grid,
                              const PsiSolveOptions& opt = {}, const std::string& cache_path = "") {
    if (grid.s_min < sol.s_min() || grid.s_max() > sol.s_max() + 1e-12)
        throw RangeError("PsiGrid s-range exceeds the Painleve solution range");
    std::uint64_t key = psi_grid_key(zeta_rule, grid, sol);
    if (!cache_path.empty()) {
        try {
            return PsiGrid::load(cache_path, key, opt.rel_tol);
        } catch (const CacheError&) {
        }
    }
    PsiGrid g(zeta_rule, grid);
    PainlevePotential pot{&sol};
    const double top = grid.s_max();
    for (std::size_t k = 0; k < zeta_rule.size(); ++k) {
        double z = zeta_rule.nodes[k], theta = 4 * z * z * z / 3 + top * z;
        detail::integrate_column<double>(z, pot, grid, opt, {std::cos(theta), -std::sin(theta)}, g.column1(k),
                                         g.column2(k));
    }
    g.hash = key;
    g.tolerance = opt.rel_tol;
    if (!cache_path.empty()) g.save(cache_path);
    return g;
}

// Solution recessive as s -> +inf for zeta on the ray arg(zeta) = angle, seeded as exp(i theta) (1, i).
// Its real part on the real axis is the real column above; on the ray it decays like exp(-4 r^3/3).
struct RayPsiConfig {
    double angle = constants::pi / 6;
    double r_max = 5.5;
    int panels = 22;
    int order = 16;
    SGrid grid = SGrid::span(-12.0, 12.0, 0.01);
    PsiSolveOptions ode{1e-12, 1e-300};
};

class RayPsiGrid {
public:
    using cplx = std::complex<double>;

    RayPsiGrid() = default;
    RayPsiGrid(const RayPsiConfig& cfg)
        : cfg_(cfg), rule_(composite_gauss_legendre(0.0, cfg.r_max, cfg.panels, cfg.order)), dir_(std::polar(1.0, cfg.angle)) {
        y1_.assign(rule_.size() * cfg_.grid.count, 0.0);
        y2_.assign(rule_.size() * cfg_.grid.count, 0.0);
    }

    const RayPsiConfig& config() const { return cfg_; }
    const SGrid& s_grid() const { return cfg_.grid; }
    const QuadratureRule& radial_rule() const { return rule_; }
    std::size_t node_count() const { return rule_.size(); }
    cplx direction() const { return dir_; }
    cplx zeta(std::size_t k) const { return rule_.nodes[k] * dir_; }
    cplx y1(std::size_t k, std::size_t j) const { return y1_[k * cfg_.grid.count + j]; }
    cplx y2(std::size_t k, std::size_t j) const { return y2_[k * cfg_.grid.count + j]; }
    cplx* column1(std::size_t k) { return y1_.data() + k * cfg_.grid.count; }
    cplx* column2(std::size_t k) { return y2_.data() + k * cfg_.grid.count; }

    // potential q on the grid nodes
    std::vector<double> q_nodes;

private:
    RayPsiConfig cfg_;
    QuadratureRule rule_;
    cplx dir_;
    std::vector<cplx> y1_, y2_;
};

inline RayPsiGrid build_ray_psi_grid(const PainleveSolution& sol, const RayPsiConfig& cfg = {}) {
    if (cfg.grid.s_min < sol.s_min() || cfg.grid.s_max() > sol.s_max() + 1e-12)
        throw RangeError("ray grid s-range exceeds the Painleve solution range");
    if (!(cfg.angle > 0 && cfg.angle <= constants::pi / 6 + 1e-12))
        throw DomainError("ray angle must lie in (0, pi/6]");
    RayPsiGrid g(cfg);
    PainlevePotential pot{&sol};
    const double top = cfg.grid.s_max();
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        std::complex<double> z = g.zeta(k);
        std::complex<double> theta = 4.0 * z * z * z / 3.0 + top * z;
        std::complex<double> e = std::exp(std::complex<double>(0, 1) * theta);
        detail::integrate_column<std::complex<double>>(z, pot, cfg.grid, cfg.ode, {e, std::complex<double>(0, 1) * e},
                                                       g.column1(k), g.column2(k));
    }
    g.q_nodes.resize(cfg.grid.count);
    for (std::size_t j = 0; j < cfg.grid.count; ++j) g.q_nodes[j] = sol.q(cfg.grid.at(j));
    return g;
}

}  // namespace vicious

#endif
