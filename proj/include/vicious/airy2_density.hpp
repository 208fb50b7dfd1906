#ifndef VICIOUS_AIRY2_DENSITY_HPP
#define VICIOUS_AIRY2_DENSITY_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lax_psi.hpp"
#include "painleve.hpp"
#include "special_basis.hpp"

namespace vicious {

namespace density_constants {
// f(s,w) = f_scale * int_0^inf zeta Phi2(zeta,s) exp(-w zeta^2) dzeta
inline const double f_scale = -std::pow(2.0, 13.0 / 3) / (constants::pi * constants::pi);
// P(s,w) = joint_scale * F1(s) * int_s^inf f(x,w) f(x,-w) dx
inline const double joint_scale = constants::pi * constants::pi / std::pow(2.0, 20.0 / 3);
// h = -(pi^2 / 2^{13/3}) f and P = (4/pi^2) F1 int h h
inline const double h_scale = -constants::pi * constants::pi / std::pow(2.0, 13.0 / 3);
// maximum and location of Airy2 minus a parabola: m = s / 2^{2/3}, t = w / 2^{4/3}
inline const double airy_m_scale = std::pow(2.0, 2.0 / 3);
inline const double airy_t_scale = std::pow(2.0, 4.0 / 3);
}  // namespace density_constants

// Large-s form of f from q ~ Ai.
inline double f_large_s(double s, double w) {
    const double a = w * w / std::pow(2.0, 8.0 / 3) + s / std::pow(2.0, 2.0 / 3);
    return -(std::pow(2.0, 11.0 / 3) / constants::pi) * std::exp(w * w * w / 24 + w * s / 4) *
           (w / 4 * airy_ai(a) + std::pow(2.0, -2.0 / 3) * airy_ai_prime(a));
}

// int_s^inf f(x,w) f(x,-w) dx with f replaced by its large-s form, in closed form.
inline double overlap_tail_large_s(double s, double w) {
    const double b = w * w / std::pow(2.0, 8.0 / 3), y = b + s / std::pow(2.0, 2.0 / 3);
    const double a = airy_ai(y), ap = airy_ai_prime(y);
    double tail_ap2 = -((y * ap * ap - y * y * a * a) / 3 + 2.0 / 3 * a * ap);
    double tail_a2 = -(y * a * a - ap * ap);
    return std::pow(2.0, 20.0 / 3) / (constants::pi * constants::pi) * (tail_ap2 - b * tail_a2);
}

// Large-s joint density F1(s) int_{s/2^{2/3}}^inf [Ai'(b+z)^2 - b Ai(b+z)^2] dz, b = w^2/2^{8/3}.
inline double joint_pdf_large_s(double s, double w, double f1) {
    return f1 * density_constants::joint_scale * overlap_tail_large_s(s, w);
}

// f(s, w) on the real zeta axis for w > 0 with plain Gauss-Legendre quadrature on a PsiGrid column set.
inline double f_real_axis(std::size_t s_index, double w, const PsiGrid& psi) {
    const auto& r = psi.zeta_rule();
    const double zmax = r.nodes.back();
    if (!(w > 0) || std::exp(-w * zmax * zmax) > 1e-12)
        throw TailRegularizationError("f_real_axis: exp(-w zeta_max^2) = " + std::to_string(std::exp(-w * zmax * zmax)) +
                                      " is not negligible; w must be positive and large enough for the zeta cutoff");
    double acc = 0;
    for (std::size_t k = 0; k < r.size(); ++k)
        acc += r.weights[k] * r.nodes[k] * psi.phi2(k, s_index) * std::exp(-w * r.nodes[k] * r.nodes[k]);
    return density_constants::f_scale * acc;
}

// f(s, 0) on the real axis by cubic damping and extrapolation in the damping parameter.
inline RegularizedOscillatoryIntegral::Result f_real_axis_regularized(double s, const PainleveSolution& sol,
                                                                      const RegularizedOscillatoryIntegral& reg = {}) {
    PainlevePotential pot{&sol};
    const double top = sol.s_max();
    auto res = reg.evaluate(
        [&](double z) {
            auto p = psi_at(z, s, pot, top);
            return z * p[1];
        },
        [&](double z) { return 4 * z * z + std::abs(s); });
    res.value *= density_constants::f_scale;
    res.error_estimate *= std::abs(density_constants::f_scale);
    for (double& d : res.damped) d *= density_constants::f_scale;
    return res;
}

struct FColumn {
    double w = 0;
    std::vector<double> f;   // f(s_j, w)
    std::vector<double> fx;  // d f / ds
};

struct JointDensityGrid {
    std::vector<double> s;
    std::vector<double> w;
    std::vector<double> values;  // values[iw * s.size() + is]
    double normalization = 0;
    double at(std::size_t iw, std::size_t is) const { return values[iw * s.size() + is]; }
};

struct MarginalOptions {
    double s_lo = -10.0;
    double s_hi = 8.0;
};

// Joint density P(s, w) of the rescaled maximum s and its rescaled location w, built on the
// rotated-ray Lax solutions (valid for either sign of w).
class JointDensity {
public:
    JointDensity(std::shared_ptr<const PainleveSolution> sol, std::shared_ptr<const RayPsiGrid> psi)
        : sol_(std::move(sol)), psi_(std::move(psi)) {
        const SGrid& g = psi_->s_grid();
        f1_max_index_ = g.count;
        f1_.assign(g.count, 0.0);
        dlogf1_.assign(g.count, 0.0);
        for (std::size_t j = 0; j < g.count; ++j) {
            double s = g.at(j);
            if (s > sol_->s_max() - 2.0 + 1e-12) {
                f1_max_index_ = j;
                break;
            }
            f1_[j] = tracy_widom_f1(s, *sol_);
            dlogf1_[j] = 0.5 * (sol_->tail_q2(s) + sol_->q(s));
        }
    }

    static JointDensity build(const PainleveConfig& pc = {}, const RayPsiConfig& rc = {}) {
        auto sol = std::make_shared<PainleveSolution>(solve_hastings_mcleod(pc));
        auto psi = std::make_shared<RayPsiGrid>(build_ray_psi_grid(*sol, rc));
        return JointDensity(sol, psi);
    }

    const PainleveSolution& painleve() const { return *sol_; }
    const RayPsiGrid& psi() const { return *psi_; }
    const SGrid& s_grid() const { return psi_->s_grid(); }
    double s_lo() const { return s_grid().s_min; }
    double s_hi() const { return s_grid().at(f1_max_index_ - 1); }

    // f and d f/ds on the grid; with with_w the column holds d f / dw in fx instead.
    FColumn f_column(double w, bool with_w = false) const {
        check_w(w);
        const SGrid& g = s_grid();
        const std::size_t n = g.count;
        FColumn c;
        c.w = w;
        c.f.assign(n, 0.0);
        c.fx.assign(n, 0.0);
        const auto& rule = psi_->radial_rule();
        const std::complex<double> dir = psi_->direction();
        for (std::size_t k = 0; k < psi_->node_count(); ++k) {
            std::complex<double> z = rule.nodes[k] * dir;
            std::complex<double> ck = rule.weights[k] * dir * z * std::exp(-w * z * z);
            if (std::abs(ck) == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                std::complex<double> y2 = psi_->y2(k, j);
                c.f[j] += (ck * y2).real();
                if (with_w)
                    c.fx[j] += (-ck * z * z * y2).real();
                else
                    c.fx[j] += (ck * (-z * psi_->y1(k, j) - psi_->q_nodes[j] * y2)).real();
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            c.f[j] *= density_constants::f_scale;
            c.fx[j] *= density_constants::f_scale;
        }
        return c;
    }

    double f(double s, double w) const {
        FColumn c = f_column(w);
        return interpolate(c, s);
    }

    // P(s_j, w) for every grid node with s_j <= s_hi().
    std::vector<double> joint_pdf_column(double w) const {
        auto [T, Tp] = overlap_column(w);
        std::vector<double> p(f1_max_index_);
        for (std::size_t j = 0; j < f1_max_index_; ++j) p[j] = density_constants::joint_scale * f1_[j] * T[j];
        return p;
    }

    double joint_pdf(double s, double w) const {
        check_s(s);
        const SGrid& g = s_grid();
        FColumn a = f_column(w), b = f_column(-w);
        std::vector<double> T = overlap_from(a, b);
        std::size_t j = std::min<std::size_t>(static_cast<std::size_t>((s - g.s_min) / g.step), g.count - 2);
        double partial = integrate(gauss_legendre(6, s, g.at(j + 1)),
                                   [&](double x) { return interpolate(a, x) * interpolate(b, x); });
        return density_constants::joint_scale * tracy_widom_f1(s, *sol_) * (T[j + 1] + partial);
    }

    // Same density through h = -(pi^2/2^{13/3}) f and the 4/pi^2 normalisation.
    double joint_pdf_from_h(std::size_t s_index, double w) const {
        FColumn a = f_column(w), b = f_column(-w);
        for (auto* c : {&a, &b})
            for (std::size_t j = 0; j < c->f.size(); ++j) {
                c->f[j] *= density_constants::h_scale;
                c->fx[j] *= density_constants::h_scale;
            }
        std::vector<double> T = overlap_from(a, b, false);
        const double tail = overlap_tail_large_s(s_grid().s_max(), w) * std::pow(density_constants::h_scale, 2);
        return 4.0 / (constants::pi * constants::pi) * f1_.at(s_index) * (T[s_index] + tail);
    }

    // P(w) = int P(s, w) ds over [opt.s_lo, opt.s_hi].
    double marginal_w(double w, const MarginalOptions& opt = {}) const {
        const SGrid& g = s_grid();
        if (g.step > 0.05) throw ResolutionError("marginal_w: s-grid step above 0.05");
        if (opt.s_lo < g.s_min - 1e-12 || opt.s_hi > s_hi() + 1e-12 || opt.s_lo > -10.0 || opt.s_hi < 8.0)
            throw ResolutionError("marginal_w: s-range must contain [-10, 8] and lie inside the grid");
        auto [T, Tp] = overlap_column(w);
        std::size_t lo = g.nearest(opt.s_lo), hi = g.nearest(opt.s_hi);
        // trapezoid with end corrections using dP/ds = P (log F1)' + F1 T' scale
        auto P = [&](std::size_t j) { return density_constants::joint_scale * f1_[j] * T[j]; };
        auto dP = [&](std::size_t j) {
            return density_constants::joint_scale * f1_[j] * (dlogf1_[j] * T[j] + Tp[j]);
        };
        double acc = 0;
        for (std::size_t j = lo; j < hi; ++j) acc += 0.5 * (P(j) + P(j + 1));
        acc *= g.step;
        acc += g.step * g.step / 12 * (dP(lo) - dP(hi));
        return acc;
    }

    JointDensityGrid grid(double w_lo, double w_hi, double w_step, double s_lo = -10.0, double s_hi = 8.0) const {
        const SGrid& g = s_grid();
        JointDensityGrid out;
        std::size_t lo = g.nearest(s_lo), hi = g.nearest(s_hi);
        for (std::size_t j = lo; j <= hi; ++j) out.s.push_back(g.at(j));
        std::size_t nw = static_cast<std::size_t>(std::llround((w_hi - w_lo) / w_step)) + 1;
        for (std::size_t i = 0; i < nw; ++i) out.w.push_back(w_lo + (w_hi - w_lo) * i / (nw - 1));
        out.values.reserve(nw * out.s.size());
        std::vector<double> marg(nw);
        for (std::size_t i = 0; i < nw; ++i) {
            std::vector<double> col = joint_pdf_column(out.w[i]);
            double m = 0;
            for (std::size_t j = lo; j <= hi; ++j) {
                out.values.push_back(col[j]);
                m += (j == lo || j == hi ? 0.5 : 1.0) * col[j];
            }
            marg[i] = m * g.step;
        }
        out.normalization = simpson_or_trapezoid(marg, out.w.size() > 1 ? out.w[1] - out.w[0] : 0.0);
        return out;
    }

    static double simpson_or_trapezoid(const std::vector<double>& v, double h) {
        const std::size_t n = v.size();
        if (n < 2) return 0;
        if (n % 2 == 1 && n >= 3) {
            double s = v.front() + v.back();
            for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 ? 4.0 : 2.0) * v[i];
            return s * h / 3;
        }
        double s = 0.5 * (v.front() + v.back());
        for (std::size_t i = 1; i + 1 < n; ++i) s += v[i];
        return s * h;
    }

    double f1_node(std::size_t j) const { return f1_.at(j); }
    std::size_t f1_count() const { return f1_max_index_; }

private:
    std::shared_ptr<const PainleveSolution> sol_;
    std::shared_ptr<const RayPsiGrid> psi_;
    std::vector<double> f1_, dlogf1_;
    std::size_t f1_max_index_ = 0;

    void check_w(double w) const {
        if (!std::isfinite(w) || std::abs(w) > 6.0 + 1e-12)
            throw DomainError("joint density: |w| <= 6 required, got " + std::to_string(w));
    }
    void check_s(double s) const {
        if (!(s >= s_lo() && s <= s_hi()))
            throw RangeError("joint density: s=" + std::to_string(s) + " outside [" + std::to_string(s_lo()) + ", " +
                             std::to_string(s_hi()) + "]");
    }

    double interpolate(const FColumn& c, double s) const {
        const SGrid& g = s_grid();
        if (!(s >= g.s_min && s <= g.s_max())) throw RangeError("f: s outside the grid");
        std::size_t j = std::min<std::size_t>(static_cast<std::size_t>((s - g.s_min) / g.step), g.count - 2);
        double h = g.step, t = (s - g.at(j)) / h, t2 = t * t, t3 = t2 * t;
        return c.f[j] * (2 * t3 - 3 * t2 + 1) + h * c.fx[j] * (t3 - 2 * t2 + t) + c.f[j + 1] * (-2 * t3 + 3 * t2) +
               h * c.fx[j + 1] * (t3 - t2);
    }

    // T(s_j) = int_{s_j}^inf f(x,w) f(x,-w) dx, with the closed-form tail beyond the grid.
    std::vector<double> overlap_from(const FColumn& a, const FColumn& b, bool with_tail = true) const {
        const SGrid& g = s_grid();
        const std::size_t n = g.count;
        const double h = g.step;
        std::vector<double> T(n, 0.0);
        T[n - 1] = with_tail ? overlap_tail_large_s(g.s_max(), a.w) : 0.0;
        for (std::size_t j = n - 1; j-- > 0;) {
            double g0 = a.f[j] * b.f[j], g1 = a.f[j + 1] * b.f[j + 1];
            double d0 = a.fx[j] * b.f[j] + a.f[j] * b.fx[j];
            double d1 = a.fx[j + 1] * b.f[j + 1] + a.f[j + 1] * b.fx[j + 1];
            T[j] = T[j + 1] + 0.5 * h * (g0 + g1) + h * h / 12 * (d0 - d1);
        }
        return T;
    }

    std::pair<std::vector<double>, std::vector<double>> overlap_column(double w) const {
        FColumn a = f_column(w), b = f_column(-w);
        std::vector<double> T = overlap_from(a, b);
        std::vector<double> Tp(T.size());
        for (std::size_t j = 0; j < T.size(); ++j) Tp[j] = -a.f[j] * b.f[j];
        return {T, Tp};
    }
};

// w -> -w symmetry and the Airy2 rescaling.
inline double airy2_jpdf(const JointDensity& jd, double m, double t) {
    return 4.0 * jd.joint_pdf(density_constants::airy_m_scale * m, density_constants::airy_t_scale * t);
}

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct TailConstants {
    double C = 0;        // sqrt(pi)
    double D = 0;        // C [int_{-inf}^0 e^{-2I} + int_0^inf (1 - e^{-2I})]
    double c_tilde = 0;  // (2^{9/2}/pi^3) int_0^inf (1 - e^{-2I})
    double C_tilde = 0;  // (2^{-7/6}/pi) F1(0) int_0^inf (1 - e^{-2I})
    double A_minus = 0;  // int_{-inf}^0 e^{-2 I(z)} dz, I(z) = int_z^inf q
    double A_plus = 0;   // int_0^inf (1 - e^{-2 I(z)}) dz
    double C_matched = 0;
    double D_matched = 0;
};

// Constants of the large-|w| tails, plus the values recovered by matching the small-zeta
// behaviour of the Lax solution at large s.
inline TailConstants tail_analysis(const PainleveSolution& sol) {
    TailConstants tc;
    auto e2I = [&](double z) { return std::exp(-2 * sol.tail_q(z)); };
    const double lo = sol.s_min(), hi = sol.s_max() - 2.0;
    tc.A_minus = integrate(composite_gauss_legendre(lo, 0.0, 48, 16), e2I);
    tc.A_plus = integrate(composite_gauss_legendre(0.0, hi, 40, 16), [&](double z) { return 1 - e2I(z); });
    tc.C = constants::sqrt_pi;
    tc.D = tc.C * (tc.A_minus + tc.A_plus);
    tc.c_tilde = std::pow(2.0, 4.5) / std::pow(constants::pi, 3) * tc.A_plus;
    tc.C_tilde = std::pow(2.0, -7.0 / 6) / constants::pi * tracy_widom_f1(0.0, sol) * tc.A_plus;

    // Phi2(zeta, x) ~ zeta phi(x) as zeta -> 0; large-w matching fixes
    // -sqrt(pi) phi(x) = e^{I(x)} [C int_{-inf}^x e^{-2I} - D].
    PainlevePotential pot{&sol};
    const double zeta = 1e-5, x1 = 6.0, x2 = 8.0;
    double phi1 = psi_at(zeta, x1, pot, sol.s_max())[1] / zeta;
    double phi2 = psi_at(zeta, x2, pot, sol.s_max())[1] / zeta;
    double lhs1 = -constants::sqrt_pi * phi1 * std::exp(-sol.tail_q(x1));
    double lhs2 = -constants::sqrt_pi * phi2 * std::exp(-sol.tail_q(x2));
    double cum1 = tc.A_minus + integrate(composite_gauss_legendre(0.0, x1, 24, 16), e2I);
    double cum2 = tc.A_minus + integrate(composite_gauss_legendre(0.0, x2, 32, 16), e2I);
    tc.C_matched = (lhs2 - lhs1) / (cum2 - cum1);
    tc.D_matched = tc.C_matched * cum1 - lhs1;
    return tc;
}

// Predicted large-w envelope of the positive-s part of the marginal.
inline double upper_tail_envelope(double w, const TailConstants& tc) {
    return tc.C_tilde / (w * w * w) * std::exp(-w * w * w / 12);
}

struct TailFit {
    double slope = 0;            // least-squares coefficient of w^3 in -log P(w)
    double slope_with_prefactor = 0;  // same for -(log P(w) + 3 log w)
    double ratio_min = 0;        // P(w) / envelope for w >= ratio_lo
    double ratio_max = 0;
    std::vector<double> w, marginal, ratio;
};

inline TailFit fit_marginal_tail(const JointDensity& jd, const TailConstants& tc, double w_lo = 2.5, double w_hi = 4.0,
                                 int points = 16, double ratio_lo = 3.0) {
    TailFit fit;
    std::vector<double> x, y1, y2;
    fit.ratio_min = INFINITY;
    fit.ratio_max = -INFINITY;
    for (int i = 0; i < points; ++i) {
        double w = w_lo + (w_hi - w_lo) * i / (points - 1);
        double p = jd.marginal_w(w);
        if (!(p > 0)) throw StatisticsError("fit_marginal_tail: non-positive marginal at w=" + std::to_string(w));
        x.push_back(w * w * w);
        y1.push_back(-std::log(p));
        y2.push_back(-std::log(p) - 3 * std::log(w));
        double r = p / upper_tail_envelope(w, tc);
        fit.w.push_back(w);
        fit.marginal.push_back(p);
        fit.ratio.push_back(r);
        if (w >= ratio_lo - 1e-12) {
            fit.ratio_min = std::min(fit.ratio_min, r);
            fit.ratio_max = std::max(fit.ratio_max, r);
        }
    }
    fit.slope = least_squares_slope(x, y1);
    fit.slope_with_prefactor = least_squares_slope(x, y2);
    return fit;
}

}  // namespace vicious

#endif
