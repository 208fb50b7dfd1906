#ifndef VICIOUS_PAINLEVE_HPP
#define VICIOUS_PAINLEVE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "errors.hpp"
#include "special_basis.hpp"

namespace vicious {

struct PainleveConfig {
    double s_min = -12.0;
    double s_max = 12.0;
    double step = 0.005;
    double newton_tol = 1e-14;
    int max_newton = 60;
    bool richardson = false;  // combine step and step/2 solutions
};

namespace detail {

// Quintic Hermite basis on [0,1] from value, first and second derivative at both ends.
struct Quintic {
    double y0, d0, c0, y1, d1, c1;  // d = h y', c = h^2 y''

    double value(double t) const {
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        return y0 * (1 - 10 * t3 + 15 * t4 - 6 * t5) + d0 * (t - 6 * t3 + 8 * t4 - 3 * t5) +
               c0 * 0.5 * (t2 - 3 * t3 + 3 * t4 - t5) + y1 * (10 * t3 - 15 * t4 + 6 * t5) +
               d1 * (-4 * t3 + 7 * t4 - 3 * t5) + c1 * 0.5 * (t3 - 2 * t4 + t5);
    }
    // derivative with respect to t
    double slope(double t) const {
        double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
        return y0 * (-30 * t2 + 60 * t3 - 30 * t4) + d0 * (1 - 18 * t2 + 32 * t3 - 15 * t4) +
               c0 * 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4) + y1 * (30 * t2 - 60 * t3 + 30 * t4) +
               d1 * (-12 * t2 + 28 * t3 - 15 * t4) + c1 * 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    }
};

inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
                         std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

inline double pii_rhs(double s, double q) { return 2 * q * q * q + s * q; }

// Numerov discretisation of q'' = 2 q^3 + s q with Dirichlet data, solved by damped Newton.
inline std::vector<double> numerov_newton(double s_min, double h, std::size_t n, double newton_tol, int max_newton,
                                          int& iterations) {
    std::vector<double> s(n), q(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = s_min + h * i;
        q[i] = std::sqrt(std::max(-s[i], 0.0) / 2 + airy_ai(s[i]) * airy_ai(s[i]));
    }
    {
        // left boundary from the algebraic expansion sqrt(-s/2) (1 + s^-3/8 - 73 s^-6/128 + ...)
        double a = 1.0 / (s.front() * s.front() * s.front());
        q.front() = std::sqrt(-s.front() / 2) * (1 + a / 8 - 73.0 / 128 * a * a + 10657.0 / 1024 * a * a * a);
    }
    q.back() = airy_ai(s.back());
    const double c = h * h / 12.0;
    const std::size_t m = n - 2;
    auto residual = [&](const std::vector<double>& v, std::vector<double>& F) {
        double norm = 0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            F[i - 1] = v[i + 1] - 2 * v[i] + v[i - 1] -
                       c * (pii_rhs(s[i + 1], v[i + 1]) + 10 * pii_rhs(s[i], v[i]) + pii_rhs(s[i - 1], v[i - 1]));
            norm = std::max(norm, std::abs(F[i - 1]));
        }
        return norm;
    };
    std::vector<double> F(m), lo(m), di(m), up(m), trial(n);
    double fnorm = residual(q, F);
    for (iterations = 0; iterations < max_newton; ++iterations) {
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t i = k + 1;
            auto dg = [&](std::size_t j) { return 6 * q[j] * q[j] + s[j]; };
            di[k] = -2 - 10 * c * dg(i);
            lo[k] = 1 - c * dg(i - 1);
            up[k] = 1 - c * dg(i + 1);
            F[k] = -F[k];
        }
        thomas_solve(lo, di, up, F);
        double dmax = 0;
        for (double d : F) dmax = std::max(dmax, std::abs(d));
        double lambda = 1.0;
        std::vector<double> Ft(m);
        for (;;) {
            trial = q;
            for (std::size_t k = 0; k < m; ++k) trial[k + 1] += lambda * F[k];
            double tn = residual(trial, Ft);
            if (tn < fnorm || lambda < 1e-3 || dmax * lambda < newton_tol) {
                q.swap(trial);
                fnorm = tn;
                F.swap(Ft);
                break;
            }
            lambda *= 0.5;
        }
        if (!std::isfinite(fnorm)) break;
        if (dmax * lambda < newton_tol) return q;
    }
    throw ConvergenceError("Painleve boundary-value Newton iteration did not converge (residual " +
                           std::to_string(fnorm) + ")");
}

}  // namespace detail

class PainleveSolution {
public:
    PainleveSolution(double s_min, double h, std::vector<double> q) : s_min_(s_min), h_(h), q_(std::move(q)) {
        const std::size_t n = q_.size();
        s_.resize(n);
        for (std::size_t i = 0; i < n; ++i) s_[i] = s_min_ + h_ * i;
        qp_.resize(n);
        qpp_.resize(n);
        for (std::size_t i = 0; i < n; ++i) qpp_[i] = detail::pii_rhs(s_[i], q_[i]);
        for (std::size_t i = 1; i + 1 < n; ++i)
            qp_[i] = (q_[i + 1] - q_[i - 1]) / (2 * h_) - h_ / 12 * (qpp_[i + 1] - qpp_[i - 1]);
        qp_[0] = (q_[1] - q_[0]) / h_ - h_ * (2 * qpp_[0] + qpp_[1]) / 6;
        qp_[n - 1] = (q_[n - 1] - q_[n - 2]) / h_ + h_ * (2 * qpp_[n - 1] + qpp_[n - 2]) / 6;
        build_tail_integrals();
        residual_ = measure_residual();
    }

    double s_min() const { return s_min_; }
    double s_max() const { return s_.back(); }
    double step() const { return h_; }
    std::size_t size() const { return s_.size(); }
    const std::vector<double>& grid() const { return s_; }
    const std::vector<double>& q_values() const { return q_; }
    const std::vector<double>& q_prime_values() const { return qp_; }
    double achieved_residual() const { return residual_; }
    int newton_iterations = 0;

    bool contains(double s) const { return s >= s_min_ && s <= s_.back(); }

    double q(double s) const {
        auto [seg, t] = segment(s);
        return seg.value(t);
    }
    double q_prime(double s) const {
        auto [seg, t] = segment(s);
        return seg.slope(t) / h_;
    }
    double q_second(double s) const { return detail::pii_rhs(s, q(s)); }
    // q^2 - q', the potential of the associated Schroedinger operator
    double potential(double s) const {
        auto [seg, t] = segment(s);
        double v = seg.value(t);
        return v * v - seg.slope(t) / h_;
    }

    // Tail integrals int_s^inf of q, q^2 and t q^2, including the Airy tail beyond the grid.
    double tail_q(double s) const { return tail(s, 0); }
    double tail_q2(double s) const { return tail(s, 1); }
    double tail_tq2(double s) const { return tail(s, 2); }

private:
    double s_min_, h_;
    std::vector<double> s_, q_, qp_, qpp_;
    std::vector<double> cum_[3];
    double airy_tail_[3] = {0, 0, 0};
    double residual_ = 0;

    std::pair<detail::Quintic, double> segment(double s) const {
        if (!(s >= s_min_ - 1e-12 && s <= s_.back() + 1e-12))
            throw RangeError("Painleve solution queried at s=" + std::to_string(s) + " outside [" +
                             std::to_string(s_min_) + ", " + std::to_string(s_.back()) + "]");
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, (s - s_min_) / h_)), s_.size() - 2);
        double t = (s - s_[i]) / h_;
        detail::Quintic seg{q_[i], h_ * qp_[i], h_ * h_ * qpp_[i], q_[i + 1], h_ * qp_[i + 1], h_ * h_ * qpp_[i + 1]};
        return {seg, t};
    }

    double integrand(int which, double t, double v) const {
        return which == 0 ? v : (which == 1 ? v * v : t * v * v);
    }
    double integrand_slope(int which, double t, double v, double dv) const {
        return which == 0 ? dv : (which == 1 ? 2 * v * dv : v * v + 2 * t * v * dv);
    }

    void build_tail_integrals() {
        const std::size_t n = s_.size();
        const double top = s_.back();
        QuadratureRule airy_rule = composite_gauss_legendre(top, top + 30.0, 30, 16);
        airy_tail_[0] = integrate(airy_rule, [](double t) { return airy_ai(t); });
        airy_tail_[1] = integrate(airy_rule, [](double t) { return airy_ai(t) * airy_ai(t); });
        airy_tail_[2] = integrate(airy_rule, [](double t) { return t * airy_ai(t) * airy_ai(t); });
        for (int w = 0; w < 3; ++w) {
            cum_[w].assign(n, 0.0);
            for (std::size_t i = n - 1; i-- > 0;) {
                double g0 = integrand(w, s_[i], q_[i]), g1 = integrand(w, s_[i + 1], q_[i + 1]);
                double d0 = integrand_slope(w, s_[i], q_[i], qp_[i]);
                double d1 = integrand_slope(w, s_[i + 1], q_[i + 1], qp_[i + 1]);
                cum_[w][i] = cum_[w][i + 1] + 0.5 * h_ * (g0 + g1) + h_ * h_ / 12 * (d0 - d1);
            }
        }
    }

    double tail(double s, int which) const {
        if (s >= s_.back()) {
            QuadratureRule r = composite_gauss_legendre(s, s + 30.0, 30, 16);
            return integrate(r, [&](double t) { return integrand(which, t, airy_ai(t)); });
        }
        auto [seg, t] = segment(s);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, (s - s_min_) / h_)), s_.size() - 2);
        double partial = 0;
        if (t > 0) {
            QuadratureRule r = gauss_legendre(8, s, s_[i + 1]);
            partial = integrate(r, [&, &sg = seg](double x) {
                return integrand(which, x, sg.value((x - s_[i]) / h_));
            });
        } else {
            partial = cum_[which][i] - cum_[which][i + 1];
        }
        return partial + cum_[which][i + 1] + airy_tail_[which];
    }

    double measure_residual() const {
        // sixth-order second difference with spacing 8h, away from the boundaries
        const std::size_t n = s_.size(), k = 8;
        const double H = k * h_;
        double worst = 0;
        for (std::size_t i = 3 * k; i + 3 * k < n; ++i) {
            double d2 = (2 * q_[i - 3 * k] - 27 * q_[i - 2 * k] + 270 * q_[i - k] - 490 * q_[i] + 270 * q_[i + k] -
                         27 * q_[i + 2 * k] + 2 * q_[i + 3 * k]) /
                        (180 * H * H);
            worst = std::max(worst, std::abs(d2 - qpp_[i]));
        }
        return worst;
    }
};

// Hastings-McLeod solution of q'' = 2 q^3 + s q with q ~ Ai(s) at +inf and q ~ sqrt(-s/2) at -inf.
inline PainleveSolution solve_hastings_mcleod(const PainleveConfig& cfg = {}) {
    if (!(cfg.s_min < -2.0 && cfg.s_max > 2.0 && cfg.step > 0 && cfg.step < 0.1))
        throw DomainError("solve_hastings_mcleod: need s_min < -2 < 2 < s_max and 0 < step < 0.1");
    const double span = cfg.s_max - cfg.s_min;
    const std::size_t cells = static_cast<std::size_t>(std::llround(span / cfg.step));
    const double h = span / cells;
    int it1 = 0, it2 = 0;
    std::vector<double> q = detail::numerov_newton(cfg.s_min, h, cells + 1, cfg.newton_tol, cfg.max_newton, it1);
    if (cfg.richardson) {
        std::vector<double> qf =
            detail::numerov_newton(cfg.s_min, h / 2, 2 * cells + 1, cfg.newton_tol, cfg.max_newton, it2);
        for (std::size_t i = 0; i <= cells; ++i) q[i] = (16 * qf[2 * i] - q[i]) / 15;
    }
    PainleveSolution sol(cfg.s_min, h, std::move(q));
    sol.newton_iterations = it1 + it2;
    if (!(sol.achieved_residual() < 1e-6))
        throw ConvergenceError("Painleve solution residual too large: " + std::to_string(sol.achieved_residual()));
    return sol;
}

// log F1(s) = -1/2 int_s^inf ((t - s) q(t)^2 + q(t)) dt
inline double log_tracy_widom_f1(double s, const PainleveSolution& sol) {
    if (s < sol.s_min() || s > sol.s_max() - 2.0)
        throw RangeError("tracy_widom_f1: s=" + std::to_string(s) + " outside [s_min, s_max - 2]");
    return -0.5 * (sol.tail_tq2(s) - s * sol.tail_q2(s) + sol.tail_q(s));
}

inline double tracy_widom_f1(double s, const PainleveSolution& sol) { return std::exp(log_tracy_widom_f1(s, sol)); }

// Left-tail expansion of log F1 up to the constant term.
inline double tracy_widom_f1_left_tail_log(double s) {
    if (s >= 0) throw DomainError("left-tail expansion needs s < 0");
    double a = -s;
    return -a * a * a / 24 - std::pow(a, 1.5) / (3 * std::sqrt(2.0)) - std::log(a) / 16 -
           11.0 / 48 * std::log(2.0) + 0.5 * constants::zeta_prime_minus_one;
}

}  // namespace vicious

#endif
