#ifndef VICIOUS_SPECIAL_BASIS_HPP
#define VICIOUS_SPECIAL_BASIS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/airy.hpp>

#include "errors.hpp"

namespace vicious {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt_pi = 1.7724538509055160273;
// zeta'(-1) = 1/12 - log(Glaisher); checked against an Euler-Maclaurin sum in the tests.
inline constexpr double zeta_prime_minus_one = -0.16542114370045092921;
}  // namespace constants

inline double airy_ai(double x) {
    if (!std::isfinite(x)) throw DomainError("airy_ai: non-finite argument");
    if (x > 104.0) return 0.0;  // below the smallest subnormal
    return boost::math::airy_ai(x);
}

inline double airy_ai_prime(double x) {
    if (!std::isfinite(x)) throw DomainError("airy_ai_prime: non-finite argument");
    if (x > 104.0) return 0.0;
    return boost::math::airy_ai_prime(x);
}

// Physicists' Hermite polynomial by upward recurrence.
inline double hermite(int k, double z) {
    if (k < 0) throw DomainError("hermite: negative degree");
    if (k > 300) throw UnsupportedDegree("hermite: degree " + std::to_string(k) + " exceeds 300; use hermite_function_log");
    if (k == 0) return 1.0;
    double hm = 1.0, h = 2.0 * z;
    for (int j = 1; j < k; ++j) {
        double hn = 2.0 * z * h - 2.0 * j * hm;
        hm = h;
        h = hn;
    }
    if (!std::isfinite(h)) throw EvaluationError("hermite: overflow at degree " + std::to_string(k));
    return h;
}

struct SignedLog {
    int sign = 0;
    double log_abs = -INFINITY;
    double value() const { return sign * std::exp(log_abs); }
};

// Orthonormal Hermite function H_k(z) exp(-z^2/2) / sqrt(2^k k! sqrt(pi)), as sign and log magnitude.
inline SignedLog hermite_function_log(int k, double z) {
    if (k < 0) throw DomainError("hermite_function_log: negative degree");
    double scale = -0.5 * z * z - 0.25 * std::log(constants::pi);
    double pm = 0.0, p = 1.0;
    for (int j = 0; j < k; ++j) {
        double pn = std::sqrt(2.0 / (j + 1)) * z * p - std::sqrt(double(j) / (j + 1)) * pm;
        pm = p;
        p = pn;
        double a = std::abs(p);
        if (a > 1e150 || (a < 1e-150 && a > 0.0)) {
            double l = std::log(a);
            p /= a;
            pm /= a;
            scale += l;
        }
    }
    if (p == 0.0) return {};
    return {p > 0 ? 1 : -1, scale + std::log(std::abs(p))};
}

// log of the physicists' Hermite polynomial magnitude, valid for any degree.
inline SignedLog hermite_log(int k, double z) {
    SignedLog f = hermite_function_log(k, z);
    f.log_abs += 0.5 * z * z + 0.5 * (k * std::log(2.0) + std::lgamma(k + 1.0) + 0.5 * std::log(constants::pi));
    return f;
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }

    void append(const QuadratureRule& other) {
        nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    }
};

inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(constants::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = mid - half * x;
        r.nodes[n - 1 - i] = mid + half * x;
        r.weights[i] = r.weights[n - 1 - i] = half * w;
    }
    return r;
}

inline QuadratureRule composite_gauss_legendre(const std::vector<double>& breaks, int order) {
    QuadratureRule r;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        r.append(gauss_legendre(order, breaks[i], breaks[i + 1]));
    return r;
}

inline QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
    std::vector<double> br(panels + 1);
    for (int i = 0; i <= panels; ++i) br[i] = a + (b - a) * i / panels;
    return composite_gauss_legendre(br, order);
}

// Rule on [0, inf) from x = scale (1+t)/(1-t).
inline QuadratureRule half_line_rule(int n, double scale = 1.0) {
    QuadratureRule g = gauss_legendre(n);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double t = g.nodes[i];
        g.weights[i] *= 2.0 * scale / ((1.0 - t) * (1.0 - t));
        g.nodes[i] = scale * (1.0 + t) / (1.0 - t);
    }
    return g;
}

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        double v = f(rule.nodes[i]);
        if (!std::isfinite(v))
            throw EvaluationError("integrate: non-finite integrand at node " + std::to_string(rule.nodes[i]));
        s += rule.weights[i] * v;
    }
    return s;
}

// Panels on [a, b] no wider than max_width and at most `radians` of phase for a local frequency bound.
template <class Freq>
std::vector<double> oscillation_breaks(double a, double b, Freq&& freq, double radians = 3.0, double max_width = 0.5) {
    std::vector<double> br{a};
    double x = a;
    while (x < b) {
        double w = std::min(max_width, radians / std::max(freq(x), 1e-12));
        w = std::min(w, radians / std::max(freq(std::min(x + w, b)), 1e-12));
        x = std::min(b, x + w);
        br.push_back(x);
    }
    return br;
}

// Polynomial extrapolation to zero of values sampled at abscissae h.
inline double neville_at_zero(const std::vector<double>& h, std::vector<double> v) {
    const std::size_t n = h.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            v[i] = (h[i + m] * v[i] - h[i] * v[i + 1]) / (h[i + m] - h[i]);
    return v[0];
}

// int_0^inf g(z) dz for a conditionally convergent oscillatory g, damped by exp(-eps z^3)
// and extrapolated to eps -> 0.
struct RegularizedOscillatoryIntegral {
    std::vector<double> epsilons{1e-2, 5e-3, 2.5e-3};
    double cutoff_exponent = 38.0;  // damping exp(-38) ~ 3e-17 at the truncation point
    int order = 16;

    struct Result {
        double value = 0.0;
        double error_estimate = 0.0;
        std::vector<double> damped;
    };

    double cutoff(double eps) const { return std::cbrt(cutoff_exponent / eps); }

    template <class G, class Freq>
    Result evaluate(G&& g, Freq&& freq) const {
        if (epsilons.size() < 2) throw DomainError("RegularizedOscillatoryIntegral: need two or more epsilons");
        double zmax = cutoff(*std::min_element(epsilons.begin(), epsilons.end()));
        QuadratureRule rule = composite_gauss_legendre(oscillation_breaks(0.0, zmax, freq), order);
        std::vector<double> gv(rule.size());
        for (std::size_t i = 0; i < rule.size(); ++i) {
            gv[i] = g(rule.nodes[i]);
            if (!std::isfinite(gv[i]))
                throw EvaluationError("regularized integral: non-finite integrand at " + std::to_string(rule.nodes[i]));
        }
        Result r;
        for (double eps : epsilons) {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.size(); ++i) {
                double z = rule.nodes[i];
                s += rule.weights[i] * gv[i] * std::exp(-eps * z * z * z);
            }
            r.damped.push_back(s);
        }
        r.value = neville_at_zero(epsilons, r.damped);
        std::vector<double> e2(epsilons.begin(), epsilons.end() - 1);
        std::vector<double> d2(r.damped.begin(), r.damped.end() - 1);
        r.error_estimate = std::abs(r.value - neville_at_zero(e2, d2));
        return r;
    }
};

// int_x^inf Ai(t) dt.
inline double airy_ai_tail_integral(double x) {
    double hi = std::max(x, 0.0) + 30.0;
    return integrate(composite_gauss_legendre(x, hi, 24, 20), [](double t) { return airy_ai(t); });
}

}  // namespace vicious

#endif
