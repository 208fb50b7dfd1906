#ifndef VICIOUS_DOUBLE_DOUBLE_HPP
#define VICIOUS_DOUBLE_DOUBLE_HPP

#include <cmath>
#include <limits>

namespace vicious {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2; about 32 significant digits.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}
    constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
    explicit operator long double() const { return static_cast<long double>(hi) + lo; }

    static DoubleDouble pi() { return {3.141592653589793116e+00, 1.224646799147353207e-16}; }
    static DoubleDouble ln2() { return {6.931471805599452862e-01, 2.319046813846299558e-17}; }
};

namespace dd_detail {
inline DoubleDouble two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}
inline DoubleDouble quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}
inline DoubleDouble two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}
}  // namespace dd_detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = dd_detail::two_sum(a.hi, b.hi);
    DoubleDouble t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}
inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }
inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    DoubleDouble p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}
inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
    double q1 = a.hi / b.hi;
    DoubleDouble r = a - b * DoubleDouble(q1);
    double q2 = r.hi / b.hi;
    r = r - b * DoubleDouble(q2);
    double q3 = r.hi / b.hi;
    return DoubleDouble(dd_detail::quick_two_sum(q1, q2)) + DoubleDouble(q3);
}
inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }
inline DoubleDouble& operator/=(DoubleDouble& a, DoubleDouble b) { return a = a / b; }

inline bool operator<(DoubleDouble a, DoubleDouble b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(DoubleDouble a, DoubleDouble b) { return b < a; }
inline bool operator<=(DoubleDouble a, DoubleDouble b) { return !(b < a); }
inline bool operator>=(DoubleDouble a, DoubleDouble b) { return !(a < b); }
inline bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi == b.hi && a.lo == b.lo; }

inline DoubleDouble abs(DoubleDouble a) { return a.hi < 0.0 ? -a : a; }
inline bool isfinite(DoubleDouble a) { return std::isfinite(a.hi); }

inline DoubleDouble sqrt(DoubleDouble a) {
    if (a.hi <= 0.0) return DoubleDouble(a.hi == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
    double x = 1.0 / std::sqrt(a.hi);
    double ax = a.hi * x;
    DoubleDouble diff = a - dd_detail::two_prod(ax, ax);
    return dd_detail::two_sum(ax, diff.hi * x * 0.5);
}

inline DoubleDouble ldexp(DoubleDouble a, int e) { return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)}; }

inline DoubleDouble exp(DoubleDouble a) {
    if (a.hi > 709.0) return DoubleDouble(std::numeric_limits<double>::infinity());
    if (a.hi < -745.0) return DoubleDouble(0.0);
    const DoubleDouble ln2 = DoubleDouble::ln2();
    double k = std::nearbyint(a.hi / ln2.hi);
    DoubleDouble r = ldexp(a - ln2 * DoubleDouble(k), -10);
    // exp(r) - 1 by Taylor; |r| < 4e-4
    DoubleDouble term = r, sum = r;
    for (int n = 2; n < 12; ++n) {
        term = term * r / DoubleDouble(double(n));
        sum += term;
        if (std::abs(term.hi) < 1e-36) break;
    }
    for (int i = 0; i < 10; ++i) sum = sum * (sum + DoubleDouble(2.0));  // (1+x)^2 - 1
    sum += DoubleDouble(1.0);
    return ldexp(sum, static_cast<int>(k));
}

inline DoubleDouble log(DoubleDouble a) {
    double x0 = std::log(a.hi);
    DoubleDouble x(x0);
    for (int i = 0; i < 2; ++i) x = x + a * exp(-x) - DoubleDouble(1.0);
    return x;
}

}  // namespace vicious

template <>
struct std::numeric_limits<vicious::DoubleDouble> : std::numeric_limits<double> {
    static constexpr int digits10 = 31;
    static vicious::DoubleDouble epsilon() { return vicious::DoubleDouble(4.93038065763132e-32); }
};

#endif
