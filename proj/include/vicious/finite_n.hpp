#ifndef VICIOUS_FINITE_N_HPP
#define VICIOUS_FINITE_N_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "double_double.hpp"
#include "errors.hpp"
#include "painleve.hpp"
#include "special_basis.hpp"

namespace vicious {

// Maps between (M, tau, N) and the edge variables (s, w), plus the double-scaling variables.
namespace scaling {

inline double s_from_height(double M, int N) {
    return std::pow(2.0, 11.0 / 6) * std::pow(N, 1.0 / 6) * (M - std::sqrt(2.0 * N));
}
inline double height_from_s(double s, int N) {
    return std::sqrt(2.0 * N) + s / (std::pow(2.0, 11.0 / 6) * std::pow(N, 1.0 / 6));
}
inline double w_from_location(double tau, int N) { return std::pow(2.0, 8.0 / 3) * std::cbrt(double(N)) * (tau - 0.5); }
inline double location_from_w(double w, int N) { return 0.5 + w / (std::pow(2.0, 8.0 / 3) * std::cbrt(double(N))); }

inline double c_of(int k, double M) { return 2.0 * k / (M * M); }
inline double rho_of(double u) { return 1.0 - 4.0 * u * u; }
inline double v_of(double u, double M) { return u * std::pow(M, 2.0 / 3); }
inline double u_of(double v, double M) { return v * std::pow(M, -2.0 / 3); }
// x_j = M^{4/3} (1 - j / M^2) for recursion index j
inline double x_of(int j, double M) { return std::pow(M, 4.0 / 3) * (1.0 - j / (M * M)); }

}  // namespace scaling

namespace detail {

template <typename Real>
Real real_exp(Real x) {
    using std::exp;
    return exp(x);
}
template <typename Real>
Real real_sqrt(Real x) {
    using std::sqrt;
    return sqrt(x);
}
template <typename Real>
Real real_log(Real x) {
    using std::log;
    return log(x);
}
template <typename Real>
Real real_abs(Real x) {
    using std::abs;
    return abs(x);
}

inline DoubleDouble to_dd(long double x) {
    double hi = static_cast<double>(x);
    return {hi, static_cast<double>(x - hi)};
}

template <typename Real>
Real real_pi() {
    if constexpr (std::is_same_v<Real, DoubleDouble>)
        return DoubleDouble::pi();
    else
        return std::numbers::pi_v<Real>;
}

template <typename Real>
struct LanczosResult {
    std::vector<Real> gamma;  // gamma[k], k >= 1; gamma[0] unused
    Real h0{};
    double defect = 0;
    double tail = 0;          // largest |psi_k| on the outermost lattice sites
    double conditioning = 1;  // largest |n psi_k| / gamma_{k+1}: relative error in gamma is about eps times this
    bool breakdown = false;
};

// Stieltjes procedure on normalised wave functions over n = 0..n_max, using the n -> -n
// symmetry: site n > 0 carries weight 2, degrees of opposite parity are orthogonal exactly.
template <typename Real>
LanczosResult<Real> lanczos(double M, int max_degree, int n_max) {
    const int sites = n_max + 1;
    const Real a = real_pi<Real>() * real_pi<Real>() / (Real(2.0) * Real(M) * Real(M));
    std::vector<Real> c(sites, Real(2.0));
    c[0] = Real(1.0);
    std::vector<std::vector<Real>> q(max_degree + 1, std::vector<Real>(sites));
    LanczosResult<Real> out;
    out.gamma.assign(max_degree + 1, Real(0.0));
    Real h0(0.0);
    for (int n = 0; n < sites; ++n) {
        q[0][n] = real_exp<Real>(-a * Real(double(n)) * Real(double(n)));
        h0 += c[n] * q[0][n];
    }
    out.h0 = h0;
    for (int n = 0; n < sites; ++n) q[0][n] = real_sqrt<Real>(q[0][n] / h0);

    auto dot = [&](const std::vector<Real>& x, const std::vector<Real>& y) {
        Real s(0.0);
        for (int n = 0; n < sites; ++n) s += c[n] * x[n] * y[n];
        return s;
    };
    std::vector<Real> v(sites);
    for (int k = 0; k < max_degree; ++k) {
        for (int n = 0; n < sites; ++n) v[n] = Real(double(n)) * q[k][n];
        const double raw = static_cast<double>(real_sqrt<Real>(dot(v, v)));
        if (k > 0)
            for (int n = 0; n < sites; ++n) v[n] -= out.gamma[k] * q[k - 1][n];
        for (int pass = 0; pass < 2; ++pass)
            for (int j = (k + 1) % 2; j <= k; j += 2) {
                Real d = dot(v, q[j]);
                for (int n = 0; n < sites; ++n) v[n] -= d * q[j][n];
            }
        Real g = real_sqrt<Real>(dot(v, v));
        if (!(static_cast<double>(g) > 0.0) || !std::isfinite(static_cast<double>(g))) {
            out.breakdown = true;
            return out;
        }
        out.conditioning = std::max(out.conditioning, raw / static_cast<double>(g));
        out.gamma[k + 1] = g;
        for (int n = 0; n < sites; ++n) q[k + 1][n] = v[n] / g;
    }
    double defect = 0, tail = 0;
    for (int j = 0; j <= max_degree; ++j) {
        for (int k = j % 2; k <= j; k += 2) {
            double d = static_cast<double>(dot(q[j], q[k])) - (j == k ? 1.0 : 0.0);
            defect = std::max(defect, std::abs(d));
        }
        for (int n = std::max(0, sites - 3); n < sites; ++n)
            tail = std::max(tail, std::abs(static_cast<double>(q[j][n])));
    }
    out.defect = defect;
    out.tail = tail;
    return out;
}

// sum_{n != 0} (-1)^n n chi_{2k-1}(n), chi_j(n) = p_j(n)/sqrt(h_j) exp(-tau a n^2), for k = 1..kmax.
template <typename Real>
void alternating_moments(const std::vector<Real>& gamma, Real h0, double M, double tau, int kmax,
                         std::vector<Real>& sum, std::vector<Real>& abs_sum) {
    const int top = 2 * kmax - 1;
    const Real a = real_pi<Real>() * real_pi<Real>() / (Real(2.0) * Real(M) * Real(M));
    const Real ta = Real(tau) * a;
    sum.assign(kmax, Real(0.0));
    abs_sum.assign(kmax, Real(0.0));
    // the envelope n^top exp(-tau a n^2) peaks near sqrt(top / (2 tau a))
    const double peak = std::sqrt(top / (2.0 * tau * static_cast<double>(a)));
    const Real log_sqrt_h0 = real_log<Real>(h0) * Real(0.5);
    double largest = 0;
    std::vector<Real> chi(top + 1);
    for (long n = 1;; ++n) {
        const Real rn = Real(static_cast<double>(n));
        Real scale_log = -ta * rn * rn - log_sqrt_h0;
        chi[0] = Real(1.0);
        Real prev(0.0);
        for (int j = 0; j < top; ++j) {
            Real next = (rn * chi[j] - gamma[j] * prev) / gamma[j + 1];
            prev = chi[j];
            chi[j + 1] = next;
            double mag = std::abs(static_cast<double>(next));
            if (mag > 1e100) {
                Real r(1e-100);
                for (int i = 0; i <= j + 1; ++i) chi[i] *= r;
                prev *= r;
                scale_log += real_log<Real>(Real(1e100));
            }
        }
        const Real factor = real_exp<Real>(scale_log) * Real(2.0 * n) * Real(n % 2 ? -1.0 : 1.0);
        double local = 0;
        for (int k = 1; k <= kmax; ++k) {
            Real t = factor * chi[2 * k - 1];
            sum[k - 1] += t;
            abs_sum[k - 1] += real_abs<Real>(t);
            local = std::max(local, std::abs(static_cast<double>(t)));
        }
        largest = std::max(largest, local);
        if (n > peak + 2 && (local <= 1e-40 * largest || local == 0.0)) break;
        if (n > 10000000) throw ConvergenceError("alternating_moments: sum did not terminate");
    }
}

}  // namespace detail

struct GValue {
    double value = 0;
    double abs_error = 0;
    bool extended = false;  // evaluated with double-double recursion data
};

// Discrete orthogonal-polynomial data for the weight exp(-pi^2 n^2 / (2 M^2)) on the integers.
class FiniteNModel {
public:
    static constexpr int max_walkers = 64;

    double M() const { return M_; }
    int N() const { return N_; }
    int n_max() const { return n_max_; }
    int max_degree() const { return static_cast<int>(gamma_.size()) - 1; }
    double orthonormality_defect() const { return defect_; }
    bool extended_precision() const { return extended_; }

    long double gamma(int k) const { return gamma_.at(k); }
    long double recursion_coefficient(int k) const { return gamma_.at(k) * gamma_.at(k); }
    long double log_h(int k) const { return log_h_.at(k); }

    // log A_N of the multi-sum prefactor
    long double log_normalization() const {
        const long double N = N_;
        long double s = std::log(N) + (2 * N * N + N + 2) * std::log(std::numbers::pi_v<long double>) -
                        (N * N - N / 2) * std::log(2.0L);
        for (int j = 0; j < N_; ++j) s -= std::lgamma(2.0L + j) + std::lgamma(1.5L + j);
        return s;
    }

    long double log_cdf() const {
        const long double N = N_;
        long double s = std::lgamma(N + 1.0L) + (2 * N * N + N) * std::log(std::numbers::pi_v<long double>) -
                        (N * N + N / 2) * std::log(2.0L) - (2 * N * N + N) * std::log(static_cast<long double>(M_));
        for (int j = 0; j < N_; ++j) s -= std::lgamma(2.0L + j) + std::lgamma(1.5L + j);
        for (int i = 1; i <= N_; ++i) s += log_h_[2 * i - 1];
        return s;
    }

    // normalised wave function psi_k(n)
    double wave_function(int k, long n) const {
        if (k < 0 || k > max_degree()) throw DomainError("wave_function: degree out of table");
        const long double a = std::numbers::pi_v<long double> * std::numbers::pi_v<long double> / (2.0L * M_ * M_);
        long double scale = -a * n * n / 2 - 0.5L * log_h_[0];
        long double p = 1, pm = 0;
        for (int j = 0; j < k; ++j) {
            long double nx = (n * p - gamma_[j] * pm) / gamma_[j + 1];
            pm = p;
            p = nx;
            if (std::abs(p) > 1e100L) {
                p *= 1e-100L;
                pm *= 1e-100L;
                scale += std::log(1e100L);
            }
        }
        return static_cast<double>(p * std::exp(scale));
    }

    // G_{2k-1}(M, u) for k = 1..kmax
    std::vector<GValue> g_all(double u, int kmax = -1) const {
        if (kmax < 0) kmax = N_;
        if (kmax < 1 || 2 * kmax - 1 > max_degree()) throw DomainError("g_function: index outside the table");
        if (!(std::abs(u) < 0.5)) throw DomainError("g_function: |u| < 1/2 required, got " + std::to_string(u));
        const double tau = 0.5 + u;
        std::vector<long double> s, a;
        detail::alternating_moments<long double>(gamma_, h0_, M_, tau, kmax, s, a);
        const double eps_ld = static_cast<double>(std::numeric_limits<long double>::epsilon());
        std::vector<GValue> out(kmax);
        bool need_dd = false;
        for (int k = 0; k < kmax; ++k) {
            out[k].value = static_cast<double>(s[k]);
            out[k].abs_error = 16.0 * (2 * k + 2) * eps_ld * static_cast<double>(a[k]);
            if (out[k].abs_error > 1e-13 * std::abs(out[k].value)) need_dd = true;
        }
        if (!need_dd) return out;
        const auto* dd = extended_table();
        if (!dd) return out;
        std::vector<DoubleDouble> sd, ad;
        detail::alternating_moments<DoubleDouble>(dd->gamma, dd->h0, M_, tau, kmax, sd, ad);
        for (int k = 0; k < kmax; ++k) {
            double err = 16.0 * (2 * k + 2) * 4.93e-32 * static_cast<double>(ad[k]);
            if (err < out[k].abs_error) out[k] = {static_cast<double>(sd[k]), err, true};
        }
        return out;
    }

    GValue g(int k, double u) const { return g_all(u, k).back(); }

    friend FiniteNModel build_op_table(double M, int N);
    friend FiniteNModel build_recursion_table(double M, int max_degree);
    friend FiniteNModel with_lattice_cutoff(const FiniteNModel& model, int n_max);

private:
    struct ExtendedTable {
        std::vector<DoubleDouble> gamma;
        DoubleDouble h0;
    };
    struct ExtendedCache {
        std::once_flag once;
        std::unique_ptr<ExtendedTable> table;
    };

    double M_ = 0;
    int N_ = 0;
    int n_max_ = 0;
    double defect_ = 0;
    bool extended_ = false;
    std::vector<long double> gamma_;
    std::vector<long double> log_h_;
    long double h0_ = 0;
    std::shared_ptr<ExtendedCache> cache_ = std::make_shared<ExtendedCache>();

    const ExtendedTable* extended_table() const {
        std::call_once(cache_->once, [this] {
            auto r = detail::lanczos<DoubleDouble>(M_, max_degree(), n_max_);
            if (r.breakdown || r.defect > 1e-25 || 4.93e-32 * r.conditioning > 1e-20) return;
            cache_->table = std::make_unique<ExtendedTable>(ExtendedTable{r.gamma, r.h0});
        });
        return cache_->table.get();
    }

    static int default_n_max(double M, int degree) {
        const double turning = std::sqrt(2.0 * degree + 1) * std::sqrt(2.0) * M / constants::pi;
        const double base = std::ceil(8 * M) + 50;
        return static_cast<int>(std::max(base, std::ceil(1.3 * std::max(turning, 0.5 * degree)) + 40));
    }

    static FiniteNModel make(double M, int N, int degree, int n_max_hint = 0) {
        FiniteNModel m;
        m.M_ = M;
        m.N_ = N;
        int n_max = std::max(n_max_hint, default_n_max(M, degree));
        for (int attempt = 0; attempt < 4; ++attempt, n_max *= 2) {
            auto r = detail::lanczos<long double>(M, degree, n_max);
            if (r.breakdown)
                throw PrecisionError("build_op_table: Lanczos breakdown at M=" + std::to_string(M) +
                                     " (weights below the extended exponent range)");
            if (r.tail > 1e-18) continue;
            m.n_max_ = n_max;
            m.h0_ = r.h0;
            m.gamma_ = r.gamma;
            m.defect_ = r.defect;
            const double eps_ld = static_cast<double>(std::numeric_limits<long double>::epsilon());
            if (r.defect > 1e-8 || eps_ld * r.conditioning > 1e-12) {
                auto d = detail::lanczos<DoubleDouble>(M, degree, n_max);
                if (d.breakdown || d.defect > 1e-8 || 4.93e-32 * d.conditioning > 1e-12)
                    throw PrecisionError("build_op_table: recursion accuracy lost at M=" + std::to_string(M) +
                                         " even in double-double (conditioning " + std::to_string(d.conditioning) +
                                         ")");
                for (int k = 0; k <= degree; ++k) m.gamma_[k] = static_cast<long double>(d.gamma[k]);
                m.h0_ = static_cast<long double>(d.h0);
                m.defect_ = d.defect;
                m.extended_ = true;
                auto ext = std::make_unique<ExtendedTable>(ExtendedTable{d.gamma, d.h0});
                std::call_once(m.cache_->once, [&] { m.cache_->table = std::move(ext); });
            }
            m.log_h_.assign(degree + 1, 0.0L);
            m.log_h_[0] = std::log(m.h0_);
            for (int k = 1; k <= degree; ++k) m.log_h_[k] = m.log_h_[k - 1] + 2 * std::log(m.gamma_[k]);
            return m;
        }
        throw PrecisionError("build_op_table: wave functions do not decay inside the lattice window");
    }
};

inline double max_height(int N) { return std::max(4 * std::sqrt(double(N)), 8.0); }

inline FiniteNModel build_op_table(double M, int N) {
    if (N < 1 || N > FiniteNModel::max_walkers)
        throw DomainError("build_op_table: N must lie in [1, 64], got " + std::to_string(N));
    if (!(M >= 0.5 && M <= max_height(N)))
        throw RangeError("build_op_table: M must lie in [0.5, max(4 sqrt(N), 8)], got " + std::to_string(M));
    return FiniteNModel::make(M, N, 2 * N);
}

// Recursion data up to an arbitrary degree, for the double-scaling analysis.
inline FiniteNModel build_recursion_table(double M, int max_degree) {
    if (!(M > 0) || max_degree < 1) throw DomainError("build_recursion_table: invalid arguments");
    return FiniteNModel::make(M, std::max(1, (max_degree + 1) / 2), max_degree);
}

// Same model rebuilt on a wider lattice window, for truncation checks.
inline FiniteNModel with_lattice_cutoff(const FiniteNModel& model, int n_max) {
    return FiniteNModel::make(model.M(), model.N(), model.max_degree(), n_max);
}

inline GValue g_function(const FiniteNModel& model, int k, double u) { return model.g(k, u); }

inline double cdf_max_finite_n(const FiniteNModel& model) {
    return std::min(1.0, static_cast<double>(std::exp(model.log_cdf())));
}
// Deep in the left tail the table can be unbuildable; F_N is then certified zero in double precision
// through monotonicity whenever a larger M already underflows.
inline double cdf_max_finite_n(double M, int N) {
    try {
        return cdf_max_finite_n(build_op_table(M, N));
    } catch (const PrecisionError&) {
        for (double up = M * 1.05; up < std::sqrt(2.0 * N); up *= 1.05) {
            try {
                FiniteNModel m = build_op_table(up, N);
                if (m.log_cdf() < std::log(std::numeric_limits<double>::denorm_min())) return 0.0;
                break;
            } catch (const PrecisionError&) {
            }
        }
        throw;
    }
}

struct FiniteNDensity {
    double value = 0;
    double abs_error = 0;
};

// P_N(M, tau) = F_N(M) (pi^2 / 2M^3) sum_k G_{2k-1}(M, u) G_{2k-1}(M, -u), u = tau - 1/2.
inline FiniteNDensity jpdf_finite_n_detail(const FiniteNModel& model, double tau) {
    if (!(tau > 0 && tau < 1)) throw DomainError("jpdf_finite_n: tau must lie in (0, 1)");
    const double u = tau - 0.5;
    auto gp = model.g_all(u), gm = model.g_all(-u);
    const double pre =
        cdf_max_finite_n(model) * constants::pi * constants::pi / (2 * model.M() * model.M() * model.M());
    FiniteNDensity d;
    for (std::size_t k = 0; k < gp.size(); ++k) {
        d.value += gp[k].value * gm[k].value;
        d.abs_error += std::abs(gp[k].value) * gm[k].abs_error + std::abs(gm[k].value) * gp[k].abs_error;
    }
    d.value *= pre;
    d.abs_error *= pre;
    return d;
}

inline double jpdf_finite_n(const FiniteNModel& model, double tau) { return jpdf_finite_n_detail(model, tau).value; }
inline double jpdf_finite_n(double M, double tau, int N) { return jpdf_finite_n(build_op_table(M, N), tau); }

// Closed forms of G for M well above the edge.
namespace g_asymptotics {

// G at u = 0 through Hermite polynomials at sqrt(2) M
inline double hermite_u0(double M, int k) {
    const double z = std::sqrt(2.0) * M;
    SignedLog a = hermite_log(2 * k, z), b = hermite_log(2 * k - 1, z);
    const double pre_log = 2.75 * std::log(2.0) - 1.25 * std::log(constants::pi) - k * std::log(2.0) -
                           0.5 * std::lgamma(2.0 * k) + 1.5 * std::log(M) - M * M;
    double mix = a.sign - b.sign * std::exp(b.log_abs + std::log(z) - a.log_abs);
    return (k % 2 ? -1.0 : 1.0) * mix * std::exp(pre_log + a.log_abs);
}

// G at finite u through Hermite polynomials at M sqrt(2 / (1 - 4u^2))
inline double hermite_finite_u(double M, int k, double u) {
    if (!(std::abs(u) < 0.5)) throw DomainError("hermite_finite_u: |u| < 1/2 required");
    const double r = M * std::sqrt(2.0 / (1 - 4 * u * u));
    SignedLog a = hermite_log(2 * k, r), b = hermite_log(2 * k - 1, r);
    const double ratio = (1 - 2 * u) / (1 + 2 * u);
    const double pre_log = 2.75 * std::log(2.0) - 1.25 * std::log(constants::pi) - k * std::log(2.0) -
                           0.5 * std::lgamma(2.0 * k) + 1.5 * std::log(M) - M * M / (1 + 2 * u) -
                           1.5 * std::log(1 - 2 * u) + k * std::log(ratio);
    double mix = a.sign * std::sqrt(ratio) -
                 b.sign * std::exp(b.log_abs + std::log(std::sqrt(2.0) * M) - a.log_abs);
    return (k % 2 ? -1.0 : 1.0) * mix * std::exp(pre_log + a.log_abs);
}

// Airy form near the edge, x = M^{4/3}(1 - 2k/M^2), v = u M^{2/3}; includes the M^{5/3} amplitude
inline double plancherel_rotach(double M, int k, double v) {
    const double x = scaling::x_of(2 * k, M), y = 4 * v * v + x;
    return (k % 2 ? 1.0 : -1.0) * 8 / constants::pi * std::pow(M, 5.0 / 3) *
           std::exp(16 * v * v * v / 3 + 2 * v * x) * (2 * v * airy_ai(y) + airy_ai_prime(y));
}

}  // namespace g_asymptotics

struct LargeDeviation {
    double y_star = 0;
    double phi_star = 0;
    double phi_pp = 0;
    double varphi = 0;
    double log_jpdf_estimate = 0;
};

// Saddle point data and rate function for M above the edge, c = 2k/M^2.
inline LargeDeviation large_deviation_eval(double c, double u, double M) {
    if (!(c > 0 && c <= 1.0 + 1e-15)) throw DomainError("large_deviation_eval: c must lie in (0, 1]");
    if (!(std::abs(u) < 0.5)) throw DomainError("large_deviation_eval: |u| < 1/2 required");
    const double rho = scaling::rho_of(u), cr = c * rho;
    if (cr > 1.0) throw DomainError("large_deviation_eval: c rho > 1");
    const double root = std::sqrt(1 - cr), gap = 1 - root;
    LargeDeviation r;
    r.y_star = gap / std::sqrt(2 * rho);
    r.phi_star = -(2 - 2 * root + cr * (1 + std::log(2 * rho) - 2 * std::log(gap))) / (2 * rho);
    r.phi_pp = 2 - 2 * cr / (gap * gap);
    // 2 sqrt(1 - c rho)/rho - c ln(c rho) + 2c ln(1 - sqrt(1 - c rho)), grouped to limit cancellation
    if (std::abs(u) < 0.05 && std::abs(c - 1) < 1e-15) {
        const double a = std::abs(u);
        r.varphi = 4 * a / rho - std::log1p(-4 * u * u) + 2 * std::log1p(-2 * a);
    } else {
        r.varphi = 2 * root / rho - c * std::log(cr) + 2 * c * std::log(gap);
    }
    r.log_jpdf_estimate = -M * M * r.varphi;
    return r;
}

// f1(x) = -(2^{5/3}/pi^2) q(2^{2/3} x)
inline double double_scaling_f1(double x, const PainleveSolution& sol) {
    return -std::pow(2.0, 5.0 / 3) / (constants::pi * constants::pi) * sol.q(std::pow(2.0, 2.0 / 3) * x);
}

struct DoubleScalingReport {
    double M = 0;
    int k = 0;
    double x_even = 0, x_odd = 0;
    double deviation_even = 0, deviation_odd = 0;  // (R_j - M^4/pi^2) / M^{10/3}
    double expected_even = 0, expected_odd = 0;    // -f1(x_2k), +f1(x_2k+1)
    double relative_even = 0, relative_odd = 0;
    bool signs_alternate = false;
};

inline DoubleScalingReport double_scaling_check(const FiniteNModel& model, int k, const PainleveSolution& sol) {
    const double M = model.M();
    if (M < 10) throw DomainError("double_scaling_check: M >= 10 required");
    if (2 * k + 1 > model.max_degree()) throw DomainError("double_scaling_check: recursion table too short");
    DoubleScalingReport r;
    r.M = M;
    r.k = k;
    r.x_even = scaling::x_of(2 * k, M);
    r.x_odd = scaling::x_of(2 * k + 1, M);
    if (r.x_even < -2 || r.x_even > 3) throw DomainError("double_scaling_check: x_2k must lie in [-2, 3]");
    const long double base = std::pow(static_cast<long double>(M), 4) / (std::numbers::pi_v<long double> *
                                                                          std::numbers::pi_v<long double>);
    const long double scale = std::pow(static_cast<long double>(M), 10.0L / 3);
    r.deviation_even = static_cast<double>((model.recursion_coefficient(2 * k) - base) / scale);
    r.deviation_odd = static_cast<double>((model.recursion_coefficient(2 * k + 1) - base) / scale);
    r.expected_even = -double_scaling_f1(r.x_even, sol);
    r.expected_odd = double_scaling_f1(r.x_odd, sol);
    r.relative_even = std::abs(r.deviation_even / r.expected_even - 1);
    r.relative_odd = std::abs(r.deviation_odd / r.expected_odd - 1);
    r.signs_alternate = r.deviation_even * r.deviation_odd < 0;
    return r;
}

inline DoubleScalingReport double_scaling_check(double M, int k, const PainleveSolution& sol) {
    return double_scaling_check(build_recursion_table(M, 2 * k + 2), k, sol);
}

// Largest |F_N(M(s)) - F1(s)| over s in [s_lo, s_hi] with M(s) = sqrt(2N)(1 + s / (2^{7/3} N^{2/3})).
inline double edge_distance(int N, const PainleveSolution& sol, double s_lo = -4.0, double s_hi = 2.0,
                            double step = 0.05) {
    double worst = 0;
    const int count = static_cast<int>(std::llround((s_hi - s_lo) / step));
    for (int i = 0; i <= count; ++i) {
        double s = s_lo + i * step;
        double M = std::sqrt(2.0 * N) * (1 + s / (std::pow(2.0, 7.0 / 3) * std::pow(N, 2.0 / 3)));
        worst = std::max(worst, std::abs(cdf_max_finite_n(M, N) - tracy_widom_f1(s, sol)));
    }
    return worst;
}

}  // namespace vicious

#endif
