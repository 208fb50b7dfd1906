#ifndef VICIOUS_VICIOUS_MC_HPP
#define VICIOUS_VICIOUS_MC_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "errors.hpp"
#include "finite_n.hpp"
#include "special_basis.hpp"

namespace vicious {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++; one stream per (seed, sample index)
class SampleRng {
public:
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    SampleRng(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t sm = seed ^ splitmix64(index);
        for (auto& w : s_) w = splitmix64(sm);
    }

    result_type operator()() {
        const std::uint64_t out = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return out;
    }

private:
    std::uint64_t s_[4];
};

enum class SamplerMode : std::uint32_t {
    MatrixBridge = 0,      // positive eigenvalues of a class-C Hermitian Brownian bridge
    VervaatRejection = 1,  // cycle-shifted bridges, whole-tuple non-crossing rejection
};

enum class MaxCorrection : std::uint32_t {
    BridgeMax = 0,  // sample the Brownian-bridge maximum inside grid cells near the top
    GridOnly = 1,
};

struct SamplerConfig {
    int N = 1;
    int steps = 2000;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    SamplerMode mode = SamplerMode::MatrixBridge;
    MaxCorrection correction = MaxCorrection::BridgeMax;
    double min_acceptance = 1e-6;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct ExtremeSample {
    double M = 0;
    double tau = 0;
};

struct PathEnsemble {
    int N = 0;
    int steps = 0;
    std::uint64_t seed = 0;
    SamplerMode mode = SamplerMode::MatrixBridge;
    MaxCorrection correction = MaxCorrection::BridgeMax;
    std::vector<ExtremeSample> samples;
    std::uint64_t attempts = 0;
    double acceptance_rate = 1;
};

namespace detail {

using Normal = boost::random::normal_distribution<double>;

// M and tau from the top path on the grid t_k = k / steps
inline ExtremeSample extract_extreme(const std::vector<double>& top, int steps, MaxCorrection correction,
                                     SampleRng& rng) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < top.size(); ++k)
        if (top[k] > top[arg]) arg = k;
    ExtremeSample s{top[arg], static_cast<double>(arg) / steps};
    if (correction == MaxCorrection::BridgeMax) {
        const double dt = 1.0 / steps, reach = top[arg] - 7 * std::sqrt(dt);
        boost::random::uniform_01<double> uni;
        for (std::size_t k = 0; k + 1 < top.size(); ++k) {
            const double a = top[k], b = top[k + 1];
            if (std::max(a, b) < reach) continue;
            const double u = 1 - uni(rng);
            s.M = std::max(s.M, 0.5 * (a + b + std::sqrt((b - a) * (b - a) - 2 * dt * std::log(u))));
        }
    }
    return s;
}

// Degrees of freedom of H = [[A, B], [conj(B), -conj(A)]], A Hermitian, B complex symmetric,
// scaled so each eigenvalue has unit diffusion.
struct ClassCLayout {
    int N;
    int dof() const { return 2 * N * N + N; }
    std::vector<double> scales() const {
        std::vector<double> s;
        for (int i = 0; i < N; ++i) s.push_back(1.0);
        for (int i = 0; i < N * (N - 1); ++i) s.push_back(std::sqrt(0.5));
        for (int i = 0; i < 2 * N; ++i) s.push_back(1.0);
        for (int i = 0; i < N * (N - 1); ++i) s.push_back(std::sqrt(0.5));
        return s;
    }
    Eigen::MatrixXcd assemble(const std::vector<double>& x) const {
        using C = std::complex<double>;
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N), B = Eigen::MatrixXcd::Zero(N, N);
        std::size_t p = 0;
        for (int i = 0; i < N; ++i) A(i, i) = x[p++];
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) {
                A(i, j) = C(x[p], x[p + 1]);
                A(j, i) = std::conj(A(i, j));
                p += 2;
            }
        for (int i = 0; i < N; ++i, p += 2) B(i, i) = C(x[p], x[p + 1]);
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j, p += 2) B(i, j) = B(j, i) = C(x[p], x[p + 1]);
        Eigen::MatrixXcd H(2 * N, 2 * N);
        H << A, B, B.conjugate(), -A.conjugate();
        return H;
    }
};

// Largest positive eigenvalue; false if the positive spectrum is not strictly positive and simple.
inline bool top_eigenvalue(const ClassCLayout& layout, const std::vector<double>& x, double& top) {
    using C = std::complex<double>;
    if (layout.N == 1) {
        top = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return top > 0;
    }
    if (layout.N == 2) {
        // tr H^2 = 2 e1, tr H^4 = 2 p2 with e1 = x1^2 + x2^2, p2 = x1^4 + x2^4
        const double a1 = x[0], a2 = x[1];
        const C c(x[2], x[3]), b1(x[4], x[5]), b2(x[6], x[7]), d(x[8], x[9]);
        const double e1 = a1 * a1 + a2 * a2 + 2 * std::norm(c) + std::norm(b1) + std::norm(b2) + 2 * std::norm(d);
        // P = A^2 + B B^*, Q = A B - B conj(A)
        const double p11 = a1 * a1 + std::norm(c) + std::norm(b1) + std::norm(d);
        const double p22 = a2 * a2 + std::norm(c) + std::norm(d) + std::norm(b2);
        const C p12 = (a1 + a2) * c + b1 * std::conj(d) + d * std::conj(b2);
        const C q12 = a1 * d + c * b2 - b1 * std::conj(c) - d * a2;
        const C q21 = std::conj(c) * b1 + a2 * d - d * a1 - b2 * c;
        const double p2 = p11 * p11 + p22 * p22 + 2 * std::norm(p12) + std::norm(q12) + std::norm(q21);
        const double gap2 = 2 * p2 - e1 * e1, low = e1 * e1 - p2;
        top = std::sqrt(0.5 * (e1 + std::sqrt(std::max(gap2, 0.0))));
        return gap2 > 0 && low > 0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(layout.assemble(x), Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const int N = layout.N;
    if (!(ev(N) > 0)) return false;
    for (int i = N + 1; i < 2 * N; ++i)
        if (!(ev(i) > ev(i - 1))) return false;
    top = ev(2 * N - 1);
    return true;
}

inline bool matrix_bridge_path(const SamplerConfig& cfg, SampleRng& rng, std::vector<double>& top) {
    const ClassCLayout layout{cfg.N};
    const auto scale = layout.scales();
    std::vector<double> x(layout.dof(), 0.0);
    Normal normal;
    const int n = cfg.steps;
    top.assign(n + 1, 0.0);
    bool ok = true;
    for (int k = 0; k < n - 1; ++k) {
        // exact Gaussian transition of the bridge pinned at t = 1
        const double left = 1.0 - static_cast<double>(k) / n, right = 1.0 - static_cast<double>(k + 1) / n;
        const double shrink = right / left, spread = std::sqrt(right / (left * n));
        for (std::size_t d = 0; d < x.size(); ++d) x[d] = x[d] * shrink + scale[d] * spread * normal(rng);
        double t = 0;
        if (!top_eigenvalue(layout, x, t)) ok = false;
        top[k + 1] = t;
    }
    return ok;
}

// One tuple of discrete excursions by cycle shift; true if strictly ordered at interior times.
inline bool vervaat_tuple(const SamplerConfig& cfg, SampleRng& rng, std::vector<std::vector<double>>& paths) {
    const int n = cfg.steps, N = cfg.N;
    const double sd = std::sqrt(1.0 / n);
    Normal normal;
    std::vector<double> walk(n + 1);
    paths.assign(N, std::vector<double>(n + 1, 0.0));
    for (int i = 0; i < N; ++i) {
        walk[0] = 0;
        for (int k = 1; k <= n; ++k) walk[k] = walk[k - 1] + sd * normal(rng);
        const double end = walk[n];
        for (int k = 0; k <= n; ++k) walk[k] -= end * k / n;
        int m = 0;
        for (int k = 1; k < n; ++k)
            if (walk[k] < walk[m]) m = k;
        for (int k = 0; k < n; ++k) paths[i][k] = walk[(m + k) % n] - walk[m];
        paths[i][n] = 0;
    }
    std::sort(paths.begin(), paths.end(), [](const auto& a, const auto& b) { return a[1] < b[1]; });
    for (int k = 1; k < n; ++k) {
        if (!(paths[0][k] > 0)) return false;
        for (int i = 1; i < N; ++i)
            if (!(paths[i][k] > paths[i - 1][k])) return false;
    }
    return true;
}

template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < count; i = next++) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next = count;
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline PathEnsemble sample_ensemble(const SamplerConfig& cfg) {
    if (cfg.N < 1 || cfg.N > FiniteNModel::max_walkers) throw DomainError("sample_ensemble: N must lie in [1, 64]");
    if (cfg.mode == SamplerMode::VervaatRejection && cfg.N > 4)
        throw DomainError("sample_ensemble: rejection mode supports N <= 4");
    if (cfg.steps < 2000) throw DomainError("sample_ensemble: steps >= 2000 required");
    if (cfg.samples == 0) throw DomainError("sample_ensemble: at least one sample required");
    if (!(cfg.min_acceptance > 0 && cfg.min_acceptance < 1))
        throw DomainError("sample_ensemble: min_acceptance must lie in (0, 1)");

    PathEnsemble out;
    out.N = cfg.N;
    out.steps = cfg.steps;
    out.seed = cfg.seed;
    out.mode = cfg.mode;
    out.correction = cfg.correction;
    out.samples.resize(cfg.samples);
    std::atomic<std::uint64_t> attempts{0}, accepted{0};
    const auto budget = static_cast<std::uint64_t>(std::ceil(10 / cfg.min_acceptance));

    detail::parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
        SampleRng rng(cfg.seed, i);
        std::vector<double> top;
        std::vector<std::vector<double>> paths;
        for (;;) {
            const std::uint64_t a = ++attempts;
            bool ok = cfg.mode == SamplerMode::MatrixBridge ? detail::matrix_bridge_path(cfg, rng, top)
                                                             : detail::vervaat_tuple(cfg, rng, paths);
            if (ok) {
                ++accepted;
                if (cfg.mode == SamplerMode::VervaatRejection) top = std::move(paths.back());
                out.samples[i] = detail::extract_extreme(top, cfg.steps, cfg.correction, rng);
                return;
            }
            if (a >= budget && static_cast<double>(accepted) < cfg.min_acceptance * static_cast<double>(a))
                throw InfeasibleConfiguration("sample_ensemble: acceptance rate " +
                                              std::to_string(static_cast<double>(accepted) / a) + " below " +
                                              std::to_string(cfg.min_acceptance) + " at N=" + std::to_string(cfg.N) +
                                              "; use a smaller N or the matrix-bridge mode");
        }
    });
    out.attempts = attempts;
    out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(attempts);
    return out;
}

inline PathEnsemble sample_ensemble(int N, int steps, std::size_t n_samples, std::uint64_t seed) {
    SamplerConfig cfg;
    cfg.N = N;
    cfg.steps = steps;
    cfg.samples = n_samples;
    cfg.seed = seed;
    return sample_ensemble(cfg);
}

inline PathEnsemble time_reversed(PathEnsemble e) {
    for (auto& s : e.samples) s.tau = 1 - s.tau;
    return e;
}

struct HistogramSpec {
    std::vector<double> m_edges;
    std::vector<double> tau_edges;

    static HistogramSpec uniform(double m_lo, double m_hi, int m_bins, int tau_bins) {
        HistogramSpec h;
        for (int i = 0; i <= m_bins; ++i) h.m_edges.push_back(m_lo + (m_hi - m_lo) * i / m_bins);
        for (int i = 0; i <= tau_bins; ++i) h.tau_edges.push_back(static_cast<double>(i) / tau_bins);
        return h;
    }
    static HistogramSpec defaults(int N) {
        const double c = std::sqrt(2.0 * N);
        return uniform(std::max(0.0, c - 2.0), c + 2.0, 16, 10);
    }
    void validate() const {
        auto increasing = [](const std::vector<double>& v) {
            return v.size() >= 2 && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
        };
        if (!increasing(m_edges) || !increasing(tau_edges))
            throw DomainError("histogram edges must be strictly increasing with at least one bin");
    }
};

struct Histogram2D {
    HistogramSpec spec;
    std::vector<std::uint64_t> counts;  // row-major, M rows by tau columns
    std::uint64_t outside = 0;          // samples beyond the M edges
    std::size_t m_bins() const { return spec.m_edges.size() - 1; }
    std::size_t tau_bins() const { return spec.tau_edges.size() - 1; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return counts[i * tau_bins() + j]; }
    std::uint64_t total() const { return std::accumulate(counts.begin(), counts.end(), outside); }
};

inline Histogram2D histogram(const PathEnsemble& e, const HistogramSpec& spec) {
    spec.validate();
    Histogram2D h{spec, std::vector<std::uint64_t>(spec.m_edges.size() - 1, 0), 0};
    h.counts.assign(h.m_bins() * h.tau_bins(), 0);
    auto locate = [](const std::vector<double>& edges, double x) -> long {
        if (x < edges.front() || x > edges.back()) return -1;
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        return std::min<long>(static_cast<long>(it - edges.begin()) - 1, static_cast<long>(edges.size()) - 2);
    };
    for (const auto& s : e.samples) {
        long i = locate(spec.m_edges, s.M), j = locate(spec.tau_edges, s.tau);
        if (i < 0 || j < 0)
            ++h.outside;
        else
            ++h.counts[i * h.tau_bins() + j];
    }
    return h;
}

struct ExtremeStats {
    std::size_t n = 0;
    double mean_M = 0, stderr_M = 0, var_M = 0;
    double mean_tau = 0, stderr_tau = 0, var_tau = 0;
    double correlation = 0, correlation_stderr = 0;  // (M, tau); zero in law by time reversal
    double offset_correlation = 0;                   // (M, |tau - 1/2|)
    Histogram2D histogram;
};

inline ExtremeStats extreme_stats(const PathEnsemble& e, const HistogramSpec& spec) {
    if (e.samples.size() < 2) throw StatisticsError("extreme_stats: at least two samples required");
    ExtremeStats r;
    const double n = static_cast<double>(e.samples.size());
    r.n = e.samples.size();
    for (const auto& s : e.samples) r.mean_M += s.M, r.mean_tau += s.tau;
    r.mean_M /= n;
    r.mean_tau /= n;
    double cov = 0;
    for (const auto& s : e.samples) {
        r.var_M += (s.M - r.mean_M) * (s.M - r.mean_M);
        r.var_tau += (s.tau - r.mean_tau) * (s.tau - r.mean_tau);
        cov += (s.M - r.mean_M) * (s.tau - r.mean_tau);
    }
    r.var_M /= n - 1;
    r.var_tau /= n - 1;
    cov /= n - 1;
    r.stderr_M = std::sqrt(r.var_M / n);
    r.stderr_tau = std::sqrt(r.var_tau / n);
    r.correlation = cov / std::sqrt(r.var_M * r.var_tau);
    r.correlation_stderr = (1 - r.correlation * r.correlation) / std::sqrt(n - 3);
    double mean_off = 0, var_off = 0, cov_off = 0;
    for (const auto& s : e.samples) mean_off += std::abs(s.tau - 0.5);
    mean_off /= n;
    for (const auto& s : e.samples) {
        const double o = std::abs(s.tau - 0.5) - mean_off;
        var_off += o * o;
        cov_off += (s.M - r.mean_M) * o;
    }
    r.offset_correlation = cov_off / std::sqrt(var_off * r.var_M * (n - 1));
    r.histogram = histogram(e, spec);
    return r;
}

inline ExtremeStats extreme_stats(const PathEnsemble& e) { return extreme_stats(e, HistogramSpec::defaults(e.N)); }

// Exact finite-N marginals by quadrature of the joint density, for N <= 3.
class ExactFiniteN {
public:
    explicit ExactFiniteN(int N, int tau_intervals = 200) : N_(N) {
        if (N < 1 || N > 3) throw DomainError("ExactFiniteN: N <= 3 required");
        m_lo_ = N == 3 ? 0.6 : 0.5;
        // upper end where the remaining mass is below 1e-13; beyond it the G sums only cost time
        m_hi_ = std::sqrt(2.0 * N);
        while (m_hi_ < max_height(N) && 1 - cdf_max_finite_n(m_hi_, N) > 1e-13) m_hi_ = std::min(m_hi_ + 0.25, max_height(N));
        m_rule_ = composite_gauss_legendre(m_lo_, m_hi_, 12, 16);
        for (double m : m_rule_.nodes) models_.push_back(build_op_table(m, N));
        // tau marginal on [0, 1/2], reflected
        const QuadratureRule cell = gauss_legendre(4, 0.0, 1.0);
        tau_grid_.assign(tau_intervals + 1, 0.0);
        tau_cdf_.assign(tau_intervals + 1, 0.0);
        const double h = 0.5 / tau_intervals;
        for (int i = 0; i < tau_intervals; ++i) {
            double mass = 0;
            for (std::size_t q = 0; q < cell.nodes.size(); ++q) mass += h * cell.weights[q] * tau_density(h * (i + cell.nodes[q]));
            tau_grid_[i + 1] = h * (i + 1);
            tau_cdf_[i + 1] = tau_cdf_[i] + mass;
        }
        half_mass_ = tau_cdf_.back();
    }

    int N() const { return N_; }
    double m_lo() const { return m_lo_; }
    double m_hi() const { return m_hi_; }
    double total_mass() const { return 2 * half_mass_; }

    double cdf_M(double M) const {
        if (M <= m_lo_) return 0.0;
        return cdf_max_finite_n(std::min(M, max_height(N_)), N_);
    }

    double tau_density(double tau) const {
        double p = 0;
        for (std::size_t i = 0; i < models_.size(); ++i) p += m_rule_.weights[i] * jpdf_finite_n(models_[i], tau);
        return p;
    }

    double cdf_tau(double tau) const {
        if (tau <= 0) return 0;
        if (tau >= 1) return 1;
        if (tau > 0.5) return 1 - cdf_tau(1 - tau);
        auto it = std::upper_bound(tau_grid_.begin(), tau_grid_.end(), tau);
        std::size_t j = std::min<std::size_t>(it - tau_grid_.begin(), tau_grid_.size() - 1);
        const double t0 = tau_grid_[j - 1], t1 = tau_grid_[j];
        const double c = tau_cdf_[j - 1] + (tau_cdf_[j] - tau_cdf_[j - 1]) * (tau - t0) / (t1 - t0);
        return 0.5 * c / half_mass_;
    }

    double mean_M() const {
        const QuadratureRule r = composite_gauss_legendre(m_lo_, m_hi_, 12, 16);
        double s = m_lo_;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * (1 - cdf_max_finite_n(r.nodes[i], N_));
        return s;
    }

    double bin_probability(double m0, double m1, double t0, double t1) const {
        m0 = std::max(m0, m_lo_);
        m1 = std::min(m1, m_hi_);
        if (!(m1 > m0) || !(t1 > t0)) return 0;
        const QuadratureRule rm = gauss_legendre(8, m0, m1), rt = gauss_legendre(8, t0, t1);
        double s = 0;
        for (std::size_t i = 0; i < rm.nodes.size(); ++i) {
            FiniteNModel model = build_op_table(rm.nodes[i], N_);
            for (std::size_t j = 0; j < rt.nodes.size(); ++j)
                s += rm.weights[i] * rt.weights[j] * jpdf_finite_n(model, rt.nodes[j]);
        }
        return s;
    }

private:
    int N_;
    double m_lo_, m_hi_, half_mass_ = 0.5;
    QuadratureRule m_rule_;
    std::vector<FiniteNModel> models_;
    std::vector<double> tau_grid_, tau_cdf_;
};

template <typename Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf) {
    if (x.empty()) throw StatisticsError("ks_statistic: empty sample");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // ties: compare against the empirical CDF just below and at the tied value
        std::size_t j = i;
        while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
        const double F = cdf(x[i]);
        d = std::max({d, F - i / n, (j + 1) / n - F});
        i = j;
    }
    return d;
}

// Asymptotic Kolmogorov tail probability for sqrt(n) D
inline double kolmogorov_p_value(double d, std::size_t n) {
    const double lambda = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
    if (lambda < 0.2) return 1.0;
    double s = 0;
    for (int k = 1; k <= 100; ++k) s += (k % 2 ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(s, 0.0, 1.0);
}

struct ComparisonReport {
    double ks_M = 0, ks_tau = 0;
    double p_M = 0, p_tau = 0;
    double chi2 = 0;
    int chi2_dof = 0;
    double chi2_p = 0;
    int pooled_bins = 0;  // bins with expected count below 5, merged into one
};

inline ComparisonReport compare_to_exact(const PathEnsemble& e, const ExactFiniteN& exact, const HistogramSpec& spec) {
    if (e.N != exact.N()) throw DomainError("compare_to_exact: walker count mismatch");
    if (e.samples.empty()) throw StatisticsError("compare_to_exact: empty ensemble");
    ComparisonReport r;
    std::vector<double> m, t;
    for (const auto& s : e.samples) m.push_back(s.M), t.push_back(s.tau);
    r.ks_M = ks_statistic(m, [&](double x) { return exact.cdf_M(x); });
    r.ks_tau = ks_statistic(t, [&](double x) { return exact.cdf_tau(x); });
    r.p_M = kolmogorov_p_value(r.ks_M, m.size());
    r.p_tau = kolmogorov_p_value(r.ks_tau, t.size());

    const Histogram2D h = histogram(e, spec);
    const double n = static_cast<double>(e.samples.size());
    double pooled_expected = 0, pooled_observed = static_cast<double>(h.outside), inside = 0;
    int used = 0;
    for (std::size_t i = 0; i < h.m_bins(); ++i)
        for (std::size_t j = 0; j < h.tau_bins(); ++j) {
            double expected = n * exact.bin_probability(spec.m_edges[i], spec.m_edges[i + 1], spec.tau_edges[j],
                                                        spec.tau_edges[j + 1]);
            inside += expected;
            double observed = static_cast<double>(h.at(i, j));
            if (expected < 5) {
                pooled_expected += expected;
                pooled_observed += observed;
                ++r.pooled_bins;
                continue;
            }
            r.chi2 += (observed - expected) * (observed - expected) / expected;
            ++used;
        }
    pooled_expected += std::max(0.0, n - inside);
    if (pooled_expected >= 5) {
        r.chi2 += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
        ++used;
    }
    if (used < 2) throw StatisticsError("compare_to_exact: fewer than two bins with expected count >= 5");
    r.chi2_dof = used - 1;
    r.chi2_p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.chi2_dof), r.chi2));
    return r;
}

inline ComparisonReport compare_to_exact(const PathEnsemble& e) {
    if (e.N > 3) throw DomainError("compare_to_exact: N <= 3 required");
    ExactFiniteN exact(e.N);
    return compare_to_exact(e, exact, HistogramSpec::defaults(e.N));
}

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 8);
}
inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}
inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw CacheError("sample dump truncated");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}
inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw CacheError("sample dump truncated");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

}  // namespace detail

inline constexpr char sample_dump_magic[4] = {'V', 'M', 'C', 'S'};
inline constexpr std::uint32_t sample_dump_version = 1;

namespace detail {

inline void put_samples(std::ostream& os, const PathEnsemble& e) {
    os.write(sample_dump_magic, 4);
    put_u32(os, sample_dump_version);
    put_u32(os, static_cast<std::uint32_t>(e.N));
    put_u32(os, static_cast<std::uint32_t>(e.steps));
    put_u32(os, static_cast<std::uint32_t>(e.mode));
    put_u32(os, static_cast<std::uint32_t>(e.correction));
    put_u64(os, e.seed);
    put_u64(os, e.attempts);
    put_u64(os, e.samples.size());
    for (const auto& s : e.samples) {
        put_u64(os, std::bit_cast<std::uint64_t>(s.M));
        put_u64(os, std::bit_cast<std::uint64_t>(s.tau));
    }
}

}  // namespace detail

// Little-endian dump: magic, version, N, steps, mode, correction, seed, attempts, count, then (M, tau) pairs.
// Regular files are replaced atomically; devices and pipes are written in place.
inline void write_samples(const std::string& path, const PathEnsemble& e) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (fs::exists(path, ec) && !fs::is_regular_file(path, ec)) {
        std::ofstream os(path, std::ios::binary);
        detail::put_samples(os, e);
        if (!os.flush()) throw CacheError("write failed for " + path);
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw CacheError("cannot open " + tmp);
        detail::put_samples(os, e);
        if (!os.flush()) {
            os.close();
            fs::remove(tmp, ec);
            throw CacheError("write failed for " + tmp);
        }
    }
    fs::rename(tmp, path);
}

inline PathEnsemble read_samples(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CacheError("cannot open " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, sample_dump_magic, 4) != 0) throw CacheError("not a sample dump");
    if (detail::get_u32(is) != sample_dump_version) throw CacheError("unsupported sample dump version");
    PathEnsemble e;
    e.N = static_cast<int>(detail::get_u32(is));
    e.steps = static_cast<int>(detail::get_u32(is));
    e.mode = static_cast<SamplerMode>(detail::get_u32(is));
    e.correction = static_cast<MaxCorrection>(detail::get_u32(is));
    e.seed = detail::get_u64(is);
    e.attempts = detail::get_u64(is);
    e.samples.resize(detail::get_u64(is));
    for (auto& s : e.samples) {
        s.M = std::bit_cast<double>(detail::get_u64(is));
        s.tau = std::bit_cast<double>(detail::get_u64(is));
    }
    e.acceptance_rate = e.attempts ? static_cast<double>(e.samples.size()) / static_cast<double>(e.attempts) : 1.0;
    return e;
}

}  // namespace vicious

#endif
