#ifndef VICIOUS_FREDHOLM_ORACLE_HPP
#define VICIOUS_FREDHOLM_ORACLE_HPP

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"
#include "special_basis.hpp"

namespace vicious {

// Nystrom discretisation of K(x,y) = Ai(x + y + s) on [0, L], symmetrised with sqrt weights.
struct AiryKernelDiscretization {
    double shift = 0.0;
    double length = 0.0;
    Eigen::VectorXd nodes;
    Eigen::VectorXd sqrt_weights;
    Eigen::MatrixXd kernel;

    static double default_length(double shift) {
        // Ai(14) ~ 1e-16
        return std::max(8.0, 14.0 - shift);
    }

    static AiryKernelDiscretization build(double shift, int n, double length = 0.0) {
        if (n < 8) throw DomainError("Airy kernel discretisation needs at least 8 nodes");
        AiryKernelDiscretization d;
        d.shift = shift;
        d.length = length > 0 ? length : default_length(shift);
        QuadratureRule r = gauss_legendre(n, 0.0, d.length);
        d.nodes.resize(n);
        d.sqrt_weights.resize(n);
        for (int i = 0; i < n; ++i) {
            d.nodes[i] = r.nodes[i];
            d.sqrt_weights[i] = std::sqrt(r.weights[i]);
        }
        d.kernel.resize(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                d.kernel(i, j) = d.kernel(j, i) =
                    d.sqrt_weights[i] * airy_ai(d.nodes[i] + d.nodes[j] + shift) * d.sqrt_weights[j];
        return d;
    }

    double spectral_radius() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }

    Eigen::MatrixXd identity_minus_kernel() const {
        return Eigen::MatrixXd::Identity(kernel.rows(), kernel.cols()) - kernel;
    }
};

// F1(s) = det(I - K_s) on L^2(0, inf).
inline double fredholm_f1(double s, int n = 96) {
    if (!std::isfinite(s)) throw DomainError("fredholm_f1: non-finite s");
    auto d = AiryKernelDiscretization::build(s, n);
    if (d.spectral_radius() >= 1.0)
        throw OracleUnavailable("fredholm_f1: discretised kernel has spectral radius >= 1 at s=" + std::to_string(s));
    double det = d.identity_minus_kernel().partialPivLu().determinant();
    if (!(det > 0.0)) throw OracleUnavailable("fredholm_f1: non-positive determinant at s=" + std::to_string(s));
    return det;
}

// 2 exp(x t) [t Ai(t^2 + m + x) + Ai'(t^2 + m + x)]
inline double mfqr_edge_function(double t, double m, double x) {
    double a = t * t + m + x;
    return 2.0 * std::exp(x * t) * (t * airy_ai(a) + airy_ai_prime(a));
}

struct MfqrResult {
    double density = 0.0;
    double f1 = 0.0;
    double condition = 0.0;
    double resolvent_residual = 0.0;
};

// Joint density of the maximum m and its location t for the Airy2 process minus a parabola:
// 2^{1/3} F1(2^{2/3} m) int int Phi_{-t,m}(2^{1/3} x) rho(x, y) Phi_{t,m}(2^{1/3} y), rho = (I - K)^{-1}.
inline MfqrResult mfqr_jpdf(double m, double t, int n = 120) {
    if (!std::isfinite(m) || !std::isfinite(t)) throw DomainError("mfqr_jpdf: non-finite argument");
    const double c13 = std::cbrt(2.0), shift = c13 * c13 * m;
    double length = AiryKernelDiscretization::default_length(shift);
    auto edge_small = [&](double L) {
        return std::abs(mfqr_edge_function(t, m, c13 * L)) < 1e-17 && std::abs(mfqr_edge_function(-t, m, c13 * L)) < 1e-17;
    };
    while (!edge_small(length) && length < 200.0) length += 1.0;
    auto d = AiryKernelDiscretization::build(shift, n, length);
    Eigen::MatrixXd A = d.identity_minus_kernel();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    MfqrResult r;
    r.f1 = lu.determinant();
    if (!(r.f1 > 0.0)) throw OracleUnavailable("mfqr_jpdf: non-positive Fredholm determinant");
    r.condition = A.norm() * lu.inverse().norm();
    if (!(r.condition < 1e12))
        throw OracleUnavailable("mfqr_jpdf: resolvent condition number " + std::to_string(r.condition) + " above 1e12");
    Eigen::VectorXd left(n), right(n);
    for (int i = 0; i < n; ++i) {
        left[i] = d.sqrt_weights[i] * mfqr_edge_function(-t, m, c13 * d.nodes[i]);
        right[i] = d.sqrt_weights[i] * mfqr_edge_function(t, m, c13 * d.nodes[i]);
    }
    Eigen::VectorXd sol = lu.solve(right);
    r.resolvent_residual = (A * sol - right).cwiseAbs().maxCoeff() / std::max(1.0, right.cwiseAbs().maxCoeff());
    r.density = c13 * r.f1 * left.dot(sol);
    if (!std::isfinite(r.density)) throw OracleUnavailable("mfqr_jpdf: non-finite density");
    return r;
}

// Large-m form 4 int_m^inf [Ai'(t^2+z)^2 - t^2 Ai(t^2+z)^2] dz, in closed form.
inline double mfqr_large_m_asymptotic(double m, double t) {
    double y = t * t + m, a = airy_ai(y), ap = airy_ai_prime(y), b = t * t;
    double tail_ap2 = -((y * ap * ap - y * y * a * a) / 3 + 2.0 / 3 * a * ap);
    double tail_a2 = -(y * a * a - ap * ap);
    return 4.0 * (tail_ap2 - b * tail_a2);
}

}  // namespace vicious

#endif
