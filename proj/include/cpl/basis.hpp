// Orthonormal polynomial-exponential basis on [kmin,kmax] and the coefficient
// objects of the reduced frequency system.
//
// Each basis function lives in the span {k^j e^k}. Internally the polynomial
// part is kept in the shifted-scaled variable s = (k-center)/halfw, which keeps
// the Gram-Schmidt arithmetic well conditioned; the derivative
// d/dk [p(s) e^k] = (p'(s)/halfw + p(s)) e^k stays in the same span and is
// computed symbolically, with no numerical differentiation.
#pragma once

#include "cpl/common.hpp"
#include "cpl/dense.hpp"

namespace cpl {

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule mapped to [a,b].
Quadrature gauss_legendre(int order, double a, double b);

struct BasisSystem {
    double kmin = 0.0, kmax = 0.0;
    int N = 0;
    double center = 0.0, halfw = 1.0;
    // coeff[n][j]: Psi_n(k) = sum_j coeff[n][j] s^j e^k, s = (k-center)/halfw
    std::vector<std::vector<double>> coeff;
    // dcoeff[n][j]: Psi_n'(k) = sum_j dcoeff[n][j] s^j e^k (exact)
    std::vector<std::vector<double>> dcoeff;
    Quadrature quad;

    // value and exact derivative at k; n is 0-based
    std::pair<double, double> eval(int n, double k) const;
    double value(int n, double k) const { return eval(n, k).first; }
    double deriv(int n, double k) const { return eval(n, k).second; }

    // max_{m,n} |<Psi_m, Psi_n> - delta_mn| under the stored quadrature
    double orthonormality_residual() const;
};

// Gram-Schmidt orthonormalization of {k^{n-1} e^k}: modified Gram-Schmidt with
// one reorthogonalization pass in extended precision. Throws when the system
// is numerically singular (orthogonality loss > 1e-8).
BasisSystem build_basis(double kmin, double kmax, int N, int quad_order = 64);

struct ReducedTensors {
    int N = 0;
    DenseMat S;             // s_mn = int Psi_n' Psi_m dk
    std::vector<double> A;  // a_mnl = int 2k Psi_n Psi_m (Psi_l + k Psi_l') dk
    DenseMat beta1;         // beta1_mn = int 2k Psi_n' Psi_m dk
    double cond_S = 0.0;    // one-norm condition estimate (reported, not gated)
    double ortho_residual = 0.0;

    double a(int m, int n, int l) const {
        return A[(static_cast<size_t>(m) * N + n) * N + l];
    }
};

ReducedTensors compute_tensors(const BasisSystem& b);

// b_mn(x) = i rhat beta1_mn - 2 rhat s_mn/|x-x0| + 2i rhat delta(m,n), with
// rhat = (x-x0)/|x-x0|. Returns all N^2 vectors, index m*N+n. Rejects points
// closer to the source than min_dist.
std::vector<std::array<Complex, 3>> assemble_b(const ReducedTensors& t, const Vec3& x,
                                               const Vec3& x0, double min_dist);

// JSON diagnostic dump of S, its condition estimate and the orthonormality
// residual, for audit.
std::string tensors_diagnostic_json(const ReducedTensors& t);

}  // namespace cpl
