#include "cpl/basis.hpp"

#include <sstream>

#include "json.hpp"

namespace cpl {

Quadrature gauss_legendre(int order, double a, double b) {
    ensure(order >= 2, "gauss_legendre: order >= 2");
    ensure(b > a, "gauss_legendre: need b > a");
    Quadrature q;
    q.nodes.resize(order);
    q.weights.resize(order);
    // Newton iteration from the Chebyshev-like initial guess.
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int n = 2; n <= order; ++n) {
                double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            pp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        q.nodes[i] = 0.5 * (b - a) * (-x) + 0.5 * (a + b);
        q.nodes[order - 1 - i] = 0.5 * (b - a) * x + 0.5 * (a + b);
        q.weights[i] = q.weights[order - 1 - i] = 0.5 * (b - a) * w;
    }
    return q;
}

std::pair<double, double> BasisSystem::eval(int n, double k) const {
    ensure(n >= 0 && n < N, "BasisSystem::eval: basis index out of range");
    const double s = (k - center) / halfw;
    double p = 0.0, dp = 0.0;
    for (int j = N - 1; j >= 0; --j) {
        p = p * s + coeff[n][j];
        dp = dp * s + dcoeff[n][j];
    }
    const double ek = std::exp(k);
    return {p * ek, dp * ek};
}

double BasisSystem::orthonormality_residual() const {
    double worst = 0.0;
    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n) {
            double ip = 0.0;
            for (size_t q = 0; q < quad.nodes.size(); ++q)
                ip += quad.weights[q] * value(m, quad.nodes[q]) * value(n, quad.nodes[q]);
            worst = std::max(worst, std::abs(ip - (m == n ? 1.0 : 0.0)));
        }
    return worst;
}

namespace {

using ld = long double;

// Moments mu_p = int s^p e^{2k} dk over [kmin,kmax] in the shifted variable,
// by Gauss-Legendre in extended precision (the integrand is entire).
std::vector<ld> shifted_moments(double kmin, double kmax, int max_power) {
    const int order = 96;
    Quadrature q = gauss_legendre(order, kmin, kmax);
    const ld c = (static_cast<ld>(kmin) + kmax) / 2.0L;
    const ld h = (static_cast<ld>(kmax) - kmin) / 2.0L;
    std::vector<ld> mu(max_power + 1, 0.0L);
    for (int i = 0; i < order; ++i) {
        const ld k = q.nodes[i];
        const ld w = static_cast<ld>(q.weights[i]) * std::exp(2.0L * k);
        ld sp = 1.0L;
        const ld s = (k - c) / h;
        for (int p = 0; p <= max_power; ++p) {
            mu[p] += w * sp;
            sp *= s;
        }
    }
    return mu;
}

ld ip_moments(const std::vector<ld>& u, const std::vector<ld>& v, const std::vector<ld>& mu) {
    ld acc = 0.0L;
    for (size_t a = 0; a < u.size(); ++a) {
        if (u[a] == 0.0L) continue;
        for (size_t b = 0; b < v.size(); ++b) acc += u[a] * v[b] * mu[a + b];
    }
    return acc;
}

}  // namespace

BasisSystem build_basis(double kmin, double kmax, int N, int quad_order) {
    ensure(kmax > kmin && kmin > 0.0, "build_basis: need kmax > kmin > 0");
    ensure(N >= 1, "build_basis: need N >= 1");
    ensure(quad_order >= 2, "build_basis: bad quadrature order");

    BasisSystem bs;
    bs.kmin = kmin;
    bs.kmax = kmax;
    bs.N = N;
    bs.center = 0.5 * (kmin + kmax);
    bs.halfw = 0.5 * (kmax - kmin);
    bs.quad = gauss_legendre(quad_order, kmin, kmax);

    const auto mu = shifted_moments(kmin, kmax, 2 * N);
    const ld c = bs.center, h = bs.halfw;

    // Raw functions k^{n-1} e^k = (c + h s)^{n-1} e^k expanded in s.
    std::vector<std::vector<ld>> raw(N, std::vector<ld>(N, 0.0L));
    raw[0][0] = 1.0L;
    for (int n = 1; n < N; ++n)
        for (int j = 0; j <= n; ++j)
            raw[n][j] = (j <= n - 1 ? raw[n - 1][j] * c : 0.0L) +
                        (j >= 1 ? raw[n - 1][j - 1] * h : 0.0L);

    // Modified Gram-Schmidt with one reorthogonalization pass.
    std::vector<std::vector<ld>> psi;
    for (int n = 0; n < N; ++n) {
        std::vector<ld> v = raw[n];
        for (int pass = 0; pass < 2; ++pass)
            for (int m = 0; m < n; ++m) {
                ld r = ip_moments(v, psi[m], mu);
                for (int j = 0; j < N; ++j) v[j] -= r * psi[m][j];
            }
        ld nrm2 = ip_moments(v, v, mu);
        ensure(nrm2 > 0.0L, "build_basis: Gram matrix numerically singular");
        ld inv = 1.0L / std::sqrt(nrm2);
        for (int j = 0; j < N; ++j) v[j] *= inv;
        psi.push_back(std::move(v));
    }

    bs.coeff.assign(N, std::vector<double>(N, 0.0));
    bs.dcoeff.assign(N, std::vector<double>(N, 0.0));
    for (int n = 0; n < N; ++n)
        for (int j = 0; j < N; ++j) {
            bs.coeff[n][j] = static_cast<double>(psi[n][j]);
            // d/dk [p(s) e^k] = (p(s) + p'(s)/h) e^k
            ld d = psi[n][j] + (j + 1 < N ? (j + 1) * psi[n][j + 1] / h : 0.0L);
            bs.dcoeff[n][j] = static_cast<double>(d);
        }

    const double loss = bs.orthonormality_residual();
    ensure(loss <= 1e-8,
           "build_basis: orthogonality loss " + std::to_string(loss) +
               " exceeds 1e-8; N too large for {k^{n-1} e^k} on this interval");
    return bs;
}

ReducedTensors compute_tensors(const BasisSystem& b) {
    const int N = b.N;
    ReducedTensors t;
    t.N = N;
    t.S = DenseMat(N);
    t.beta1 = DenseMat(N);
    t.A.assign(static_cast<size_t>(N) * N * N, 0.0);

    const auto& q = b.quad;
    const int Q = static_cast<int>(q.nodes.size());
    // Tabulate values once; the integrands reuse them heavily.
    std::vector<std::vector<double>> val(N, std::vector<double>(Q)),
        der(N, std::vector<double>(Q));
    for (int n = 0; n < N; ++n)
        for (int i = 0; i < Q; ++i) {
            auto [v, d] = b.eval(n, q.nodes[i]);
            val[n][i] = v;
            der[n][i] = d;
        }

    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n) {
            double s = 0.0, b1 = 0.0;
            for (int i = 0; i < Q; ++i) {
                s += q.weights[i] * der[n][i] * val[m][i];
                b1 += q.weights[i] * 2.0 * q.nodes[i] * der[n][i] * val[m][i];
            }
            t.S.at(m, n) = s;
            t.beta1.at(m, n) = b1;
        }

    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n)
            for (int l = 0; l < N; ++l) {
                double acc = 0.0;
                for (int i = 0; i < Q; ++i) {
                    const double k = q.nodes[i];
                    acc += q.weights[i] * 2.0 * k * val[n][i] * val[m][i] *
                           (val[l][i] + k * der[l][i]);
                }
                t.A[(static_cast<size_t>(m) * N + n) * N + l] = acc;
            }

    t.cond_S = dense_cond1(t.S);
    t.ortho_residual = b.orthonormality_residual();
    return t;
}

std::vector<std::array<Complex, 3>> assemble_b(const ReducedTensors& t, const Vec3& x,
                                               const Vec3& x0, double min_dist) {
    const Vec3 d = x - x0;
    const double rho = norm3(d);
    ensure(rho >= min_dist, "assemble_b: point too close to the source");
    const Vec3 rhat = {d[0] / rho, d[1] / rho, d[2] / rho};
    const int N = t.N;
    std::vector<std::array<Complex, 3>> out(static_cast<size_t>(N) * N);
    for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n) {
            const Complex zeta = Complex(0.0, t.beta1.at(m, n) + (m == n ? 2.0 : 0.0)) -
                                 2.0 * t.S.at(m, n) / rho;
            out[static_cast<size_t>(m) * N + n] = {zeta * rhat[0], zeta * rhat[1],
                                                   zeta * rhat[2]};
        }
    return out;
}

std::string tensors_diagnostic_json(const ReducedTensors& t) {
    nlohmann::json j;
    j["N"] = t.N;
    j["cond_S_1norm"] = t.cond_S;
    j["orthonormality_residual"] = t.ortho_residual;
    std::vector<std::vector<double>> s(t.N, std::vector<double>(t.N));
    for (int m = 0; m < t.N; ++m)
        for (int n = 0; n < t.N; ++n) s[m][n] = t.S.at(m, n);
    j["S"] = s;
    return j.dump(2);
}

}  // namespace cpl
