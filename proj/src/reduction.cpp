#include "cpl/reduction.hpp"

#include <sstream>

namespace cpl {

std::vector<double> trapezoid_weights(const std::vector<double>& ks) {
    ensure(ks.size() >= 2, "trapezoid_weights: need at least 2 samples");
    const double dk = (ks.back() - ks.front()) / (ks.size() - 1);
    std::vector<double> w(ks.size(), dk);
    w.front() = w.back() = 0.5 * dk;
    return w;
}

std::vector<Box3<Complex>> log_ratio(const std::vector<Box3<Complex>>& u,
                                     const std::vector<Box3<Complex>>& u_inc,
                                     const std::vector<double>& ks) {
    ensure(u.size() == ks.size() && u_inc.size() == ks.size(), "log_ratio: stack size mismatch");
    ensure(!u.empty(), "log_ratio: empty stack");
    std::vector<Box3<Complex>> v(ks.size(), Box3<Complex>(u[0].nx, u[0].ny, u[0].nz));
    const size_t nn = u[0].size();
    for (size_t kk = 0; kk < ks.size(); ++kk)
        ensure(u[kk].size() == nn && u_inc[kk].size() == nn, "log_ratio: shape mismatch");

    for (size_t p = 0; p < nn; ++p) {
        double theta_prev = 0.0, arg_prev = 0.0;
        for (size_t kk = 0; kk < ks.size(); ++kk) {
            const Complex num = u[kk].a[p];
            const Complex den = u_inc[kk].a[p];
            const double mag_den = std::abs(den);
            const Complex ratio = (mag_den > 0.0) ? num / den : Complex(0.0);
            const double mag = std::abs(ratio);
            if (!(mag > 1e-12)) {
                std::ostringstream os;
                os << "log_ratio: vanishing ratio |u/u_inc| = " << mag << " at node " << p
                   << ", k = " << ks[kk];
                throw std::runtime_error(os.str());
            }
            const double a = std::arg(ratio);  // principal value
            double theta;
            if (kk == 0) {
                theta = a;
            } else {
                double d = a - arg_prev;
                d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
                theta = theta_prev + d;
            }
            arg_prev = a;
            theta_prev = theta;
            v[kk].a[p] = Complex(std::log(mag), theta) / (ks[kk] * ks[kk]);
        }
    }
    return v;
}

std::vector<Box3<Complex>> fourier_coefficients(const std::vector<Box3<Complex>>& v,
                                                const std::vector<double>& ks,
                                                const BasisSystem& b) {
    ensure(v.size() == ks.size(), "fourier_coefficients: stack size mismatch");
    const auto w = trapezoid_weights(ks);
    std::vector<Box3<Complex>> out(b.N, Box3<Complex>(v[0].nx, v[0].ny, v[0].nz));
    for (int n = 0; n < b.N; ++n) {
        for (size_t kk = 0; kk < ks.size(); ++kk) {
            const double c = w[kk] * b.value(n, ks[kk]);
            for (size_t p = 0; p < v[kk].size(); ++p) out[n].a[p] += c * v[kk].a[p];
        }
    }
    return out;
}

std::pair<std::vector<Box3<Complex>>, std::vector<Box3<Complex>>> cauchy_coefficients(
    const CauchyData& cd, const BasisSystem& b, const Grid3D& g, const Vec3& x0) {
    const size_t nk = cd.ks.size();
    ensure(nk >= 2 && cd.g.size() == nk && cd.h.size() == nk,
           "cauchy_coefficients: bad Cauchy data");
    const int nx = cd.g[0].nx;
    const auto w = trapezoid_weights(cd.ks);

    // incident trace on Gamma per k (z = -R)
    std::vector<Box3<Complex>> uinc(nk, Box3<Complex>(nx, nx, 1));
    for (size_t kk = 0; kk < nk; ++kk)
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nx; ++j)
                uinc[kk].at(i, j, 0) = incident_at(g.pos(i, j, 0), x0, cd.ks[kk]);

    auto logs = log_ratio(cd.g, uinc, cd.ks);

    std::vector<Box3<Complex>> gm(b.N, Box3<Complex>(nx, nx, 1)),
        hm(b.N, Box3<Complex>(nx, nx, 1));
    const double z = -g.R;
    const double d_src = -x0[2];
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
            const Vec3 p = g.pos(i, j, 0);
            const double rho = norm3(p - x0);
            for (size_t kk = 0; kk < nk; ++kk) {
                const double k = cd.ks[kk];
                const Complex gval = cd.g[kk].at(i, j, 0);
                ensure(std::abs(gval) > 1e-12, "cauchy_coefficients: vanishing g on Gamma");
                const Complex bracket =
                    cd.h[kk].at(i, j, 0) / gval -
                    (Complex(0.0, k) - 1.0 / rho) * ((z + d_src) / rho);
                for (int m = 0; m < b.N; ++m) {
                    const double c = w[kk] * b.value(m, k) / (k * k);
                    gm[m].at(i, j, 0) += c * (k * k) * logs[kk].at(i, j, 0);
                    hm[m].at(i, j, 0) += c * bracket;
                }
            }
        }
    return {std::move(gm), std::move(hm)};
}

void complement_data(CoefficientStack& stack, const Grid3D& g) {
    stack.sidewall.assign(stack.N, g.make_field());
    for (auto& f : stack.sidewall)
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nx; ++j)
                for (int t = 0; t < g.nx; ++t)
                    if (SlabIndex::classify(g, i, j, t) == SlabIndex::Face::kOther)
                        f.at(i, j, t) = Complex(0.0, 0.0);
    stack.complemented = true;
}

}  // namespace cpl
