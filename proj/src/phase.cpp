#include "cpl/phase.hpp"

namespace cpl {

Box3<Complex> initial_guess(const Box3<double>& f, const Grid3D& g, const Vec3& x0, double k) {
    Box3<Complex> u(f.nx, f.ny, f.nz);
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j)
            for (int t = 0; t < f.nz; ++t) {
                const double tau = norm3(g.pos(i, j, t) - x0);
                u.at(i, j, t) = f.at(i, j, t) * std::exp(Complex(0.0, k * tau));
            }
    return u;
}

double eval_Jk(const Box3<Complex>& v, const Box3<double>& f, double k, const Grid3D& g,
               Box3<Complex>* grad) {
    ensure(v.same_shape(Box3<Complex>(f.nx, f.ny, f.nz)), "eval_Jk: shape mismatch");
    const double dx3 = g.dx * g.dx * g.dx;
    const double inv_h2 = 1.0 / (g.dx * g.dx);
    const double k2 = k * k;
    if (grad) *grad = Box3<Complex>(v.nx, v.ny, v.nz);

    double J = 0.0;
    // PDE residual where the full 7-point stencil stays inside the slab box
    for (int i = 1; i < v.nx - 1; ++i)
        for (int j = 1; j < v.ny - 1; ++j)
            for (int t = 1; t < v.nz - 1; ++t) {
                const Complex lap =
                    inv_h2 * (v.at(i + 1, j, t) + v.at(i - 1, j, t) + v.at(i, j + 1, t) +
                              v.at(i, j - 1, t) + v.at(i, j, t + 1) + v.at(i, j, t - 1) -
                              6.0 * v.at(i, j, t));
                const Complex r = lap + k2 * v.at(i, j, t);
                J += dx3 * std::norm(r);
                if (grad) {
                    const Complex s = 2.0 * dx3 * r;
                    grad->at(i + 1, j, t) += s * inv_h2;
                    grad->at(i - 1, j, t) += s * inv_h2;
                    grad->at(i, j + 1, t) += s * inv_h2;
                    grad->at(i, j - 1, t) += s * inv_h2;
                    grad->at(i, j, t + 1) += s * inv_h2;
                    grad->at(i, j, t - 1) += s * inv_h2;
                    grad->at(i, j, t) += s * (k2 - 6.0 * inv_h2);
                }
            }
    // modulus mismatch on every slab node
    for (size_t p = 0; p < v.size(); ++p) {
        const double rho = std::norm(v.a[p]) - f.a[p] * f.a[p];
        J += dx3 * rho * rho;
        if (grad) grad->a[p] += 4.0 * dx3 * rho * v.a[p];
    }
    return J;
}

PhaseResult retrieve_phase(const Box3<double>& f, double k, const Grid3D& g, const Vec3& x0,
                           const PhaseRetrievalConfig& cfg) {
    cfg.validate();
    PhaseResult out;
    Box3<Complex> u0 = initial_guess(f, g, x0, k);
    const size_t n = u0.size();

    Box3<Complex> work(u0.nx, u0.ny, u0.nz), gwork;
    auto objective = [&](const DVec& x, DVec& grad) {
        for (size_t p = 0; p < n; ++p) work.a[p] = Complex(x[2 * p], x[2 * p + 1]);
        double J = eval_Jk(work, f, k, g, &gwork);
        grad.resize(2 * n);
        for (size_t p = 0; p < n; ++p) {
            grad[2 * p] = gwork.a[p].real();
            grad[2 * p + 1] = gwork.a[p].imag();
        }
        return J;
    };

    DVec x0v(2 * n);
    for (size_t p = 0; p < n; ++p) {
        x0v[2 * p] = u0.a[p].real();
        x0v[2 * p + 1] = u0.a[p].imag();
    }
    out.J0 = eval_Jk(u0, f, k, g);

    LbfgsOptions opt;
    opt.max_iters = cfg.max_iters;
    opt.grad_tol = cfg.grad_tol;
    opt.memory = cfg.lbfgs_memory;
    LbfgsResult r = lbfgs_minimize(objective, std::move(x0v), opt);

    out.u = Box3<Complex>(u0.nx, u0.ny, u0.nz);
    for (size_t p = 0; p < n; ++p) out.u.a[p] = Complex(r.x[2 * p], r.x[2 * p + 1]);
    out.J = r.f;
    out.grad_norm = r.grad_norm;
    out.iters = r.iters;
    out.converged = r.converged;
    return out;
}

CauchyData extract_cauchy(const SlabStack& u_phase, const Grid3D& g) {
    CauchyData cd;
    cd.ks = u_phase.ks;
    for (const auto& box : u_phase.u) {
        ensure(box.nz >= 3, "extract_cauchy: need at least 3 slab layers for dz");
        Box3<Complex> gv(box.nx, box.ny, 1);
        for (int i = 0; i < box.nx; ++i)
            for (int j = 0; j < box.ny; ++j) gv.at(i, j, 0) = box.at(i, j, 0);
        cd.g.push_back(std::move(gv));
        cd.h.push_back(dz_one_sided_bottom(box, g.dx));
    }
    return cd;
}

}  // namespace cpl
