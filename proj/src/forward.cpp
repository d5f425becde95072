#include "cpl/forward.hpp"

#include <limits>
#include <thread>

namespace cpl {

bool Inclusion::contains(const Vec3& p) const {
    // closed inequalities with a geometric epsilon so grid nodes landing on
    // the boundary are kept regardless of rounding
    constexpr double eps = 1e-9;
    const Vec3 d = p - center;
    if (kind == Kind::kCylinder) {
        return d[0] * d[0] + d[1] * d[1] <= extent[0] * extent[0] + eps &&
               std::abs(d[2]) <= extent[2] + eps;
    }
    return std::abs(d[0]) <= extent[0] + eps && std::abs(d[1]) <= extent[1] + eps &&
           std::abs(d[2]) <= extent[2] + eps;
}

double Inclusion::distance(const Vec3& p) const {
    const Vec3 d = p - center;
    if (kind == Kind::kCylinder) {
        double dr = std::max(0.0, std::sqrt(d[0] * d[0] + d[1] * d[1]) - extent[0]);
        double dz = std::max(0.0, std::abs(d[2]) - extent[2]);
        return std::sqrt(dr * dr + dz * dz);
    }
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
        double da = std::max(0.0, std::abs(d[a]) - extent[a]);
        s += da * da;
    }
    return std::sqrt(s);
}

double MediumModel::c_analytic(const Vec3& p) const {
    double v = 1.0;
    for (const auto& inc : inclusions)
        if (inc.contains(p)) v = std::max(v, inc.value);
    return v;
}

double MediumModel::support_distance(const Vec3& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& inc : inclusions) d = std::min(d, inc.distance(p));
    return d;
}

double MediumModel::max_contrast() const {
    double v = 1.0;
    for (const auto& inc : inclusions) v = std::max(v, inc.value);
    return v;
}

MediumModel MediumModel::build(const Grid3D& g, const std::vector<Inclusion>& incs) {
    MediumModel m;
    m.grid = g;
    m.inclusions = incs;
    m.c = g.make_real_field();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t) {
                double v = m.c_analytic(g.pos(i, j, t));
                ensure(v >= 1.0, "MediumModel: coefficient below 1");
                m.c.at(i, j, t) = v;
            }
    // support must sit strictly inside the cube
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t)
                if (g.boundary(i, j, t))
                    ensure(m.c.at(i, j, t) == 1.0,
                           "MediumModel: inclusion touches the domain boundary");
    return m;
}

Complex incident_at(const Vec3& x, const Vec3& x0, double k) {
    const double rho = norm3(x - x0);
    return std::exp(Complex(0.0, k * rho)) / (4.0 * kPi * rho);
}

WaveField incident_wave(const Grid3D& g, const Vec3& x0, const std::vector<double>& ks) {
    ensure(std::abs(x0[0]) > g.R || std::abs(x0[1]) > g.R || std::abs(x0[2]) > g.R,
           "incident_wave: source must lie outside the domain");
    WaveField w;
    w.role = WaveField::Role::kIncident;
    w.ks = ks;
    for (double k : ks) {
        ScalarField f = g.make_field();
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nx; ++j)
                for (int t = 0; t < g.nx; ++t)
                    f.at(i, j, t) = incident_at(g.pos(i, j, t), x0, k);
        w.u.push_back(std::move(f));
    }
    return w;
}

Complex self_cell_weight(double k, double h) {
    const double rho = std::cbrt(3.0 * h * h * h / (4.0 * kPi));
    const Complex ikr(0.0, k * rho);
    return (std::exp(ikr) * (1.0 - ikr) - 1.0) / (k * k);
}

namespace {

inline Complex kernel(double k, double dist) {
    return std::exp(Complex(0.0, k * dist)) / (4.0 * kPi * dist);
}

}  // namespace

ScalarField apply_volume_potential(const ScalarField& f, const Grid3D& g, double k) {
    ensure(f.nx == g.nx && f.ny == g.nx && f.nz == g.nx, "apply_volume_potential: shape");
    const double h3 = g.dx * g.dx * g.dx;
    const Complex selfw = self_cell_weight(k, g.dx);
    const int n = g.nx;
    ScalarField out = g.make_field();
    std::vector<Vec3> pos(g.nodes());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int t = 0; t < n; ++t) pos[g.idx(i, j, t)] = g.pos(i, j, t);
    for (size_t p = 0; p < g.nodes(); ++p) {
        Complex acc = selfw * f.a[p];
        for (size_t q = 0; q < g.nodes(); ++q) {
            if (q == p) continue;
            acc += kernel(k, norm3(pos[p] - pos[q])) * h3 * f.a[q];
        }
        out.a[p] = acc;
    }
    return out;
}

Complex ForwardSolution::eval(const Vec3& x) const {
    Complex acc = incident_at(x, x0, k);
    const double h3 = h * h * h;
    const Complex selfw = self_cell_weight(k, h);
    const double k2 = k * k;
    for (size_t q = 0; q < support_pos.size(); ++q) {
        const double d = norm3(x - support_pos[q]);
        const Complex w = (d < 0.5 * h) ? selfw : kernel(k, d) * h3;
        acc += k2 * w * contrast[q] * u_support[q];
    }
    return acc;
}

ForwardSolution solve_forward(const MediumModel& m, double k, const Vec3& x0, double tol,
                              int max_iters) {
    ensure(tol > 0.0, "solve_forward: need tol > 0");
    const Grid3D& g = m.grid;
    ForwardSolution sol;
    sol.k = k;
    sol.x0 = x0;
    sol.h = g.dx;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t)
                if (m.c.at(i, j, t) > 1.0) {
                    sol.support_pos.push_back(g.pos(i, j, t));
                    sol.contrast.push_back(m.c.at(i, j, t) - 1.0);
                }
    const size_t ns = sol.support_pos.size();
    if (ns == 0) {  // vacuum: integral term vanishes, u = u_inc exactly
        sol.rel_residual = 0.0;
        return sol;
    }

    const double h3 = g.dx * g.dx * g.dx;
    const Complex selfw = self_cell_weight(k, g.dx);
    const double k2 = k * k;

    // Precompute the dense kernel block when it fits comfortably.
    const bool dense = ns <= 2048;
    std::vector<Complex> K;
    if (dense) {
        K.resize(ns * ns);
        for (size_t p = 0; p < ns; ++p)
            for (size_t q = 0; q < ns; ++q)
                K[p * ns + q] =
                    (p == q) ? selfw
                             : kernel(k, norm3(sol.support_pos[p] - sol.support_pos[q])) * h3;
    }

    auto apply = [&](const CVec& v) {
        CVec out(ns);
        if (dense) {
            for (size_t p = 0; p < ns; ++p) {
                Complex acc(0.0);
                const Complex* row = &K[p * ns];
                for (size_t q = 0; q < ns; ++q) acc += row[q] * (sol.contrast[q] * v[q]);
                out[p] = v[p] - k2 * acc;
            }
        } else {
            for (size_t p = 0; p < ns; ++p) {
                Complex acc = selfw * sol.contrast[p] * v[p];
                for (size_t q = 0; q < ns; ++q) {
                    if (q == p) continue;
                    acc += kernel(k, norm3(sol.support_pos[p] - sol.support_pos[q])) * h3 *
                           sol.contrast[q] * v[q];
                }
                out[p] = v[p] - k2 * acc;
            }
        }
        return out;
    };

    CVec b(ns);
    for (size_t p = 0; p < ns; ++p) b[p] = incident_at(sol.support_pos[p], x0, k);
    CVec u = b;  // Born start
    KrylovResult kr = gmres(apply, b, u, tol, 50, max_iters);
    ensure(kr.converged, "solve_forward: GMRES did not converge, relative residual " +
                             std::to_string(kr.rel_residual));
    sol.u_support = std::move(u);
    sol.rel_residual = kr.rel_residual;
    sol.iters = kr.iters;
    return sol;
}

ScalarField forward_field(const ForwardSolution& sol, const Grid3D& g) {
    ScalarField out = g.make_field();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t) out.at(i, j, t) = sol.eval(g.pos(i, j, t));
    return out;
}

namespace {

std::pair<PhaselessData, SlabStack> measure_impl(const MediumModel& m, const Grid3D& g_eval,
                                                 const SlabIndex& slab, const Vec3& x0,
                                                 const std::vector<double>& ks, double tol,
                                                 int jobs) {
    PhaselessData data;
    SlabStack stack;
    data.ks = ks;
    stack.ks = ks;
    const int nl = slab.n_layers;
    data.f.assign(ks.size(), Box3<double>(g_eval.nx, g_eval.nx, nl));
    stack.u.assign(ks.size(), Box3<Complex>(g_eval.nx, g_eval.nx, nl));

    auto work = [&](size_t a, size_t b) {
        for (size_t kk = a; kk < b; ++kk) {
            ForwardSolution sol = solve_forward(m, ks[kk], x0, tol);
            for (int i = 0; i < g_eval.nx; ++i)
                for (int j = 0; j < g_eval.nx; ++j)
                    for (int t = 0; t < nl; ++t) {
                        Complex u = sol.eval(g_eval.pos(i, j, t));
                        stack.u[kk].at(i, j, t) = u;
                        data.f[kk].at(i, j, t) = std::abs(u);
                    }
        }
    };
    const int nth = std::max(1, std::min<int>(jobs, static_cast<int>(ks.size())));
    if (nth == 1) {
        work(0, ks.size());
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (ks.size() + nth - 1) / nth;
        for (int w = 0; w < nth; ++w) {
            size_t a = w * chunk, b = std::min(ks.size(), a + chunk);
            if (a < b) pool.emplace_back(work, a, b);
        }
        for (auto& th : pool) th.join();
    }
    return {std::move(data), std::move(stack)};
}

}  // namespace

std::pair<PhaselessData, SlabStack> measure(const MediumModel& m, const Vec3& x0,
                                            const std::vector<double>& ks,
                                            const SlabIndex& slab, double tol) {
    return measure_impl(m, m.grid, slab, x0, ks, tol, 1);
}

std::pair<PhaselessData, SlabStack> measure_on_grid(const MediumModel& m, const Grid3D& g_inv,
                                                    const SlabIndex& slab_inv, const Vec3& x0,
                                                    const std::vector<double>& ks, double tol,
                                                    int jobs) {
    return measure_impl(m, g_inv, slab_inv, x0, ks, tol, jobs);
}

PhaselessData add_noise(const PhaselessData& f, double delta, uint64_t seed) {
    ensure(delta >= 0.0, "add_noise: need delta >= 0");
    PhaselessData out = f;
    out.delta = delta;
    out.seed = seed;
    if (delta == 0.0) return out;
    Rng rng(seed);
    for (auto& box : out.f)
        for (double& v : box.a) v *= 1.0 + delta * rng.symmetric();
    return out;
}

std::vector<double> uniform_wavenumbers(double kmin, double kmax, int nk) {
    ensure(nk >= 2 && kmax > kmin, "uniform_wavenumbers: bad spectrum");
    std::vector<double> ks(nk);
    for (int i = 0; i < nk; ++i) ks[i] = kmin + i * (kmax - kmin) / (nk - 1);
    return ks;
}

}  // namespace cpl
