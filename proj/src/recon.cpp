#include "cpl/recon.hpp"

#include <queue>

namespace cpl {

std::vector<ScalarField> assemble_v(const Candidate& phi, const BasisSystem& b,
                                    const std::vector<double>& ks) {
    ensure(phi.count() == b.N, "assemble_v: candidate count mismatch");
    ensure(!phi.phi.empty(), "assemble_v: empty candidate");
    std::vector<ScalarField> v(ks.size(),
                               ScalarField(phi.phi[0].nx, phi.phi[0].ny, phi.phi[0].nz));
    for (size_t kk = 0; kk < ks.size(); ++kk)
        for (int n = 0; n < b.N; ++n) {
            const double psi = b.value(n, ks[kk]);
            for (size_t p = 0; p < phi.phi[n].size(); ++p)
                v[kk].a[p] += psi * phi.phi[n].a[p];
        }
    return v;
}

ReconstructionResult recover_c(const std::vector<ScalarField>& v, const Grid3D& g,
                               const Vec3& x0, const std::vector<double>& ks) {
    ensure(v.size() == ks.size() && ks.size() >= 2, "recover_c: stack mismatch");
    const auto w = trapezoid_weights(ks);
    const double span = ks.back() - ks.front();
    const double inv_h2 = 1.0 / (g.dx * g.dx), inv_2h = 1.0 / (2.0 * g.dx);

    ReconstructionResult out;
    out.c = g.make_real_field();
    for (double& x : out.c.a) x = 1.0;

    for (int i = 1; i < g.nx - 1; ++i)
        for (int j = 1; j < g.nx - 1; ++j)
            for (int t = 1; t < g.nx - 1; ++t) {
                const Vec3 d = g.pos(i, j, t) - x0;
                const double rho = norm3(d);
                const Vec3 rh = {d[0] / rho, d[1] / rho, d[2] / rho};
                double acc = 0.0;
                for (size_t kk = 0; kk < ks.size(); ++kk) {
                    const auto& f = v[kk];
                    const double k = ks[kk];
                    const Complex lap =
                        inv_h2 * (f.at(i + 1, j, t) + f.at(i - 1, j, t) + f.at(i, j + 1, t) +
                                  f.at(i, j - 1, t) + f.at(i, j, t + 1) + f.at(i, j, t - 1) -
                                  6.0 * f.at(i, j, t));
                    const Complex gx = (f.at(i + 1, j, t) - f.at(i - 1, j, t)) * inv_2h;
                    const Complex gy = (f.at(i, j + 1, t) - f.at(i, j - 1, t)) * inv_2h;
                    const Complex gz = (f.at(i, j, t + 1) - f.at(i, j, t - 1)) * inv_2h;
                    const Complex grad_sq = gx * gx + gy * gy + gz * gz;  // no conjugation
                    const Complex radial = gx * rh[0] + gy * rh[1] + gz * rh[2];
                    const Complex expr = lap + (k * k) * grad_sq +
                                         2.0 * (Complex(0.0, k) - 1.0 / rho) * radial;
                    acc += w[kk] * expr.real();
                }
                double cval = 1.0 - acc / span;
                if (cval < 1.0) cval = 1.0;  // prior c >= 1
                out.c.at(i, j, t) = cval;
            }

    out.max_value = 1.0;
    out.max_location = g.pos(0, 0, 0);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t)
                if (out.c.at(i, j, t) > out.max_value) {
                    out.max_value = out.c.at(i, j, t);
                    out.max_location = g.pos(i, j, t);
                }
    return out;
}

MetricsReport metrics(const ReconstructionResult& rec, const Grid3D& g,
                      const MediumModel* truth) {
    MetricsReport rep;
    rep.max_value = rec.max_value;
    rep.max_location = rec.max_location;
    rep.threshold = 1.0 + 0.3 * (rec.max_value - 1.0);

    // connected components over the threshold, 6-neighborhood
    std::vector<int> label(g.nodes(), -1);
    int next = 0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t) {
                const size_t q = g.idx(i, j, t);
                if (label[q] >= 0 || rec.c.at(i, j, t) <= rep.threshold) continue;
                ComponentReport comp;
                comp.bbox_min = comp.bbox_max = g.pos(i, j, t);
                double wsum = 0.0;
                Vec3 csum{0, 0, 0};
                std::queue<std::array<int, 3>> fifo;
                fifo.push({i, j, t});
                label[q] = next;
                while (!fifo.empty()) {
                    auto [a, b, c] = fifo.front();
                    fifo.pop();
                    const double val = rec.c.at(a, b, c);
                    const Vec3 p = g.pos(a, b, c);
                    ++comp.node_count;
                    const double wt = val - 1.0;
                    wsum += wt;
                    for (int d = 0; d < 3; ++d) {
                        csum[d] += wt * p[d];
                        comp.bbox_min[d] = std::min(comp.bbox_min[d], p[d]);
                        comp.bbox_max[d] = std::max(comp.bbox_max[d], p[d]);
                    }
                    if (val > comp.max_value) {
                        comp.max_value = val;
                        comp.max_location = p;
                    }
                    const int off[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                           {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
                    for (const auto& o : off) {
                        int na = a + o[0], nb = b + o[1], nc = c + o[2];
                        if (na < 0 || nb < 0 || nc < 0 || na >= g.nx || nb >= g.nx ||
                            nc >= g.nx)
                            continue;
                        const size_t nq = g.idx(na, nb, nc);
                        if (label[nq] >= 0 || rec.c.at(na, nb, nc) <= rep.threshold) continue;
                        label[nq] = next;
                        fifo.push({na, nb, nc});
                    }
                }
                if (wsum > 0.0)
                    comp.centroid = {csum[0] / wsum, csum[1] / wsum, csum[2] / wsum};
                rep.components.push_back(comp);
                ++next;
            }

    if (truth) {
        rep.true_max = truth->max_contrast();
        if (rep.true_max > 0.0)
            rep.peak_relative_error = std::abs(rep.max_value - rep.true_max) / rep.true_max;
        for (const auto& comp : rep.components) {
            // peak error against the nearest inclusion's contrast
            double best = std::numeric_limits<double>::infinity();
            double value = rep.true_max;
            for (const auto& inc : truth->inclusions) {
                double d = inc.distance(comp.max_location);
                if (d < best) {
                    best = d;
                    value = inc.value;
                }
            }
            rep.component_relative_errors.push_back(std::abs(comp.max_value - value) / value);
        }
    }
    return rep;
}

}  // namespace cpl
