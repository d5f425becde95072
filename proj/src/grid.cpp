#include "cpl/grid.hpp"

namespace cpl {

Grid3D::Grid3D(double R_, int nx_) : R(R_), nx(nx_) {
    ensure(nx >= 3, "Grid3D: need nx >= 3 (no interior node for the Laplacian)");
    ensure(R > 0.0, "Grid3D: need R > 0");
    dx = 2.0 * R / (nx - 1);
}

Grid3D build_grid(double R, int nx) { return Grid3D(R, nx); }

SlabIndex SlabIndex::build(const Grid3D& g, double L) {
    ensure(L > 0.0 && L < 2.0 * g.R, "SlabIndex: need 0 < L < 2R");
    SlabIndex s;
    s.L = L;
    s.n_layers = 0;
    for (int t = 0; t < g.nx; ++t)
        if (g.coord(t) < -g.R + L) ++s.n_layers;
    return s;
}

ScalarField laplacian_fd(const ScalarField& phi, const Grid3D& g) {
    ensure(phi.nx == g.nx && phi.ny == g.nx && phi.nz == g.nx, "laplacian_fd: shape mismatch");
    ScalarField out = g.make_field();
    const double s = 1.0 / (g.dx * g.dx);
    for (int i = 1; i < g.nx - 1; ++i)
        for (int j = 1; j < g.nx - 1; ++j)
            for (int t = 1; t < g.nx - 1; ++t)
                out.at(i, j, t) = s * (phi.at(i + 1, j, t) + phi.at(i - 1, j, t) +
                                       phi.at(i, j + 1, t) + phi.at(i, j - 1, t) +
                                       phi.at(i, j, t + 1) + phi.at(i, j, t - 1) -
                                       6.0 * phi.at(i, j, t));
    return out;
}

RealField laplacian_fd(const RealField& phi, const Grid3D& g) {
    ensure(phi.nx == g.nx && phi.ny == g.nx && phi.nz == g.nx, "laplacian_fd: shape mismatch");
    RealField out = g.make_real_field();
    const double s = 1.0 / (g.dx * g.dx);
    for (int i = 1; i < g.nx - 1; ++i)
        for (int j = 1; j < g.nx - 1; ++j)
            for (int t = 1; t < g.nx - 1; ++t)
                out.at(i, j, t) = s * (phi.at(i + 1, j, t) + phi.at(i - 1, j, t) +
                                       phi.at(i, j + 1, t) + phi.at(i, j - 1, t) +
                                       phi.at(i, j, t + 1) + phi.at(i, j, t - 1) -
                                       6.0 * phi.at(i, j, t));
    return out;
}

namespace {

// One axis of the gradient; `axis` selects which index varies.
void gradient_axis(const ScalarField& phi, const Grid3D& g, int axis, ScalarField& out) {
    const int n = g.nx;
    const double inv2 = 1.0 / (2.0 * g.dx);
    auto get = [&](int i, int j, int t, int shift) -> const Complex& {
        int c[3] = {i, j, t};
        c[axis] += shift;
        return phi.at(c[0], c[1], c[2]);
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int t = 0; t < n; ++t) {
                int c = (axis == 0) ? i : (axis == 1) ? j : t;
                Complex v;
                if (c == 0)
                    v = (-3.0 * get(i, j, t, 0) + 4.0 * get(i, j, t, 1) - get(i, j, t, 2)) * inv2;
                else if (c == n - 1)
                    v = (3.0 * get(i, j, t, 0) - 4.0 * get(i, j, t, -1) + get(i, j, t, -2)) * inv2;
                else
                    v = (get(i, j, t, 1) - get(i, j, t, -1)) * inv2;
                out.at(i, j, t) = v;
            }
}

}  // namespace

VectorField gradient_fd(const ScalarField& phi, const Grid3D& g) {
    ensure(phi.nx == g.nx && phi.ny == g.nx && phi.nz == g.nx, "gradient_fd: shape mismatch");
    VectorField out{g.make_field(), g.make_field(), g.make_field()};
    for (int axis = 0; axis < 3; ++axis) gradient_axis(phi, g, axis, out[axis]);
    return out;
}

}  // namespace cpl
