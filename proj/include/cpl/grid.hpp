// Uniform Cartesian grid on (-R,R)^3 and the discrete operators used by every
// functional in the pipeline.
#pragma once

#include "cpl/common.hpp"

namespace cpl {

struct Grid3D {
    double R = 1.0;   // half-width of the cube
    int nx = 0;       // nodes per axis
    double dx = 0.0;  // spacing 2R/(nx-1)

    Grid3D() = default;
    Grid3D(double R_, int nx_);

    double coord(int i) const { return -R + i * dx; }
    Vec3 pos(int i, int j, int t) const { return {coord(i), coord(j), coord(t)}; }
    size_t idx(int i, int j, int t) const {
        return (static_cast<size_t>(i) * nx + j) * nx + t;
    }
    size_t nodes() const { return static_cast<size_t>(nx) * nx * nx; }
    bool interior(int i, int j, int t) const {
        return i > 0 && i < nx - 1 && j > 0 && j < nx - 1 && t > 0 && t < nx - 1;
    }
    bool boundary(int i, int j, int t) const { return !interior(i, j, t); }

    ScalarField make_field() const { return ScalarField(nx, nx, nx); }
    RealField make_real_field() const { return RealField(nx, nx, nx); }
};

Grid3D build_grid(double R, int nx);

// Node partition of the measurement slab Gamma_L = (-R,R)^2 x (-R,-R+L) and of
// the boundary: Gamma (face z=-R, all i,j), and dOmega\Gamma (everything else
// on the boundary). Slab membership is strict: z < -R+L.
struct SlabIndex {
    double L = 0.0;
    int n_layers = 0;  // slab keeps full node layers t = 0..n_layers-1

    // boundary node category
    enum class Face { kInterior, kGamma, kOther };

    static SlabIndex build(const Grid3D& g, double L);

    bool in_slab(const Grid3D& g, int t) const {
        (void)g;
        return t < n_layers;
    }
    static Face classify(const Grid3D& g, int i, int j, int t) {
        if (g.interior(i, j, t)) return Face::kInterior;
        if (t == 0) return Face::kGamma;
        return Face::kOther;
    }
};

// 7-point Laplacian on interior nodes, zero elsewhere.
ScalarField laplacian_fd(const ScalarField& phi, const Grid3D& g);
RealField laplacian_fd(const RealField& phi, const Grid3D& g);

// Central differences on interior nodes, second-order one-sided on the faces.
VectorField gradient_fd(const ScalarField& phi, const Grid3D& g);

// One-sided second-order d/dz at the z=-R face: (-3 f0 + 4 f1 - f2)/(2 dx).
// `f` may be any box with nz >= 3 (e.g. a slab stack); the derivative is taken
// along the t axis at t=0.
template <class T>
Box3<T> dz_one_sided_bottom(const Box3<T>& f, double dx) {
    ensure(f.nz >= 3, "dz_one_sided_bottom: need at least 3 z-layers");
    Box3<T> out(f.nx, f.ny, 1);
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.ny; ++j)
            out.at(i, j, 0) =
                (-3.0 * f.at(i, j, 0) + 4.0 * f.at(i, j, 1) - f.at(i, j, 2)) / (2.0 * dx);
    return out;
}

}  // namespace cpl
