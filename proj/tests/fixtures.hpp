// Shared synthetic-data fixtures: a Test-1-style medium solved on a fine
// data-generation grid and evaluated on the inversion grid.
#pragma once

#include "cpl/config.hpp"
#include "cpl/forward.hpp"
#include "cpl/reduction.hpp"

namespace cpl::testing {

struct VolumetricData {
    Grid3D grid;            // inversion grid
    Vec3 x0;
    std::vector<double> ks;
    std::vector<ScalarField> u;      // total field on every node, per k
    std::vector<ScalarField> u_inc;  // incident field, per k
    MediumModel medium_inv;          // truth sampled on the inversion grid
};

// Full-volume total field for a named scenario; solve on forward_nx, evaluate
// everywhere on the inversion grid via the representation formula.
inline VolumetricData volumetric_data(const std::string& scenario, int nx_inv, int nk,
                                      int forward_nx = 41) {
    VolumetricData out;
    out.grid = build_grid(1.0, nx_inv);
    out.x0 = {0.0, 0.0, -4.0};
    out.ks = uniform_wavenumbers(kPi, 2.0 * kPi, nk);
    const Grid3D gfwd = build_grid(1.0, forward_nx);
    const MediumModel medium = MediumModel::build(gfwd, named_scenario(scenario));
    out.medium_inv = MediumModel::build(out.grid, named_scenario(scenario));
    for (double k : out.ks) {
        ForwardSolution sol = solve_forward(medium, k, out.x0);
        out.u.push_back(forward_field(sol, out.grid));
        ScalarField inc = out.grid.make_field();
        for (int i = 0; i < out.grid.nx; ++i)
            for (int j = 0; j < out.grid.nx; ++j)
                for (int t = 0; t < out.grid.nx; ++t)
                    inc.at(i, j, t) = incident_at(out.grid.pos(i, j, t), out.x0, k);
        out.u_inc.push_back(std::move(inc));
    }
    return out;
}

struct SlabData {
    Grid3D grid;
    Vec3 x0;
    std::vector<double> ks;
    std::vector<Box3<Complex>> u;      // bottom n_layers layers of the total field
    std::vector<Box3<Complex>> u_inc;
};

// Bottom-layers-only variant; much cheaper than the full volume.
inline SlabData slab_data(const std::string& scenario, int nx_inv, int nk, int n_layers,
                          int forward_nx = 41) {
    SlabData out;
    out.grid = build_grid(1.0, nx_inv);
    out.x0 = {0.0, 0.0, -4.0};
    out.ks = uniform_wavenumbers(kPi, 2.0 * kPi, nk);
    const Grid3D gfwd = build_grid(1.0, forward_nx);
    const MediumModel medium = MediumModel::build(gfwd, named_scenario(scenario));
    SlabIndex fake;
    fake.L = n_layers * out.grid.dx;
    fake.n_layers = n_layers;
    auto [data, stack] = measure_on_grid(medium, out.grid, fake, out.x0, out.ks, 1e-8, 2);
    out.u = std::move(stack.u);
    for (double k : out.ks) {
        Box3<Complex> inc(out.grid.nx, out.grid.nx, n_layers);
        for (int i = 0; i < out.grid.nx; ++i)
            for (int j = 0; j < out.grid.nx; ++j)
                for (int t = 0; t < n_layers; ++t)
                    inc.at(i, j, t) = incident_at(out.grid.pos(i, j, t), out.x0, k);
        out.u_inc.push_back(std::move(inc));
    }
    return out;
}

inline std::vector<Box3<Complex>> restrict_layers(const std::vector<ScalarField>& fields,
                                                  int n_layers) {
    std::vector<Box3<Complex>> out;
    for (const auto& f : fields) {
        Box3<Complex> box(f.nx, f.ny, n_layers);
        for (int i = 0; i < f.nx; ++i)
            for (int j = 0; j < f.ny; ++j)
                for (int t = 0; t < n_layers; ++t) box.at(i, j, t) = f.at(i, j, t);
        out.push_back(std::move(box));
    }
    return out;
}

}  // namespace cpl::testing
