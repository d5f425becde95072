// Synthetic data generation: Helmholtz scattering via the Lippmann-Schwinger
// volume integral equation, modulus extraction on the measurement slab, and
// multiplicative noise.
#pragma once

#include "cpl/grid.hpp"
#include "cpl/optim.hpp"

namespace cpl {

struct Inclusion {
    enum class Kind { kCylinder, kBox };
    Kind kind = Kind::kCylinder;
    double value = 1.0;
    Vec3 center{0, 0, 0};
    // cylinder: extent[0] = radius (x,y), extent[2] = half-thickness in z
    // box: per-axis half-extents
    Vec3 extent{0, 0, 0};

    bool contains(const Vec3& p) const;       // closed inequalities
    double distance(const Vec3& p) const;     // Euclidean distance to the set
};

struct MediumModel {
    Grid3D grid;
    std::vector<Inclusion> inclusions;
    RealField c;  // sampled coefficient, c >= 1, c = 1 near the boundary

    static MediumModel build(const Grid3D& g, const std::vector<Inclusion>& incs);

    double c_analytic(const Vec3& p) const;
    double support_distance(const Vec3& p) const;  // +inf when no inclusions
    double max_contrast() const;                   // max analytic value (>= 1)
};

struct WaveField {
    enum class Role { kIncident, kTotal, kScattered, kRetrieved };
    Role role = Role::kTotal;
    std::vector<double> ks;
    std::vector<ScalarField> u;  // one field per wavenumber
};

// Complex fields restricted to the slab layers t = 0..n_layers-1.
struct SlabStack {
    std::vector<double> ks;
    std::vector<Box3<Complex>> u;  // shape (nx, nx, n_layers)
};

struct PhaselessData {
    std::vector<double> ks;
    std::vector<Box3<double>> f;  // modulus samples, slab-shaped
    double delta = 0.0;
    uint64_t seed = 0;
};

Complex incident_at(const Vec3& x, const Vec3& x0, double k);
WaveField incident_wave(const Grid3D& g, const Vec3& x0, const std::vector<double>& ks);

// Closed-form integral of the outgoing kernel over the ball of volume h^3:
// (1/k^2) (e^{ik rho}(1 - ik rho) - 1), rho = (3 h^3 / (4 pi))^{1/3}.
Complex self_cell_weight(double k, double h);

// Direct-summation volume potential V[f] on the full grid (midpoint rule off
// the diagonal, self-cell weight on it). Used by the solver and the oracles.
ScalarField apply_volume_potential(const ScalarField& f, const Grid3D& g, double k);

// Total field satisfying u = u_inc + k^2 V[(c-1) u]; the linear system is
// restricted to the support of c-1 and solved by restarted GMRES.
struct ForwardSolution {
    double k = 0.0;
    Vec3 x0{0, 0, 0};
    double h = 0.0;                 // grid spacing of the solve
    std::vector<Vec3> support_pos;  // support node positions
    std::vector<double> contrast;   // c-1 at support nodes
    CVec u_support;                 // total field on the support
    double rel_residual = 0.0;
    int iters = 0;

    // Representation-formula evaluation anywhere (exact on the discrete model).
    Complex eval(const Vec3& x) const;
};

ForwardSolution solve_forward(const MediumModel& m, double k, const Vec3& x0,
                              double tol = 1e-8, int max_iters = 2000);

// Total field on every node of the medium's grid.
ScalarField forward_field(const ForwardSolution& sol, const Grid3D& g);

// Modulus data plus the retained complex field on the slab of m's grid.
std::pair<PhaselessData, SlabStack> measure(const MediumModel& m, const Vec3& x0,
                                            const std::vector<double>& ks,
                                            const SlabIndex& slab, double tol = 1e-8);

// Two-grid variant: solves on m's (finer) grid, evaluates on the slab nodes of
// the inversion grid g_inv.
std::pair<PhaselessData, SlabStack> measure_on_grid(const MediumModel& m, const Grid3D& g_inv,
                                                    const SlabIndex& slab_inv, const Vec3& x0,
                                                    const std::vector<double>& ks,
                                                    double tol = 1e-8, int jobs = 1);

// f -> f (1 + delta * rand), rand iid uniform on [-1,1], deterministic in seed.
PhaselessData add_noise(const PhaselessData& f, double delta, uint64_t seed);

std::vector<double> uniform_wavenumbers(double kmin, double kmax, int nk);

}  // namespace cpl
