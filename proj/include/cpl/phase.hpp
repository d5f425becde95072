// Phase retrieval on the measurement slab: travel-time initial guess, the
// per-wavenumber mismatch functional with its analytic gradient, quasi-Newton
// descent, and Cauchy-data extraction on the bottom face.
#pragma once

#include "cpl/forward.hpp"
#include "cpl/grid.hpp"
#include "cpl/optim.hpp"

namespace cpl {

struct PhaseRetrievalConfig {
    int max_iters = 500;
    double grad_tol = 1e-8;
    int lbfgs_memory = 10;

    void validate() const {
        ensure(max_iters > 0 && lbfgs_memory > 0, "PhaseRetrievalConfig: caps must be positive");
    }
};

// u(x,k) and dz u(x,k) on the bottom face z = -R, per wavenumber.
struct CauchyData {
    std::vector<double> ks;
    std::vector<Box3<Complex>> g;  // shape (nx, nx, 1)
    std::vector<Box3<Complex>> h;
};

// u0(x,k) = f(x,k) e^{i k |x-x0|} on the slab.
Box3<Complex> initial_guess(const Box3<double>& f, const Grid3D& g, const Vec3& x0, double k);

// J_k(v) = dx^3 sum_{slab nodes with full stencil} |Lap v + k^2 v|^2
//        + dx^3 sum_{slab} | |v|^2 - f^2 |^2,
// with the analytic gradient w.r.t. the real/imag node values.
double eval_Jk(const Box3<Complex>& v, const Box3<double>& f, double k, const Grid3D& g,
               Box3<Complex>* grad = nullptr);

struct PhaseResult {
    Box3<Complex> u;
    double J0 = 0.0;      // objective at the initial guess
    double J = 0.0;       // objective at the returned iterate
    double grad_norm = 0.0;
    int iters = 0;
    bool converged = false;
};

PhaseResult retrieve_phase(const Box3<double>& f, double k, const Grid3D& g, const Vec3& x0,
                           const PhaseRetrievalConfig& cfg = {});

// g = u at z=-R; h = one-sided second-order dz u at z=-R. Needs >= 3 layers.
CauchyData extract_cauchy(const SlabStack& u_phase, const Grid3D& g);

}  // namespace cpl
