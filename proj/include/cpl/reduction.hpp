// Frequency dimension reduction: logarithmic change of variables with branch
// tracking along k, truncated Fourier coefficients in the polynomial-
// exponential basis, Cauchy data of the coefficient system, and data
// complementation on the unmeasured boundary.
#pragma once

#include "cpl/basis.hpp"
#include "cpl/forward.hpp"
#include "cpl/phase.hpp"

namespace cpl {

// v(x,k) = (1/k^2) [ log|u/u_inc| + i theta(x,k) ], theta unwrapped
// continuously in k per node, anchored at the principal value at the first
// wavenumber. Boxes may be grid- or slab-shaped; one box per wavenumber.
std::vector<Box3<Complex>> log_ratio(const std::vector<Box3<Complex>>& u,
                                     const std::vector<Box3<Complex>>& u_inc,
                                     const std::vector<double>& ks);

// v_n(x) = int v(x,k) Psi_n(k) dk, composite trapezoid over the uniform ks.
std::vector<Box3<Complex>> fourier_coefficients(const std::vector<Box3<Complex>>& v,
                                                const std::vector<double>& ks,
                                                const BasisSystem& b);

// Fourier coefficient fields with their Cauchy data and the complemented
// zero-trace targets on dOmega\Gamma.
struct CoefficientStack {
    int N = 0;
    std::vector<Box3<Complex>> v_n;       // volumetric fields (may be empty)
    std::vector<Box3<Complex>> g_m;       // values on Gamma, shape (nx,nx,1)
    std::vector<Box3<Complex>> h_m;       // dz values on Gamma
    std::vector<ScalarField> sidewall;    // targets on dOmega\Gamma (grid-shaped)
    bool complemented = false;
};

// g_m(x) = int Psi_m/k^2 log(g/u_inc) dk and
// h_m(x) = int Psi_m/k^2 [ h/g - (ik - 1/|x-x0|)(z+d)/|x-x0| ] dk on Gamma.
std::pair<std::vector<Box3<Complex>>, std::vector<Box3<Complex>>> cauchy_coefficients(
    const CauchyData& cd, const BasisSystem& b, const Grid3D& g, const Vec3& x0);

// Zero the v_m targets on dOmega\Gamma; Gamma data is left untouched.
void complement_data(CoefficientStack& stack, const Grid3D& g);

// Trapezoid weights of the uniform wavenumber grid.
std::vector<double> trapezoid_weights(const std::vector<double>& ks);

}  // namespace cpl
