// Iterative workhorses: limited-memory BFGS with a strong-Wolfe line search,
// restarted GMRES for complex systems, and Jacobi-preconditioned CG.
#pragma once

#include <functional>

#include "cpl/common.hpp"

namespace cpl {

using DVec = std::vector<double>;
using CVec = std::vector<Complex>;

// f(x, grad_out) -> value; grad_out is resized by the caller.
using ObjectiveFn = std::function<double(const DVec&, DVec&)>;

struct LbfgsOptions {
    int max_iters = 500;
    double grad_tol = 1e-8;
    int memory = 10;
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    int max_line_search = 40;
};

struct LbfgsResult {
    DVec x;
    double f = 0.0;
    double grad_norm = 0.0;
    int iters = 0;
    bool converged = false;  // false when the iteration cap was hit
};

LbfgsResult lbfgs_minimize(const ObjectiveFn& f, DVec x0, const LbfgsOptions& opt = {});

struct KrylovResult {
    double rel_residual = 0.0;
    int iters = 0;
    bool converged = false;
};

// Restarted GMRES for A x = b with a matrix-free apply; solves in place.
KrylovResult gmres(const std::function<CVec(const CVec&)>& apply, const CVec& b, CVec& x,
                   double tol = 1e-8, int restart = 50, int max_iters = 2000);

// Preconditioned conjugate gradient for SPD systems; inv_diag scales the
// residual componentwise (Jacobi). Solves in place.
KrylovResult pcg(const std::function<DVec(const DVec&)>& apply, const DVec& b, DVec& x,
                 const DVec& inv_diag, double tol = 1e-8, int max_iters = 20000);

double dot(const DVec& a, const DVec& b);
double nrm2(const DVec& a);
void axpy(double alpha, const DVec& x, DVec& y);

}  // namespace cpl
