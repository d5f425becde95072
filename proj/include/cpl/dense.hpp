// Small dense solves (LU with partial pivoting) for the N x N reduced-system
// matrices; N stays in the single digits.
#pragma once

#include "cpl/common.hpp"

namespace cpl {

// Row-major n x n matrix.
struct DenseMat {
    int n = 0;
    std::vector<double> a;
    explicit DenseMat(int n_ = 0) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}
    double& at(int r, int c) { return a[static_cast<size_t>(r) * n + c]; }
    double at(int r, int c) const { return a[static_cast<size_t>(r) * n + c]; }
};

// Solves A x = b in place; throws on (numerical) singularity.
std::vector<double> dense_solve(DenseMat A, std::vector<double> b);

// One-norm condition estimate via explicit inverse (fine for tiny n).
double dense_cond1(const DenseMat& A);

}  // namespace cpl
