#include "cpl/dense.hpp"

namespace cpl {

namespace {

// Returns the permuted LU factors; perm[r] is the source row of factored row r.
void lu_factor(DenseMat& A, std::vector<int>& perm) {
    const int n = A.n;
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(A.at(r, c)) > std::abs(A.at(p, c))) p = r;
        ensure(std::abs(A.at(p, c)) > 1e-300, "dense_solve: singular matrix");
        if (p != c) {
            std::swap(perm[p], perm[c]);
            for (int k = 0; k < n; ++k) std::swap(A.at(p, k), A.at(c, k));
        }
        for (int r = c + 1; r < n; ++r) {
            double f = A.at(r, c) / A.at(c, c);
            A.at(r, c) = f;
            for (int k = c + 1; k < n; ++k) A.at(r, k) -= f * A.at(c, k);
        }
    }
}

std::vector<double> lu_solve(const DenseMat& LU, const std::vector<int>& perm,
                             const std::vector<double>& b) {
    const int n = LU.n;
    std::vector<double> x(n);
    for (int r = 0; r < n; ++r) x[r] = b[perm[r]];
    for (int r = 1; r < n; ++r)
        for (int c = 0; c < r; ++c) x[r] -= LU.at(r, c) * x[c];
    for (int r = n - 1; r >= 0; --r) {
        for (int c = r + 1; c < n; ++c) x[r] -= LU.at(r, c) * x[c];
        x[r] /= LU.at(r, r);
    }
    return x;
}

}  // namespace

std::vector<double> dense_solve(DenseMat A, std::vector<double> b) {
    ensure(static_cast<int>(b.size()) == A.n, "dense_solve: size mismatch");
    std::vector<int> perm;
    lu_factor(A, perm);
    return lu_solve(A, perm, b);
}

double dense_cond1(const DenseMat& A) {
    const int n = A.n;
    DenseMat LU = A;
    std::vector<int> perm;
    lu_factor(LU, perm);
    double norm_a = 0.0, norm_inv = 0.0;
    for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += std::abs(A.at(r, c));
        norm_a = std::max(norm_a, s);
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        auto col = lu_solve(LU, perm, e);
        double si = 0.0;
        for (double v : col) si += std::abs(v);
        norm_inv = std::max(norm_inv, si);
    }
    return norm_a * norm_inv;
}

}  // namespace cpl
