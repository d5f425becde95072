// Final assembly: v(x,k) from the minimizing coefficients, recovery of the
// dielectric coefficient by the k-averaged identity, and quality metrics.
#pragma once

#include "cpl/basis.hpp"
#include "cpl/carleman.hpp"
#include "cpl/forward.hpp"

namespace cpl {

// v(x,k_i) = sum_n phi_n(x) Psi_n(k_i) for every k in ks.
std::vector<ScalarField> assemble_v(const Candidate& phi, const BasisSystem& b,
                                    const std::vector<double>& ks);

struct ReconstructionResult {
    RealField c;          // clamped to >= 1, boundary nodes set to 1
    double max_value = 1.0;
    Vec3 max_location{0, 0, 0};
};

// c(x) = 1 - (1/(kmax-kmin)) int Re[ Lap v + k^2 (grad v)^2
//        + 2 (ik - 1/|x-x0|) grad v . (x-x0)/|x-x0| ] dk   (trapezoid over ks)
// with the complex dot product taken without conjugation.
ReconstructionResult recover_c(const std::vector<ScalarField>& v, const Grid3D& g,
                               const Vec3& x0, const std::vector<double>& ks);

struct ComponentReport {
    double max_value = 0.0;
    Vec3 max_location{0, 0, 0};
    Vec3 centroid{0, 0, 0};
    int node_count = 0;
    Vec3 bbox_min{0, 0, 0};
    Vec3 bbox_max{0, 0, 0};
};

struct MetricsReport {
    double max_value = 1.0;
    Vec3 max_location{0, 0, 0};
    double threshold = 0.0;  // 1 + 0.3 (max - 1)
    std::vector<ComponentReport> components;
    // against the analytic truth, when available
    double true_max = 0.0;
    double peak_relative_error = 0.0;  // |max_c - max_true| / max_true
    std::vector<double> component_relative_errors;
};

// Connected components (6-neighborhood) above the 30% contrast threshold.
// When a medium descriptor is supplied, per-component errors compare each
// component's peak against the analytic value at its own peak location's
// nearest inclusion.
MetricsReport metrics(const ReconstructionResult& rec, const Grid3D& g,
                      const MediumModel* truth = nullptr);

}  // namespace cpl
