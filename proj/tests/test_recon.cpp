#include "doctest.h"

#include "cpl/recon.hpp"
#include "cpl/reduction.hpp"
#include "fixtures.hpp"

using namespace cpl;

namespace {

Candidate random_candidate(const Grid3D& g, int N, double amp, uint64_t seed) {
    Rng rng(seed);
    Candidate c = Candidate::zeros(g, N);
    for (int n = 0; n < N; ++n)
        for (auto& z : c.phi[n].a) z = amp * Complex(rng.symmetric(), rng.symmetric());
    return c;
}

}  // namespace

TEST_CASE("assemble_v reproduces the basis on a unit coefficient") {
    Grid3D g = build_grid(1.0, 5);
    BasisSystem b = build_basis(kPi, 2.0 * kPi, 3);
    Candidate phi = Candidate::zeros(g, 3);
    for (auto& z : phi.phi[0].a) z = Complex(1.0);
    auto ks = uniform_wavenumbers(kPi, 2.0 * kPi, 11);
    auto v = assemble_v(phi, b, ks);
    for (size_t kk = 0; kk < ks.size(); ++kk)
        for (const auto& z : v[kk].a)
            CHECK(std::abs(z - b.value(0, ks[kk])) < 1e-13);
}

TEST_CASE("assemble_v is linear and inverts fourier_coefficients") {
    Grid3D g = build_grid(1.0, 5);
    BasisSystem b = build_basis(kPi, 2.0 * kPi, 4);
    auto ks = uniform_wavenumbers(kPi, 2.0 * kPi, 121);
    Candidate p1 = random_candidate(g, 4, 0.7, 1);
    Candidate p2 = random_candidate(g, 4, 0.7, 2);
    const Complex alpha(0.3, -1.1);
    Candidate mix = Candidate::zeros(g, 4);
    for (int n = 0; n < 4; ++n)
        for (size_t p = 0; p < mix.phi[n].size(); ++p)
            mix.phi[n].a[p] = p1.phi[n].a[p] + alpha * p2.phi[n].a[p];
    auto v1 = assemble_v(p1, b, ks);
    auto v2 = assemble_v(p2, b, ks);
    auto vm = assemble_v(mix, b, ks);
    for (size_t kk = 0; kk < ks.size(); ++kk)
        for (size_t p = 0; p < v1[kk].size(); ++p)
            CHECK(std::abs(vm[kk].a[p] - (v1[kk].a[p] + alpha * v2[kk].a[p])) < 1e-12);

    // round trip through the k-quadrature (trapezoid accuracy at 121 samples)
    std::vector<Box3<Complex>> stack;
    for (auto& f : v1) {
        Box3<Complex> box(g.nx, g.nx, g.nx);
        box.a = f.a;
        stack.push_back(std::move(box));
    }
    auto back = fourier_coefficients(stack, ks, b);
    double worst = 0.0;
    for (int n = 0; n < 4; ++n)
        for (size_t p = 0; p < back[n].size(); ++p)
            worst = std::max(worst, std::abs(back[n].a[p] - p1.phi[n].a[p]));
    CHECK(worst < 5e-3);
}

TEST_CASE("vacuum log-field recovers the unit coefficient") {
    Grid3D g = build_grid(1.0, 9);
    auto ks = uniform_wavenumbers(kPi, 2.0 * kPi, 5);
    std::vector<ScalarField> v(ks.size(), g.make_field());
    auto rec = recover_c(v, g, {0.0, 0.0, -4.0}, ks);
    for (const auto& x : rec.c.a) CHECK(x == 1.0);
    CHECK(rec.max_value == 1.0);
}

TEST_CASE("adding a spatial constant to v leaves the reconstruction unchanged") {
    Grid3D g = build_grid(1.0, 9);
    auto ks = uniform_wavenumbers(kPi, 2.0 * kPi, 7);
    Rng rng(9);
    std::vector<ScalarField> v(ks.size(), g.make_field());
    for (auto& f : v)
        for (auto& z : f.a) z = 0.05 * Complex(rng.symmetric(), rng.symmetric());
    auto rec1 = recover_c(v, g, {0.0, 0.0, -4.0}, ks);
    const Complex shift(0.37, -0.21);
    for (auto& f : v)
        for (auto& z : f.a) z += shift;
    auto rec2 = recover_c(v, g, {0.0, 0.0, -4.0}, ks);
    for (size_t p = 0; p < rec1.c.size(); ++p)
        CHECK(rec1.c.a[p] == doctest::Approx(rec2.c.a[p]).epsilon(1e-9));
}

TEST_CASE("reconstruction stays at or above one") {
    Grid3D g = build_grid(1.0, 9);
    auto ks = uniform_wavenumbers(kPi, 2.0 * kPi, 7);
    Rng rng(2);
    std::vector<ScalarField> v(ks.size(), g.make_field());
    for (auto& f : v)
        for (auto& z : f.a) z = 0.2 * Complex(rng.symmetric(), rng.symmetric());
    auto rec = recover_c(v, g, {0.0, 0.0, -4.0}, ks);
    for (const auto& x : rec.c.a) CHECK(x >= 1.0);
}

TEST_CASE("volumetric forward data reproduce the true coefficient") {
    // the end-to-end identity check: log transform of an actual scattering
    // solve, fed untruncated into the recovery formula
    auto data = testing::volumetric_data("test1", 21, 61);
    const Grid3D& g = data.grid;
    auto u = testing::restrict_layers(data.u, g.nx);
    auto uinc = testing::restrict_layers(data.u_inc, g.nx);
    auto vb = log_ratio(u, uinc, data.ks);
    std::vector<ScalarField> v;
    for (auto& b : vb) {
        ScalarField f = g.make_field();
        f.a = b.a;
        v.push_back(std::move(f));
    }
    auto rec = recover_c(v, g, data.x0, data.ks);

    MediumModel truth = MediumModel::build(g, named_scenario("test1"));
    CHECK(truth.support_distance(rec.max_location) < 0.1);
    CHECK(rec.max_value > 4.0);
    CHECK(rec.max_value < 6.5);
    double out_max = 1.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t)
                if (truth.support_distance(g.pos(i, j, t)) > 0.2)
                    out_max = std::max(out_max, rec.c.at(i, j, t));
    CHECK(out_max < 1.5);
}

TEST_CASE("metrics on the exact truth report zero errors") {
    Grid3D g = build_grid(1.0, 21);
    MediumModel truth = MediumModel::build(g, named_scenario("test1"));
    ReconstructionResult rec;
    rec.c = truth.c;
    rec.max_value = 1.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t)
                if (rec.c.at(i, j, t) > rec.max_value) {
                    rec.max_value = rec.c.at(i, j, t);
                    rec.max_location = g.pos(i, j, t);
                }
    MetricsReport rep = metrics(rec, g, &truth);
    CHECK(rep.max_value == 5.0);
    CHECK(rep.peak_relative_error == 0.0);
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.component_relative_errors[0] == 0.0);
    CHECK(rep.components[0].max_location[2] == doctest::Approx(-0.7));
}

TEST_CASE("metrics separates two bumps at the 30 percent threshold") {
    Grid3D g = build_grid(1.0, 21);
    ReconstructionResult rec;
    rec.c = g.make_real_field();
    for (auto& v : rec.c.a) v = 1.0;
    auto bump = [&](Vec3 c0, double amp) {
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nx; ++j)
                for (int t = 0; t < g.nx; ++t) {
                    const Vec3 p = g.pos(i, j, t);
                    const double d2 = std::pow(p[0] - c0[0], 2) + std::pow(p[1] - c0[1], 2) +
                                      std::pow(p[2] - c0[2], 2);
                    rec.c.at(i, j, t) += amp * std::exp(-d2 / 0.02);
                }
    };
    bump({0.5, 0.0, -0.6}, 4.0);
    bump({-0.5, 0.0, -0.6}, 3.5);
    rec.max_value = 1.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < g.nx; ++t)
                if (rec.c.at(i, j, t) > rec.max_value) {
                    rec.max_value = rec.c.at(i, j, t);
                    rec.max_location = g.pos(i, j, t);
                }
    MediumModel truth = MediumModel::build(g, named_scenario("test2"));
    MetricsReport rep = metrics(rec, g, &truth);
    REQUIRE(rep.components.size() == 2);
    CHECK(rep.threshold == doctest::Approx(1.0 + 0.3 * (rec.max_value - 1.0)));
    // components sit on opposite sides of x = 0
    CHECK(rep.components[0].centroid[0] * rep.components[1].centroid[0] < 0.0);
}
