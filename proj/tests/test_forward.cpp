#include "doctest.h"

#include "cpl/basis.hpp"
#include "cpl/forward.hpp"

using namespace cpl;

TEST_CASE("incident wave closed form") {
    Grid3D g = build_grid(1.0, 5);
    const Vec3 x0{0.0, 0.0, -4.0};
    auto w = incident_wave(g, x0, {kPi, 2.0 * kPi});
    // |x - x0| = 1 at (0,0,-3): outside this grid, evaluate directly
    for (double k : {kPi, 2.0 * kPi}) {
        Complex u = incident_at({0.0, 0.0, -3.0}, x0, k);
        CHECK(std::abs(u) == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-14));
        CHECK(std::arg(u) == doctest::Approx(std::remainder(k, 2.0 * kPi)).epsilon(1e-12));
    }
    CHECK(w.u[0].at(2, 2, 2) == incident_at({0.0, 0.0, 0.0}, x0, kPi));
    CHECK_THROWS(incident_wave(g, {0.0, 0.0, 0.5}, {kPi}));
}

TEST_CASE("incident wave satisfies the discrete Helmholtz equation to O(dx^2)") {
    const Vec3 x0{0.0, 0.0, -4.0};
    const double k = kPi;
    auto residual = [&](int nx) {
        Grid3D g = build_grid(1.0, nx);
        auto w = incident_wave(g, x0, {k});
        auto lap = laplacian_fd(w.u[0], g);
        double worst = 0.0;
        for (int i = 1; i < g.nx - 1; ++i)
            for (int j = 1; j < g.nx - 1; ++j)
                for (int t = 1; t < g.nx - 1; ++t)
                    worst = std::max(worst,
                                     std::abs(lap.at(i, j, t) + k * k * w.u[0].at(i, j, t)));
        return worst;
    };
    double ratio = residual(21) / residual(41);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("self-cell weight equals the radial antiderivative") {
    for (double k : {kPi, 4.0, 2.0 * kPi}) {
        for (double h : {0.2, 0.1, 0.05}) {
            const double rho = std::cbrt(3.0 * h * h * h / (4.0 * kPi));
            // high-order quadrature of int_0^rho r e^{ikr} dr
            Quadrature q = gauss_legendre(64, 0.0, rho);
            Complex direct(0.0);
            for (size_t i = 0; i < q.nodes.size(); ++i)
                direct += q.weights[i] * q.nodes[i] * std::exp(Complex(0.0, k * q.nodes[i]));
            CHECK(std::abs(self_cell_weight(k, h) - direct) < 1e-14);
        }
    }
}

TEST_CASE("vacuum medium reproduces the incident wave exactly") {
    Grid3D g = build_grid(1.0, 9);
    MediumModel m = MediumModel::build(g, {});
    const Vec3 x0{0.0, 0.0, -4.0};
    ForwardSolution sol = solve_forward(m, kPi, x0);
    CHECK(sol.rel_residual == 0.0);
    auto u = forward_field(sol, g);
    auto w = incident_wave(g, x0, {kPi});
    for (size_t p = 0; p < u.size(); ++p) CHECK(std::abs(u.a[p] - w.u[0].a[p]) < 1e-15);
}

TEST_CASE("volume potential is symmetric in source and receiver") {
    Grid3D g = build_grid(1.0, 5);
    const double k = kPi;
    auto delta_at = [&](int i, int j, int t) {
        ScalarField f = g.make_field();
        f.at(i, j, t) = Complex(1.0);
        return f;
    };
    const std::array<int, 3> p{1, 2, 3}, q{3, 1, 0};
    auto vp = apply_volume_potential(delta_at(p[0], p[1], p[2]), g, k);
    auto vq = apply_volume_potential(delta_at(q[0], q[1], q[2]), g, k);
    CHECK(std::abs(vp.at(q[0], q[1], q[2]) - vq.at(p[0], p[1], p[2])) < 1e-12);

    // a second pair, off-axis
    auto va = apply_volume_potential(delta_at(0, 0, 0), g, k);
    auto vb = apply_volume_potential(delta_at(4, 4, 4), g, k);
    CHECK(std::abs(va.at(4, 4, 4) - vb.at(0, 0, 0)) < 1e-12);
}

namespace {

Inclusion small_ball(double value) {
    Inclusion inc;
    inc.kind = Inclusion::Kind::kCylinder;
    inc.value = value;
    inc.center = {0.0, 0.0, 0.0};
    inc.extent = {0.3, 0.3, 0.3};
    return inc;
}

// relative L2 deviation of the scattered field from the first Born term
double born_error(double contrast) {
    Grid3D g = build_grid(1.0, 11);
    MediumModel m = MediumModel::build(g, {small_ball(1.0 + contrast)});
    const Vec3 x0{0.0, 0.0, -4.0};
    const double k = kPi;
    ForwardSolution sol = solve_forward(m, k, x0, 1e-10);
    auto u = forward_field(sol, g);
    auto w = incident_wave(g, x0, {k});
    ScalarField rhs = g.make_field();
    for (size_t p = 0; p < rhs.size(); ++p) rhs.a[p] = (m.c.a[p] - 1.0) * w.u[0].a[p];
    auto born = apply_volume_potential(rhs, g, k);
    double num = 0.0, den = 0.0;
    for (size_t p = 0; p < u.size(); ++p) {
        const Complex sc = u.a[p] - w.u[0].a[p];
        const Complex first = k * k * born.a[p];
        num += std::norm(sc - first);
        den += std::norm(first);
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("first Born term matches at small contrast and degrades as it grows") {
    const double e001 = born_error(0.01);
    CHECK(e001 < 0.01);
    const double e003 = born_error(0.03);
    const double e010 = born_error(0.10);
    CHECK(e001 < e003);
    CHECK(e003 < e010);
}

TEST_CASE("measure on a vacuum gives the incident modulus on the slab") {
    Grid3D g = build_grid(1.0, 11);
    SlabIndex slab = SlabIndex::build(g, 0.45);
    MediumModel m = MediumModel::build(g, {});
    const Vec3 x0{0.0, 0.0, -4.0};
    auto ks = uniform_wavenumbers(kPi, 2.0 * kPi, 3);
    auto [data, stack] = measure(m, x0, ks, slab);
    REQUIRE(data.f.size() == 3);
    CHECK(data.f[0].nz == slab.n_layers);
    for (size_t kk = 0; kk < ks.size(); ++kk)
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nx; ++j)
                for (int t = 0; t < slab.n_layers; ++t) {
                    const double expect = std::abs(incident_at(g.pos(i, j, t), x0, ks[kk]));
                    CHECK(data.f[kk].at(i, j, t) == doctest::Approx(expect).epsilon(1e-12));
                    CHECK(data.f[kk].at(i, j, t) >= 0.0);
                }
}

TEST_CASE("scattering data stays finite and bounded on a strong inclusion") {
    Grid3D g = build_grid(1.0, 11);
    SlabIndex slab = SlabIndex::build(g, 0.45);
    Inclusion inc;
    inc.kind = Inclusion::Kind::kCylinder;
    inc.value = 5.0;
    inc.center = {0.0, 0.0, -0.4};
    inc.extent = {0.25, 0.25, 0.2};
    MediumModel m = MediumModel::build(g, {inc});
    auto [data, stack] = measure(m, {0.0, 0.0, -4.0}, {kPi}, slab);
    double fmax = 0.0, umax = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nx; ++j)
            for (int t = 0; t < slab.n_layers; ++t) {
                CHECK(std::isfinite(data.f[0].at(i, j, t)));
                fmax = std::max(fmax, data.f[0].at(i, j, t));
                umax = std::max(umax, std::abs(stack.u[0].at(i, j, t)));
            }
    CHECK(fmax <= umax * (1.0 + 1e-12));
}

TEST_CASE("noise injection is bounded, centered and deterministic") {
    PhaselessData f;
    f.ks = {kPi};
    f.f.assign(1, Box3<double>(25, 25, 16, 1.0));  // 10000 unit samples

    auto same = add_noise(f, 0.0, 5);
    CHECK(same.f[0].a == f.f[0].a);

    auto noisy = add_noise(f, 0.1, 5);
    double mean = 0.0, worst = 0.0;
    for (double v : noisy.f[0].a) {
        mean += v - 1.0;
        worst = std::max(worst, std::abs(v - 1.0));
    }
    const size_t n = noisy.f[0].size();
    mean /= static_cast<double>(n);
    CHECK(worst <= 0.1 + 1e-15);
    // mean of delta*uniform[-1,1]: sigma = 0.1/sqrt(3)/sqrt(n)
    const double sigma_mean = 0.1 / std::sqrt(3.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean) < 3.0 * sigma_mean);

    auto again = add_noise(f, 0.1, 5);
    CHECK(again.f[0].a == noisy.f[0].a);  // bit-identical
    auto other = add_noise(f, 0.1, 6);
    CHECK(other.f[0].a != noisy.f[0].a);
}

TEST_CASE("medium rejects inclusions touching the boundary") {
    Grid3D g = build_grid(1.0, 9);
    Inclusion inc;
    inc.kind = Inclusion::Kind::kBox;
    inc.value = 2.0;
    inc.center = {0.0, 0.0, 0.9};
    inc.extent = {0.2, 0.2, 0.2};
    CHECK_THROWS(MediumModel::build(g, {inc}));
}
