// Shared aliases, error helper, deterministic RNG, and the flat 3D container.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpl {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline void ensure(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline double norm3(const Vec3& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

// Flat (i,j,t)-lexicographic box: i is the most significant index, t the fastest.
template <class T>
struct Box3 {
    int nx = 0, ny = 0, nz = 0;
    std::vector<T> a;

    Box3() = default;
    Box3(int nx_, int ny_, int nz_, T fill = T{})
        : nx(nx_), ny(ny_), nz(nz_), a(static_cast<size_t>(nx_) * ny_ * nz_, fill) {}

    size_t size() const { return a.size(); }
    size_t idx(int i, int j, int t) const {
        return (static_cast<size_t>(i) * ny + j) * nz + t;
    }
    T& at(int i, int j, int t) { return a[idx(i, j, t)]; }
    const T& at(int i, int j, int t) const { return a[idx(i, j, t)]; }

    bool same_shape(const Box3& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }
};

using ScalarField = Box3<Complex>;   // complex values per node
using RealField = Box3<double>;
using VectorField = std::array<ScalarField, 3>;  // 3 complex components per node

// Deterministic across platforms: raw mt19937_64 draws mapped to [0,1) with a
// fixed 53-bit rule (std::uniform_real_distribution is implementation-defined).
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    double uniform01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    // uniform on [-1,1]
    double symmetric() { return 2.0 * uniform01() - 1.0; }
    double normal() {
        // Box-Muller, one value per call pair; deterministic draw order.
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }
};

}  // namespace cpl
