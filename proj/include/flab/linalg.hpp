#pragma once

// Small fixed-size vectors and matrices used throughout the lab.  Nothing here
// is clever: 2d chart tangent vectors, 3d ambient vectors, 4d points on the
// 3-sphere, and 2x2 symmetric matrices for metric tensors.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace flab {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

template <std::size_t N>
inline std::array<double, N> operator+(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t N>
inline std::array<double, N> operator-(const std::array<double, N>& a, const std::array<double, N>& b) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t N>
inline std::array<double, N> operator*(double c, const std::array<double, N>& a) {
    std::array<double, N> r{};
    for (std::size_t i = 0; i < N; ++i) r[i] = c * a[i];
    return r;
}

template <std::size_t N>
inline std::array<double, N> operator-(const std::array<double, N>& a) {
    return -1.0 * a;
}

template <std::size_t N>
inline double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
    double s = 0;
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
inline double norm(const std::array<double, N>& a) {
    return std::sqrt(dot(a, a));
}

template <std::size_t N>
inline std::array<double, N> normalized(const std::array<double, N>& a) {
    double n = norm(a);
    if (n == 0) throw std::domain_error("normalized: zero vector");
    return (1.0 / n) * a;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// determinant of the 3x3 matrix with rows a, b, c
inline double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
    return dot(a, cross(b, c));
}

// Symmetric 2x2 matrix, used for metric tensors in the (s, theta) chart.
struct SymMat2 {
    double a11 = 0, a12 = 0, a22 = 0;

    double quad(const Vec2& v) const { return a11 * v[0] * v[0] + 2 * a12 * v[0] * v[1] + a22 * v[1] * v[1]; }
    double bilin(const Vec2& u, const Vec2& v) const {
        return a11 * u[0] * v[0] + a12 * (u[0] * v[1] + u[1] * v[0]) + a22 * u[1] * v[1];
    }
    Vec2 mul(const Vec2& v) const { return {a11 * v[0] + a12 * v[1], a12 * v[0] + a22 * v[1]}; }
    double det() const { return a11 * a22 - a12 * a12; }
    SymMat2 inverse() const {
        double d = det();
        if (d == 0) throw std::domain_error("SymMat2: singular");
        return {a22 / d, -a12 / d, a11 / d};
    }
    // eigenvalues of a symmetric 2x2, ascending
    std::array<double, 2> eigenvalues() const {
        double tr = a11 + a22;
        double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det()));
        return {0.5 * tr - disc, 0.5 * tr + disc};
    }
};

// General 2x2 matrix (rows m[0], m[1]); used for FD Jacobians and Gamma^i_k.
using Mat2 = std::array<Vec2, 2>;

inline Vec2 mul(const Mat2& m, const Vec2& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline double det2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Complex-pair view of R^4: x = (z, w) with z = x1 + i x2, w = x3 + i x4.
inline std::complex<double> zpart(const Vec4& x) { return {x[0], x[1]}; }
inline std::complex<double> wpart(const Vec4& x) { return {x[2], x[3]}; }
inline Vec4 from_zw(std::complex<double> z, std::complex<double> w) {
    return {z.real(), z.imag(), w.real(), w.imag()};
}

// Multiplication by i on both complex factors (the generator of the circle
// action whose orbits are the fibers of the standard fibration).
inline Vec4 times_i(const Vec4& x) { return {-x[1], x[0], -x[3], x[2]}; }

}  // namespace flab
