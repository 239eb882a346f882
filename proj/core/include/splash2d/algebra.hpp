#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace splash2d {

using Complex = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator/(Vec2 a, double s) { return a *= (1.0 / s); }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

inline Complex to_complex(const Vec2& a) { return {a.x, a.y}; }
inline Vec2 to_vec(const Complex& z) { return {z.real(), z.imag()}; }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }

    Mat2& operator+=(const Mat2& o) {
        a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
        return *this;
    }
    Mat2& operator*=(double s) {
        a11 *= s; a12 *= s; a21 *= s; a22 *= s;
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator*(double s, Mat2 a) { return a *= s; }
inline Mat2 operator*(Mat2 a, double s) { return a *= s; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}

inline Vec2 operator*(const Mat2& m, const Vec2& v) {
    return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y};
}

inline Mat2 transpose(const Mat2& m) { return {m.a11, m.a21, m.a12, m.a22}; }
inline double det(const Mat2& m) { return m.a11 * m.a22 - m.a12 * m.a21; }
inline double trace(const Mat2& m) { return m.a11 + m.a22; }

inline Mat2 inverse(const Mat2& m) {
    const double d = det(m);
    return {m.a22 / d, -m.a12 / d, -m.a21 / d, m.a11 / d};
}

/// Adjugate (transposed cofactor) matrix: inverse(m) * det(m).
inline Mat2 adjugate(const Mat2& m) { return {m.a22, -m.a12, -m.a21, m.a11}; }

/// Cofactor matrix -Lambda * m * Lambda with Lambda = [[0,-1],[1,0]].
inline Mat2 cofactor(const Mat2& m) { return {m.a22, -m.a21, -m.a12, m.a11}; }

inline double frobenius(const Mat2& m) {
    return std::sqrt(m.a11 * m.a11 + m.a12 * m.a12 + m.a21 * m.a21 + m.a22 * m.a22);
}

/// Real 2x2 representation of multiplication by the complex number w.
inline Mat2 complex_as_matrix(const Complex& w) {
    return {w.real(), -w.imag(), w.imag(), w.real()};
}

/// Symmetric 2x2 tensor stored as three components.
struct Sym2 {
    double t11 = 0.0;
    double t12 = 0.0;
    double t22 = 0.0;

    static Sym2 identity() { return {1.0, 0.0, 1.0}; }

    Sym2& operator+=(const Sym2& o) { t11 += o.t11; t12 += o.t12; t22 += o.t22; return *this; }
    Sym2& operator-=(const Sym2& o) { t11 -= o.t11; t12 -= o.t12; t22 -= o.t22; return *this; }
    Sym2& operator*=(double s) { t11 *= s; t12 *= s; t22 *= s; return *this; }

    Mat2 full() const { return {t11, t12, t12, t22}; }
};

inline Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
inline Sym2 operator-(Sym2 a, const Sym2& b) { return a -= b; }
inline Sym2 operator*(double s, Sym2 a) { return a *= s; }
inline Sym2 operator*(Sym2 a, double s) { return a *= s; }

inline Vec2 operator*(const Sym2& t, const Vec2& v) {
    return {t.t11 * v.x + t.t12 * v.y, t.t12 * v.x + t.t22 * v.y};
}

/// Exact symmetrization of a general matrix: (m + m^T)/2 as three components.
inline Sym2 symmetrize(const Mat2& m) {
    return {m.a11, 0.5 * (m.a12 + m.a21), m.a22};
}

inline double frobenius(const Sym2& t) {
    return std::sqrt(t.t11 * t.t11 + 2.0 * t.t12 * t.t12 + t.t22 * t.t22);
}

inline double max_abs(const Sym2& t) {
    return std::max({std::fabs(t.t11), std::fabs(t.t12), std::fabs(t.t22)});
}

/// Eigenvalues of a symmetric 2x2 tensor, ascending.
inline std::array<double, 2> eigenvalues(const Sym2& t) {
    const double m = 0.5 * (t.t11 + t.t22);
    const double d = 0.5 * (t.t11 - t.t22);
    const double r = std::sqrt(d * d + t.t12 * t.t12);
    return {m - r, m + r};
}

}  // namespace splash2d
