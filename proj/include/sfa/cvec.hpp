#pragma once

#include <cmath>
#include <complex>

namespace sfa {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// Complex 2-vector in the polarization plane. dot() is bilinear (no conjugation),
// which is the analytic continuation of the real dot product to complex time.
struct CVec2 {
    cplx x{}, y{};

    CVec2& operator+=(const CVec2& o) { x += o.x; y += o.y; return *this; }
    CVec2& operator-=(const CVec2& o) { x -= o.x; y -= o.y; return *this; }
    CVec2& operator*=(cplx s) { x *= s; y *= s; return *this; }
};

inline CVec2 operator+(CVec2 a, const CVec2& b) { return a += b; }
inline CVec2 operator-(CVec2 a, const CVec2& b) { return a -= b; }
inline CVec2 operator-(const CVec2& a) { return {-a.x, -a.y}; }
inline CVec2 operator*(cplx s, CVec2 a) { return a *= s; }
inline CVec2 operator*(CVec2 a, cplx s) { return a *= s; }
inline CVec2 operator/(CVec2 a, cplx s) { return a *= (1.0 / s); }

inline cplx dot(const CVec2& a, const CVec2& b) { return a.x * b.x + a.y * b.y; }
inline CVec2 conj(const CVec2& a) { return {std::conj(a.x), std::conj(a.y)}; }
inline double norm(const CVec2& a) { return std::sqrt(std::norm(a.x) + std::norm(a.y)); }

}  // namespace sfa
