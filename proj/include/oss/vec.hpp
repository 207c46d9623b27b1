#pragma once

#include <cmath>
#include <complex>

namespace oss {

using cdouble = std::complex<double>;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline double cross2(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot2(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(Vec3 v, double s) { return s * v; }
inline Vec3 operator-(Vec3 v) { return {-v.x, -v.y, -v.z}; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(Vec3 v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

/// Complex 3-component field vector (Cartesian Ex, Ey, Ez).
struct CVec3 {
    cdouble x{0.0, 0.0};
    cdouble y{0.0, 0.0};
    cdouble z{0.0, 0.0};
};

inline CVec3 operator+(const CVec3& a, const CVec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}
inline CVec3 operator-(const CVec3& a, const CVec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}
inline CVec3 operator*(cdouble s, const CVec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline CVec3 operator*(cdouble s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }

inline double norm_sq(const CVec3& v) {
    return std::norm(v.x) + std::norm(v.y) + std::norm(v.z);
}
inline double norm(const CVec3& v) { return std::sqrt(norm_sq(v)); }

/// Projection of a complex field onto a real unit vector.
inline cdouble dot(const CVec3& e, Vec3 u) { return e.x * u.x + e.y * u.y + e.z * u.z; }

}  // namespace oss
