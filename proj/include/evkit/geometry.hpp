#pragma once

#include <array>
#include <cstddef>

namespace evkit {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    bool operator==(const Vec3&) const = default;
};

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double& operator()(std::size_t r, std::size_t c) { return m[r * 3 + c]; }
    double operator()(std::size_t r, std::size_t c) const { return m[r * 3 + c]; }
    bool operator==(const Mat3&) const = default;

    static Mat3 identity() { return {}; }
};

Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& v);
Mat3 transpose(const Mat3& a);
double determinant(const Mat3& a);

// Frobenius norm of (a - b).
double frobenius_distance(const Mat3& a, const Mat3& b);

// R'R == I and det(R) == +1, both within tol (Frobenius / absolute).
bool is_rotation(const Mat3& r, double tol = 1e-6);

struct RigidTransform {
    Mat3 rotation;
    Vec3 translation;

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

} // namespace evkit
