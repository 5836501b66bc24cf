#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evkit/errors.hpp"
#include "evkit/geometry.hpp"

namespace evkit {

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
};

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
};

struct ProjectedPoint {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
    bool valid = false; // depth > z_near
};

struct ScreenPoint {
    double u = 0.0;
    double v = 0.0;
};

struct ScreenTriangle {
    ScreenPoint a, b, c;
};

struct BinaryMask {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<std::uint8_t> values; // row-major, 0 or 1

    std::uint8_t& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
    std::uint8_t at(std::size_t y, std::size_t x) const { return values[y * width + x]; }
    bool operator==(const BinaryMask&) const = default;
};

BinaryMask make_empty_mask(std::uint16_t width, std::uint16_t height);

// Pinhole projection of camera-frame points: u = fx*X/Z + cx, v = fy*Y/Z + cy.
// Points with Z <= z_near come back with valid == false.
std::vector<ProjectedPoint> project_points(std::span<const Vec3> camera_points,
                                           const CameraIntrinsics& intrinsics,
                                           double z_near = 1e-4);

// A pixel is covered when its center (x + 0.5, y + 0.5) satisfies all three
// boundary-inclusive edge tests. Triangles with exactly zero signed area
// contribute nothing.
BinaryMask rasterize_mask(std::span<const ScreenTriangle> triangles, std::uint16_t width,
                          std::uint16_t height);

// Disc structuring element: offsets with dx^2 + dy^2 <= radius^2.
BinaryMask dilate_mask(const BinaryMask& mask, int radius);

// Transform vertices to the camera frame, project, rasterize (faces with any
// invalid vertex are skipped), dilate. Mask dimensions come from the
// intrinsics.
BinaryMask make_dynamic_mask(const TriangleMesh& mesh, const RigidTransform& world_to_camera,
                             const CameraIntrinsics& intrinsics, int dilation_radius = 2);

} // namespace evkit
