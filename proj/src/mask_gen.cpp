#include "evkit/mask_gen.hpp"

#include <algorithm>
#include <cmath>

namespace evkit {

namespace {

double edge(const ScreenPoint& p0, const ScreenPoint& p1, double px, double py) {
    return (p1.u - p0.u) * (py - p0.v) - (p1.v - p0.v) * (px - p0.u);
}

void check_intrinsics(const CameraIntrinsics& k) {
    if (!(k.fx > 0.0) || !(k.fy > 0.0)) throw InvalidArgument("focal lengths must be > 0");
    if (!(k.cx >= 0.0 && k.cx < k.width) || !(k.cy >= 0.0 && k.cy < k.height)) {
        throw InvalidArgument("principal point outside sensor");
    }
}

} // namespace

BinaryMask make_empty_mask(std::uint16_t width, std::uint16_t height) {
    BinaryMask mask;
    mask.width = width;
    mask.height = height;
    mask.values.assign(std::size_t(width) * height, 0);
    return mask;
}

std::vector<ProjectedPoint> project_points(std::span<const Vec3> camera_points,
                                           const CameraIntrinsics& intrinsics, double z_near) {
    std::vector<ProjectedPoint> out(camera_points.size());
    for (std::size_t i = 0; i < camera_points.size(); ++i) {
        const Vec3& q = camera_points[i];
        ProjectedPoint& pp = out[i];
        pp.depth = q.z;
        if (q.z > z_near) {
            pp.u = intrinsics.fx * q.x / q.z + intrinsics.cx;
            pp.v = intrinsics.fy * q.y / q.z + intrinsics.cy;
            pp.valid = true;
        }
    }
    return out;
}

BinaryMask rasterize_mask(std::span<const ScreenTriangle> triangles, std::uint16_t width,
                          std::uint16_t height) {
    BinaryMask mask = make_empty_mask(width, height);
    for (const ScreenTriangle& tri : triangles) {
        ScreenPoint a = tri.a, b = tri.b, c = tri.c;
        const double area2 = edge(a, b, c.u, c.v);
        if (area2 == 0.0) continue;
        if (area2 < 0.0) std::swap(b, c);

        // Covered pixel centers lie inside the vertex bounding box; the box
        // only trims the scan, the edge tests decide coverage.
        double xl = std::ceil(std::min({a.u, b.u, c.u}) - 0.5);
        double xr = std::floor(std::max({a.u, b.u, c.u}) - 0.5);
        double yl = std::ceil(std::min({a.v, b.v, c.v}) - 0.5);
        double yr = std::floor(std::max({a.v, b.v, c.v}) - 0.5);
        if (!(xl >= 0.0)) xl = 0.0;
        if (!(xr <= width - 1.0)) xr = width - 1.0;
        if (!(yl >= 0.0)) yl = 0.0;
        if (!(yr <= height - 1.0)) yr = height - 1.0;
        if (xl > xr || yl > yr) continue;
        const long x0 = long(xl), x1 = long(xr);
        const long y0 = long(yl), y1 = long(yr);

        for (long y = y0; y <= y1; ++y) {
            const double py = double(y) + 0.5;
            for (long x = x0; x <= x1; ++x) {
                const double px = double(x) + 0.5;
                if (edge(a, b, px, py) >= 0.0 && edge(b, c, px, py) >= 0.0 &&
                    edge(c, a, px, py) >= 0.0) {
                    mask.at(std::size_t(y), std::size_t(x)) = 1;
                }
            }
        }
    }
    return mask;
}

BinaryMask dilate_mask(const BinaryMask& mask, int radius) {
    if (radius < 0) throw InvalidArgument("dilation radius must be >= 0");
    if (mask.values.size() != std::size_t(mask.width) * mask.height) {
        throw ShapeError("mask size does not match width*height");
    }
    BinaryMask out = mask;
    if (radius == 0) return out;

    std::vector<std::pair<int, int>> offsets;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dy, dx);
        }
    }

    for (std::size_t y = 0; y < mask.height; ++y) {
        for (std::size_t x = 0; x < mask.width; ++x) {
            if (!mask.at(y, x)) continue;
            for (const auto& [dy, dx] : offsets) {
                const long ny = long(y) + dy;
                const long nx = long(x) + dx;
                if (ny < 0 || nx < 0 || ny >= long(mask.height) || nx >= long(mask.width))
                    continue;
                out.at(std::size_t(ny), std::size_t(nx)) = 1;
            }
        }
    }
    return out;
}

BinaryMask make_dynamic_mask(const TriangleMesh& mesh, const RigidTransform& world_to_camera,
                             const CameraIntrinsics& intrinsics, int dilation_radius) {
    check_intrinsics(intrinsics);
    if (!is_rotation(world_to_camera.rotation)) {
        throw ValidationError("world_to_camera rotation is not orthonormal");
    }
    for (const auto& f : mesh.faces) {
        for (std::uint32_t idx : f) {
            if (idx >= mesh.vertices.size()) {
                throw ValidationError("face references vertex " + std::to_string(idx) +
                                      " but mesh has " + std::to_string(mesh.vertices.size()) +
                                      " vertices");
            }
        }
    }

    std::vector<Vec3> cam(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        cam[i] = world_to_camera.apply(mesh.vertices[i]);
    }
    const std::vector<ProjectedPoint> proj = project_points(cam, intrinsics);

    std::vector<ScreenTriangle> tris;
    tris.reserve(mesh.faces.size());
    for (const auto& f : mesh.faces) {
        const ProjectedPoint& a = proj[f[0]];
        const ProjectedPoint& b = proj[f[1]];
        const ProjectedPoint& c = proj[f[2]];
        if (!a.valid || !b.valid || !c.valid) continue;
        tris.push_back({{a.u, a.v}, {b.u, b.v}, {c.u, c.v}});
    }
    return dilate_mask(rasterize_mask(tris, intrinsics.width, intrinsics.height),
                       dilation_radius);
}

} // namespace evkit
