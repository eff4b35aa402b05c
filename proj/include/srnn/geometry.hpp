#pragma once

#include <algorithm>
#include <cmath>

namespace srnn {

// Pinhole camera parameters. f is the focal length in pixels,
// (cx, cy) the principal point.
struct CameraIntrinsics {
    double f = 420.0;
    double cx = 0.0;
    double cy = 0.0;
};

// One image-plane measurement: column u, row v, and the depth of the
// observed point (distance from the camera plane, scene length units).
struct Pixel {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Point3& operator+=(const Point3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    double dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// Axis-aligned bounding box in pixel coordinates.
struct Box2 {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool valid() const { return x_min < x_max && y_min < y_max; }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double center_u() const { return 0.5 * (x_min + x_max); }
    double center_v() const { return 0.5 * (y_min + y_max); }

    // Smallest box covering both operands.
    Box2 union_with(const Box2& o) const {
        return {std::min(x_min, o.x_min), std::min(y_min, o.y_min),
                std::max(x_max, o.x_max), std::max(y_max, o.y_max)};
    }
};

// Back-projects a pixel with known depth into camera coordinates:
//   x = (u - cx) * z / f,  y = (v - cy) * z / f,  z = depth.
inline Point3 back_project(const Pixel& p, const CameraIntrinsics& k) {
    return {(p.u - k.cx) * p.depth / k.f, (p.v - k.cy) * p.depth / k.f, p.depth};
}

// Forward pinhole map, the inverse of back_project for depth > 0.
inline Pixel project(const Point3& p, const CameraIntrinsics& k) {
    return {k.cx + k.f * p.x / p.z, k.cy + k.f * p.y / p.z, p.z};
}

// Intersection-over-union of two boxes; 0 when disjoint.
inline double iou(const Box2& a, const Box2& b) {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    return inter / (a.area() + b.area() - inter);
}

inline double distance(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

} // namespace srnn
