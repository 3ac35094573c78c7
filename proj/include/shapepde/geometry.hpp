#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace shapepde {

using Vec = Eigen::VectorXd;

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

inline Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

// Analytic catalog of implicit test regions.  Every shape answers membership
// (open region), most answer exact signed distance, boundary sampling and
// corner metadata.  These oracles are the ground truth for the PDE studies.

struct Ball {
    Vec center;
    double radius = 1.0;
};

struct BoxShape {
    Vec lo, hi;
};

// Simple polygon, vertices in counter-clockwise order.
struct Polygon2D {
    std::vector<Vec> vertices;
};

// Open halfspace {x : (normal, x) < offset}; outward normal is `normal`.
struct Halfspace {
    Vec normal;  // unit
    double offset = 0.0;
};

// {x : 0 < x1 < extent, 0 < x2 < x1^(1+alpha)} with the cusp apex at the origin.
struct Cusp2D {
    double alpha = 1.0;
    double extent = 1.0;
};

struct Shape;

struct UnionShape {
    std::vector<Shape> members;
};

struct Shape {
    std::variant<Ball, BoxShape, Polygon2D, Halfspace, Cusp2D, UnionShape> kind;
    int dim = 0;

    Shape() = default;
    Shape(Ball b);
    Shape(BoxShape b);
    Shape(Polygon2D p);
    Shape(Halfspace h);
    Shape(Cusp2D c);
    Shape(UnionShape u);
};

Shape make_ball(const Vec& center, double radius);
Shape make_box(const Vec& lo, const Vec& hi);
Shape make_polygon(std::vector<Vec> vertices);
Shape make_halfspace(const Vec& normal, double offset);
Shape make_cusp(double alpha, double extent);
Shape make_union(std::vector<Shape> members);

// Corner of a piecewise-smooth 2-D boundary.  n1/n2 are the one-sided outward
// normal limits; the angle between n1 and n2 equals |pi - phi| (phi measured
// inside the region).
struct CornerInfo {
    Vec point;
    double phi = 0.0;  // inner angle in (0, 2*pi)
    Vec n1, n2;
};

struct BoundarySample {
    Vec point;
    Vec normal;     // outward unit normal
    double weight;  // surface measure carried by this sample
};

bool contains(const Shape& shape, const Vec& x);

// Negative inside, positive outside, zero on the boundary.  cusp2d falls back
// to a brute-force boundary sampling.
double signed_distance_exact(const Shape& shape, const Vec& x);

// m >= 8 samples; weights sum to the boundary measure for ball/box/polygon.
std::vector<BoundarySample> sample_boundary(const Shape& shape, int m);

// Non-smooth boundary vertices with inner angles; empty for smooth shapes.
std::vector<CornerInfo> corners(const Shape& shape);

// Axis-aligned bounding box (used by rasterizers and probe generators).
void bounding_box(const Shape& shape, Vec& lo, Vec& hi);

// Rotate a 2-D shape about the origin (tests rotation equivariance).
Shape rotate2d(const Shape& shape, double angle);

}  // namespace shapepde
