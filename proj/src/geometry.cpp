#include "shapepde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shapepde {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dim(const Shape& s, const Vec& x) {
    if (x.size() != s.dim)
        throw std::invalid_argument("point dimension " + std::to_string(x.size()) +
                                    " does not match shape dimension " + std::to_string(s.dim));
}

double cross2(const Vec& a, const Vec& b) { return a(0) * b(1) - a(1) * b(0); }

// Outward normal of a CCW polygon edge a->b: rotate the tangent by -pi/2.
Vec edge_normal(const Vec& a, const Vec& b) {
    Vec t = (b - a).normalized();
    return vec2(t(1), -t(0));
}

double polygon_signed_area(const std::vector<Vec>& v) {
    double s = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec& a = v[i];
        const Vec& b = v[(i + 1) % v.size()];
        s += cross2(a, b);
    }
    return 0.5 * s;
}

bool polygon_contains(const Polygon2D& p, const Vec& x) {
    // Ray casting along +x.
    bool inside = false;
    const size_t n = p.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec& a = p.vertices[i];
        const Vec& b = p.vertices[(i + 1) % n];
        const bool crosses = (a(1) > x(1)) != (b(1) > x(1));
        if (crosses) {
            double t = (x(1) - a(1)) / (b(1) - a(1));
            double xi = a(0) + t * (b(0) - a(0));
            if (x(0) < xi) inside = !inside;
        }
    }
    return inside;
}

double point_segment_distance(const Vec& x, const Vec& a, const Vec& b) {
    Vec ab = b - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (x - (a + t * ab)).norm();
}

double box_signed_distance(const BoxShape& b, const Vec& x) {
    const int d = static_cast<int>(x.size());
    Vec center = 0.5 * (b.lo + b.hi);
    Vec half = 0.5 * (b.hi - b.lo);
    Vec q(d);
    for (int i = 0; i < d; ++i) q(i) = std::abs(x(i) - center(i)) - half(i);
    double outside = q.cwiseMax(0.0).norm();
    double inside = std::min(q.maxCoeff(), 0.0);
    return outside + inside;
}

double cusp_boundary_distance(const Cusp2D& c, const Vec& x) {
    // Brute force over a dense boundary polyline: bottom edge, right edge and
    // the curve x2 = x1^(1+alpha).
    const int m = 4000;
    double best = std::numeric_limits<double>::infinity();
    const double top = std::pow(c.extent, 1.0 + c.alpha);
    for (int i = 0; i <= m; ++i) {
        double s = static_cast<double>(i) / m;
        best = std::min(best, (x - vec2(s * c.extent, 0.0)).norm());
        best = std::min(best, (x - vec2(c.extent, s * top)).norm());
        double t = s * c.extent;
        best = std::min(best, (x - vec2(t, std::pow(t, 1.0 + c.alpha))).norm());
    }
    return best;
}

struct DisjointCheck {
    // Conservative separation test through bounding spheres.
    static void assert_disjoint(const std::vector<Shape>& members) {
        std::vector<std::pair<Vec, double>> spheres;
        for (const auto& s : members) {
            Vec lo, hi;
            bounding_box(s, lo, hi);
            spheres.emplace_back(0.5 * (lo + hi), 0.5 * (hi - lo).norm());
        }
        for (size_t i = 0; i < spheres.size(); ++i)
            for (size_t j = i + 1; j < spheres.size(); ++j) {
                double gap = (spheres[i].first - spheres[j].first).norm() -
                             spheres[i].second - spheres[j].second;
                if (gap <= 0.0)
                    throw std::invalid_argument(
                        "union members must have disjoint closures for exact signed distance");
            }
    }
};

}  // namespace

Shape::Shape(Ball b) : kind(std::move(b)), dim(static_cast<int>(std::get<Ball>(kind).center.size())) {}
Shape::Shape(BoxShape b) : kind(std::move(b)), dim(static_cast<int>(std::get<BoxShape>(kind).lo.size())) {}
Shape::Shape(Polygon2D p) : kind(std::move(p)), dim(2) {}
Shape::Shape(Halfspace h) : kind(std::move(h)), dim(static_cast<int>(std::get<Halfspace>(kind).normal.size())) {}
Shape::Shape(Cusp2D c) : kind(std::move(c)), dim(2) {}
Shape::Shape(UnionShape u) : kind(std::move(u)), dim(std::get<UnionShape>(kind).members.empty() ? 0 : std::get<UnionShape>(kind).members.front().dim) {}

Shape make_ball(const Vec& center, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("ball radius must be positive");
    return Shape(Ball{center, radius});
}

Shape make_box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box corner dimensions differ");
    for (int i = 0; i < lo.size(); ++i)
        if (!(lo(i) < hi(i))) throw std::invalid_argument("box requires lo < hi componentwise");
    return Shape(BoxShape{lo, hi});
}

Shape make_polygon(std::vector<Vec> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    if (polygon_signed_area(vertices) <= 0.0)
        throw std::invalid_argument("polygon vertices must be counter-clockwise");
    return Shape(Polygon2D{std::move(vertices)});
}

Shape make_halfspace(const Vec& normal, double offset) {
    double n = normal.norm();
    if (n == 0.0) throw std::invalid_argument("halfspace normal must be nonzero");
    return Shape(Halfspace{normal / n, offset / n});
}

Shape make_cusp(double alpha, double extent) {
    if (alpha <= 0.0 || extent <= 0.0) throw std::invalid_argument("cusp requires alpha, extent > 0");
    return Shape(Cusp2D{alpha, extent});
}

Shape make_union(std::vector<Shape> members) {
    if (members.empty()) throw std::invalid_argument("union needs at least one member");
    for (const auto& m : members)
        if (m.dim != members.front().dim)
            throw std::invalid_argument("union members must share dimension");
    return Shape(UnionShape{std::move(members)});
}

bool contains(const Shape& shape, const Vec& x) {
    require_dim(shape, x);
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Ball>) {
                return (x - s.center).norm() < s.radius;
            } else if constexpr (std::is_same_v<T, BoxShape>) {
                for (int i = 0; i < x.size(); ++i)
                    if (!(x(i) > s.lo(i) && x(i) < s.hi(i))) return false;
                return true;
            } else if constexpr (std::is_same_v<T, Polygon2D>) {
                return polygon_contains(s, x);
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                return s.normal.dot(x) < s.offset;
            } else if constexpr (std::is_same_v<T, Cusp2D>) {
                return x(0) > 0.0 && x(0) < s.extent && x(1) > 0.0 &&
                       x(1) < std::pow(x(0), 1.0 + s.alpha);
            } else {
                for (const auto& m : s.members)
                    if (contains(m, x)) return true;
                return false;
            }
        },
        shape.kind);
}

double signed_distance_exact(const Shape& shape, const Vec& x) {
    require_dim(shape, x);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Ball>) {
                return (x - s.center).norm() - s.radius;
            } else if constexpr (std::is_same_v<T, BoxShape>) {
                return box_signed_distance(s, x);
            } else if constexpr (std::is_same_v<T, Polygon2D>) {
                double d = std::numeric_limits<double>::infinity();
                const size_t n = s.vertices.size();
                for (size_t i = 0; i < n; ++i)
                    d = std::min(d, point_segment_distance(x, s.vertices[i], s.vertices[(i + 1) % n]));
                return polygon_contains(s, x) ? -d : d;
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                return s.normal.dot(x) - s.offset;
            } else if constexpr (std::is_same_v<T, Cusp2D>) {
                double d = cusp_boundary_distance(s, x);
                return contains(Shape(s), x) ? -d : d;
            } else {
                DisjointCheck::assert_disjoint(s.members);
                double d = std::numeric_limits<double>::infinity();
                for (const auto& m : s.members) d = std::min(d, signed_distance_exact(m, x));
                return d;
            }
        },
        shape.kind);
}

namespace {

std::vector<BoundarySample> sample_circle(const Ball& b, int m) {
    std::vector<BoundarySample> out;
    out.reserve(m);
    double w = 2.0 * kPi * b.radius / m;
    for (int k = 0; k < m; ++k) {
        double th = 2.0 * kPi * (k + 0.5) / m;
        Vec n = vec2(std::cos(th), std::sin(th));
        out.push_back({b.center + b.radius * n, n, w});
    }
    return out;
}

std::vector<BoundarySample> sample_sphere(const Ball& b, int m) {
    // Fibonacci lattice; equal weights make the total area exact.
    std::vector<BoundarySample> out;
    out.reserve(m);
    const double area = 4.0 * kPi * b.radius * b.radius;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < m; ++k) {
        double z = 1.0 - 2.0 * (k + 0.5) / m;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double th = golden * k;
        Vec n = vec3(r * std::cos(th), r * std::sin(th), z);
        out.push_back({b.center + b.radius * n, n, area / m});
    }
    return out;
}

void sample_segment(std::vector<BoundarySample>& out, const Vec& a, const Vec& b, const Vec& n,
                    int count) {
    double w = (b - a).norm() / count;
    for (int k = 0; k < count; ++k) {
        double t = (k + 0.5) / count;
        out.push_back({a + t * (b - a), n, w});
    }
}

std::vector<BoundarySample> sample_polyline(const std::vector<Vec>& v, int m) {
    double total = 0.0;
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) total += (v[(i + 1) % n] - v[i]).norm();
    std::vector<BoundarySample> out;
    for (size_t i = 0; i < n; ++i) {
        const Vec& a = v[i];
        const Vec& b = v[(i + 1) % n];
        double len = (b - a).norm();
        int count = std::max(1, static_cast<int>(std::lround(m * len / total)));
        sample_segment(out, a, b, edge_normal(a, b), count);
    }
    return out;
}

std::vector<BoundarySample> sample_box(const BoxShape& bx, int m) {
    const int d = static_cast<int>(bx.lo.size());
    if (d == 1) {
        return {{bx.lo, -Vec::Ones(1), 1.0}, {bx.hi, Vec::Ones(1), 1.0}};
    }
    if (d == 2) {
        std::vector<Vec> corners = {vec2(bx.lo(0), bx.lo(1)), vec2(bx.hi(0), bx.lo(1)),
                                    vec2(bx.hi(0), bx.hi(1)), vec2(bx.lo(0), bx.hi(1))};
        return sample_polyline(corners, m);
    }
    // 3-D: per-face midpoint lattices.
    std::vector<BoundarySample> out;
    Vec ext = bx.hi - bx.lo;
    int per_axis = std::max(2, static_cast<int>(std::lround(std::sqrt(m / 6.0))));
    for (int axis = 0; axis < 3; ++axis) {
        int u = (axis + 1) % 3, v = (axis + 2) % 3;
        double cell = ext(u) * ext(v) / (per_axis * per_axis);
        for (int side = 0; side < 2; ++side) {
            Vec normal = Vec::Zero(3);
            normal(axis) = side ? 1.0 : -1.0;
            for (int i = 0; i < per_axis; ++i)
                for (int j = 0; j < per_axis; ++j) {
                    Vec p(3);
                    p(axis) = side ? bx.hi(axis) : bx.lo(axis);
                    p(u) = bx.lo(u) + (i + 0.5) / per_axis * ext(u);
                    p(v) = bx.lo(v) + (j + 0.5) / per_axis * ext(v);
                    out.push_back({p, normal, cell});
                }
        }
    }
    return out;
}

std::vector<BoundarySample> sample_cusp(const Cusp2D& c, int m) {
    std::vector<BoundarySample> out;
    const double top = std::pow(c.extent, 1.0 + c.alpha);
    sample_segment(out, vec2(0, 0), vec2(c.extent, 0), vec2(0, -1), m / 3 + 1);
    sample_segment(out, vec2(c.extent, 0), vec2(c.extent, top), vec2(1, 0), m / 3 + 1);
    // curved top: arclength-weighted samples, outward normal from the curve tangent
    int k = m / 3 + 1;
    for (int i = 0; i < k; ++i) {
        double t0 = c.extent * i / k, t1 = c.extent * (i + 1) / k;
        double tm = 0.5 * (t0 + t1);
        Vec a = vec2(t0, std::pow(t0, 1.0 + c.alpha));
        Vec b = vec2(t1, std::pow(t1, 1.0 + c.alpha));
        Vec tangent = vec2(-1.0, -(1.0 + c.alpha) * std::pow(tm, c.alpha)).normalized();
        out.push_back({vec2(tm, std::pow(tm, 1.0 + c.alpha)), vec2(tangent(1), -tangent(0)),
                       (b - a).norm()});
    }
    return out;
}

}  // namespace

std::vector<BoundarySample> sample_boundary(const Shape& shape, int m) {
    if (m < 8) throw std::invalid_argument("sample_boundary needs m >= 8");
    return std::visit(
        [&](const auto& s) -> std::vector<BoundarySample> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Ball>) {
                return s.center.size() == 2 ? sample_circle(s, m) : sample_sphere(s, m);
            } else if constexpr (std::is_same_v<T, BoxShape>) {
                return sample_box(s, m);
            } else if constexpr (std::is_same_v<T, Polygon2D>) {
                return sample_polyline(s.vertices, m);
            } else if constexpr (std::is_same_v<T, Cusp2D>) {
                return sample_cusp(s, m);
            } else if constexpr (std::is_same_v<T, UnionShape>) {
                std::vector<BoundarySample> out;
                for (const auto& member : s.members) {
                    auto part = sample_boundary(member, std::max(8, m / static_cast<int>(s.members.size())));
                    out.insert(out.end(), part.begin(), part.end());
                }
                return out;
            } else {
                throw std::invalid_argument("sample_boundary: unbounded boundary");
            }
        },
        shape.kind);
}

std::vector<CornerInfo> corners(const Shape& shape) {
    return std::visit(
        [&](const auto& s) -> std::vector<CornerInfo> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Polygon2D>) {
                std::vector<CornerInfo> out;
                const size_t n = s.vertices.size();
                for (size_t i = 0; i < n; ++i) {
                    const Vec& prev = s.vertices[(i + n - 1) % n];
                    const Vec& cur = s.vertices[i];
                    const Vec& next = s.vertices[(i + 1) % n];
                    Vec t1 = (cur - prev).normalized();
                    Vec t2 = (next - cur).normalized();
                    double turn = std::atan2(cross2(t1, t2), t1.dot(t2));
                    double phi = kPi - turn;
                    if (std::abs(phi - kPi) < 1e-12) continue;  // straight: smooth point
                    out.push_back({cur, phi, edge_normal(prev, cur), edge_normal(cur, next)});
                }
                return out;
            } else if constexpr (std::is_same_v<T, BoxShape>) {
                if (s.lo.size() != 2) return {};
                std::vector<Vec> v = {vec2(s.lo(0), s.lo(1)), vec2(s.hi(0), s.lo(1)),
                                      vec2(s.hi(0), s.hi(1)), vec2(s.lo(0), s.hi(1))};
                return corners(make_polygon(v));
            } else if constexpr (std::is_same_v<T, Cusp2D>) {
                // Only the apex is exposed; one-sided normals of the two branches.
                CornerInfo c;
                c.point = vec2(0.0, 0.0);
                c.phi = 0.0;  // cusp: vanishing inner angle
                c.n1 = vec2(0.0, -1.0);
                c.n2 = vec2(0.0, 1.0);
                return {c};
            } else if constexpr (std::is_same_v<T, UnionShape>) {
                std::vector<CornerInfo> out;
                for (const auto& m : s.members) {
                    auto part = corners(m);
                    out.insert(out.end(), part.begin(), part.end());
                }
                return out;
            } else {
                return {};
            }
        },
        shape.kind);
}

void bounding_box(const Shape& shape, Vec& lo, Vec& hi) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Ball>) {
                lo = s.center.array() - s.radius;
                hi = s.center.array() + s.radius;
            } else if constexpr (std::is_same_v<T, BoxShape>) {
                lo = s.lo;
                hi = s.hi;
            } else if constexpr (std::is_same_v<T, Polygon2D>) {
                lo = s.vertices.front();
                hi = s.vertices.front();
                for (const auto& v : s.vertices) {
                    lo = lo.cwiseMin(v);
                    hi = hi.cwiseMax(v);
                }
            } else if constexpr (std::is_same_v<T, Cusp2D>) {
                lo = vec2(0.0, 0.0);
                hi = vec2(s.extent, std::pow(s.extent, 1.0 + s.alpha));
            } else if constexpr (std::is_same_v<T, UnionShape>) {
                bounding_box(s.members.front(), lo, hi);
                for (const auto& m : s.members) {
                    Vec l, h;
                    bounding_box(m, l, h);
                    lo = lo.cwiseMin(l);
                    hi = hi.cwiseMax(h);
                }
            } else {
                throw std::invalid_argument("bounding_box: halfspace is unbounded");
            }
        },
        shape.kind);
}

Shape rotate2d(const Shape& shape, double angle) {
    if (shape.dim != 2) throw std::invalid_argument("rotate2d requires a 2-D shape");
    Eigen::Matrix2d q;
    q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return std::visit(
        [&](const auto& s) -> Shape {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Ball>) {
                return make_ball(q * s.center, s.radius);
            } else if constexpr (std::is_same_v<T, Polygon2D>) {
                std::vector<Vec> v;
                v.reserve(s.vertices.size());
                for (const auto& p : s.vertices) v.push_back(q * p);
                return make_polygon(std::move(v));
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                return make_halfspace(q * s.normal, s.offset);
            } else if constexpr (std::is_same_v<T, BoxShape>) {
                std::vector<Vec> v = {vec2(s.lo(0), s.lo(1)), vec2(s.hi(0), s.lo(1)),
                                      vec2(s.hi(0), s.hi(1)), vec2(s.lo(0), s.hi(1))};
                for (auto& p : v) p = q * p;
                return make_polygon(std::move(v));
            } else if constexpr (std::is_same_v<T, UnionShape>) {
                std::vector<Shape> members;
                for (const auto& m : s.members) members.push_back(rotate2d(m, angle));
                return make_union(std::move(members));
            } else {
                throw std::invalid_argument("rotate2d: unsupported shape kind");
            }
        },
        shape.kind);
}

}  // namespace shapepde
