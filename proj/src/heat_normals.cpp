#include "shapepde/heat_normals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shapepde/quadrature.hpp"

namespace shapepde {

namespace {

constexpr double kPi = std::numbers::pi;

// sphere area S_(N-1) in R^N; S_0 = 2 by convention
double unit_sphere_area(int n) {
    if (n == 1) return 2.0;
    if (n == 2) return 2.0 * kPi;
    if (n == 3) return 4.0 * kPi;
    return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
}

// Membership test specialized to avoid Eigen temporaries in the hot lattice
// loops (grad_h performs up to ~1e8 of these).
struct FastContains {
    const Shape& shape;

    bool operator()(const double* x, int d) const {
        return test(shape, x, d);
    }

    static bool test(const Shape& s, const double* x, int d) {
        if (const auto* b = std::get_if<Ball>(&s.kind)) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) {
                double diff = x[i] - b->center(i);
                acc += diff * diff;
            }
            return acc < b->radius * b->radius;
        }
        if (const auto* bx = std::get_if<BoxShape>(&s.kind)) {
            for (int i = 0; i < d; ++i)
                if (!(x[i] > bx->lo(i) && x[i] < bx->hi(i))) return false;
            return true;
        }
        if (const auto* h = std::get_if<Halfspace>(&s.kind)) {
            double acc = 0.0;
            for (int i = 0; i < d; ++i) acc += h->normal(i) * x[i];
            return acc < h->offset;
        }
        if (const auto* c = std::get_if<Cusp2D>(&s.kind)) {
            return x[0] > 0.0 && x[0] < c->extent && x[1] > 0.0 &&
                   x[1] < std::pow(x[0], 1.0 + c->alpha);
        }
        if (const auto* u = std::get_if<UnionShape>(&s.kind)) {
            for (const auto& m : u->members)
                if (test(m, x, d)) return true;
            return false;
        }
        // polygon: scalar ray casting
        const auto& p = std::get<Polygon2D>(s.kind);
        bool inside = false;
        const size_t n = p.vertices.size();
        for (size_t i = 0; i < n; ++i) {
            const Vec& a = p.vertices[i];
            const Vec& b2 = p.vertices[(i + 1) % n];
            if ((a(1) > x[1]) != (b2(1) > x[1])) {
                double t = (x[1] - a(1)) / (b2(1) - a(1));
                if (x[0] < a(0) + t * (b2(0) - a(0))) inside = !inside;
            }
        }
        return inside;
    }
};

// --- exact angular integration over unions of circle arcs ------------------

struct Arc {
    double lo, hi;  // hi > lo, hi - lo <= 2*pi
};

double wrap(double a) {
    a = std::fmod(a, 2.0 * kPi);
    return a < 0.0 ? a + 2.0 * kPi : a;
}

// Intersect the running arc with the open halfplane arc centered at `center`
// (halfwidth pi/2).  Arcs stay connected because halfplane cones are convex.
bool intersect_halfplane_arc(Arc& arc, double center) {
    double lo2 = center - 0.5 * kPi, hi2 = center + 0.5 * kPi;
    double best_lo = 0.0, best_hi = -1.0;
    for (int k = -1; k <= 1; ++k) {
        double lo = std::max(arc.lo, lo2 + 2.0 * kPi * k);
        double hi = std::min(arc.hi, hi2 + 2.0 * kPi * k);
        if (hi - lo > best_hi - best_lo) {
            best_lo = lo;
            best_hi = hi;
        }
    }
    if (best_hi <= best_lo) return false;
    arc = {best_lo, best_hi};
    return true;
}

std::vector<Arc> merge_arcs(std::vector<Arc> arcs) {
    // normalize to [0, 2pi), split wrap-around arcs
    std::vector<Arc> flat;
    for (const Arc& a : arcs) {
        double lo = wrap(a.lo);
        double len = a.hi - a.lo;
        if (len >= 2.0 * kPi - 1e-15) return {{0.0, 2.0 * kPi}};
        double hi = lo + len;
        if (hi <= 2.0 * kPi) {
            flat.push_back({lo, hi});
        } else {
            flat.push_back({lo, 2.0 * kPi});
            flat.push_back({0.0, hi - 2.0 * kPi});
        }
    }
    std::sort(flat.begin(), flat.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
    std::vector<Arc> out;
    for (const Arc& a : flat) {
        if (!out.empty() && a.lo <= out.back().hi + 1e-14)
            out.back().hi = std::max(out.back().hi, a.hi);
        else
            out.push_back(a);
    }
    // join across the 0/2pi seam
    if (out.size() > 1 && out.front().lo <= 1e-14 && out.back().hi >= 2.0 * kPi - 1e-14) {
        out.front().lo = out.back().lo - 2.0 * kPi;
        out.pop_back();
    }
    return out;
}

// int over arcs of (cos th, sin th) dth
Eigen::Vector2d arc_direction_integral(const std::vector<Arc>& arcs) {
    Eigen::Vector2d s = Eigen::Vector2d::Zero();
    for (const Arc& a : arcs) {
        s(0) += std::sin(a.hi) - std::sin(a.lo);
        s(1) += std::cos(a.lo) - std::cos(a.hi);
    }
    return s;
}

std::vector<Arc> group_arcs_2d(const std::vector<Vec>& group) {
    if (group.empty()) return {{0.0, 2.0 * kPi}};
    // seed with the first constraint's halfplane arc; intersections of
    // halfplane arcs stay connected, so the k-shift intersection is safe
    double c0 = std::atan2(group.front()(1), group.front()(0));
    Arc arc{c0 - 0.5 * kPi, c0 + 0.5 * kPi};
    for (size_t i = 1; i < group.size(); ++i) {
        double center = std::atan2(group[i](1), group[i](0));
        if (!intersect_halfplane_arc(arc, center)) return {};
    }
    return {arc};
}

// Angular content of one wall of a 3-D intersection cone: directions in the
// plane normal to g_i that satisfy the remaining constraints.
double wall_angle_3d(const std::vector<Vec>& group, size_t i) {
    Vec gi = group[i].normalized();
    // orthonormal in-plane basis
    Vec seed = std::abs(gi(0)) < 0.9 ? vec3(1, 0, 0) : vec3(0, 1, 0);
    Vec e1 = (seed - seed.dot(gi) * gi).normalized();
    Vec e2(3);
    e2 << gi(1) * e1(2) - gi(2) * e1(1), gi(2) * e1(0) - gi(0) * e1(2),
        gi(0) * e1(1) - gi(1) * e1(0);
    bool seeded = false;
    Arc arc{0.0, 2.0 * kPi};
    for (size_t j = 0; j < group.size(); ++j) {
        if (j == i) continue;
        double cx = group[j].dot(e1), cy = group[j].dot(e2);
        double nrm = std::hypot(cx, cy);
        if (nrm < 1e-13)
            throw std::invalid_argument("cone wall: coplanar gradients violate (C2)");
        double center = std::atan2(cy, cx);
        if (!seeded) {
            arc = {center - 0.5 * kPi, center + 0.5 * kPi};
            seeded = true;
        } else if (!intersect_halfplane_arc(arc, center)) {
            return 0.0;
        }
    }
    return arc.hi - arc.lo;
}

}  // namespace

Kernel gaussian_kernel(int dim, double D) {
    if (D <= 0.0) throw std::invalid_argument("gaussian kernel needs D > 0");
    double norm = std::pow(4.0 * kPi * D, -0.5 * dim);
    Kernel k;
    k.kappa = [norm, D](double r) { return norm * std::exp(-r / (4.0 * D)); };
    k.kappa_prime = [norm, D](double r) { return -norm / (4.0 * D) * std::exp(-r / (4.0 * D)); };
    k.label = "gaussian(D=" + std::to_string(D) + ",N=" + std::to_string(dim) + ")";
    k.gaussian_diffusivity = D;
    return k;
}

Kernel tent_kernel() {
    Kernel k;
    k.kappa = [](double r) { return std::max(0.0, 1.0 - r); };
    k.kappa_prime = [](double r) { return r < 1.0 ? -1.0 : 0.0; };
    k.label = "tent";
    k.support_radius = 1.0;  // kappa(r^2) vanishes for |z| >= 1
    return k;
}

Kernel slow_decay_kernel() {
    Kernel k;
    k.kappa = [](double r) { return 1.0 / (1.0 + r); };
    k.kappa_prime = [](double r) { return -1.0 / ((1.0 + r) * (1.0 + r)); };
    k.label = "slow_decay";
    return k;
}

double default_truncation(const Kernel& kernel, double t) {
    if (kernel.gaussian_diffusivity)
        return std::sqrt(3.0 * *kernel.gaussian_diffusivity * std::log(1.0 / t));
    if (kernel.support_radius) return *kernel.support_radius + 1.0;
    throw std::invalid_argument("kernel '" + kernel.label + "' needs an explicit truncation radius");
}

double xi_smooth(const Kernel& kernel, int N) {
    if (N < 2) throw std::invalid_argument("xi_smooth needs N >= 2");
    auto f = [&](double r) { return kernel.kappa(r * r) * (N == 2 ? 1.0 : std::pow(r, N - 2)); };
    TailIntegral integral = integrate_to_infinity(f);
    if (!integral.converged) throw std::runtime_error("xi_smooth: kernel integral diverges");
    return unit_sphere_area(N - 1) * integral.value;
}

double kappa_radial_integral(const Kernel& kernel) {
    auto f = [&](double r) { return kernel.kappa(r * r); };
    TailIntegral integral = integrate_to_infinity(f);
    if (!integral.converged) throw std::runtime_error("kernel radial integral diverges");
    return integral.value;
}

Vec grad_h(const Shape& shape, const Kernel& kernel, double t, const Vec& x, double R, int quad) {
    if (!(t > 0.0) || !(R > 0.0)) throw std::invalid_argument("grad_h needs t > 0 and R > 0");
    if (quad < 64) throw std::invalid_argument("grad_h needs quad >= 64 points per axis");
    const int d = shape.dim;
    if (x.size() != d) throw std::invalid_argument("grad_h: point/shape dimension mismatch");
    const double st = std::sqrt(t);
    PanelRule rule = gauss2_panels(-R, R, quad % 2 == 0 ? quad : quad + 1);
    const int npts = static_cast<int>(rule.nodes.size());
    const auto& kp = kernel.kappa_prime;
    FastContains inside{shape};

    Vec acc = Vec::Zero(d);
    double p[3] = {0, 0, 0};
    if (d == 1) {
        for (int i = 0; i < npts; ++i) {
            double z = rule.nodes[i];
            p[0] = x(0) + st * z;
            if (inside(p, 1)) acc(0) += rule.weights[i] * z * kp(z * z);
        }
    } else if (d == 2) {
        for (int i = 0; i < npts; ++i) {
            const double zi = rule.nodes[i], wi = rule.weights[i];
            p[0] = x(0) + st * zi;
            double a0 = 0.0, a1 = 0.0;
            for (int j = 0; j < npts; ++j) {
                const double zj = rule.nodes[j];
                p[1] = x(1) + st * zj;
                if (inside(p, 2)) {
                    double w = rule.weights[j] * kp(zi * zi + zj * zj);
                    a0 += w * zi;
                    a1 += w * zj;
                }
            }
            acc(0) += wi * a0;
            acc(1) += wi * a1;
        }
    } else if (d == 3) {
        for (int i = 0; i < npts; ++i) {
            const double zi = rule.nodes[i], wi = rule.weights[i];
            p[0] = x(0) + st * zi;
            for (int j = 0; j < npts; ++j) {
                const double zj = rule.nodes[j], wj = rule.weights[j];
                p[1] = x(1) + st * zj;
                const double rij = zi * zi + zj * zj;
                double a0 = 0.0, a1 = 0.0, a2 = 0.0;
                for (int k = 0; k < npts; ++k) {
                    const double zk = rule.nodes[k];
                    p[2] = x(2) + st * zk;
                    if (inside(p, 3)) {
                        double w = rule.weights[k] * kp(rij + zk * zk);
                        a0 += w * zi;
                        a1 += w * zj;
                        a2 += w * zk;
                    }
                }
                acc(0) += wi * wj * a0;
                acc(1) += wi * wj * a1;
                acc(2) += wi * wj * a2;
            }
        }
    } else {
        throw std::invalid_argument("grad_h supports dimensions 1-3");
    }
    return -2.0 / st * acc;
}

AdmissibilityReport kernel_admissibility(const Kernel& kernel, int N) {
    AdmissibilityReport rep;
    const double sphere = unit_sphere_area(N);
    auto f1 = [&](double r) { return std::abs(kernel.kappa(r * r)) * std::pow(r, N - 1); };
    auto f2 = [&](double r) { return r * std::abs(kernel.kappa_prime(r * r)) * std::pow(r, N - 1); };
    TailIntegral i1 = integrate_to_infinity(f1);
    TailIntegral i2 = integrate_to_infinity(f2);
    rep.kappa1_ok = i1.converged;
    rep.kappa2_ok = i2.converged;
    rep.int_abs_kappa = sphere * i1.value;
    rep.int_norm_kappa_prime = sphere * i2.value;
    const double rs[3] = {10.0, 30.0, 100.0};
    const double scale = std::max(1.0, std::abs(kernel.kappa(0.0)));
    bool tails = true;
    for (int i = 0; i < 3; ++i) {
        rep.tail_kappa[i] = kernel.kappa(rs[i]);
        rep.tail_rkprime[i] = rs[i] * kernel.kappa_prime(rs[i] * rs[i]);
    }
    tails = std::abs(rep.tail_kappa[2]) <= 1e-6 * scale && std::abs(rep.tail_rkprime[2]) <= 1e-6 * scale;
    rep.tails_ok = tails;
    return rep;
}

Cone make_cone(Vec apex, std::vector<std::vector<Vec>> groups) {
    Cone cone;
    cone.apex = std::move(apex);
    cone.dim = static_cast<int>(cone.apex.size());
    cone.groups = std::move(groups);
    std::vector<Vec> all;
    for (auto& group : cone.groups) {
        for (auto& g : group) {
            if (g.size() != cone.apex.size())
                throw std::invalid_argument("cone gradient dimension mismatch");
            double n = g.norm();
            if (n < 1e-300) throw std::invalid_argument("cone gradients must be nonzero");
            g /= n;
            all.push_back(g);
        }
        // (C2): pairwise linear independence inside a group
        for (size_t i = 0; i < group.size(); ++i)
            for (size_t j = i + 1; j < group.size(); ++j) {
                double c = std::abs(group[i].dot(group[j]));
                if (c > 1.0 - 1e-12)
                    throw std::invalid_argument("inadmissible cone: (C2) gradients not independent");
            }
    }
    if (all.empty()) return cone;  // empty cone is allowed
    // (C1): find an ascent direction by perceptron iteration, then assert it.
    Vec ell = Vec::Zero(cone.dim);
    for (const Vec& g : all) ell += g;
    for (int it = 0; it < 20000; ++it) {
        double worst = std::numeric_limits<double>::infinity();
        const Vec* bad = nullptr;
        for (const Vec& g : all) {
            double s = g.dot(ell);
            if (s < worst) {
                worst = s;
                bad = &g;
            }
        }
        if (worst > 1e-9 * std::max(1.0, ell.norm())) break;
        ell += *bad;
        if (it == 19999)
            throw std::invalid_argument("inadmissible cone: no common ascent direction (C1)");
    }
    return cone;
}

Cone cone_from_corner(const CornerInfo& corner) {
    Vec g1 = -corner.n1, g2 = -corner.n2;
    if (corner.phi < kPi)
        return make_cone(corner.point, {{g1, g2}});
    if (corner.phi > kPi)
        return make_cone(corner.point, {{g1}, {g2}});
    return make_cone(corner.point, {{g1}});
}

Vec cone_main_term(const Cone& cone, const Kernel& kernel, int N) {
    if (cone.dim != 0 && cone.dim != N) throw std::invalid_argument("cone dimension mismatch");
    Vec zero = Vec::Zero(N);
    if (cone.groups.empty()) return zero;

    auto fr = [&](double r) { return kernel.kappa(r * r) * (N == 2 ? 1.0 : std::pow(r, N - 2)); };
    TailIntegral radial = integrate_to_infinity(fr);
    if (!radial.converged) throw std::runtime_error("cone_main_term: kernel integral diverges");

    // v = -((N-1)/2) * radial * int_{C cap S^(N-1)} omega dOmega (exact parts
    // integration in r; the angular integral is computed in closed form).
    Vec angular = Vec::Zero(N);
    if (N == 2) {
        std::vector<Arc> arcs;
        for (const auto& group : cone.groups) {
            auto ga = group_arcs_2d(group);
            arcs.insert(arcs.end(), ga.begin(), ga.end());
        }
        Eigen::Vector2d s = arc_direction_integral(merge_arcs(arcs));
        angular << s(0), s(1);
    } else if (N == 3) {
        if (cone.groups.size() != 1)
            throw std::invalid_argument("cone_main_term: 3-D unions of groups not supported");
        const auto& group = cone.groups.front();
        if (group.empty()) {
            // full space: odd integrand, zero by symmetry
            return zero;
        }
        // Gauss: the sphere patch integral equals the sum of wall-sector areas
        // times the wall plane normals.
        for (size_t i = 0; i < group.size(); ++i)
            angular += group[i] * (0.5 * wall_angle_3d(group, i));
    } else {
        throw std::invalid_argument("cone_main_term supports N = 2 or 3");
    }
    return -0.5 * (N - 1) * radial.value * angular;
}

CornerPrediction corner_prediction_2d(const Kernel& kernel, const CornerInfo& corner) {
    if (!(corner.phi > 0.0 && corner.phi < 2.0 * kPi))
        throw std::invalid_argument("corner_prediction_2d: phi must lie in (0, 2*pi)");
    Vec sum = corner.n1 + corner.n2;
    double n = sum.norm();
    if (n == 0.0) throw std::invalid_argument("corner_prediction_2d: degenerate one-sided normals");
    CornerPrediction pred;
    pred.direction = sum / n;
    pred.xi_p = 2.0 * std::sin(0.5 * corner.phi) * kappa_radial_integral(kernel);
    return pred;
}

Vec normal_at(const Shape& shape, const Vec& x) {
    if (const auto* b = std::get_if<Ball>(&shape.kind)) {
        Vec n = x - b->center;
        double len = n.norm();
        if (len < 1e-300) throw std::invalid_argument("normal_at: center of ball");
        return n / len;
    }
    if (const auto* h = std::get_if<Halfspace>(&shape.kind)) return h->normal;
    const double step = 1e-5;
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp(i) += step;
        xm(i) -= step;
        g(i) = (signed_distance_exact(shape, xp) - signed_distance_exact(shape, xm)) / (2.0 * step);
    }
    double len = g.norm();
    if (len < 1e-12) throw std::runtime_error("normal_at: vanishing distance gradient");
    return g / len;
}

std::vector<AsymptoteRow> smooth_asymptote_check(const Shape& shape, const Kernel& kernel,
                                                 std::vector<double> ts,
                                                 const std::vector<Vec>& points, int quad) {
    std::sort(ts.begin(), ts.end());
    const double xi = xi_smooth(kernel, shape.dim);
    std::vector<AsymptoteRow> rows;
    rows.reserve(ts.size() * points.size());
    for (double t : ts) {
        const double R = default_truncation(kernel, t);
        for (const Vec& x : points) {
            AsymptoteRow row;
            row.t = t;
            row.x = x;
            row.grad = grad_h(shape, kernel, t, x, R, quad);
            double mag = row.grad.norm();
            row.mag_scaled = std::sqrt(t) * mag / xi;
            Vec minus_n = -normal_at(shape, x);
            double c = mag > 0.0 ? std::clamp(row.grad.dot(minus_n) / mag, -1.0, 1.0) : 1.0;
            row.angle_deg = std::acos(c) * 180.0 / kPi;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace shapepde
