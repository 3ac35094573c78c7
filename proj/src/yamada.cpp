#include "shapepde/yamada.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shapepde {

YamadaSolution solve_normal_field(const Grid& grid, const Shape& shape, double a,
                                  YamadaVariant variant, int supersample, double tol,
                                  Eigen::Index maxit) {
    if (shape.dim != grid.dim()) throw std::invalid_argument("solve_normal_field: dimension mismatch");
    Vec lo, hi;
    bounding_box(shape, lo, hi);
    for (int d = 0; d < grid.dim(); ++d) {
        double margin = 4.0 * grid.h(d);
        if (lo(d) < grid.lo(d) + margin || hi(d) > grid.hi(d) - margin)
            throw std::invalid_argument("solve_normal_field: shape must sit >= 4h inside the box");
    }

    YamadaSolution sol;
    sol.variant = variant;
    sol.a = a;
    sol.shape = shape;
    sol.grid = grid;
    sol.chi = rasterize_indicator(grid, shape, supersample);
    VectorField grad_chi = central_gradient(sol.chi);

    ScalarField c(grid);
    if (variant == YamadaVariant::eq1)
        c.values = (1.0 - sol.chi.values.array()).max(0.0);
    else
        c.values.setOnes();

    sol.s = VectorField(grid);
    ScalarField rhs(grid);
    for (int comp = 0; comp < grid.dim(); ++comp) {
        rhs.values = -grad_chi.values.col(comp);
        auto [u, report] = assemble_and_solve(grid, a, c, rhs, constant_dirichlet(0.0), tol, maxit);
        sol.s.values.col(comp) = u.values;
        sol.reports.push_back(report);
    }
    return sol;
}

std::function<double(const Vec&)> face_bump(const Grid& grid, double inner, double outer) {
    if (!(inner > outer && outer >= 0.0))
        throw std::invalid_argument("face_bump: need inner > outer >= 0");
    Vec lo = grid.lo, hi = grid.hi;
    return [lo, hi, inner, outer](const Vec& x) {
        double m = std::numeric_limits<double>::infinity();
        for (int d = 0; d < x.size(); ++d)
            m = std::min({m, x(d) - lo(d), hi(d) - x(d)});
        double s = std::clamp((m - outer) / (inner - outer), 0.0, 1.0);
        return s * s * (3.0 - 2.0 * s);
    };
}

std::vector<VectorTestFunction> default_test_panel(const Grid& grid, double inner, double outer) {
    auto bump = face_bump(grid, inner, outer);
    const int d = grid.dim();
    std::vector<VectorTestFunction> panel;
    panel.push_back({"const_e1", [bump, d](const Vec& x) {
                         Vec v = Vec::Zero(d);
                         v(0) = bump(x);
                         return v;
                     }});
    panel.push_back({"coordinate", [bump](const Vec& x) { return Vec(bump(x) * x); }});
    panel.push_back({"oscillatory", [bump, d](const Vec& x) {
                         Vec v(d);
                         for (int i = 0; i < d; ++i)
                             v(i) = std::sin(std::numbers::pi * x((i + 1) % d) + 0.5 * i);
                         return Vec(bump(x) * v);
                     }});
    return panel;
}

PairingResult weak_vs_surface_pairing(const YamadaSolution& sol, const VectorTestFunction& phi,
                                      int boundary_samples) {
    const Grid& g = sol.grid;
    const double vol = g.cell_volume();
    double lhs = 0.0;
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        const double region_w =
            sol.variant == YamadaVariant::eq1 ? 1.0 - sol.chi.values(i) : 1.0;
        if (region_w == 0.0) continue;
        Vec p = phi.value(g.node(i));
        double dot = 0.0;
        for (int c = 0; c < g.dim(); ++c) dot += sol.s.values(i, c) * p(c);
        lhs += region_w * dot;
    }
    lhs *= vol;

    double rhs = 0.0;
    for (const auto& bs : sample_boundary(sol.shape, boundary_samples))
        rhs += bs.normal.dot(phi.value(bs.point)) * bs.weight;

    return {lhs, rhs, std::abs(lhs - rhs)};
}

double h1_energy(const YamadaSolution& sol) {
    double acc = 0.0;
    ScalarField comp;
    comp.grid = sol.grid;
    for (int c = 0; c < sol.grid.dim(); ++c) {
        comp.values = sol.s.values.col(c);
        auto norms = discrete_norms(comp);
        acc += norms.h1_semi * norms.h1_semi + norms.l2 * norms.l2;
    }
    return sol.a * std::sqrt(acc);
}

std::vector<TraceDirection> boundary_trace_directions(const YamadaSolution& sol, int m) {
    std::vector<TraceDirection> out;
    for (const auto& bs : sample_boundary(sol.shape, m)) {
        TraceDirection td;
        td.point = bs.point;
        Vec v = interpolate(sol.s, bs.point);
        double n = v.norm();
        td.ok = n > 1e-14;
        td.direction = td.ok ? Vec(v / n) : Vec(Vec::Zero(sol.grid.dim()));
        out.push_back(std::move(td));
    }
    return out;
}

}  // namespace shapepde
