#include "shapepde/studies.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "shapepde/distance.hpp"
#include "shapepde/heat_normals.hpp"
#include "shapepde/parallel.hpp"
#include "shapepde/yamada.hpp"

namespace shapepde {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
        out_ << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

struct StudyContext {
    const StudyConfig& cfg;
    fs::path out;
    StudyResult result;
    bool check = false;

    void artifact(const std::string& name) { result.artifacts.push_back(name); }
    void kv(const std::string& key, const std::string& value) {
        result.summary.emplace_back(key, value);
    }
    void kv(const std::string& key, double value) { kv(key, fmt(value)); }
    void require(bool ok, const std::string& what) {
        if (!check || ok) return;
        result.check_failures.push_back(what);
    }
};

double param(const StudyContext& ctx, const std::string& key, double fallback) {
    return ctx.cfg.raw.get_double("params", key, fallback);
}

Kernel kernel_from_config(const StudyContext& ctx, int dim) {
    std::string name = ctx.cfg.raw.get_string("params", "kernel", "gaussian");
    if (name == "gaussian") return gaussian_kernel(dim, param(ctx, "D", 1.0));
    if (name == "tent") return tent_kernel();
    if (name == "slow_decay") return slow_decay_kernel();
    throw ConfigError("unknown kernel '" + name + "'", ctx.cfg.raw.entry("params", "kernel").line);
}

const Shape& require_shape(const StudyContext& ctx) {
    if (!ctx.cfg.shape) throw ConfigError("study '" + ctx.cfg.study + "' needs a [shape] block", 0);
    return *ctx.cfg.shape;
}

const Grid& require_grid(const StudyContext& ctx) {
    if (!ctx.cfg.grid) throw ConfigError("study '" + ctx.cfg.study + "' needs a [grid] block", 0);
    return *ctx.cfg.grid;
}

std::vector<double> require_list(const StudyContext& ctx, const std::string& key) {
    if (!ctx.cfg.raw.has("params", key))
        throw ConfigError("study '" + ctx.cfg.study + "' needs params." + key, 0);
    return ctx.cfg.raw.get_list("params", key);
}

// Grid coupled to the boundary layer: h <= sqrt(a)/4 per axis, odd node count.
Grid coupled_grid(const Grid& box, double a) {
    const double target = std::sqrt(a) / 4.0;
    Eigen::VectorXi n(box.dim());
    for (int d = 0; d < box.dim(); ++d) {
        int cells = static_cast<int>(std::ceil((box.hi(d) - box.lo(d)) / target));
        if (cells % 2 != 0) ++cells;  // odd node count keeps a center node
        n(d) = cells + 1;
    }
    return Grid(box.lo, box.hi, n);
}

void write_summary(StudyContext& ctx) {
    std::ofstream out(ctx.out / "summary.txt");
    out << "study=" << ctx.cfg.study << "\n";
    for (const auto& [k, v] : ctx.result.summary) out << k << "=" << v << "\n";
    if (ctx.check) {
        out << "checks_passed=" << (ctx.result.check_failures.empty() ? "yes" : "no") << "\n";
        for (const auto& f : ctx.result.check_failures) out << "check_failed=" << f << "\n";
    }
    ctx.artifact("summary.txt");
}

// --- distance / signed-distance ---------------------------------------------

// One screened solve of the distance problem at a given a; long double keeps
// the far-field layer values above the round-off floor of the a-sweeps.
struct DistanceSolve {
    Grid grid;
    ScalarFieldT<long double> u;
    ScalarFieldT<long double> chi_a;
    SolveReport report;
    double f_max = 0.0;
};

DistanceSolve solve_distance_problem(const StudyContext& ctx, const Shape& shape, const Grid& box,
                                     double a, double c_star, double g) {
    const bool couple = ctx.cfg.raw.get_int("params", "couple_grid", 1) != 0;
    DistanceSolve ds{couple ? coupled_grid(box, a) : box, {}, {}, {}, 0.0};
    ds.chi_a = rasterize_indicator<long double>(ds.grid, shape, ctx.cfg.supersample);
    ScalarFieldT<long double> c(ds.grid, 1.0L);
    ScalarFieldT<long double> f(ds.grid);
    f.values = c_star * (1.0L - ds.chi_a.values.array());
    ds.f_max = static_cast<double>(f.values.maxCoeff());
    const double tol = param(ctx, "tol", 1e-12);
    auto [u, report] = assemble_and_solve(ds.grid, a, c, f, constant_dirichlet(g), tol);
    ds.u = std::move(u);
    ds.report = report;
    if (ds.report.converged)
        project_to_upper_bound(ds.u, static_cast<long double>(std::max(ds.f_max, g)));
    return ds;
}

// Sup of |p_a - d| over off-grid probes inside A, excluding a 2h collar.
double sup_distance_error(const ExtractResult& res, const Shape& shape, int probes_per_axis) {
    Vec lo, hi;
    bounding_box(shape, lo, hi);
    const double collar = 2.0 * res.values.grid.h.maxCoeff();
    double sup = 0.0;
    for (const Vec& x : probe_lattice(lo, hi, probes_per_axis)) {
        double sdf = signed_distance_exact(shape, x);
        if (sdf > -collar) continue;
        double err = std::abs(interpolate(res.values, x) - (-sdf));
        sup = std::max(sup, err);
    }
    return sup;
}

double sup_signed_error(const ExtractResult& res, const Shape& shape, int probes_per_axis) {
    const Grid& g = res.values.grid;
    double sup = 0.0;
    for (const Vec& x : probe_lattice(g.lo, g.hi, probes_per_axis)) {
        double sdf = signed_distance_exact(shape, x);
        if (std::abs(sdf) > distance_to_box_boundary(g, x)) continue;  // outside Omega*
        double err = std::abs(interpolate(res.values, x) - sdf);
        sup = std::max(sup, err);
    }
    return sup;
}

void run_distance(StudyContext& ctx, bool signed_variant) {
    const Shape& shape = require_shape(ctx);
    const Grid& box = require_grid(ctx);
    const auto a_list = require_list(ctx, "a_list");
    const double g = param(ctx, "g", 1.0);
    const double c_star = param(ctx, "cstar", std::max(1.0, g));
    if (c_star < g) throw ConfigError("params.cstar must satisfy C* >= g", 0);
    const int probes = ctx.cfg.raw.get_int("params", "probes", 41);

    CsvWriter rate(ctx.out / "rate.csv", "a,h,sup_err,flagged_nodes");
    ctx.artifact("rate.csv");
    std::vector<double> sup_errs;
    bool max_principle_ok = true;
    for (double a : a_list) {
        DistanceSolve ds = solve_distance_problem(ctx, shape, box, a, c_star, g);
        if (!ds.report.converged) {
            ctx.kv("solver_failed_at_a", a);
            ctx.kv("solver_residual", ds.report.relative_residual);
            ctx.result.exit_code = 3;
            write_summary(ctx);
            return;
        }
        max_principle_ok = max_principle_ok &&
                           max_principle_holds(ds.u, ScalarFieldT<long double>(ds.grid, ds.f_max), g);
        ExtractResult res;
        double sup = 0.0;
        if (signed_variant) {
            res = extract_signed(ds.u, ds.chi_a, a, c_star, g);
            sup = sup_signed_error(res, shape, probes);
        } else {
            res = extract_distance(ds.u, ds.chi_a, a);
            sup = sup_distance_error(res, shape, probes);
        }
        sup_errs.push_back(sup);
        rate.row({fmt(a), fmt(ds.grid.h.maxCoeff()), fmt(sup), std::to_string(res.flagged)});
        if (a == a_list.back()) {
            write_csv(res.values, (ctx.out / "field.csv").string());
            ctx.artifact("field.csv");
            if (signed_variant) {
                write_csv(omega_star_mask(ds.grid, shape), (ctx.out / "omega_star.csv").string());
                ctx.artifact("omega_star.csv");
            }
        }
        // 1-D: compare the grid solve against the exact piecewise solution
        if (box.dim() == 1) {
            Vec slo, shi;
            bounding_box(shape, slo, shi);
            Ode1dSolution ode =
                solve_ode_1d(a, {box.lo(0), slo(0), shi(0), box.hi(0)},
                             std::vector<LinearPiece>{{c_star, 0.0}, {0.0, 0.0}, {c_star, 0.0}}, g, g);
            double num = 0.0, den = 0.0;
            for (Eigen::Index i = 0; i < ds.grid.node_count(); ++i) {
                double exact = ode(ds.grid.node(i)(0));
                num = std::max(num, std::abs(static_cast<double>(ds.u.values(i)) - exact));
                den = std::max(den, std::abs(exact));
            }
            ctx.kv("oracle_rel_diff_a" + fmt(a), num / den);
            ctx.require(num / den <= 5e-3, "1-D grid vs ODE oracle mismatch at a=" + fmt(a));
        }
    }
    for (size_t i = 0; i < a_list.size(); ++i)
        ctx.kv((signed_variant ? "sup_err_signed_a" : "sup_err_a") + fmt(a_list[i]), sup_errs[i]);
    ctx.kv("max_principle", max_principle_ok ? "pass" : "fail");
    ctx.require(max_principle_ok, "discrete maximum principle violated");
    bool decreasing = true;
    for (size_t i = 1; i < sup_errs.size(); ++i) decreasing = decreasing && sup_errs[i] < sup_errs[i - 1];
    ctx.kv("sup_err_decreasing", decreasing ? "yes" : "no");
    ctx.require(decreasing, "sup error not strictly decreasing across the a-sweep");
    if (a_list.size() >= 3) {
        auto fits = fit_rate_models(a_list, sup_errs);
        std::string best;
        double best_r2 = -1e300;
        for (const auto& f : fits) {
            ctx.kv("r2_" + f.name, f.r2);
            if (f.r2 > best_r2) {
                best_r2 = f.r2;
                best = f.name;
            }
        }
        ctx.kv("best_model", best);
    }
    write_summary(ctx);
}

// --- analytic 1-D rate study --------------------------------------------------

void run_rate_study(StudyContext& ctx) {
    const Shape& shape = require_shape(ctx);
    if (shape.dim != 1) throw ConfigError("rate-study runs on a 1-D shape (interval)", 0);
    const auto a_list = require_list(ctx, "a_list");
    const double zeta = param(ctx, "zeta", 0.0);
    if (zeta != 0.0 && zeta != 1.0) throw ConfigError("params.zeta must be 0 or 1", 0);
    const double g = param(ctx, "g", 1.0);
    Vec omega_lo(1), omega_hi(1);
    if (ctx.cfg.grid) {
        omega_lo = ctx.cfg.grid->lo;
        omega_hi = ctx.cfg.grid->hi;
    } else {
        omega_lo(0) = param(ctx, "omega_lo", -2.0);
        omega_hi(0) = param(ctx, "omega_hi", 2.0);
    }
    Vec slo, shi;
    bounding_box(shape, slo, shi);
    const double L = omega_lo(0), R = omega_hi(0), l = slo(0), r = shi(0);
    if (!(L < l && l < r && r < R)) throw ConfigError("interval must sit strictly inside omega", 0);

    auto sup_for_a = [&](double a) {
        std::vector<LinearPiece> pieces;
        if (zeta == 0.0)
            pieces = {{1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
        else
            pieces = {{l - L, -1.0}, {0.0, 0.0}, {0.0, 1.0}};  // f = dist to the interval
        Ode1dSolution ode = solve_ode_1d(a, {L, l, r, R}, pieces, g, g);
        const double sa = std::sqrt(a);
        double sup = 0.0;
        const int m = 4001;
        for (int i = 0; i < m; ++i) {
            double x = l + (r - l) * i / (m - 1);
            double d = std::min(x - l, r - x);
            double u = ode(x);
            if (u < kLogFloor) continue;
            sup = std::max(sup, std::abs(-sa * std::log(u) - d));
        }
        return sup;
    };

    RateStudy study = rate_study(a_list, sup_for_a);
    CsvWriter rate(ctx.out / "rate.csv", "a,h,sup_err,flagged_nodes");
    ctx.artifact("rate.csv");
    for (size_t i = 0; i < study.a.size(); ++i)
        rate.row({fmt(study.a[i]), "0", fmt(study.sup_error[i]), "0"});
    for (const auto& f : study.fits) {
        ctx.kv("r2_" + f.name, f.r2);
        ctx.kv("c_" + f.name, f.coefficient);
    }
    ctx.kv("best_model", study.best_model);
    ctx.kv("monotone", study.monotone ? "yes" : "no");
    ctx.require(study.monotone, "rate-study errors not monotone");
    write_summary(ctx);
}

// --- yamada normals -----------------------------------------------------------

void run_normals_elliptic(StudyContext& ctx) {
    const Shape& shape = require_shape(ctx);
    const Grid& grid = require_grid(ctx);
    const auto a_list = require_list(ctx, "a_list");
    const std::string variant_name = ctx.cfg.raw.get_string("params", "variant", "eq1");
    if (variant_name != "eq1" && variant_name != "eq2")
        throw ConfigError("params.variant must be eq1 or eq2", 0);
    const YamadaVariant variant = variant_name == "eq1" ? YamadaVariant::eq1 : YamadaVariant::eq2;
    const double tol = param(ctx, "tol", 1e-10);
    const double bump_inner = param(ctx, "bump_inner", 0.5);
    const double bump_outer = param(ctx, "bump_outer", 0.1);

    auto panel = default_test_panel(grid, bump_inner, bump_outer);
    CsvWriter pairing_csv(ctx.out / "pairing.csv", "a,phi_id,lhs,rhs,gap");
    CsvWriter energy_csv(ctx.out / "energy.csv", "a,h1_energy");
    ctx.artifact("pairing.csv");
    ctx.artifact("energy.csv");

    double perimeter = 0.0;
    for (const auto& bs : sample_boundary(shape, 2048)) perimeter += bs.weight;

    std::vector<double> max_gaps, energies, const_lhs;
    for (double a : a_list) {
        YamadaSolution sol = solve_normal_field(grid, shape, a, variant, ctx.cfg.supersample, tol);
        for (const auto& rep : sol.reports)
            if (!rep.converged) {
                ctx.kv("solver_failed_at_a", a);
                ctx.result.exit_code = 3;
                write_summary(ctx);
                return;
            }
        double max_gap = 0.0;
        for (const auto& phi : panel) {
            PairingResult pr = weak_vs_surface_pairing(sol, phi);
            pairing_csv.row({fmt(a), phi.id, fmt(pr.lhs), fmt(pr.rhs), fmt(pr.gap)});
            max_gap = std::max(max_gap, pr.gap);
            if (phi.id == "const_e1") const_lhs.push_back(std::abs(pr.lhs));
        }
        max_gaps.push_back(max_gap);
        double energy = h1_energy(sol);
        energies.push_back(energy);
        energy_csv.row({fmt(a), fmt(energy)});
        if (a == a_list.back()) {
            CsvWriter trace_csv(ctx.out / "trace.csv",
                                grid.dim() == 3 ? "x,y,z,sx,sy,sz" : "x,y,sx,sy");
            ctx.artifact("trace.csv");
            for (const auto& td : boundary_trace_directions(sol, 64)) {
                std::vector<std::string> cells;
                for (int d = 0; d < grid.dim(); ++d) cells.push_back(fmt(td.point(d)));
                for (int d = 0; d < grid.dim(); ++d) cells.push_back(fmt(td.direction(d)));
                trace_csv.row(cells);
            }
        }
    }
    for (size_t i = 0; i < a_list.size(); ++i) {
        ctx.kv("max_gap_a" + fmt(a_list[i]), max_gaps[i]);
        ctx.kv("h1_energy_a" + fmt(a_list[i]), energies[i]);
    }
    bool gap_drop = max_gaps.front() >= 3.0 * max_gaps.back();
    bool energy_down = true;
    for (size_t i = 1; i < energies.size(); ++i) energy_down = energy_down && energies[i] < energies[i - 1];
    bool const_ok = true;
    for (double v : const_lhs) const_ok = const_ok && v <= 1e-3 * perimeter;
    ctx.kv("gap_drop_factor", max_gaps.back() > 0 ? max_gaps.front() / max_gaps.back() : 1e300);
    ctx.require(gap_drop, "pairing gap did not shrink 3x across the sweep");
    ctx.require(energy_down, "a*||s||_H1 not decreasing across the sweep");
    ctx.require(const_ok, "constant test function: surface integral not reproduced near 0");
    write_summary(ctx);
}

// --- heat-kernel normals --------------------------------------------------------

void run_normals_heat(StudyContext& ctx) {
    const Shape& shape = require_shape(ctx);
    const auto t_list = require_list(ctx, "t_list");
    const Kernel kernel = kernel_from_config(ctx, shape.dim);
    const int quad = ctx.cfg.raw.get_int("params", "quad", 512);
    const int m = ctx.cfg.raw.get_int("params", "boundary_points", 16);

    std::vector<Vec> points;
    for (const auto& bs : sample_boundary(shape, m)) points.push_back(bs.point);

    // rows are independent; evaluate them through the worker pool
    std::vector<double> ts_sorted = t_list;
    std::sort(ts_sorted.begin(), ts_sorted.end());
    const double xi = xi_smooth(kernel, shape.dim);
    std::vector<AsymptoteRow> rows(ts_sorted.size() * points.size());
    parallel_for(rows.size(), ctx.cfg.threads, [&](std::size_t idx) {
        const double t = ts_sorted[idx / points.size()];
        const Vec& x = points[idx % points.size()];
        const double R = default_truncation(kernel, t);
        AsymptoteRow row;
        row.t = t;
        row.x = x;
        row.grad = grad_h(shape, kernel, t, x, R, quad);
        double mag = row.grad.norm();
        row.mag_scaled = std::sqrt(t) * mag / xi;
        Vec minus_n = -normal_at(shape, x);
        double c = mag > 0.0 ? std::clamp(row.grad.dot(minus_n) / mag, -1.0, 1.0) : 1.0;
        row.angle_deg = std::acos(c) * 180.0 / std::numbers::pi;
        rows[idx] = std::move(row);
    });

    std::string header = "t";
    const char* names = "xyz";
    for (int d = 0; d < shape.dim; ++d) header += std::string(",") + names[d];
    for (int d = 0; d < shape.dim; ++d) header += std::string(",g") + names[d];
    header += ",mag_scaled,angle_deg_to_minus_n";
    CsvWriter csv(ctx.out / "heat.csv", header);
    ctx.artifact("heat.csv");
    std::vector<double> worst_mag(ts_sorted.size(), 0.0), worst_angle(ts_sorted.size(), 0.0);
    for (size_t idx = 0; idx < rows.size(); ++idx) {
        const AsymptoteRow& r = rows[idx];
        std::vector<std::string> cells = {fmt(r.t)};
        for (int d = 0; d < shape.dim; ++d) cells.push_back(fmt(r.x(d)));
        for (int d = 0; d < shape.dim; ++d) cells.push_back(fmt(r.grad(d)));
        cells.push_back(fmt(r.mag_scaled));
        cells.push_back(fmt(r.angle_deg));
        csv.row(cells);
        size_t ti = idx / points.size();
        worst_mag[ti] = std::max(worst_mag[ti], std::abs(r.mag_scaled - 1.0));
        worst_angle[ti] = std::max(worst_angle[ti], r.angle_deg);
    }
    for (size_t i = 0; i < ts_sorted.size(); ++i) {
        ctx.kv("max_abs_mag_err_t" + fmt(ts_sorted[i]), worst_mag[i]);
        ctx.kv("max_angle_deg_t" + fmt(ts_sorted[i]), worst_angle[i]);
    }
    bool mag_dec = true, ang_dec = true;
    for (size_t i = 1; i < ts_sorted.size(); ++i) {
        mag_dec = mag_dec && worst_mag[i - 1] < worst_mag[i];  // sorted ascending in t
        ang_dec = ang_dec && worst_angle[i - 1] < worst_angle[i];
    }
    const double mag_tol = param(ctx, "mag_tol", 0.05);
    const double angle_tol = param(ctx, "angle_tol_deg", 1.0);
    ctx.require(worst_mag.front() <= mag_tol, "scaled magnitude error exceeds tolerance at smallest t");
    ctx.require(worst_angle.front() <= angle_tol, "angle to -n exceeds tolerance at smallest t");
    ctx.require(mag_dec, "scaled magnitude error not decreasing in t");
    ctx.require(ang_dec, "angle to -n not decreasing in t");

    // seeded rotation-equivariance spot check (2-D shapes only); quarter
    // turns preserve the quadrature lattice, so the identity is exact
    if (ctx.check && shape.dim == 2 && !std::holds_alternative<Cusp2D>(shape.kind)) {
        std::mt19937 rng(ctx.cfg.seed);
        std::uniform_int_distribution<int> quarter(1, 3);
        double angle = 0.5 * std::numbers::pi * quarter(rng);
        Eigen::Matrix2d q;
        q << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
        Shape rotated = rotate2d(shape, angle);
        const double t = ts_sorted.front();
        const double R = default_truncation(kernel, t);
        Vec x = points.front();
        Vec g0 = grad_h(shape, kernel, t, x, R, quad);
        Vec g1 = grad_h(rotated, kernel, t, Vec(q * x), R, quad);
        double mismatch = (g1 - q * g0).norm() / std::max(1.0, g0.norm());
        ctx.kv("rotation_equivariance_mismatch", mismatch);
        ctx.require(mismatch <= 1e-8, "rotation equivariance violated");
    }
    write_summary(ctx);
}

// --- corner study ----------------------------------------------------------------

void run_corner_study(StudyContext& ctx) {
    const Shape& shape = require_shape(ctx);
    const Kernel kernel = kernel_from_config(ctx, shape.dim);
    const double t = param(ctx, "t", 1e-4);
    const int quad = ctx.cfg.raw.get_int("params", "quad", 512);
    auto corner_list = corners(shape);
    if (corner_list.empty()) throw ConfigError("corner-study: shape has no corners", 0);

    CsvWriter csv(ctx.out / "corner.csv",
                  "x,y,phi,xi_p,dir_x,dir_y,cone_dir_angle_deg,cone_mag_reldiff,"
                  "grad_dir_angle_deg,grad_mag_ratio");
    ctx.artifact("corner.csv");
    const double R = default_truncation(kernel, t);
    bool cone_ok = true, dir_ok = true, mag_ok = true;
    const double mag_tol = param(ctx, "corner_mag_tol", 0.05);
    for (const auto& corner : corner_list) {
        if (!(corner.phi > 0.0 && corner.phi < 2.0 * std::numbers::pi)) continue;
        CornerPrediction pred = corner_prediction_2d(kernel, corner);
        Vec v = cone_main_term(cone_from_corner(corner), kernel, shape.dim);
        double cone_angle =
            std::acos(std::clamp(v.normalized().dot(pred.direction), -1.0, 1.0)) * 180.0 /
            std::numbers::pi;
        double cone_reldiff = std::abs(2.0 * v.norm() - pred.xi_p) / pred.xi_p;
        Vec gradient = grad_h(shape, kernel, t, corner.point, R, quad);
        Vec measured_dir = -gradient.normalized();
        double grad_angle =
            std::acos(std::clamp(measured_dir.dot(pred.direction), -1.0, 1.0)) * 180.0 /
            std::numbers::pi;
        double mag_ratio = std::sqrt(t) * gradient.norm() / pred.xi_p;
        csv.row({fmt(corner.point(0)), fmt(corner.point(1)), fmt(corner.phi), fmt(pred.xi_p),
                 fmt(pred.direction(0)), fmt(pred.direction(1)), fmt(cone_angle), fmt(cone_reldiff),
                 fmt(grad_angle), fmt(mag_ratio)});
        cone_ok = cone_ok && cone_reldiff <= 1e-6 && cone_angle <= 1e-6 * 180.0 / std::numbers::pi;
        dir_ok = dir_ok && grad_angle <= 2.0;
        mag_ok = mag_ok && std::abs(mag_ratio - 1.0) <= mag_tol;
    }
    ctx.kv("cone_vs_prediction", cone_ok ? "pass" : "fail");
    ctx.kv("grad_direction", dir_ok ? "pass" : "fail");
    ctx.kv("grad_magnitude", mag_ok ? "pass" : "fail");
    ctx.require(cone_ok, "cone main term disagrees with the 2-D corner formula");
    ctx.require(dir_ok, "measured corner direction off by more than 2 degrees");
    ctx.require(mag_ok, "measured corner magnitude outside tolerance");
    write_summary(ctx);
}

// --- volume-mean diagnostics -------------------------------------------------------

void run_mean_check(StudyContext& ctx) {
    const Shape& shape = require_shape(ctx);
    const Grid& box = require_grid(ctx);
    const auto a_list = require_list(ctx, "a_list");
    const double eps = param(ctx, "eps", 0.25);
    const double g = param(ctx, "g", 1.0);
    const double c_star = param(ctx, "cstar", 1.0);
    const int m = ctx.cfg.raw.get_int("params", "boundary_points", 16);

    auto samples = sample_boundary(shape, m);
    auto f_oracle = [&](const Vec& x) {
        return signed_distance_exact(shape, x) > 0.0 ? c_star : 0.0;
    };
    CsvWriter mean_csv(ctx.out / "mean.csv", "a,eps,y_index,Vu,Vf,gap");
    CsvWriter beta_csv(ctx.out / "beta.csv", "a,beta,sqrt_a_log_inv_beta");
    ctx.artifact("mean.csv");
    ctx.artifact("beta.csv");
    std::vector<double> sup_gaps, beta_terms;
    for (double a : a_list) {
        DistanceSolve ds = solve_distance_problem(ctx, shape, box, a, c_star, g);
        if (!ds.report.converged) {
            ctx.kv("solver_failed_at_a", a);
            ctx.result.exit_code = 3;
            write_summary(ctx);
            return;
        }
        double sup_gap = 0.0;
        for (const auto& row : volume_mean_rows(ds.u, f_oracle, samples, eps)) {
            mean_csv.row({fmt(a), fmt(eps), std::to_string(row.y_index), fmt(row.v_u), fmt(row.v_f),
                          fmt(row.gap)});
            sup_gap = std::max(sup_gap, row.gap);
        }
        sup_gaps.push_back(sup_gap);
        double beta = std::numeric_limits<double>::infinity();
        for (const auto& bs : samples)
            beta = std::min(beta, static_cast<double>(interpolate(ds.u, bs.point)));
        double term = beta > 0.0 ? std::sqrt(a) * std::log(1.0 / beta)
                                 : std::numeric_limits<double>::infinity();
        beta_terms.push_back(term);
        beta_csv.row({fmt(a), fmt(beta), fmt(term)});
        ctx.require(beta > 0.0, "beta_a not positive at a=" + fmt(a));
    }
    for (size_t i = 0; i < a_list.size(); ++i) ctx.kv("sup_gap_a" + fmt(a_list[i]), sup_gaps[i]);
    bool gap_dec = true;
    for (size_t i = 1; i < sup_gaps.size(); ++i) gap_dec = gap_dec && sup_gaps[i] < sup_gaps[i - 1];
    bool beta_dec = true;
    for (size_t i = 1; i < beta_terms.size(); ++i) beta_dec = beta_dec && beta_terms[i] < beta_terms[i - 1];
    ctx.kv("sup_gap_decreasing", gap_dec ? "yes" : "no");
    ctx.require(gap_dec, "volume-mean gap not decreasing in a");
    ctx.require(beta_dec, "sqrt(a) log(1/beta_a) not decreasing in a");
    write_summary(ctx);
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg, bool check) {
    StudyContext ctx{cfg, fs::path(cfg.out_dir), {}, check};
    fs::create_directories(ctx.out);
    if (cfg.study == "distance")
        run_distance(ctx, false);
    else if (cfg.study == "signed-distance")
        run_distance(ctx, true);
    else if (cfg.study == "rate-study")
        run_rate_study(ctx);
    else if (cfg.study == "normals-elliptic")
        run_normals_elliptic(ctx);
    else if (cfg.study == "normals-heat")
        run_normals_heat(ctx);
    else if (cfg.study == "corner-study")
        run_corner_study(ctx);
    else if (cfg.study == "mean-check")
        run_mean_check(ctx);
    else
        throw ConfigError("unknown study '" + cfg.study + "'", 0);
    if (ctx.result.exit_code == 0 && check && !ctx.result.check_failures.empty())
        ctx.result.exit_code = 4;
    return ctx.result;
}

int run_cli(int argc, const char* const* argv) {
    auto usage = []() {
        std::cerr << "usage: shape-pde run <config.cfg> [--check] [--threads N] [--out DIR]\n";
        return 2;
    };
    if (argc < 3 || std::string(argv[1]) != "run") return usage();
    std::string cfg_path = argv[2];
    bool check = false;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    for (int i = 3; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--check") {
            check = true;
        } else if (arg == "--threads" && i + 1 < argc) {
            threads = std::atoi(argv[++i]);
        } else if (arg == "--out" && i + 1 < argc) {
            out_dir = argv[++i];
        } else {
            return usage();
        }
    }
    try {
        StudyConfig cfg = load_config(cfg_path);
        if (threads) cfg.threads = std::max(1, *threads);
        if (out_dir) cfg.out_dir = *out_dir;
        StudyResult result = run_study(cfg, check);
        for (const auto& [k, v] : result.summary) std::cout << k << "=" << v << "\n";
        for (const auto& f : result.check_failures) std::cout << "check_failed=" << f << "\n";
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace shapepde
