#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shapepde/distance.hpp"

using namespace shapepde;

namespace {

Grid grid2d(double lo, double hi, int n) {
    Eigen::VectorXi nn(2);
    nn << n, n;
    return Grid(vec2(lo, lo), vec2(hi, hi), nn);
}

Grid grid1d(double lo, double hi, int n) {
    Eigen::VectorXi nn(1);
    nn << n;
    Vec l(1), h(1);
    l << lo;
    h << hi;
    return Grid(l, h, nn);
}

struct DiscSolve {
    ScalarFieldT<long double> u, chi;
};

// long double keeps the far-field boundary layer above the round-off floor
DiscSolve solve_disc(const Grid& g, double a, double cstar = 1.0, double gval = 1.0) {
    Shape disc = make_ball(vec2(0, 0), 1.0);
    auto chi = rasterize_indicator<long double>(g, disc, 4);
    ScalarFieldT<long double> c(g, 1.0L), f(g);
    f.values = cstar * (1.0L - chi.values.array());
    auto [u, rep] = assemble_and_solve(g, a, c, f, constant_dirichlet(gval), 1e-13, 40000);
    REQUIRE(rep.converged);
    project_to_upper_bound(u, static_cast<long double>(std::max(cstar, gval)));
    return {std::move(u), std::move(chi)};
}

}  // namespace

TEST_CASE("1-D extraction matches the analytic transform") {
    const double a = 1e-3;
    Grid g = grid1d(-2, 2, 2049);
    Vec alo(1), ahi(1);
    alo << -1.0;
    ahi << 1.0;
    Shape interval = make_box(alo, ahi);
    auto chi = rasterize_indicator<long double>(g, interval, 4);
    ScalarFieldT<long double> c(g, 1.0L), f(g);
    f.values = 1.0L - chi.values.array();
    auto [u, rep] = assemble_and_solve(g, a, c, f, constant_dirichlet(1.0), 1e-14, 40000);
    REQUIRE(rep.converged);
    ExtractResult res = extract_distance(u, chi, a);
    CHECK(res.flagged == 0);

    Ode1dSolution ode = solve_ode_1d(a, {-2.0, -1.0, 1.0, 2.0},
                                     std::vector<double>{1.0, 0.0, 1.0}, 1.0, 1.0);
    Vec origin(1);
    origin << 0.0;
    double p_grid = interpolate(res.values, origin);
    double p_exact = -std::sqrt(a) * std::log(ode(0.0));
    CHECK(std::abs(p_grid - p_exact) < 1e-3);
    // |p(0) - d(0)| is within the sqrt(a) log(1/a) scale
    CHECK(std::abs(p_grid - 1.0) <= std::sqrt(a) * std::log(1.0 / a));
}

TEST_CASE("disc center distance is recovered") {
    const double a = 4e-3;
    Grid g = grid2d(-2, 2, 257);
    DiscSolve ds = solve_disc(g, a);
    ExtractResult res = extract_distance(ds.u, ds.chi, a);
    Vec center = vec2(0, 0);
    // p(center) -> d = 1 as a -> 0; at a = 4e-3 the 2-D amplitude spreading
    // still holds it ~0.1 below (value pinned from the Bessel closed form)
    CHECK(interpolate(res.values, center) == doctest::Approx(0.897).epsilon(0.01));
    CHECK(max_principle_holds(ds.u, ScalarFieldT<long double>(g, 1.0L), 1.0));
}

TEST_CASE("signed extraction near and outside the boundary") {
    const double a = 4e-3;
    Grid g = grid2d(-2, 2, 257);
    DiscSolve ds = solve_disc(g, a);
    ExtractResult res = extract_signed(ds.u, ds.chi, a, 1.0, 1.0);
    CHECK(res.flagged == 0);
    Shape disc = make_ball(vec2(0, 0), 1.0);
    // |U| small on the boundary and shrinking with a
    auto boundary_sup = [&](const ExtractResult& r) {
        double sup = 0.0;
        for (const auto& bs : sample_boundary(disc, 8))
            sup = std::max(sup, std::abs(interpolate(r.values, bs.point)));
        return sup;
    };
    CHECK(boundary_sup(res) < 0.08);
    DiscSolve coarse = solve_disc(grid2d(-2, 2, 129), 1.6e-2);
    ExtractResult res_coarse = extract_signed(coarse.u, coarse.chi, 1.6e-2, 1.0, 1.0);
    CHECK(boundary_sup(res) < boundary_sup(res_coarse));
    // 0.3 outside on the +x axis: U ~ +0.3 up to the sqrt(a)-scale offset
    CHECK(interpolate(res.values, vec2(1.3, 0.0)) == doctest::Approx(0.3).epsilon(0.25));
    CHECK_THROWS_AS(extract_signed(ds.u, ds.chi, a, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("monotonicity in the data via the comparison principle") {
    const double a = 2e-3;
    Grid g = grid2d(-2, 2, 129);
    DiscSolve lo = solve_disc(g, a, 1.0);
    DiscSolve hi = solve_disc(g, a, 2.0, 2.0);
    ExtractResult plo = extract_distance(lo.u, lo.chi, a);
    ExtractResult phi = extract_distance(hi.u, hi.chi, a);
    // larger data -> larger u -> smaller p, on A-nodes
    for (Eigen::Index i = 0; i < g.node_count(); ++i)
        if (plo.region_mask.values(i) > 0.5)
            CHECK(phi.values.values(i) <= plo.values.values(i) + 1e-9);
}

TEST_CASE("omega star mask agrees with the exact oracles") {
    Grid g = grid2d(-2, 2, 65);
    Shape disc = make_ball(vec2(0, 0), 1.0);
    ScalarField mask = omega_star_mask(g, disc);
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        Vec x = g.node(i);
        bool expected =
            std::abs(signed_distance_exact(disc, x)) <= distance_to_box_boundary(g, x);
        CHECK(mask.values(i) == (expected ? 1.0 : 0.0));
    }
}

TEST_CASE("rate model fitting prefers the generating model") {
    std::vector<double> a = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> y_log, y_pow;
    for (double ai : a) {
        y_log.push_back(0.31 * std::sqrt(ai) * std::log(1.0 / ai));
        y_pow.push_back(0.7 * std::pow(ai, 0.45));
    }
    auto fits_log = fit_rate_models(a, y_log);
    CHECK(fits_log.front().name == "sqrt_a_log");
    CHECK(fits_log.front().r2 == doctest::Approx(1.0));
    CHECK(fits_log.front().coefficient == doctest::Approx(0.31));
    auto fits_pow = fit_rate_models(a, y_pow);
    double best_pow = -1;
    std::string best_name;
    for (const auto& f : fits_pow)
        if (f.r2 > best_pow) {
            best_pow = f.r2;
            best_name = f.name;
        }
    CHECK(best_name == "pow_tau0.05");
}

TEST_CASE("rate study flags non-monotone sweeps") {
    int call = 0;
    auto bumpy = [&call](double) {
        static const double vals[] = {0.5, 0.2, 0.35, 0.1};
        return vals[call++];
    };
    RateStudy st = rate_study({1e-1, 1e-2, 1e-3, 1e-4}, bumpy);
    CHECK_FALSE(st.monotone);
    CHECK_THROWS_AS(rate_study({1e-2, 1e-1}, [](double) { return 1.0; }),
                    std::invalid_argument);
}

TEST_CASE("ball means and the zeta probe") {
    Shape disc = make_ball(vec2(0, 0), 1.0);
    auto f_chi = [&](const Vec& x) { return x.norm() >= 1.0 ? 1.0 : 0.0; };
    // half-ball occupancy at a boundary point
    double v = ball_mean(f_chi, vec2(1, 0), 0.05);
    CHECK(v == doctest::Approx(0.5).epsilon(0.02));

    std::vector<double> eps;
    for (int i = 0; i < 9; ++i) eps.push_back(1e-2 * std::pow(100.0, i / 8.0));
    ZetaEstimate z0 = zeta_probe(f_chi, disc, eps, 1);
    CHECK(std::abs(z0.median) < 0.1);

    auto f_lin = [&](const Vec& x) { return std::max(0.0, x.squaredNorm() - 1.0); };
    ZetaEstimate z1 = zeta_probe(f_lin, disc, eps, 1);
    CHECK(std::abs(z1.median - 1.0) < 0.15);
    ZetaEstimate z2 = zeta_probe(f_lin, disc, eps, 2);
    CHECK(std::abs(z1.median - z2.median) < 0.1);

    // degenerate data rejected
    auto f_zero = [](const Vec&) { return 0.0; };
    CHECK_THROWS_AS(zeta_probe(f_zero, disc, eps, 1), std::runtime_error);
    CHECK_THROWS_AS(zeta_probe(f_chi, disc, {0.1, 0.2, 0.3, 0.4}, 1), std::invalid_argument);
}

TEST_CASE("volume means of the solution approach the data means") {
    Grid g = grid2d(-2, 2, 129);
    Shape disc = make_ball(vec2(0, 0), 1.0);
    auto f_oracle = [&](const Vec& x) { return signed_distance_exact(disc, x) > 0 ? 1.0 : 0.0; };
    auto samples = sample_boundary(disc, 8);
    const double eps = 0.25;
    std::vector<double> sups;
    for (double a : {1e-2, 1e-3}) {
        DiscSolve ds = solve_disc(g, a);
        double sup = 0.0;
        for (const auto& row : volume_mean_rows(ds.u, f_oracle, samples, eps))
            sup = std::max(sup, row.gap);
        sups.push_back(sup);
    }
    CHECK(sups[1] < sups[0]);
    // ball exiting the box is an error
    Grid tight = grid2d(-1.05, 1.05, 33);
    DiscSolve ds = solve_disc(tight, 1e-2);
    CHECK_THROWS_AS(volume_mean_rows(ds.u, f_oracle, samples, 0.5), std::invalid_argument);
}

TEST_CASE("two-sided error envelope with fitted constants") {
    // measured p - d stays within [ -C1 sqrt(a)log(1/a), sqrt(a)log(1/beta) + C2 sqrt(a)log(1/a) ]
    Grid g = grid2d(-2, 2, 129);
    Shape disc = make_ball(vec2(0, 0), 1.0);
    std::vector<double> as = {1.6e-2, 8e-3, 4e-3};
    std::vector<double> lo_ratio, hi_ratio;
    for (double a : as) {
        DiscSolve ds = solve_disc(g, a);
        ExtractResult res = extract_distance(ds.u, ds.chi, a);
        double worst_neg = 0.0, worst_pos = 0.0;
        for (const Vec& x : probe_lattice(vec2(-1, -1), vec2(1, 1), 21)) {
            double sdf = signed_distance_exact(disc, x);
            if (sdf > -2.0 * g.h(0)) continue;
            double diff = interpolate(res.values, x) - (-sdf);
            worst_neg = std::min(worst_neg, diff);
            worst_pos = std::max(worst_pos, diff);
        }
        double beta = 0.0;
        {
            double bmin = std::numeric_limits<double>::infinity();
            for (const auto& bs : sample_boundary(disc, 64))
                bmin = std::min(bmin, static_cast<double>(interpolate(ds.u, bs.point)));
            beta = bmin;
        }
        double scale = std::sqrt(a) * std::log(1.0 / a);
        lo_ratio.push_back(-worst_neg / scale);
        hi_ratio.push_back((worst_pos - std::sqrt(a) * std::log(1.0 / beta)) / scale);
    }
    // constants fitted on the sweep: assert the envelope holds with margin
    double c_lo = *std::max_element(lo_ratio.begin(), lo_ratio.end());
    double c_hi = *std::max_element(hi_ratio.begin(), hi_ratio.end());
    CHECK(c_lo < 1.0);   // lower-bound constant stays bounded
    CHECK(c_hi < 1.0);   // upper bound dominated by the beta term plus a bounded multiple
}
