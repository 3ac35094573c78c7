#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "shapepde/grid.hpp"

using namespace shapepde;

namespace {

Grid grid2d(double lo, double hi, int n) {
    Eigen::VectorXi nn(2);
    nn << n, n;
    return Grid(vec2(lo, lo), vec2(hi, hi), nn);
}

ScalarField from_function(const Grid& g, const std::function<double(const Vec&)>& f) {
    ScalarField out(g);
    for (Eigen::Index i = 0; i < g.node_count(); ++i) out.values(i) = f(g.node(i));
    return out;
}

}  // namespace

TEST_CASE("hard rasterization of a node-aligned halfspace") {
    Grid g = grid2d(-1, 1, 9);
    Shape half = make_halfspace(vec2(1, 0), 0.0);
    ScalarField chi = rasterize_indicator(g, half, 1);
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        double v = chi.values(i);
        CHECK((v == 0.0 || v == 1.0));
        CHECK(v == (g.node(i)(0) < 0.0 ? 1.0 : 0.0));
    }
}

TEST_CASE("supersampled disc recovers the area of the unit disc") {
    Grid g = grid2d(-2, 2, 256);
    ScalarField chi = rasterize_indicator(g, make_ball(vec2(0, 0), 1.0), 4);
    double area = chi.values.sum() * g.cell_volume();
    CHECK(std::abs(area - std::numbers::pi) / std::numbers::pi < 0.01);
}

TEST_CASE("box filling the whole domain rasterizes to ones") {
    Grid g = grid2d(0, 1, 11);
    ScalarField chi = rasterize_indicator(g, make_box(vec2(-1, -1), vec2(2, 2)), 3);
    CHECK(chi.values.minCoeff() == 1.0);
}

TEST_CASE("rasterization is monotone in shape inclusion") {
    Grid g = grid2d(-2, 2, 33);
    ScalarField small = rasterize_indicator(g, make_ball(vec2(0.2, 0.1), 0.7), 4);
    ScalarField big = rasterize_indicator(g, make_ball(vec2(0.2, 0.1), 1.1), 4);
    CHECK(((big.values - small.values).array() >= 0.0).all());
}

TEST_CASE("central gradient of affine fields is exact") {
    Grid g = grid2d(-1, 1, 17);
    ScalarField f = from_function(g, [](const Vec& x) { return 3.0 * x(0) - 2.0 * x(1) + 0.5; });
    VectorField grad = central_gradient(f);
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        CHECK(grad.values(i, 0) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(grad.values(i, 1) == doctest::Approx(-2.0).epsilon(1e-12));
    }
    ScalarField c(g, 7.0);
    CHECK(central_gradient(c).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hard indicator of a mid-cell halfspace gives a 1/(2h) layer") {
    Grid g = grid2d(0, 1, 11);  // h = 0.1, plane between nodes at x = 0.55
    Shape half = make_halfspace(vec2(1, 0), 0.55);
    ScalarField chi = rasterize_indicator(g, half, 1);
    VectorField grad = central_gradient(chi);
    const double h = g.h(0);
    int layer_nodes = 0;
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        double gx = grad.values(i, 0);
        if (gx != 0.0) {
            CHECK(std::abs(gx) == doctest::Approx(1.0 / (2.0 * h)));
            ++layer_nodes;
        }
        CHECK(grad.values(i, 1) == 0.0);
    }
    CHECK(layer_nodes == 2 * g.n(1));  // one node each side of the jump
}

TEST_CASE("discrete norms") {
    Grid g = grid2d(0, 1, 41);
    CHECK(discrete_norms(ScalarField(g, 1.0)).l2 == doctest::Approx(1.0).epsilon(1e-12));
    auto zero = discrete_norms(ScalarField(g));
    CHECK(zero.l2 == 0.0);
    CHECK(zero.h1_semi == 0.0);

    Eigen::VectorXi nn(1);
    nn << 2001;
    Grid line(Vec::Zero(1), Vec::Ones(1), nn);
    ScalarField s(line);
    for (Eigen::Index i = 0; i < line.node_count(); ++i)
        s.values(i) = std::sin(std::numbers::pi * line.node(i)(0));
    double expected = std::numbers::pi / std::sqrt(2.0);
    CHECK(std::abs(discrete_norms(s).h1_semi - expected) / expected < 0.01);
}

TEST_CASE("multilinear interpolation") {
    Grid g = grid2d(0, 1, 5);
    ScalarField f = from_function(g, [](const Vec& x) { return 2.0 * x(0) - x(1) + 0.25; });
    // node-coincident
    CHECK(interpolate(f, vec2(0.25, 0.5)) == doctest::Approx(f.values(g.index([&] {
        Eigen::VectorXi ij(2);
        ij << 1, 2;
        return ij;
    }()))));
    // affine reproduced anywhere
    CHECK(interpolate(f, vec2(0.33, 0.77)) == doctest::Approx(2 * 0.33 - 0.77 + 0.25).epsilon(1e-13));
    // midpoint of an edge averages the endpoints
    double mid = interpolate(f, vec2(0.125, 0.0));
    CHECK(mid == doctest::Approx(0.5 * (f.values(0) + f.values(1))));
    CHECK_THROWS_AS(interpolate(f, vec2(1.5, 0.5)), std::out_of_range);
}

TEST_CASE("csv dump schema and round trip") {
    Grid g = grid2d(0, 1, 3);
    ScalarField f = from_function(g, [](const Vec& x) { return x(0) + 10.0 * x(1); });
    auto path = std::filesystem::temp_directory_path() / "shapepde_grid_test.csv";
    write_csv(f, path.string());
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "i,j,x,y,value");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == g.node_count());
    std::filesystem::remove(path);
}

TEST_CASE("grid validation") {
    Eigen::VectorXi nn(2);
    nn << 2, 5;
    CHECK_THROWS_AS(Grid(vec2(0, 0), vec2(1, 1), nn), std::invalid_argument);
    nn << 5, 5;
    CHECK_THROWS_AS(Grid(vec2(0, 0), vec2(0, 1), nn), std::invalid_argument);
}
