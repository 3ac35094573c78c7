#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "shapepde/geometry.hpp"

using namespace shapepde;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent distance oracle: brute force over dense boundary samples.
double brute_force_distance(const Shape& shape, const Vec& x, int samples = 10000) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& bs : sample_boundary(shape, samples))
        best = std::min(best, (x - bs.point).norm());
    return contains(shape, x) ? -best : best;
}

Shape l_shape() {
    // L-shaped polygon with a reflex vertex at (1,1)
    return make_polygon({vec2(0, 0), vec2(2, 0), vec2(2, 1), vec2(1, 1), vec2(1, 2), vec2(0, 2)});
}

}  // namespace

TEST_CASE("membership basics") {
    Shape disc = make_ball(vec2(0, 0), 1.0);
    CHECK(contains(disc, vec2(0.5, 0)));
    CHECK_FALSE(contains(disc, vec2(2, 0)));
    CHECK_THROWS_AS(contains(disc, vec3(0, 0, 0)), std::invalid_argument);

    Shape cusp = make_cusp(1.0, 1.0);
    CHECK(contains(cusp, vec2(0.5, 0.2)));        // 0 < 0.2 < 0.25
    CHECK_FALSE(contains(cusp, vec2(0.5, 0.25))); // boundary of the open set
    CHECK_FALSE(contains(cusp, vec2(0.5, 0.3)));
    CHECK_FALSE(contains(cusp, vec2(-0.1, 0.01)));
}

TEST_CASE("signed distance closed forms") {
    Shape disc = make_ball(vec2(0, 0), 1.0);
    CHECK(signed_distance_exact(disc, vec2(0.5, 0)) == doctest::Approx(-0.5).epsilon(1e-14));

    Shape box = make_box(vec3(0, 0, 0), vec3(1.0, 2.0, 3.0));
    Vec center = vec3(0.5, 1.0, 1.5);
    CHECK(signed_distance_exact(box, center) == doctest::Approx(-0.5).epsilon(1e-14));

    Shape half = make_halfspace(vec2(0, 1), 0.0);
    CHECK(signed_distance_exact(half, vec2(3.0, -0.25)) == doctest::Approx(-0.25));
    CHECK(signed_distance_exact(half, vec2(-1.0, 0.75)) == doctest::Approx(0.75));
}

TEST_CASE("polygon distance matches the brute-force oracle") {
    Shape tri = make_polygon({vec2(0, 0), vec2(2, 0), vec2(0, 1.5)});
    for (const Vec& x : {vec2(0.3, 0.3), vec2(1.5, 1.0), vec2(-0.4, 0.2), vec2(0.5, -0.7)}) {
        double exact = signed_distance_exact(tri, x);
        double brute = brute_force_distance(tri, x);
        CHECK(std::abs(exact - brute) < 2e-3);  // sampling pitch of 1e4 samples
    }
}

TEST_CASE("distance agrees with boundary sampling on a probe lattice") {
    std::vector<Shape> shapes = {make_ball(vec2(0.2, -0.1), 0.8),
                                 make_box(vec2(-0.5, -0.7), vec2(0.9, 0.4)), l_shape()};
    for (const auto& shape : shapes) {
        Vec lo, hi;
        bounding_box(shape, lo, hi);
        double pitch = 0.0;
        auto samples = sample_boundary(shape, 20000);
        for (const auto& bs : samples) pitch = std::max(pitch, bs.weight);
        for (int i = 0; i < 33; ++i)
            for (int j = 0; j < 33; ++j) {
                Vec x = vec2(lo(0) - 0.3 + (hi(0) - lo(0) + 0.6) * i / 32.0,
                             lo(1) - 0.3 + (hi(1) - lo(1) + 0.6) * j / 32.0);
                double exact = signed_distance_exact(shape, x);
                double brute = contains(shape, x) ? 0.0 : 0.0;
                double best = std::numeric_limits<double>::infinity();
                for (const auto& bs : samples) best = std::min(best, (x - bs.point).norm());
                brute = contains(shape, x) ? -best : best;
                CHECK(std::abs(exact - brute) <= 2.0 * pitch);
            }
    }
}

TEST_CASE("boundary sample weights sum to the surface measure") {
    auto total = [](const std::vector<BoundarySample>& s) {
        double w = 0.0;
        for (const auto& b : s) w += b.weight;
        return w;
    };
    CHECK(total(sample_boundary(make_ball(vec2(0, 0), 1.0), 8)) == doctest::Approx(2 * kPi));
    CHECK(total(sample_boundary(make_box(vec2(0, 0), vec2(1, 1)), 400)) == doctest::Approx(4.0));
    CHECK(total(sample_boundary(make_ball(vec3(0, 0, 0), 1.0), 4000)) == doctest::Approx(4 * kPi));
    Shape tri = make_polygon({vec2(0, 0), vec2(3, 0), vec2(0, 4)});
    CHECK(total(sample_boundary(tri, 1200)) == doctest::Approx(12.0).epsilon(1e-3));
}

TEST_CASE("boundary samples sit on the boundary with outward normals") {
    std::vector<Shape> shapes = {make_ball(vec2(0.1, 0.2), 1.1),
                                 make_box(vec2(-1, -1), vec2(1, 1)),
                                 make_polygon({vec2(0, 0), vec2(2, 0), vec2(1, 2)})};
    for (const auto& shape : shapes) {
        for (const auto& bs : sample_boundary(shape, 64)) {
            CHECK(std::abs(signed_distance_exact(shape, bs.point)) < 1e-12);
            const double eps = 1e-6;
            CHECK_FALSE(contains(shape, Vec(bs.point + eps * bs.normal)));
            CHECK(contains(shape, Vec(bs.point - eps * bs.normal)));
        }
    }
}

TEST_CASE("normals equal the distance gradient on smooth boundaries") {
    Shape disc = make_ball(vec2(0.3, -0.4), 1.3);
    for (const auto& bs : sample_boundary(disc, 32)) {
        Vec g(2);
        const double step = 1e-5;
        for (int d = 0; d < 2; ++d) {
            Vec xp = bs.point, xm = bs.point;
            xp(d) += step;
            xm(d) -= step;
            g(d) = (signed_distance_exact(disc, xp) - signed_distance_exact(disc, xm)) / (2 * step);
        }
        g.normalize();
        double angle = std::acos(std::clamp(g.dot(bs.normal), -1.0, 1.0));
        CHECK(angle < 1e-4);
    }
}

TEST_CASE("corner catalog") {
    auto square_corners = corners(make_box(vec2(0, 0), vec2(1, 1)));
    REQUIRE(square_corners.size() == 4);
    for (const auto& c : square_corners) {
        CHECK(c.phi == doctest::Approx(kPi / 2));
        CHECK(c.n1.norm() == doctest::Approx(1.0));
        CHECK((c.n1 + c.n2).norm() > 0.0);
        // angle between the one-sided normals is pi - phi
        double between = std::acos(std::clamp(c.n1.dot(c.n2), -1.0, 1.0));
        CHECK(between == doctest::Approx(kPi - c.phi));
    }

    // collinear split edge: the middle vertex is not a corner
    Shape split = make_polygon({vec2(0, 0), vec2(1, 0), vec2(2, 0), vec2(2, 2), vec2(0, 2)});
    CHECK(corners(split).size() == 4);

    auto lcorners = corners(l_shape());
    int reflex = 0;
    for (const auto& c : lcorners)
        if (std::abs(c.phi - 1.5 * kPi) < 1e-12) ++reflex;
    CHECK(reflex == 1);

    CHECK(corners(make_ball(vec2(0, 0), 1.0)).empty());
}

TEST_CASE("union semantics") {
    Shape two = make_union({make_ball(vec2(-2, 0), 0.5), make_ball(vec2(2, 0), 0.5)});
    CHECK(contains(two, vec2(-2, 0.2)));
    CHECK(contains(two, vec2(2, 0.2)));
    CHECK_FALSE(contains(two, vec2(0, 0)));
    CHECK(signed_distance_exact(two, vec2(-2, 0)) == doctest::Approx(-0.5));
    CHECK(signed_distance_exact(two, vec2(0, 0)) == doctest::Approx(1.5));

    Shape overlapping = make_union({make_ball(vec2(0, 0), 1.0), make_ball(vec2(0.5, 0), 1.0)});
    CHECK(contains(overlapping, vec2(0.25, 0)));  // membership is a plain or
    CHECK_THROWS_AS(signed_distance_exact(overlapping, vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(make_ball(vec2(0, 0), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_box(vec2(1, 0), vec2(0, 1)), std::invalid_argument);
    // clockwise polygon rejected
    CHECK_THROWS_AS(make_polygon({vec2(0, 0), vec2(0, 1), vec2(1, 0)}), std::invalid_argument);
    CHECK_THROWS_AS(make_union({make_ball(vec2(0, 0), 1.0), make_ball(vec3(0, 0, 0), 1.0)}),
                    std::invalid_argument);
}

TEST_CASE("cusp distance falls back to boundary sampling") {
    Shape cusp = make_cusp(1.0, 1.0);
    Vec inside = vec2(0.6, 0.1);
    REQUIRE(contains(cusp, inside));
    double d = signed_distance_exact(cusp, inside);
    CHECK(d < 0.0);
    CHECK(std::abs(-d - 0.1) < 5e-3);  // nearest boundary is the bottom edge
}
