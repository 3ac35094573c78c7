#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shapepde/elliptic.hpp"
#include "shapepde/grid.hpp"

namespace shapepde {

// Distance and signed-distance recovery from the screened solve
//   -a*Laplace(u) + u = f,  u = g on the box faces,  f >= 0 and f = 0 on
// the closed region A; the Varadhan transform -sqrt(a) log u approaches the
// distance to the boundary of A.

inline constexpr double kLogFloor = 1e-300;

struct ExtractResult {
    ScalarField values;       // p_a (distance) or U_a (signed) at nodes
    ScalarField region_mask;  // 1 on nodes governed by the A-side formula
    Eigen::Index flagged = 0; // nodes clamped at the log floor
};

// p_a = -sqrt(a) log(max(u, floor)); mask marks nodes with chi_A >= 1/2.
template <class Scalar>
ExtractResult extract_distance(const ScalarFieldT<Scalar>& u, const ScalarFieldT<Scalar>& chi_a,
                               double a) {
    ExtractResult out;
    out.values = ScalarField(u.grid);
    out.region_mask = ScalarField(u.grid);
    const double sa = std::sqrt(a);
    for (Eigen::Index i = 0; i < u.grid.node_count(); ++i) {
        double v = static_cast<double>(u.values(i));
        if (v < kLogFloor) {
            v = kLogFloor;
            ++out.flagged;
        }
        out.values.values(i) = -sa * std::log(v);
        out.region_mask.values(i) = chi_a.values(i) >= Scalar(0.5) ? 1.0 : 0.0;
    }
    if (out.flagged == u.grid.node_count())
        throw std::runtime_error("extract_distance: every node underflowed the log floor");
    return out;
}

// U_a = sqrt(a) log u on A-nodes and -sqrt(a) log(C* - u) elsewhere; flagged
// counts non-A nodes where C* - u fell below the floor (a too large).
template <class Scalar>
ExtractResult extract_signed(const ScalarFieldT<Scalar>& u, const ScalarFieldT<Scalar>& chi_a,
                             double a, double c_star, double g_max) {
    if (c_star < g_max) throw std::invalid_argument("extract_signed: need C* >= max g");
    ExtractResult out;
    out.values = ScalarField(u.grid);
    out.region_mask = ScalarField(u.grid);
    const double sa = std::sqrt(a);
    for (Eigen::Index i = 0; i < u.grid.node_count(); ++i) {
        const bool in_a = chi_a.values(i) >= Scalar(0.5);
        out.region_mask.values(i) = in_a ? 1.0 : 0.0;
        if (in_a) {
            double v = std::max(static_cast<double>(u.values(i)), kLogFloor);
            out.values.values(i) = sa * std::log(v);
        } else {
            double w = c_star - static_cast<double>(u.values(i));
            if (w < kLogFloor) {
                w = kLogFloor;
                ++out.flagged;
            }
            out.values.values(i) = -sa * std::log(w);
        }
    }
    return out;
}

// Omega* = {x : d(x, boundary of A) <= d(x, box boundary)}, from exact oracles.
ScalarField omega_star_mask(const Grid& grid, const Shape& shape);

double distance_to_box_boundary(const Grid& grid, const Vec& x);

// --- rate studies -----------------------------------------------------------

struct ModelFit {
    std::string name;
    double coefficient = 0.0;
    double r2 = 0.0;
};

struct RateStudy {
    std::vector<double> a;
    std::vector<double> sup_error;
    std::vector<ModelFit> fits;
    std::string best_model;
    bool monotone = true;  // false flags grid-floor contamination (>10% uptick)
};

// Single-coefficient least squares of sup_error against c * model(a) for the
// model family {sqrt(a) log(1/a), a^(1/2 - tau) : tau in {0.05, 0.1, 0.2}}.
std::vector<ModelFit> fit_rate_models(const std::vector<double>& a, const std::vector<double>& err);

RateStudy rate_study(const std::vector<double>& a_list,
                     const std::function<double(double)>& sup_error_for_a);

// --- volume means and the zeta probe ----------------------------------------

// Mean of f over the ball B_eps(y) by a midpoint lattice with membership test.
double ball_mean(const std::function<double(const Vec&)>& f, const Vec& y, double eps,
                 int pts_per_axis = 64);

struct MeanRow {
    int y_index = 0;
    Vec y;
    double v_u = 0.0;
    double v_f = 0.0;
    double gap = 0.0;
};

// Per-sample volume means of the solution and of the data; their sup gap
// shrinks with a.  Throws if the ball exits the grid box.
template <class Scalar>
std::vector<MeanRow> volume_mean_rows(const ScalarFieldT<Scalar>& u,
                                      const std::function<double(const Vec&)>& f_oracle,
                                      const std::vector<BoundarySample>& samples, double eps) {
    const Grid& g = u.grid;
    for (const auto& bs : samples)
        for (int d = 0; d < g.dim(); ++d)
            if (bs.point(d) - eps < g.lo(d) || bs.point(d) + eps > g.hi(d))
                throw std::invalid_argument("volume_mean: ball exits the grid box");
    auto u_eval = [&](const Vec& x) { return static_cast<double>(interpolate(u, x)); };
    std::vector<MeanRow> rows;
    int idx = 0;
    for (const auto& bs : samples) {
        MeanRow r;
        r.y_index = idx++;
        r.y = bs.point;
        r.v_u = ball_mean(u_eval, bs.point, eps);
        r.v_f = ball_mean(f_oracle, bs.point, eps);
        r.gap = std::abs(r.v_u - r.v_f);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct ZetaEstimate {
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
};

// Slope of log V_eps(f^k) against log eps per boundary sample, divided by k.
ZetaEstimate zeta_probe(const std::function<double(const Vec&)>& f, const Shape& shape,
                        const std::vector<double>& eps_list, int k, int boundary_samples = 8);

// Off-grid probe lattice over [lo, hi], cell midpoints.
std::vector<Vec> probe_lattice(const Vec& lo, const Vec& hi, int per_axis);

}  // namespace shapepde
