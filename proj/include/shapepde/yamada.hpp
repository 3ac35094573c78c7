#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shapepde/elliptic.hpp"
#include "shapepde/grid.hpp"

namespace shapepde {

// Vector elliptic problem whose solution concentrates on the outward normal
// field of the shape boundary as a -> 0.  Component i solves
//   -a*Laplace(s_i) + c*s_i = -d_i(chi_A),   s_i = 0 on the box faces,
// with c = 1 - chi_A (eq1) or c = 1 (eq2); the right-hand side is the
// discrete gradient of the supersampled indicator, a smeared surface delta.
enum class YamadaVariant { eq1, eq2 };

struct YamadaSolution {
    YamadaVariant variant = YamadaVariant::eq1;
    double a = 0.0;
    Shape shape;
    Grid grid;
    VectorField s;
    ScalarField chi;
    std::vector<SolveReport> reports;
};

YamadaSolution solve_normal_field(const Grid& grid, const Shape& shape, double a,
                                  YamadaVariant variant, int supersample = 4, double tol = 1e-10,
                                  Eigen::Index maxit = 0);

struct VectorTestFunction {
    std::string id;
    std::function<Vec(const Vec&)> value;
};

// Smooth cutoff of the distance to the grid box faces: identically one where
// every face is at least `inner` away, zero within `outer` of a face.
std::function<double(const Vec&)> face_bump(const Grid& grid, double inner, double outer);

// Fixed panel testing the measure convergence: a constant, the coordinate
// field, and one oscillatory field, all multiplied by the face bump.
std::vector<VectorTestFunction> default_test_panel(const Grid& grid, double inner, double outer);

struct PairingResult {
    double lhs = 0.0;  // volume pairing of s with phi over the variant's region
    double rhs = 0.0;  // surface pairing of the outward normal with phi
    double gap = 0.0;
};

PairingResult weak_vs_surface_pairing(const YamadaSolution& sol, const VectorTestFunction& phi,
                                      int boundary_samples = 2048);

// a * ||s_a||_{H^1, discrete}; bounded uniformly and decaying along a-sweeps.
double h1_energy(const YamadaSolution& sol);

struct TraceDirection {
    Vec point;
    Vec direction;
    bool ok = false;  // false when |s| fell below the degeneracy floor
};

std::vector<TraceDirection> boundary_trace_directions(const YamadaSolution& sol, int m);

}  // namespace shapepde
