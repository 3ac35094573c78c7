#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shapepde/geometry.hpp"

namespace shapepde {

// Rotationally invariant kernel: kappa acts on the squared radius, so the
// convolution kernel is kappa_t(x) = t^(-N/2) kappa(|x|^2 / t).
struct Kernel {
    std::function<double(double)> kappa;
    std::function<double(double)> kappa_prime;
    std::string label;
    std::optional<double> support_radius;         // compact kernels
    std::optional<double> gaussian_diffusivity;   // set for the heat kernel
};

// kappa(r) = (4 pi D)^(-N/2) exp(-r / (4D)); h solves h_t = D*Laplace(h).
Kernel gaussian_kernel(int dim, double D = 1.0);

// kappa(r) = max(0, 1 - r); compact support, admissible.
Kernel tent_kernel();

// kappa(r) = 1 / (1 + r); fails (kappa1) in two dimensions.
Kernel slow_decay_kernel();

// Truncation radius: the paper's sqrt(3 D log(1/t)) for the Gaussian, support
// radius + 1 for compact kernels; other kernels must pass R explicitly.
double default_truncation(const Kernel& kernel, double t);

// xi = S_(N-2) * int_0^inf kappa(r^2) r^(N-2) dr, with S_0 = 2.
double xi_smooth(const Kernel& kernel, int N);

// int_0^inf kappa(r^2) dr (the radial factor of the 2-D corner formula).
double kappa_radial_integral(const Kernel& kernel);

// grad_x h(t,x) = -(2/sqrt(t)) * int_{z : x + sqrt(t) z in A} z kappa'(|z|^2) dz
// evaluated on a uniform lattice over [-R, R]^N with a symmetric two-point
// panel rule per cell and membership tests; `quad` counts evaluation points
// per axis (>= 64, even).
Vec grad_h(const Shape& shape, const Kernel& kernel, double t, const Vec& x, double R, int quad);

struct AdmissibilityReport {
    bool kappa1_ok = false;   // integrable kernel
    bool kappa2_ok = false;   // integrable |z| kappa'(|z|^2)
    bool tails_ok = false;    // kappa(r) -> 0 and r kappa'(r^2) -> 0 at r = 10, 30, 100
    double int_abs_kappa = 0.0;
    double int_norm_kappa_prime = 0.0;
    double tail_kappa[3] = {0, 0, 0};
    double tail_rkprime[3] = {0, 0, 0};
    bool pass() const { return kappa1_ok && kappa2_ok && tails_ok; }
};

AdmissibilityReport kernel_admissibility(const Kernel& kernel, int N);

// Approximating cone at an apex: union over groups of the intersections
// {z : (g_i, z - apex) > 0 for all i in the group}.  Construction verifies
// (C1) a common ascent direction exists and (C2) gradients within a group are
// pairwise linearly independent.  An empty group list is the empty cone.
struct Cone {
    Vec apex;
    std::vector<std::vector<Vec>> groups;
    int dim = 0;
};

Cone make_cone(Vec apex, std::vector<std::vector<Vec>> groups);

// Tangent cone of a 2-D corner: intersection of the two edge halfplanes for a
// convex corner, union of them past a straight angle.
Cone cone_from_corner(const CornerInfo& corner);

// Main term v = int_{C - apex} z kappa'(|z|^2) dz.  The radial integral
// factors out exactly; the angular part is evaluated from exact arc (2-D) or
// wall-sector (3-D) decompositions, so the result is quadrature-accurate.
// When v != 0, v/|v| is the normal direction at the singular point.
Vec cone_main_term(const Cone& cone, const Kernel& kernel, int N);

struct CornerPrediction {
    Vec direction;  // (n1 + n2) / |n1 + n2|
    double xi_p;    // 2 sin(phi/2) int_0^inf kappa(r^2) dr
};

CornerPrediction corner_prediction_2d(const Kernel& kernel, const CornerInfo& corner);

struct AsymptoteRow {
    double t;
    Vec x;
    Vec grad;
    double mag_scaled;   // sqrt(t) |grad| / xi
    double angle_deg;    // angle between grad and -n(x)
};

// Rows sorted by increasing t.  R defaults per kernel; quad is evaluation
// points per axis.
std::vector<AsymptoteRow> smooth_asymptote_check(const Shape& shape, const Kernel& kernel,
                                                 std::vector<double> ts,
                                                 const std::vector<Vec>& points, int quad = 512);

// Outward normal oracle: exact for balls/halfspaces, otherwise the normalized
// central-difference gradient of the signed distance (step 1e-5).
Vec normal_at(const Shape& shape, const Vec& x);

}  // namespace shapepde
