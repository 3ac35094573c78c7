#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace shapepde {

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int max_depth = 40) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

struct TailIntegral {
    double value = 0.0;
    bool converged = false;
    double last_increment = 0.0;
};

// integral over [0, inf) by doubling panels until increments stop mattering;
// non-shrinking increments flag a divergent integrand.
inline TailIntegral integrate_to_infinity(const std::function<double(double)>& f, double tol = 1e-11,
                                          double first = 1.0, int max_panels = 48) {
    TailIntegral out;
    double a = 0.0, b = first;
    double prev_inc = std::numeric_limits<double>::infinity();
    int grown = 0;
    for (int p = 0; p < max_panels; ++p) {
        double inc = adaptive_simpson(f, a, b, tol);
        out.value += inc;
        out.last_increment = inc;
        double scale = std::max(1.0, std::abs(out.value));
        if (std::abs(inc) < tol * scale && p > 2) {
            out.converged = true;
            return out;
        }
        if (std::abs(inc) > std::abs(prev_inc) * 0.9) ++grown;  // stagnating or growing tail
        if (grown > 6) return out;                              // diverging
        prev_inc = inc;
        a = b;
        b *= 2.0;
    }
    return out;
}

// One-dimensional panel rule: uniform cells with a symmetric two-point Gauss
// pair per cell.  `points` counts total evaluations per axis (two per cell).
struct PanelRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline PanelRule gauss2_panels(double lo, double hi, int points) {
    if (points < 2 || points % 2 != 0) throw std::invalid_argument("panel rule needs an even point count");
    const int cells = points / 2;
    const double h = (hi - lo) / cells;
    const double off = h / (2.0 * std::sqrt(3.0));
    PanelRule r;
    r.nodes.reserve(points);
    r.weights.assign(points, 0.5 * h);
    for (int c = 0; c < cells; ++c) {
        double center = lo + (c + 0.5) * h;
        r.nodes.push_back(center - off);
        r.nodes.push_back(center + off);
    }
    return r;
}

}  // namespace shapepde
