#include "shapepde/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapepde {

double distance_to_box_boundary(const Grid& grid, const Vec& x) {
    double m = std::numeric_limits<double>::infinity();
    for (int d = 0; d < grid.dim(); ++d)
        m = std::min({m, x(d) - grid.lo(d), grid.hi(d) - x(d)});
    return m;
}

ScalarField omega_star_mask(const Grid& grid, const Shape& shape) {
    ScalarField mask(grid);
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
        Vec x = grid.node(i);
        double d_a = std::abs(signed_distance_exact(shape, x));
        mask.values(i) = d_a <= distance_to_box_boundary(grid, x) ? 1.0 : 0.0;
    }
    return mask;
}

namespace {

ModelFit fit_single(const std::string& name, const std::vector<double>& x,
                    const std::vector<double>& y) {
    double sxy = 0.0, sxx = 0.0, sy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        sy += y[i];
    }
    const double c = sxx > 0.0 ? sxy / sxx : 0.0;
    const double mean = sy / y.size();
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        ss_res += (y[i] - c * x[i]) * (y[i] - c * x[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return {name, c, ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0};
}

}  // namespace

std::vector<ModelFit> fit_rate_models(const std::vector<double>& a, const std::vector<double>& err) {
    if (a.size() != err.size() || a.size() < 3)
        throw std::invalid_argument("fit_rate_models: need >= 3 matched samples");
    std::vector<ModelFit> fits;
    std::vector<double> x(a.size());
    for (size_t i = 0; i < a.size(); ++i) x[i] = std::sqrt(a[i]) * std::log(1.0 / a[i]);
    fits.push_back(fit_single("sqrt_a_log", x, err));
    for (double tau : {0.05, 0.1, 0.2}) {
        for (size_t i = 0; i < a.size(); ++i) x[i] = std::pow(a[i], 0.5 - tau);
        char name[32];
        std::snprintf(name, sizeof(name), "pow_tau%.2f", tau);
        fits.push_back(fit_single(name, x, err));
    }
    return fits;
}

RateStudy rate_study(const std::vector<double>& a_list,
                     const std::function<double(double)>& sup_error_for_a) {
    for (size_t i = 1; i < a_list.size(); ++i)
        if (!(a_list[i] < a_list[i - 1]))
            throw std::invalid_argument("rate_study: a values must be strictly decreasing");
    RateStudy study;
    study.a = a_list;
    for (double a : a_list) {
        double e = sup_error_for_a(a);
        if (!std::isfinite(e)) throw std::runtime_error("rate_study: non-finite sup error");
        study.sup_error.push_back(e);
    }
    for (size_t i = 1; i < study.sup_error.size(); ++i)
        if (study.sup_error[i] > 1.1 * study.sup_error[i - 1]) study.monotone = false;
    study.fits = fit_rate_models(study.a, study.sup_error);
    study.best_model = std::max_element(study.fits.begin(), study.fits.end(),
                                        [](const ModelFit& l, const ModelFit& r) {
                                            return l.r2 < r.r2;
                                        })
                           ->name;
    return study;
}

double ball_mean(const std::function<double(const Vec&)>& f, const Vec& y, double eps,
                 int pts_per_axis) {
    const int d = static_cast<int>(y.size());
    Eigen::Index total = 1;
    for (int k = 0; k < d; ++k) total *= pts_per_axis;
    double acc = 0.0;
    Eigen::Index hits = 0;
    Vec x(d);
    for (Eigen::Index flat = 0; flat < total; ++flat) {
        Eigen::Index rem = flat;
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
            int i = static_cast<int>(rem % pts_per_axis);
            rem /= pts_per_axis;
            double off = ((i + 0.5) / pts_per_axis * 2.0 - 1.0) * eps;
            x(k) = y(k) + off;
            r2 += off * off;
        }
        if (r2 < eps * eps) {
            acc += f(x);
            ++hits;
        }
    }
    if (hits == 0) throw std::runtime_error("ball_mean: empty quadrature");
    return acc / static_cast<double>(hits);
}

ZetaEstimate zeta_probe(const std::function<double(const Vec&)>& f, const Shape& shape,
                        const std::vector<double>& eps_list, int k, int boundary_samples) {
    if (eps_list.size() < 4) throw std::invalid_argument("zeta_probe: need >= 4 radii");
    if (k != 1 && k != 2) throw std::invalid_argument("zeta_probe: k must be 1 or 2");
    const double span = *std::max_element(eps_list.begin(), eps_list.end()) /
                        *std::min_element(eps_list.begin(), eps_list.end());
    if (span < 99.0) throw std::invalid_argument("zeta_probe: eps list must span >= 2 decades");

    auto fk = [&](const Vec& x) {
        double v = f(x);
        return k == 1 ? v : v * v;
    };
    std::vector<double> slopes;
    for (const auto& bs : sample_boundary(shape, std::max(8, boundary_samples))) {
        if (static_cast<int>(slopes.size()) >= boundary_samples) break;
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(eps_list.size());
        for (double eps : eps_list) {
            double v = ball_mean(fk, bs.point, eps);
            if (!(v > 0.0)) throw std::runtime_error("zeta_probe: degenerate fit, f vanishes near sample");
            double lx = std::log(eps), ly = std::log(v);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        slopes.push_back(slope / k);
    }
    std::sort(slopes.begin(), slopes.end());
    ZetaEstimate est;
    est.min = slopes.front();
    est.max = slopes.back();
    est.median = slopes[slopes.size() / 2];
    return est;
}

std::vector<Vec> probe_lattice(const Vec& lo, const Vec& hi, int per_axis) {
    const int d = static_cast<int>(lo.size());
    Eigen::Index total = 1;
    for (int k = 0; k < d; ++k) total *= per_axis;
    std::vector<Vec> pts;
    pts.reserve(total);
    Vec x(d);
    for (Eigen::Index flat = 0; flat < total; ++flat) {
        Eigen::Index rem = flat;
        for (int k = 0; k < d; ++k) {
            int i = static_cast<int>(rem % per_axis);
            rem /= per_axis;
            x(k) = lo(k) + (i + 0.5) / per_axis * (hi(k) - lo(k));
        }
        pts.push_back(x);
    }
    return pts;
}

}  // namespace shapepde
