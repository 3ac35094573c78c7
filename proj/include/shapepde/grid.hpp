#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "shapepde/geometry.hpp"

namespace shapepde {

// Uniform node-centered Cartesian grid over a box; nodes include the box faces.
struct Grid {
    Vec lo, hi;
    Eigen::VectorXi n;  // nodes per axis, >= 3
    Vec h;              // spacing per axis

    Grid() = default;
    Grid(Vec lo_, Vec hi_, Eigen::VectorXi n_) : lo(std::move(lo_)), hi(std::move(hi_)), n(std::move(n_)) {
        if (lo.size() != hi.size() || lo.size() != n.size())
            throw std::invalid_argument("grid box/node dimensions differ");
        h.resize(lo.size());
        for (int d = 0; d < dim(); ++d) {
            if (n(d) < 3) throw std::invalid_argument("grid needs n >= 3 per axis");
            if (!(lo(d) < hi(d))) throw std::invalid_argument("grid box requires lo < hi");
            h(d) = (hi(d) - lo(d)) / (n(d) - 1);
        }
    }

    int dim() const { return static_cast<int>(lo.size()); }

    Eigen::Index node_count() const {
        Eigen::Index c = 1;
        for (int d = 0; d < dim(); ++d) c *= n(d);
        return c;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim(); ++d) v *= h(d);
        return v;
    }

    // Flattened index, first axis fastest.
    Eigen::Index index(const Eigen::VectorXi& ijk) const {
        Eigen::Index idx = 0;
        for (int d = dim() - 1; d >= 0; --d) idx = idx * n(d) + ijk(d);
        return idx;
    }

    Eigen::VectorXi multi_index(Eigen::Index flat) const {
        Eigen::VectorXi ijk(dim());
        for (int d = 0; d < dim(); ++d) {
            ijk(d) = static_cast<int>(flat % n(d));
            flat /= n(d);
        }
        return ijk;
    }

    Vec node(const Eigen::VectorXi& ijk) const {
        Vec x(dim());
        for (int d = 0; d < dim(); ++d) x(d) = lo(d) + ijk(d) * h(d);
        return x;
    }

    Vec node(Eigen::Index flat) const { return node(multi_index(flat)); }

    bool on_face(const Eigen::VectorXi& ijk) const {
        for (int d = 0; d < dim(); ++d)
            if (ijk(d) == 0 || ijk(d) == n(d) - 1) return true;
        return false;
    }

    Eigen::Index stride(int axis) const {
        Eigen::Index s = 1;
        for (int d = 0; d < axis; ++d) s *= n(d);
        return s;
    }
};

template <class Scalar>
struct ScalarFieldT {
    Grid grid;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;

    ScalarFieldT() = default;
    explicit ScalarFieldT(Grid g, Scalar fill = Scalar(0))
        : grid(std::move(g)),
          values(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(grid.node_count(), fill)) {}
};

template <class Scalar>
struct VectorFieldT {
    Grid grid;
    // node_count x dim, one column per component
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;

    VectorFieldT() = default;
    explicit VectorFieldT(Grid g)
        : grid(std::move(g)),
          values(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(grid.node_count(),
                                                                             grid.dim())) {}
};

using ScalarField = ScalarFieldT<double>;
using VectorField = VectorFieldT<double>;

// Node value = fraction of s^N sub-cell midpoints inside the shape; s = 1
// samples the node itself.
template <class Scalar = double>
ScalarFieldT<Scalar> rasterize_indicator(const Grid& grid, const Shape& shape, int supersample = 4) {
    if (shape.dim != grid.dim()) throw std::invalid_argument("rasterize: shape/grid dimension mismatch");
    if (supersample < 1) throw std::invalid_argument("rasterize: supersample >= 1");
    ScalarFieldT<Scalar> out(grid);
    const int d = grid.dim();
    const int s = supersample;
    Eigen::Index sub_count = 1;
    for (int k = 0; k < d; ++k) sub_count *= s;
    Vec x(d), y(d);
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
        x = grid.node(i);
        int hits = 0;
        for (Eigen::Index sub = 0; sub < sub_count; ++sub) {
            Eigen::Index rem = sub;
            for (int k = 0; k < d; ++k) {
                int j = static_cast<int>(rem % s);
                rem /= s;
                y(k) = x(k) + ((j + 0.5) / s - 0.5) * grid.h(k);
            }
            if (contains(shape, y)) ++hits;
        }
        out.values(i) = Scalar(hits) / Scalar(sub_count);
    }
    return out;
}

// Second-order central differences interiorly, one-sided first order on faces.
template <class Scalar>
VectorFieldT<Scalar> central_gradient(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    VectorFieldT<Scalar> out(g);
    const int d = g.dim();
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        Eigen::VectorXi ijk = g.multi_index(i);
        for (int ax = 0; ax < d; ++ax) {
            const Eigen::Index s = g.stride(ax);
            const Scalar h = Scalar(g.h(ax));
            if (ijk(ax) == 0)
                out.values(i, ax) = (f.values(i + s) - f.values(i)) / h;
            else if (ijk(ax) == g.n(ax) - 1)
                out.values(i, ax) = (f.values(i) - f.values(i - s)) / h;
            else
                out.values(i, ax) = (f.values(i + s) - f.values(i - s)) / (Scalar(2) * h);
        }
    }
    return out;
}

template <class Scalar>
struct FieldNorms {
    Scalar l2;
    Scalar h1_semi;
};

// Trapezoidal node weights: face nodes carry half weight per touching face,
// so constants integrate exactly over the box.
template <class Scalar>
Scalar node_weight(const Grid& g, const Eigen::VectorXi& ijk) {
    Scalar w = Scalar(g.cell_volume());
    for (int d = 0; d < g.dim(); ++d)
        if (ijk(d) == 0 || ijk(d) == g.n(d) - 1) w *= Scalar(0.5);
    return w;
}

template <class Scalar>
FieldNorms<Scalar> discrete_norms(const ScalarFieldT<Scalar>& f) {
    const Grid& g = f.grid;
    auto grad = central_gradient(f);
    Scalar sum_v = Scalar(0), sum_g = Scalar(0);
    for (Eigen::Index i = 0; i < g.node_count(); ++i) {
        const Scalar w = node_weight<Scalar>(g, g.multi_index(i));
        sum_v += w * f.values(i) * f.values(i);
        sum_g += w * grad.values.row(i).squaredNorm();
    }
    return {std::sqrt(sum_v), std::sqrt(sum_g)};
}

// Multilinear interpolation from the 2^N surrounding nodes.
template <class Scalar>
Scalar interpolate(const ScalarFieldT<Scalar>& f, const Vec& x) {
    const Grid& g = f.grid;
    const int d = g.dim();
    if (x.size() != d) throw std::invalid_argument("interpolate: dimension mismatch");
    Eigen::VectorXi base(d);
    Vec frac(d);
    for (int k = 0; k < d; ++k) {
        double t = (x(k) - g.lo(k)) / g.h(k);
        if (t < -1e-12 || t > g.n(k) - 1 + 1e-12)
            throw std::out_of_range("interpolate: point outside grid box");
        int i = static_cast<int>(std::floor(t));
        i = std::max(0, std::min(i, g.n(k) - 2));
        base(k) = i;
        frac(k) = t - i;
    }
    Scalar acc = Scalar(0);
    const int combos = 1 << d;
    for (int c = 0; c < combos; ++c) {
        double w = 1.0;
        Eigen::VectorXi ijk = base;
        for (int k = 0; k < d; ++k) {
            if (c & (1 << k)) {
                ijk(k) += 1;
                w *= frac(k);
            } else {
                w *= 1.0 - frac(k);
            }
        }
        acc += Scalar(w) * f.values(g.index(ijk));
    }
    return acc;
}

template <class Scalar>
Vec interpolate(const VectorFieldT<Scalar>& f, const Vec& x) {
    Vec out(f.grid.dim());
    ScalarFieldT<Scalar> comp;
    comp.grid = f.grid;
    for (int c = 0; c < f.grid.dim(); ++c) {
        comp.values = f.values.col(c);
        out(c) = static_cast<double>(interpolate(comp, x));
    }
    return out;
}

namespace detail {
inline void csv_number(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
}
}  // namespace detail

// CSV dump: i,j[,k],x,y[,z],value[,vx,vy,vz]; first index fastest, 17
// significant digits.
template <class Scalar>
void write_csv(const Grid& grid, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& cols,
               const std::vector<std::string>& names, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    const int d = grid.dim();
    std::string header = d == 3 ? "i,j,k,x,y,z" : (d == 2 ? "i,j,x,y" : "i,x");
    for (const auto& n : names) header += "," + n;
    out << header << "\n";
    for (Eigen::Index idx = 0; idx < grid.node_count(); ++idx) {
        Eigen::VectorXi ijk = grid.multi_index(idx);
        Vec x = grid.node(ijk);
        std::string line;
        for (int k = 0; k < d; ++k) line += std::to_string(ijk(k)) + ",";
        for (int k = 0; k < d; ++k) {
            detail::csv_number(line, x(k));
            line += ",";
        }
        for (Eigen::Index c = 0; c < cols.cols(); ++c) {
            detail::csv_number(line, static_cast<double>(cols(idx, c)));
            if (c + 1 < cols.cols()) line += ",";
        }
        out << line << "\n";
    }
}

template <class Scalar>
void write_csv(const ScalarFieldT<Scalar>& f, const std::string& path) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cols = f.values;
    write_csv(f.grid, cols, {"value"}, path);
}

template <class Scalar>
void write_csv(const VectorFieldT<Scalar>& f, const std::string& path) {
    std::vector<std::string> names;
    const char* comp = "xyz";
    for (int c = 0; c < f.grid.dim(); ++c) names.push_back(std::string("v") + comp[c]);
    write_csv(f.grid, f.values, names, path);
}

}  // namespace shapepde
