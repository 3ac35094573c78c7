#pragma once

#include <Eigen/Sparse>
#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "shapepde/grid.hpp"
#include "shapepde/quadrature.hpp"

namespace shapepde {

struct SolveReport {
    Eigen::Index iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

using DirichletData = std::function<double(const Vec&)>;

inline DirichletData constant_dirichlet(double g) {
    return [g](const Vec&) { return g; };
}

// -a*Laplace(u) + c(x)*u = f on the grid box, u = gD on the box faces.
// 3/5/7-point stencil, face nodes eliminated into the right-hand side so the
// interior operator stays symmetric positive definite; Jacobi-preconditioned
// conjugate gradients from a zero initial guess.  The returned field carries
// the Dirichlet face values.
template <class Scalar>
std::pair<ScalarFieldT<Scalar>, SolveReport> assemble_and_solve(
    const Grid& grid, double a, const ScalarFieldT<Scalar>& c, const ScalarFieldT<Scalar>& f,
    const DirichletData& gD, double tol = 1e-10, Eigen::Index maxit = 0) {
    if (!(a > 0.0)) throw std::invalid_argument("diffusion coefficient a must be positive");
    if (!(tol > 0.0 && tol <= 1e-2)) throw std::invalid_argument("solver tol must lie in (0, 1e-2]");
    if ((c.values.array() < Scalar(0)).any())
        throw std::invalid_argument("reaction coefficient c must be nonnegative (SPD)");
    const int d = grid.dim();
    if (maxit <= 0) maxit = 20 * static_cast<Eigen::Index>(std::sqrt(double(grid.node_count()))) + 100;

    // interior node numbering
    std::vector<Eigen::Index> interior_of_node(grid.node_count(), -1);
    std::vector<Eigen::Index> node_of_interior;
    node_of_interior.reserve(grid.node_count());
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
        if (!grid.on_face(grid.multi_index(i))) {
            interior_of_node[i] = static_cast<Eigen::Index>(node_of_interior.size());
            node_of_interior.push_back(i);
        }
    }
    const Eigen::Index m = static_cast<Eigen::Index>(node_of_interior.size());

    using Triplet = Eigen::Triplet<Scalar>;
    std::vector<Triplet> trips;
    trips.reserve(m * (2 * d + 1));
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b(m);
    for (Eigen::Index row = 0; row < m; ++row) {
        const Eigen::Index node = node_of_interior[row];
        const Eigen::VectorXi ijk = grid.multi_index(node);
        Scalar diag = c.values(node);
        Scalar rhs = f.values(node);
        for (int ax = 0; ax < d; ++ax) {
            const Scalar w = Scalar(a) / (Scalar(grid.h(ax)) * Scalar(grid.h(ax)));
            diag += Scalar(2) * w;
            for (int side = -1; side <= 1; side += 2) {
                Eigen::VectorXi nb = ijk;
                nb(ax) += side;
                const Eigen::Index nb_node = grid.index(nb);
                const Eigen::Index nb_row = interior_of_node[nb_node];
                if (nb_row >= 0)
                    trips.emplace_back(row, nb_row, -w);
                else
                    rhs += w * Scalar(gD(grid.node(nb)));
            }
        }
        trips.emplace_back(row, row, diag);
        b(row) = rhs;
    }
    Eigen::SparseMatrix<Scalar> A(m, m);
    A.setFromTriplets(trips.begin(), trips.end());

    Eigen::ConjugateGradient<Eigen::SparseMatrix<Scalar>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<Scalar>>
        cg;
    cg.setTolerance(Scalar(tol));
    cg.setMaxIterations(maxit);
    cg.compute(A);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = cg.solve(b);

    SolveReport report;
    report.iterations = cg.iterations();
    report.relative_residual = static_cast<double>(cg.error());
    report.converged = cg.info() == Eigen::Success;

    ScalarFieldT<Scalar> u(grid);
    for (Eigen::Index i = 0; i < grid.node_count(); ++i) {
        const Eigen::Index row = interior_of_node[i];
        u.values(i) = row >= 0 ? x(row) : Scalar(gD(grid.node(i)));
    }
    return {std::move(u), report};
}

// Discrete maximum principle: 0 < u <= max(sup f, sup g).
template <class Scalar>
bool max_principle_holds(const ScalarFieldT<Scalar>& u, const ScalarFieldT<Scalar>& f, double g_max) {
    const Scalar upper = std::max(Scalar(g_max), f.values.maxCoeff());
    return u.values.minCoeff() > Scalar(0) && u.values.maxCoeff() <= upper;
}

// The M-matrix structure bounds the exact discrete solution by
// max(sup f, sup g); iterative round-off can overshoot that bound when the
// true margin 1 - u sits below machine epsilon (far-field nodes of small-a
// screened solves).  Projecting back is exact-arithmetic-faithful; anything
// beyond round-off scale signals a real solver failure and throws.
template <class Scalar>
Eigen::Index project_to_upper_bound(ScalarFieldT<Scalar>& u, Scalar bound,
                                    double roundoff_allowance = 1e-8) {
    Scalar worst = Scalar(0);
    Eigen::Index touched = 0;
    for (Eigen::Index i = 0; i < u.values.size(); ++i) {
        if (u.values(i) > bound) {
            worst = std::max(worst, u.values(i) - bound);
            u.values(i) = bound;
            ++touched;
        }
    }
    if (static_cast<double>(worst) > roundoff_allowance * std::max(1.0, static_cast<double>(bound)))
        throw std::runtime_error("solution exceeds the maximum-principle bound beyond round-off");
    return touched;
}

// ---------------------------------------------------------------------------
// One-dimensional oracle: -a u'' + u = f with piecewise-linear f, exact up to
// the 2K x 2K matching solve.  Basis per piece is the pair of decaying
// exponentials anchored at the piece ends, so entries never overflow.

struct LinearPiece {
    double value = 0.0;  // f at the left end of the piece
    double slope = 0.0;
};

class Ode1dSolution {
public:
    Ode1dSolution(double a, std::vector<double> breakpoints, std::vector<LinearPiece> pieces,
                  double g_left, double g_right)
        : sqrt_a_(std::sqrt(a)), bps_(std::move(breakpoints)), pieces_(std::move(pieces)) {
        if (!(a > 0.0)) throw std::invalid_argument("ode1d: a must be positive");
        const int K = static_cast<int>(pieces_.size());
        if (static_cast<int>(bps_.size()) != K + 1 || K < 1)
            throw std::invalid_argument("ode1d: breakpoints must bracket the pieces");
        for (int k = 0; k < K; ++k)
            if (!(bps_[k] < bps_[k + 1])) throw std::invalid_argument("ode1d: breakpoints must increase");

        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * K, 2 * K);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * K);
        auto decay = [&](int k) { return std::exp(-(bps_[k + 1] - bps_[k]) / sqrt_a_); };
        int row = 0;
        M(row, 0) = 1.0;
        M(row, 1) = decay(0);
        rhs(row) = g_left - fval(0, bps_[0]);
        ++row;
        for (int k = 0; k + 1 < K; ++k) {
            const double xk = bps_[k + 1];
            M(row, 2 * k) = decay(k);
            M(row, 2 * k + 1) = 1.0;
            M(row, 2 * k + 2) = -1.0;
            M(row, 2 * k + 3) = -decay(k + 1);
            rhs(row) = fval(k + 1, xk) - fval(k, xk);
            ++row;
            M(row, 2 * k) = -decay(k) / sqrt_a_;
            M(row, 2 * k + 1) = 1.0 / sqrt_a_;
            M(row, 2 * k + 2) = 1.0 / sqrt_a_;
            M(row, 2 * k + 3) = -decay(k + 1) / sqrt_a_;
            rhs(row) = pieces_[k + 1].slope - pieces_[k].slope;
            ++row;
        }
        M(row, 2 * K - 2) = decay(K - 1);
        M(row, 2 * K - 1) = 1.0;
        rhs(row) = g_right - fval(K - 1, bps_[K]);

        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible()) throw std::runtime_error("ode1d: singular matching system");
        coef_ = lu.solve(rhs);
    }

    double operator()(double x) const {
        const int K = static_cast<int>(pieces_.size());
        int k = static_cast<int>(std::upper_bound(bps_.begin(), bps_.end(), x) - bps_.begin()) - 1;
        k = std::max(0, std::min(k, K - 1));
        const double A = coef_(2 * k), B = coef_(2 * k + 1);
        return fval(k, x) + A * std::exp(-(x - bps_[k]) / sqrt_a_) +
               B * std::exp(-(bps_[k + 1] - x) / sqrt_a_);
    }

    double sqrt_a() const { return sqrt_a_; }

private:
    double fval(int k, double x) const { return pieces_[k].value + pieces_[k].slope * (x - bps_[k]); }

    double sqrt_a_;
    std::vector<double> bps_;
    std::vector<LinearPiece> pieces_;
    Eigen::VectorXd coef_;
};

inline Ode1dSolution solve_ode_1d(double a, std::vector<double> breakpoints,
                                  std::vector<LinearPiece> pieces, double g_left, double g_right) {
    return Ode1dSolution(a, std::move(breakpoints), std::move(pieces), g_left, g_right);
}

inline Ode1dSolution solve_ode_1d(double a, std::vector<double> breakpoints,
                                  std::vector<double> constant_pieces, double g_left, double g_right) {
    std::vector<LinearPiece> pieces;
    pieces.reserve(constant_pieces.size());
    for (double v : constant_pieces) pieces.push_back({v, 0.0});
    return Ode1dSolution(a, std::move(breakpoints), std::move(pieces), g_left, g_right);
}

// Comparison function on a ball (the explicit barrier of the distance proof):
//   w(r) = M * I(r) / I(eps),  I(r) = int_0^pi cosh(r cos(th)/sqrt(a)) sin^(N-2)(th) dth
// for N >= 2, and the plain cosh ratio in one dimension.  Evaluated with the
// integrands rescaled by exp(-r/sqrt(a)) so large arguments cannot overflow.
inline double ball_comparison_w(double a, double M, double eps, int N, double r) {
    if (!(a > 0.0)) throw std::invalid_argument("ball_comparison_w: a must be positive");
    if (r < 0.0 || r > eps) throw std::invalid_argument("ball_comparison_w: need 0 <= r <= eps");
    if (N < 1) throw std::invalid_argument("ball_comparison_w: N >= 1");
    const double sa = std::sqrt(a);
    if (N == 1) {
        // cosh(r/sa)/cosh(eps/sa), scaled
        double num = 1.0 + std::exp(-2.0 * r / sa);
        double den = 1.0 + std::exp(-2.0 * eps / sa);
        return M * std::exp((r - eps) / sa) * num / den;
    }
    auto scaled = [&](double c) {
        // exp(-c) * int_0^pi cosh(c cos th) sin^(N-2) th dth
        auto f = [&](double th) {
            double s = std::sin(th);
            double pw = N == 2 ? 1.0 : std::pow(s, N - 2);
            return 0.5 * (std::exp(c * (std::cos(th) - 1.0)) + std::exp(-c * (std::cos(th) + 1.0))) * pw;
        };
        return adaptive_simpson(f, 0.0, std::numbers::pi, 1e-14);
    };
    double num = scaled(r / sa);
    double den = scaled(eps / sa);
    if (!(den > 0.0) || !std::isfinite(num))
        throw std::runtime_error("ball_comparison_w: quadrature failed");
    return M * std::exp((r - eps) / sa) * num / den;
}

}  // namespace shapepde
