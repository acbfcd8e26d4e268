#pragma once

// Direct-sum Hilbert space layer: intervals, Hermitian positive-definite
// coefficients, vector-valued grid functions, trapezoid inner products,
// finite-difference derivatives and the formal expression -u'' + iAu.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "opspec/errors.hpp"

namespace opspec {

using complexd = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

inline constexpr complexd kI{0.0, 1.0};

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

/// Deterministic RNG with a portable Gaussian (Box-Muller on mt19937_64
/// uniforms; std::normal_distribution sequences are implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        // 53-bit mantissa double in [0, 1)
        return (gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    complexd cgaussian() {
        double re = gaussian();
        double im = gaussian();
        return complexd(re, im) / std::sqrt(2.0);
    }

private:
    std::mt19937_64 gen_;
};

} // namespace detail

/// Open interval (a, b), a < b, finite.
struct Interval {
    double a;
    double b;

    Interval(double a_, double b_) : a(a_), b(b_) {
        if (!std::isfinite(a) || !std::isfinite(b))
            throw validation_error("interval endpoints must be finite");
        if (!(a < b))
            throw validation_error("interval requires a < b, got [" +
                                   detail::fmt(a) + ", " + detail::fmt(b) + "]");
    }

    double length() const { return b - a; }

    bool operator==(const Interval& o) const { return a == o.a && b == o.b; }
};

/// Hermitian positive-definite coefficient A with its cached
/// eigendecomposition A = Q diag(alpha) Q* and operator square roots.
class CoefficientMatrix {
public:
    explicit CoefficientMatrix(cmat entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
            throw shape_error("coefficient matrix must be square and nonempty");
        const double scale = entries_.norm();
        const double herm = (entries_ - entries_.adjoint()).norm();
        if (!(scale > 0.0) || herm > 1e-12 * scale)
            throw validation_error(
                "coefficient matrix not Hermitian (relative defect " +
                detail::fmt(scale > 0 ? herm / scale : 1.0) + ")");
        Eigen::SelfAdjointEigenSolver<cmat> es(entries_);
        if (es.info() != Eigen::Success)
            throw eigensolver_error("coefficient eigendecomposition failed");
        alpha_ = es.eigenvalues();
        q_ = es.eigenvectors();
        if (!(alpha_.minCoeff() > 1e-10))
            throw validation_error(
                "coefficient matrix not positive definite (min eigenvalue " +
                detail::fmt(alpha_.minCoeff()) + ")");
        const cmat recon = q_ * alpha_.asDiagonal() * q_.adjoint();
        if ((recon - entries_).norm() > 1e-10 * scale)
            throw eigensolver_error("coefficient eigendecomposition inaccurate");
        sqrt_ = q_ * alpha_.cwiseSqrt().asDiagonal() * q_.adjoint();
        inv_sqrt_ = q_ * alpha_.cwiseSqrt().cwiseInverse().asDiagonal() * q_.adjoint();
        if ((sqrt_ * sqrt_ - entries_).norm() > 1e-10 * scale)
            throw eigensolver_error("coefficient square root inaccurate");
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const cmat& entries() const { return entries_; }
    /// Eigenvalues in ascending order.
    const rvec& eigenvalues() const { return alpha_; }
    /// Unitary eigenvector matrix, columns matching eigenvalues().
    const cmat& eigenvectors() const { return q_; }
    const cmat& sqrt() const { return sqrt_; }
    const cmat& inv_sqrt() const { return inv_sqrt_; }
    /// Spectral norm; equals the largest eigenvalue for a PD matrix.
    double spectral_norm() const { return alpha_.maxCoeff(); }

private:
    cmat entries_;
    cmat q_;
    rvec alpha_;
    cmat sqrt_;
    cmat inv_sqrt_;
};

/// One summand of the direct sum: an interval carrying a coefficient.
/// index is 1-based and identifies the block inside a problem.
struct Block {
    int index;
    Interval interval;
    CoefficientMatrix coefficient;

    Block(int index_, Interval iv, CoefficientMatrix coeff)
        : index(index_), interval(iv), coefficient(std::move(coeff)) {
        if (index < 1) throw validation_error("block index must be >= 1");
    }

    int dim() const { return coefficient.dim(); }

    /// Same slot of the direct sum: index, interval and dimension agree.
    bool same_slot(const Block& o) const {
        return index == o.index && interval == o.interval && dim() == o.dim();
    }
};

/// Vector-valued function sampled on the uniform grid t_k = a + k h,
/// k = 0..m-1, h = (b-a)/(m-1). Row k of values() is u(t_k).
class GridFunction {
public:
    GridFunction(Block block, cmat values)
        : block_(std::move(block)), values_(std::move(values)) {
        if (values_.rows() < 5)
            throw grid_error("grid too coarse: need at least 5 nodes, got " +
                             std::to_string(values_.rows()));
        if (values_.cols() != block_.dim())
            throw shape_error("grid function has " + std::to_string(values_.cols()) +
                              " components, block expects " + std::to_string(block_.dim()));
        if (!values_.allFinite())
            throw validation_error("grid function contains non-finite values");
    }

    static GridFunction from_callable(const Block& block, int m,
                                      const std::function<cvec(double)>& f) {
        if (m < 5)
            throw grid_error("grid too coarse: need at least 5 nodes, got " +
                             std::to_string(m));
        cmat vals(m, block.dim());
        const double h = block.interval.length() / (m - 1);
        for (int k = 0; k < m; ++k) {
            cvec row = f(block.interval.a + k * h);
            if (row.size() != block.dim())
                throw shape_error("callable returned wrong component count");
            vals.row(k) = row.transpose();
        }
        return GridFunction(block, std::move(vals));
    }

    const Block& block() const { return block_; }
    const cmat& values() const { return values_; }
    int m() const { return static_cast<int>(values_.rows()); }
    int dim() const { return static_cast<int>(values_.cols()); }
    double h() const { return block_.interval.length() / (m() - 1); }
    double node(int k) const { return block_.interval.a + k * h(); }

private:
    Block block_;
    cmat values_;
};

namespace detail {

inline void require_same_grid(const GridFunction& u, const GridFunction& v,
                              const char* what) {
    if (!u.block().same_slot(v.block()) || u.m() != v.m())
        throw shape_error(std::string(what) + ": operands on different blocks or grids");
}

/// One-sided second-order first-derivative stencils at the endpoints.
inline cvec edge_derivative_a(const GridFunction& u) {
    const cmat& v = u.values();
    return (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)).transpose() / (2.0 * u.h());
}

inline cvec edge_derivative_b(const GridFunction& u) {
    const cmat& v = u.values();
    const int n = u.m() - 1;
    return (3.0 * v.row(n) - 4.0 * v.row(n - 1) + v.row(n - 2)).transpose() / (2.0 * u.h());
}

} // namespace detail

inline GridFunction operator+(const GridFunction& u, const GridFunction& v) {
    detail::require_same_grid(u, v, "operator+");
    return GridFunction(u.block(), u.values() + v.values());
}

inline GridFunction operator-(const GridFunction& u, const GridFunction& v) {
    detail::require_same_grid(u, v, "operator-");
    return GridFunction(u.block(), u.values() - v.values());
}

inline GridFunction operator*(complexd c, const GridFunction& u) {
    return GridFunction(u.block(), c * u.values());
}

/// Composite trapezoid inner product, conjugate linear in the second
/// argument: (u, v) = h * sum_k w_k <u(t_k), conj v(t_k)>.
inline complexd inner_product(const GridFunction& u, const GridFunction& v) {
    detail::require_same_grid(u, v, "inner_product");
    const cmat& a = u.values();
    const cmat& b = v.values();
    complexd s = 0.5 * (b.row(0).conjugate() * a.row(0).transpose()).value();
    for (int k = 1; k + 1 < u.m(); ++k)
        s += (b.row(k).conjugate() * a.row(k).transpose()).value();
    s += 0.5 * (b.row(u.m() - 1).conjugate() * a.row(u.m() - 1).transpose()).value();
    return u.h() * s;
}

inline double norm(const GridFunction& u) {
    return std::sqrt(std::max(0.0, inner_product(u, u).real()));
}

/// Second-order finite-difference derivative of the given order (1 or 2).
/// Interior nodes use central stencils, endpoints one-sided stencils of the
/// same order of accuracy.
inline GridFunction derivative(const GridFunction& u, int order) {
    if (order != 1 && order != 2)
        throw validation_error("derivative order must be 1 or 2");
    const int m = u.m();
    const cmat& v = u.values();
    const double h = u.h();
    cmat out(m, u.dim());
    if (order == 1) {
        out.row(0) = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)) / (2.0 * h);
        for (int k = 1; k + 1 < m; ++k)
            out.row(k) = (v.row(k + 1) - v.row(k - 1)) / (2.0 * h);
        out.row(m - 1) = (3.0 * v.row(m - 1) - 4.0 * v.row(m - 2) + v.row(m - 3)) / (2.0 * h);
    } else {
        const double h2 = h * h;
        out.row(0) = (2.0 * v.row(0) - 5.0 * v.row(1) + 4.0 * v.row(2) - v.row(3)) / h2;
        for (int k = 1; k + 1 < m; ++k)
            out.row(k) = (v.row(k - 1) - 2.0 * v.row(k) + v.row(k + 1)) / h2;
        out.row(m - 1) =
            (2.0 * v.row(m - 1) - 5.0 * v.row(m - 2) + 4.0 * v.row(m - 3) - v.row(m - 4)) / h2;
    }
    return GridFunction(u.block(), std::move(out));
}

namespace detail {

inline void require_applicable(const Block& block, const GridFunction& u) {
    if (block.dim() != u.dim())
        throw shape_error("coefficient dimension " + std::to_string(block.dim()) +
                          " does not match function components " + std::to_string(u.dim()));
    if (!(block.interval == u.block().interval))
        throw shape_error("function sampled on a different interval than the block");
}

} // namespace detail

/// Formal differential expression l(u) = -u'' + iAu, evaluated nodewise.
inline GridFunction apply_expression(const Block& block, const GridFunction& u) {
    detail::require_applicable(block, u);
    GridFunction upp = derivative(u, 2);
    cmat out = -upp.values() + kI * (u.values() * block.coefficient.entries().transpose());
    return GridFunction(u.block(), std::move(out));
}

/// Formal adjoint expression l+(u) = -u'' - iAu.
inline GridFunction apply_adjoint_expression(const Block& block, const GridFunction& u) {
    detail::require_applicable(block, u);
    GridFunction upp = derivative(u, 2);
    cmat out = -upp.values() - kI * (u.values() * block.coefficient.entries().transpose());
    return GridFunction(u.block(), std::move(out));
}

/// True when u has (numerically) vanishing boundary values and one-sided
/// first derivatives at both endpoints: the grid-level minimal-domain test.
inline bool minimal_domain_test(const GridFunction& u, double tol) {
    if (!(tol > 0)) throw validation_error("minimal_domain_test requires tol > 0");
    const cmat& v = u.values();
    return v.row(0).norm() <= tol && v.row(u.m() - 1).norm() <= tol &&
           detail::edge_derivative_a(u).norm() <= tol &&
           detail::edge_derivative_b(u).norm() <= tol;
}

namespace detail {

/// Cubic Hermite basis on [a,b] with unit boundary data:
/// columns are (value at a, value at b, derivative at a, derivative at b).
inline double hermite(int which, double s, double len) {
    switch (which) {
        case 0: return 2 * s * s * s - 3 * s * s + 1;
        case 1: return -2 * s * s * s + 3 * s * s;
        case 2: return len * (s * s * s - 2 * s * s + s);
        default: return len * (s * s * s - s * s);
    }
}

/// Grid-level boundary functionals (value a, value b, stencil derivative a,
/// stencil derivative b) of a single-component grid column.
inline Eigen::Vector4cd boundary_functionals(const GridFunction& u, int comp) {
    Eigen::Vector4cd f;
    f(0) = u.values()(0, comp);
    f(1) = u.values()(u.m() - 1, comp);
    f(2) = edge_derivative_a(u)(comp);
    f(3) = edge_derivative_b(u)(comp);
    return f;
}

/// Subtract the Hermite-cubic combination that cancels the grid-level
/// boundary functionals of every component exactly.
inline cmat flatten_boundary(const Block& block, const cmat& raw) {
    const int m = static_cast<int>(raw.rows());
    const int d = static_cast<int>(raw.cols());
    const double len = block.interval.length();
    const double h = len / (m - 1);
    rmat hb(m, 4);
    for (int k = 0; k < m; ++k) {
        const double s = k * h / len;
        for (int j = 0; j < 4; ++j) hb(k, j) = hermite(j, s, len);
    }
    // boundary functionals of the Hermite columns (identical per component)
    Eigen::Matrix4cd sysm;
    for (int j = 0; j < 4; ++j) {
        cmat vals = cmat::Zero(m, d);
        vals.col(0) = hb.col(j).cast<complexd>();
        GridFunction hj(block, vals);
        sysm.col(j) = boundary_functionals(hj, 0);
    }
    Eigen::PartialPivLU<Eigen::Matrix4cd> lu(sysm);
    cmat out = raw;
    GridFunction u(block, raw);
    for (int c = 0; c < d; ++c) {
        Eigen::Vector4cd rhs = -boundary_functionals(u, c);
        Eigen::Vector4cd coef = lu.solve(rhs);
        for (int j = 0; j < 4; ++j)
            out.col(c) += coef(j) * hb.col(j).cast<complexd>();
    }
    return out;
}

} // namespace detail

/// Deterministic pseudo-random smooth function in the minimal domain:
/// a few decaying sin^2 windows per component, then an exact grid-level
/// Hermite correction so endpoint values and one-sided derivatives vanish
/// to roundoff, then normalization to unit norm.
inline GridFunction generate_minimal_domain_function(const Block& block,
                                                     std::uint64_t seed,
                                                     int m = 401) {
    if (m < 5) throw grid_error("generate_minimal_domain_function: m < 5");
    detail::Rng rng(seed);
    const int d = block.dim();
    const double len = block.interval.length();
    cmat vals = cmat::Zero(m, d);
    const int kmax = 4;
    for (int k = 1; k <= kmax; ++k) {
        cvec coef(d);
        for (int c = 0; c < d; ++c) coef(c) = rng.cgaussian() / double(k * k * k);
        for (int j = 0; j < m; ++j) {
            const double s = double(j) / (m - 1);
            const double w = std::sin(k * M_PI * s);
            vals.row(j) += (w * w) * coef.transpose();
        }
    }
    vals = detail::flatten_boundary(block, vals);
    GridFunction u(block, std::move(vals));
    const double nn = norm(u);
    if (!(nn > 0)) throw validation_error("degenerate random draw");
    return (complexd(1.0 / nn, 0.0)) * u;
}

} // namespace opspec
