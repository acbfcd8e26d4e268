#pragma once

// Discrete spectral engine: second-order finite-difference discretizations
// of l(u) = -u'' + iAu under a boundary parameter W, dense eigensolution,
// normality witnesses and grid-refinement convergence studies.
//
// Closure selection (see README): canonical periodic W gets the wrap-around
// circulant on (m-1)d nodes, canonical Neumann W the symmetric cell-centered
// closure on m d midpoints, every other W the endpoint elimination on (m-2)d
// interior nodes via the one-sided first-derivative stencil. For W = -E the
// elimination reduces exactly to the classical Dirichlet tridiagonal matrix.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "opspec/analytic.hpp"
#include "opspec/boundary.hpp"
#include "opspec/hilbert.hpp"

namespace opspec {

struct DiscreteOperator {
    int block_index;
    cmat matrix;
    double h;
    std::string scheme;

    int size() const { return static_cast<int>(matrix.rows()); }
};

namespace detail {

inline bool is_canonical(const BoundaryUnitary& w, BoundaryKind kind) {
    if (kind == BoundaryKind::custom) return false;
    return (w.matrix() - canonical_unitary(kind, w.dim()).matrix()).norm() <= 1e-12;
}

inline DiscreteOperator discretize_wrap(const Block& block, int m, double coeff_sign) {
    const int d = block.dim();
    const int n = m - 1;
    const double h = block.interval.length() / (m - 1);
    const double ih2 = 1.0 / (h * h);
    const cmat ia = coeff_sign * kI * block.coefficient.entries();
    const cmat id = cmat::Identity(d, d);
    cmat op = cmat::Zero(n * d, n * d);
    for (int k = 0; k < n; ++k) {
        op.block(k * d, k * d, d, d) = 2.0 * ih2 * id + ia;
        op.block(k * d, ((k + 1) % n) * d, d, d) -= ih2 * id;
        op.block(k * d, ((k + n - 1) % n) * d, d, d) -= ih2 * id;
    }
    return {block.index, std::move(op), h, "periodic-wrap"};
}

inline DiscreteOperator discretize_cell(const Block& block, int m, double coeff_sign) {
    const int d = block.dim();
    const int n = m;
    const double h = block.interval.length() / m;
    const double ih2 = 1.0 / (h * h);
    const cmat ia = coeff_sign * kI * block.coefficient.entries();
    const cmat id = cmat::Identity(d, d);
    cmat op = cmat::Zero(n * d, n * d);
    for (int k = 0; k < n; ++k) {
        const double diag = (k == 0 || k == n - 1) ? 1.0 : 2.0;
        op.block(k * d, k * d, d, d) = diag * ih2 * id + ia;
        if (k + 1 < n) op.block(k * d, (k + 1) * d, d, d) = -ih2 * id;
        if (k > 0) op.block(k * d, (k - 1) * d, d, d) = -ih2 * id;
    }
    return {block.index, std::move(op), h, "neumann-cell-centered"};
}

inline DiscreteOperator discretize_eliminated(const Block& block, const BoundaryUnitary& w,
                                              int m, double coeff_sign) {
    const int d = block.dim();
    const int n = m - 2;
    const double h = block.interval.length() / (m - 1);
    const double ih2 = 1.0 / (h * h);
    const cmat ia = coeff_sign * kI * block.coefficient.entries();
    const cmat id = cmat::Identity(d, d);
    const cmat E = cmat::Identity(2 * d, 2 * d);

    // Boundary condition B gamma_1 + C gamma_2 = 0 with the one-sided
    // stencil splits into S (u_0; u_{m-1}) = -C R (u_1; u_2; u_{m-3}; u_{m-2}).
    const cmat B = w.matrix() - E;
    const cmat C = kI * (w.matrix() + E);
    cmat J = cmat::Zero(2 * d, 2 * d);
    J.topLeftCorner(d, d) = -cmat::Identity(d, d);
    J.bottomRightCorner(d, d) = cmat::Identity(d, d);
    const cmat S = (B + (3.0 / (2.0 * h)) * C) * J;

    Eigen::JacobiSVD<cmat> svd(S);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0) || smax / smin > 1e12)
        throw boundary_encoding_error(
            "boundary condition cannot be eliminated: encoding system condition " +
            fmt(smin > 0 ? smax / smin : std::numeric_limits<double>::infinity()));

    cmat R = cmat::Zero(2 * d, 4 * d);
    R.block(0, 0, d, d) = (2.0 / h) * id;
    R.block(0, d, d, d) = (-0.5 / h) * id;
    R.block(d, 2 * d, d, d) = (0.5 / h) * id;
    R.block(d, 3 * d, d, d) = (-2.0 / h) * id;
    const cmat T = -S.partialPivLu().solve(C * R); // (u_0; u_{m-1}) = T y

    cmat op = cmat::Zero(n * d, n * d);
    for (int k = 0; k < n; ++k) {
        op.block(k * d, k * d, d, d) = 2.0 * ih2 * id + ia;
        if (k + 1 < n) op.block(k * d, (k + 1) * d, d, d) = -ih2 * id;
        if (k > 0) op.block(k * d, (k - 1) * d, d, d) = -ih2 * id;
    }
    // row of node 1 carries -u_0/h^2, row of node m-2 carries -u_{m-1}/h^2
    const int ycol[4] = {0, 1, n - 2, n - 1};
    for (int q = 0; q < 4; ++q) {
        op.block(0, ycol[q] * d, d, d) -= ih2 * T.block(0, q * d, d, d);
        op.block((n - 1) * d, ycol[q] * d, d, d) -= ih2 * T.block(d, q * d, d, d);
    }
    return {block.index, std::move(op), h, "endpoint-elimination"};
}

inline DiscreteOperator discretize_impl(const Block& block, const BoundaryUnitary& w, int m,
                                        double coeff_sign) {
    if (w.dim() != block.dim())
        throw shape_error("boundary matrix dimension does not match block");
    if (is_canonical(w, BoundaryKind::periodic)) {
        if (m < 5) throw grid_error("discretize: m must be >= 5");
        return discretize_wrap(block, m, coeff_sign);
    }
    if (is_canonical(w, BoundaryKind::neumann)) {
        if (m < 5) throw grid_error("discretize: m must be >= 5");
        return discretize_cell(block, m, coeff_sign);
    }
    if (m < 8) throw grid_error("discretize: m must be >= 8 for eliminated closures");
    return discretize_eliminated(block, w, m, coeff_sign);
}

} // namespace detail

/// Finite-difference matrix of the extension L_W on an m-node grid.
inline DiscreteOperator discretize(const Block& block, const BoundaryUnitary& w, int m) {
    return detail::discretize_impl(block, w, m, +1.0);
}

/// Discretization of the formal adjoint -u'' - iAu under the same closure.
inline DiscreteOperator discretize_adjoint(const Block& block, const BoundaryUnitary& w, int m) {
    return detail::discretize_impl(block, w, m, -1.0);
}

/// Dense point spectrum of a discrete operator. Eigenvalues are clustered
/// at radius 1e-8 (1 + |lambda|) with summed multiplicity; the residual is
/// max_k ||D v_k - lambda v_k|| / ||v_k|| over the cluster.
inline std::vector<Eigenvalue> eigen_spectrum(const DiscreteOperator& op, int size_cap = 4000) {
    if (op.size() > size_cap)
        throw resource_cap_error("eigensolver size " + std::to_string(op.size()) +
                                 " exceeds cap " + std::to_string(size_cap));
    Eigen::ComplexEigenSolver<cmat> ces(op.matrix, true);
    if (ces.info() != Eigen::Success)
        throw eigensolver_error("complex eigensolver did not converge");

    const double opnorm = op.matrix.norm();
    struct Item {
        complexd lambda;
        double residual;
    };
    std::vector<Item> items;
    items.reserve(op.size());
    for (int k = 0; k < op.size(); ++k) {
        const complexd lam = ces.eigenvalues()(k);
        const cvec v = ces.eigenvectors().col(k);
        const double res = (op.matrix * v - lam * v).norm() / v.norm();
        if (res > 1e-8 * opnorm)
            throw eigensolver_error("eigenpair residual " + detail::fmt(res) +
                                    " exceeds 1e-8 * ||D||");
        items.push_back({lam, res});
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        return lambda_less(a.lambda, b.lambda);
    });

    std::vector<Eigenvalue> out;
    std::size_t k = 0;
    while (k < items.size()) {
        complexd anchor = items[k].lambda;
        complexd sum = 0.0;
        double res = 0.0;
        int count = 0;
        while (k < items.size() &&
               std::abs(items[k].lambda - anchor) <= 1e-8 * (1.0 + std::abs(anchor))) {
            sum += items[k].lambda;
            res = std::max(res, items[k].residual);
            ++count;
            ++k;
        }
        out.push_back({sum / double(count), op.block_index, count, res, Engine::discrete});
    }
    return out;
}

/// Frobenius normality witness ||D*D - DD*||_F / ||D||_F^2. Exactly ~0 for
/// the canonical closures; for eliminated closures of admissible W it decays
/// under refinement, while non-admissible W leaves an O(1) obstruction that
/// shrinks only with the boundary weight (~1/m).
inline double normality_residual(const DiscreteOperator& op) {
    const cmat& D = op.matrix;
    const double denom = D.squaredNorm();
    if (!(denom > 0)) throw validation_error("normality_residual of a zero operator");
    return (D.adjoint() * D - D * D.adjoint()).norm() / denom;
}

/// Identity D*D - DD* = 2i [Re D, Im D] holds exactly in exact arithmetic;
/// returns the floating-point discrepancy (a roundoff-level number).
inline double normality_split_residual(const DiscreteOperator& op) {
    const cmat& D = op.matrix;
    const cmat re = 0.5 * (D + D.adjoint());
    const cmat im = (D - D.adjoint()) / (2.0 * kI);
    const cmat lhs = D.adjoint() * D - D * D.adjoint();
    const cmat rhs = 2.0 * kI * (re * im - im * re);
    return (lhs - rhs).norm() / std::max(1.0, D.squaredNorm());
}

namespace detail {

/// Random smooth low-frequency sample forced onto the boundary condition of
/// W by a minimum-norm Hermite-cubic correction (grid-level exact).
inline GridFunction boundary_condition_sample(const Block& block, const BoundaryUnitary& w,
                                              int m, std::uint64_t seed) {
    const int d = block.dim();
    const double len = block.interval.length();
    Rng rng(seed);
    cmat vals = cmat::Zero(m, d);
    for (int c = 0; c < d; ++c) {
        for (int k = 1; k <= 3; ++k) {
            const complexd gs = rng.cgaussian() / double(k * k);
            const complexd gc = rng.cgaussian() / double(k * k);
            for (int j = 0; j < m; ++j) {
                const double s = double(j) / (m - 1);
                vals(j, c) += gs * std::sin(k * M_PI * s) + gc * std::cos((k - 1) * M_PI * s);
            }
        }
    }
    GridFunction raw(block, vals);

    rmat hb(m, 4);
    const double h = len / (m - 1);
    for (int k = 0; k < m; ++k) {
        const double s = k * h / len;
        for (int j = 0; j < 4; ++j) hb(k, j) = hermite(j, s, len);
    }
    cmat basis_images(2 * d, 4 * d);
    for (int j = 0; j < 4; ++j) {
        for (int c = 0; c < d; ++c) {
            cmat bv = cmat::Zero(m, d);
            bv.col(c) = hb.col(j).cast<complexd>();
            GridFunction psi(block, std::move(bv));
            basis_images.col(j * d + c) = boundary_residual(w, psi).stacked();
        }
    }
    Eigen::CompleteOrthogonalDecomposition<cmat> cod(basis_images);
    if (cod.rank() < 2 * d)
        throw boundary_encoding_error("constraint projection singular");
    cvec rhs = -boundary_residual(w, raw).stacked();
    cvec coef = cod.solve(rhs);
    cmat corrected = raw.values();
    for (int j = 0; j < 4; ++j)
        for (int c = 0; c < d; ++c)
            corrected.col(c) += coef(j * d + c) * hb.col(j).cast<complexd>();
    GridFunction u(block, std::move(corrected));
    const double scale = std::max(1.0, gamma1(u).norm() + gamma2(u).norm());
    if (boundary_residual(w, u).norm() > 1e-8 * scale)
        throw boundary_encoding_error("constraint projection did not converge");
    const double nn = opspec::norm(u);
    if (!(nn > 0)) throw validation_error("degenerate random draw");
    return complexd(1.0 / nn, 0.0) * u;
}

} // namespace detail

/// Quadrature-level normality witness: samples random smooth functions
/// satisfying the boundary condition of W and compares ||l u||^2 against
/// ||l+ u||^2 (equal for normal extensions). Returns the maximum relative
/// defect over the samples.
inline double normality_identity_on_domain(const Block& block, const BoundaryUnitary& w,
                                           int samples, int m, std::uint64_t seed = 20250816) {
    if (samples < 1) throw validation_error("normality_identity_on_domain: samples >= 1");
    if (m < 9) throw grid_error("normality_identity_on_domain: m too small");
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        GridFunction u = detail::boundary_condition_sample(block, w, m, seed + 0x9e3779b9ull * s);
        GridFunction lu = apply_expression(block, u);
        GridFunction lau = apply_adjoint_expression(block, u);
        const double a = inner_product(lu, lu).real();
        const double b = inner_product(lau, lau).real();
        worst = std::max(worst, std::abs(a - b) / std::max(a, 1e-300));
    }
    return worst;
}

/// Norm identity diagnostics for a single function:
/// lhs = ||l u||^2, rhs = ||u''||^2 + ||A u||^2, defect = lhs - rhs.
/// The defect vanishes (to quadrature accuracy) on the minimal domain and
/// equals -2 Im (u'', A u) in general.
struct NormIdentity {
    double lhs;
    double rhs;
    double defect;
};

inline NormIdentity norm_identity_check(const Block& block, const GridFunction& u) {
    GridFunction lu = apply_expression(block, u);
    GridFunction upp = derivative(u, 2);
    GridFunction au(u.block(),
                    cmat(u.values() * block.coefficient.entries().transpose()));
    const double lhs = inner_product(lu, lu).real();
    const double rhs = inner_product(upp, upp).real() + inner_product(au, au).real();
    return {lhs, rhs, lhs - rhs};
}

/// Least-squares convergence order of the discrete eigenvalue nearest to a
/// reference (matching radius 0.5). If the reference is reproduced to
/// roundoff at every m the study reports exact = true instead of a slope.
struct OrderEstimate {
    double order;
    bool exact;
    std::vector<int> m_values;
    std::vector<double> h_values;
    std::vector<double> errors;
};

inline OrderEstimate convergence_study(const Block& block, const BoundaryUnitary& w,
                                       const std::vector<int>& m_list,
                                       const Eigenvalue& reference, int size_cap = 4000) {
    if (m_list.size() < 2)
        throw validation_error("convergence_study needs at least two grid sizes");
    OrderEstimate est{};
    est.exact = true;
    for (int m : m_list) {
        DiscreteOperator op = discretize(block, w, m);
        std::vector<Eigenvalue> spec = eigen_spectrum(op, size_cap);
        double best = std::numeric_limits<double>::infinity();
        for (const Eigenvalue& e : spec)
            best = std::min(best, std::abs(e.lambda - reference.lambda));
        if (!(best <= 0.5))
            throw matching_error("reference eigenvalue not matched within radius 0.5 at m = " +
                                 std::to_string(m));
        est.m_values.push_back(m);
        est.h_values.push_back(op.h);
        est.errors.push_back(best);
        if (best > 1e-11 * (1.0 + std::abs(reference.lambda))) est.exact = false;
    }
    if (est.exact) {
        est.order = std::numeric_limits<double>::infinity();
        return est;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(est.errors.size());
    for (int i = 0; i < n; ++i) {
        const double x = std::log(est.h_values[i]);
        const double y = std::log(std::max(est.errors[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    est.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return est;
}

} // namespace opspec
