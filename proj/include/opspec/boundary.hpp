#pragma once

// Boundary triple for one block: trace maps gamma_1(u) = (-u(a), u(b)),
// gamma_2(u) = (u'(a), u'(b)), unitary boundary parameters W and the
// admissibility test that characterizes normal extensions.

#include <Eigen/Dense>
#include <string>

#include "opspec/hilbert.hpp"

namespace opspec {

/// Element of the boundary space H (+) H: one d-vector per endpoint.
struct BoundaryVector {
    cvec top;    // endpoint a slot
    cvec bottom; // endpoint b slot

    BoundaryVector(cvec t, cvec b) : top(std::move(t)), bottom(std::move(b)) {
        if (top.size() != bottom.size())
            throw shape_error("boundary vector slots of different size");
    }

    int dim() const { return static_cast<int>(top.size()); }

    cvec stacked() const {
        cvec s(2 * top.size());
        s << top, bottom;
        return s;
    }

    double norm() const { return stacked().norm(); }
};

enum class BoundaryKind { periodic, dirichlet, neumann, custom };

inline const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::periodic: return "periodic";
        case BoundaryKind::dirichlet: return "dirichlet";
        case BoundaryKind::neumann: return "neumann";
        default: return "custom";
    }
}

/// Unitary 2d x 2d boundary parameter. Construction enforces unitarity
/// to 1e-10 in Frobenius norm.
class BoundaryUnitary {
public:
    explicit BoundaryUnitary(cmat w, BoundaryKind label = BoundaryKind::custom)
        : w_(std::move(w)), label_(label) {
        if (w_.rows() != w_.cols() || w_.rows() < 2 || w_.rows() % 2 != 0)
            throw shape_error("boundary matrix must be square of even size >= 2");
        unitarity_ = (w_.adjoint() * w_ - cmat::Identity(w_.rows(), w_.cols())).norm();
        if (unitarity_ > 1e-10)
            throw validation_error("boundary matrix not unitary (residual " +
                                   detail::fmt(unitarity_) + ")");
    }

    const cmat& matrix() const { return w_; }
    /// Boundary-space dimension 2d.
    int size() const { return static_cast<int>(w_.rows()); }
    /// Block dimension d.
    int dim() const { return size() / 2; }
    BoundaryKind label() const { return label_; }
    double unitarity_residual() const { return unitarity_; }

private:
    cmat w_;
    BoundaryKind label_;
    double unitarity_ = 0.0;
};

/// First trace map gamma_1(u) = (-u(a), u(b)).
inline BoundaryVector gamma1(const GridFunction& u) {
    cvec top = -u.values().row(0).transpose();
    cvec bottom = u.values().row(u.m() - 1).transpose();
    return BoundaryVector(std::move(top), std::move(bottom));
}

/// Second trace map gamma_2(u) = (u'(a), u'(b)), one-sided stencils.
inline BoundaryVector gamma2(const GridFunction& u) {
    return BoundaryVector(detail::edge_derivative_a(u), detail::edge_derivative_b(u));
}

/// Residual of the extension condition (W - E) gamma_1(u) + i (W + E) gamma_2(u).
inline BoundaryVector boundary_residual(const BoundaryUnitary& w, const GridFunction& u) {
    if (w.dim() != u.dim())
        throw shape_error("boundary matrix dimension does not match function");
    const int d = u.dim();
    const cmat& W = w.matrix();
    const cmat E = cmat::Identity(2 * d, 2 * d);
    cvec r = (W - E) * gamma1(u).stacked() + kI * (W + E) * gamma2(u).stacked();
    return BoundaryVector(r.head(d), r.tail(d));
}

/// The three classical boundary parameters:
/// periodic [[0, -I], [-I, 0]] (couples the endpoints),
/// dirichlet -E (collapses to u(a) = u(b) = 0),
/// neumann  +E (collapses to u'(a) = u'(b) = 0).
inline BoundaryUnitary canonical_unitary(BoundaryKind kind, int d) {
    if (d < 1) throw shape_error("canonical_unitary: d must be >= 1");
    const cmat id = cmat::Identity(d, d);
    cmat w = cmat::Zero(2 * d, 2 * d);
    switch (kind) {
        case BoundaryKind::periodic:
            w.topRightCorner(d, d) = -id;
            w.bottomLeftCorner(d, d) = -id;
            break;
        case BoundaryKind::dirichlet:
            w = -cmat::Identity(2 * d, 2 * d);
            break;
        case BoundaryKind::neumann:
            w = cmat::Identity(2 * d, 2 * d);
            break;
        default:
            throw validation_error("canonical_unitary: kind must be periodic, dirichlet or neumann");
    }
    return BoundaryUnitary(std::move(w), kind);
}

/// Diagnostics of the normal-extension characterization. The extension is
/// normal iff both W and V = diag(A^1/2, A^1/2) W diag(A^-1/2, A^-1/2) are
/// unitary; given unitary W this is equivalent to [W, diag(A, A)] = 0.
struct AdmissibilityReport {
    bool admissible;
    double w_residual;          // ||W*W - E||_F
    double v_residual;          // ||V*V - E||_F
    double commutator_norm;     // ||W diag(A,A) - diag(A,A) W||_F
    bool criteria_consistent;   // unitarity route agrees with commutator route
};

/// Admissibility of a (W, A) pair; accepts an arbitrary square matrix so
/// that near-unitary or deliberately broken parameters can be diagnosed.
inline AdmissibilityReport admissibility_check(const cmat& w, const CoefficientMatrix& a) {
    const int d = a.dim();
    if (w.rows() != w.cols() || w.rows() != 2 * d)
        throw shape_error("admissibility_check: W must be 2d x 2d for the block dimension d");
    const cmat E = cmat::Identity(2 * d, 2 * d);
    cmat s = cmat::Zero(2 * d, 2 * d);
    s.topLeftCorner(d, d) = a.sqrt();
    s.bottomRightCorner(d, d) = a.sqrt();
    cmat si = cmat::Zero(2 * d, 2 * d);
    si.topLeftCorner(d, d) = a.inv_sqrt();
    si.bottomRightCorner(d, d) = a.inv_sqrt();
    cmat aa = cmat::Zero(2 * d, 2 * d);
    aa.topLeftCorner(d, d) = a.entries();
    aa.bottomRightCorner(d, d) = a.entries();

    AdmissibilityReport rep{};
    rep.w_residual = (w.adjoint() * w - E).norm();
    const cmat v = s * w * si;
    rep.v_residual = (v.adjoint() * v - E).norm();
    rep.commutator_norm = (w * aa - aa * w).norm();
    const bool w_ok = rep.w_residual <= 1e-10;
    const bool v_ok = rep.v_residual <= 1e-10;
    const bool comm_ok = rep.commutator_norm <= 1e-8;
    rep.admissible = w_ok && v_ok;
    // The commutator criterion is equivalent only on the unitary group.
    rep.criteria_consistent = !w_ok || (v_ok == comm_ok);
    return rep;
}

inline AdmissibilityReport admissibility_check(const BoundaryUnitary& w,
                                               const CoefficientMatrix& a) {
    return admissibility_check(w.matrix(), a);
}

} // namespace opspec
