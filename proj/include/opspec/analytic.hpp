#pragma once

// Analytic spectral engine. Eigenvalues of the extension L_W are the roots
// of det M(lambda), where M(lambda) applies the boundary condition to a
// fundamental system of -y'' + iAy = lambda y. The fundamental pair is
// written in terms of entire functions of z = i alpha - lambda so nothing
// degenerates when z crosses zero.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "opspec/boundary.hpp"
#include "opspec/hilbert.hpp"

namespace opspec {

enum class Engine { analytic, discrete };

inline const char* to_string(Engine e) {
    return e == Engine::analytic ? "analytic" : "discrete";
}

/// One point of a point spectrum.
struct Eigenvalue {
    complexd lambda;
    int block_index;
    int multiplicity;
    double residual;
    Engine engine;
};

inline bool lambda_less(const complexd& a, const complexd& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

/// Rectangle [re_min, re_max] x [im_min, im_max] with scan grid counts.
struct SearchRegion {
    double re_min, re_max;
    double im_min, im_max;
    int scan_re;
    int scan_im;

    SearchRegion(double re_lo, double re_hi, double im_lo, double im_hi,
                 int n_re = 40, int n_im = 20)
        : re_min(re_lo), re_max(re_hi), im_min(im_lo), im_max(im_hi),
          scan_re(n_re), scan_im(n_im) {
        if (!(re_min < re_max) || !(im_min < im_max))
            throw validation_error("search region must satisfy re_min < re_max and im_min < im_max");
        if (scan_re < 8 || scan_im < 8)
            throw validation_error("search region scan counts must be >= 8");
    }

    bool contains(complexd z, double margin = 0.0) const {
        return z.real() >= re_min - margin && z.real() <= re_max + margin &&
               z.imag() >= im_min - margin && z.imag() <= im_max + margin;
    }

    double diameter() const { return std::hypot(re_max - re_min, im_max - im_min); }
};

namespace detail {

/// cosh(mu l) and sinh(mu l)/mu as entire functions of z = mu^2, with a
/// series branch for small |mu| l (both are analytic in z; the series keeps
/// full accuracy through z = 0).
inline void stable_pair(complexd z, double len, complexd& ch, complexd& sh) {
    const complexd mu = std::sqrt(z);
    if (std::abs(mu) * len < 1e-6) {
        const complexd w = z * len * len;
        ch = 1.0 + w / 2.0 + w * w / 24.0 + w * w * w / 720.0;
        sh = len * (1.0 + w / 6.0 + w * w / 120.0 + w * w * w / 5040.0);
    } else {
        ch = std::cosh(mu * len);
        sh = std::sinh(mu * len) / mu;
    }
}

} // namespace detail

/// Boundary data of the fundamental system at lambda: columns are the 2d
/// fundamental solutions (c-type then s-type per coefficient eigenvector),
/// rows the gamma_1 / gamma_2 images. column_scale(k) is the boundary-data
/// norm used to normalize det M; it is >= 1 by construction.
struct CharacteristicSystem {
    cmat gamma1_cols; // 2d x 2d
    cmat gamma2_cols; // 2d x 2d
    cmat m;           // (W - E) Gamma_1 + i (W + E) Gamma_2
    rvec column_scale;
};

inline CharacteristicSystem characteristic_system(const Block& block,
                                                  const BoundaryUnitary& w,
                                                  complexd lambda) {
    const int d = block.dim();
    if (w.dim() != d)
        throw shape_error("boundary matrix dimension does not match block");
    const double len = block.interval.length();
    const cmat& q = block.coefficient.eigenvectors();
    const rvec& alpha = block.coefficient.eigenvalues();

    cvec ch(d), sh(d), zs(d);
    for (int j = 0; j < d; ++j) {
        const complexd z = kI * alpha(j) - lambda;
        complexd c, s;
        detail::stable_pair(z, len, c, s);
        ch(j) = c;
        sh(j) = s;
        zs(j) = z * s;
    }

    CharacteristicSystem sys;
    sys.gamma1_cols = cmat::Zero(2 * d, 2 * d);
    sys.gamma2_cols = cmat::Zero(2 * d, 2 * d);
    // c-type columns: y(a) = q_j, y'(a) = 0; y(b) = ch_j q_j, y'(b) = z_j sh_j q_j
    sys.gamma1_cols.topLeftCorner(d, d) = -q;
    sys.gamma1_cols.bottomLeftCorner(d, d) = q * ch.asDiagonal();
    sys.gamma2_cols.bottomLeftCorner(d, d) = q * zs.asDiagonal();
    // s-type columns: y(a) = 0, y'(a) = q_j; y(b) = sh_j q_j, y'(b) = ch_j q_j
    sys.gamma1_cols.bottomRightCorner(d, d) = q * sh.asDiagonal();
    sys.gamma2_cols.topRightCorner(d, d) = q;
    sys.gamma2_cols.bottomRightCorner(d, d) = q * ch.asDiagonal();

    const cmat E = cmat::Identity(2 * d, 2 * d);
    sys.m = (w.matrix() - E) * sys.gamma1_cols + kI * (w.matrix() + E) * sys.gamma2_cols;
    sys.column_scale = rvec(2 * d);
    for (int k = 0; k < 2 * d; ++k)
        sys.column_scale(k) =
            std::max(sys.gamma1_cols.col(k).norm(), sys.gamma2_cols.col(k).norm());
    return sys;
}

/// Characteristic matrix M(lambda) = (W - E) Gamma_1 + i (W + E) Gamma_2.
inline cmat characteristic_matrix(const Block& block, const BoundaryUnitary& w,
                                  complexd lambda) {
    return characteristic_system(block, w, lambda).m;
}

namespace detail {

inline complexd scaled_det(const cmat& m, const rvec& scale) {
    cmat t = m;
    for (int k = 0; k < t.cols(); ++k) t.col(k) /= scale(k);
    return t.determinant();
}

} // namespace detail

/// |det M(lambda)| after normalizing each column by the boundary-data norm
/// of its fundamental solution. Vanishes exactly at eigenvalues and stays
/// O(1) away from them; invariant under rescaling the fundamental columns.
inline double characteristic_residual(const Block& block, const BoundaryUnitary& w,
                                      complexd lambda) {
    CharacteristicSystem sys = characteristic_system(block, w, lambda);
    return std::abs(detail::scaled_det(sys.m, sys.column_scale));
}

/// Geometric multiplicity at a root: rank deficiency of the column-scaled
/// characteristic matrix.
inline int characteristic_rank_deficiency(const Block& block, const BoundaryUnitary& w,
                                          complexd lambda) {
    CharacteristicSystem sys = characteristic_system(block, w, lambda);
    cmat t = sys.m;
    for (int k = 0; k < t.cols(); ++k) t.col(k) /= sys.column_scale(k);
    Eigen::JacobiSVD<cmat> svd(t);
    const rvec& sv = svd.singularValues();
    const double thresh = 1e-8 * std::max(sv(0), 1.0);
    int def = 0;
    for (int k = 0; k < sv.size(); ++k)
        if (sv(k) <= thresh) ++def;
    return def;
}

/// Newton search for roots of the normalized determinant seeded on a scan
/// grid over the region. Central differences with the column normalization
/// frozen at the center point keep the iterated function analytic, so double
/// roots (periodic spectra) converge cleanly. Results are deduplicated
/// (radius 1e-6), kept only when the final residual is <= tol, and carry the
/// rank-deficiency multiplicity.
inline std::vector<Eigenvalue> det_root_search(const Block& block, const BoundaryUnitary& w,
                                               const SearchRegion& region, double tol) {
    if (!(tol > 0)) throw validation_error("det_root_search requires tol > 0");

    const double step_cap = 0.35 * region.diameter();
    struct Candidate {
        complexd lambda;
        double residual;
    };
    std::vector<Candidate> found;

    auto newton_from = [&](complexd seed) {
        complexd z = seed;
        for (int it = 0; it < 50; ++it) {
            CharacteristicSystem sys = characteristic_system(block, w, z);
            const rvec scale = sys.column_scale;
            const double delta = 1e-7 * (1.0 + std::abs(z));
            const complexd g0 = detail::scaled_det(sys.m, scale);
            const complexd gp =
                detail::scaled_det(characteristic_system(block, w, z + delta).m, scale);
            const complexd gm =
                detail::scaled_det(characteristic_system(block, w, z - delta).m, scale);
            const complexd dg = (gp - gm) / (2.0 * delta);
            if (!std::isfinite(g0.real()) || !std::isfinite(g0.imag()) ||
                !std::isfinite(dg.real()) || !std::isfinite(dg.imag()) ||
                dg == complexd(0.0, 0.0))
                return;
            complexd step = g0 / dg;
            if (std::abs(step) > step_cap) step *= step_cap / std::abs(step);
            z -= step;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return;
            if (std::abs(step) <= 2e-12 * (1.0 + std::abs(z))) {
                const double res = characteristic_residual(block, w, z);
                const double margin = 1e-7 * (1.0 + region.diameter());
                if (res <= tol && region.contains(z, margin))
                    found.push_back({z, res});
                return;
            }
        }
    };

    for (int i = 0; i <= region.scan_re; ++i) {
        const double re =
            region.re_min + (region.re_max - region.re_min) * double(i) / region.scan_re;
        for (int j = 0; j <= region.scan_im; ++j) {
            const double im =
                region.im_min + (region.im_max - region.im_min) * double(j) / region.scan_im;
            newton_from(complexd(re, im));
        }
    }

    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        return lambda_less(a.lambda, b.lambda);
    });
    std::vector<Candidate> reps;
    for (const Candidate& c : found) {
        bool merged = false;
        for (Candidate& r : reps) {
            if (std::abs(c.lambda - r.lambda) <= 1e-6) {
                if (c.residual < r.residual) r = c;
                merged = true;
                break;
            }
        }
        if (!merged) reps.push_back(c);
    }

    std::vector<Eigenvalue> out;
    out.reserve(reps.size());
    for (const Candidate& r : reps) {
        const int def = characteristic_rank_deficiency(block, w, r.lambda);
        out.push_back({r.lambda, block.index, std::max(def, 1), r.residual, Engine::analytic});
    }
    std::sort(out.begin(), out.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        return lambda_less(a.lambda, b.lambda);
    });
    return out;
}

/// Closed-form spectra of the three classical extensions:
/// periodic  lambda = (2 pi k / l)^2 + i alpha_j, k >= 0 (double for k >= 1),
/// dirichlet lambda = (pi k / l)^2 + i alpha_j, k >= 1,
/// neumann   lambda = (pi k / l)^2 + i alpha_j, k >= 0.
inline std::vector<Eigenvalue> analytic_spectrum(BoundaryKind kind, const Block& block,
                                                 int k_max) {
    if (k_max < 0) throw validation_error("analytic_spectrum requires k_max >= 0");
    if (kind == BoundaryKind::custom)
        throw validation_error("analytic_spectrum covers the canonical kinds only");
    const double len = block.interval.length();
    const rvec& alpha = block.coefficient.eigenvalues();

    std::vector<Eigenvalue> out;
    for (int j = 0; j < alpha.size(); ++j) {
        for (int k = 0; k <= k_max; ++k) {
            double base;
            int mult;
            switch (kind) {
                case BoundaryKind::periodic:
                    base = std::pow(2.0 * M_PI * k / len, 2);
                    mult = k == 0 ? 1 : 2;
                    break;
                case BoundaryKind::dirichlet:
                    if (k == 0) continue;
                    base = std::pow(M_PI * k / len, 2);
                    mult = 1;
                    break;
                default: // neumann
                    base = std::pow(M_PI * k / len, 2);
                    mult = 1;
                    break;
            }
            out.push_back({complexd(base, alpha(j)), block.index, mult, 0.0, Engine::analytic});
        }
    }
    std::sort(out.begin(), out.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        return lambda_less(a.lambda, b.lambda);
    });
    // merge coincidences from repeated coefficient eigenvalues
    std::vector<Eigenvalue> merged;
    for (const Eigenvalue& e : out) {
        if (!merged.empty() && std::abs(merged.back().lambda - e.lambda) <= 1e-12) {
            merged.back().multiplicity += e.multiplicity;
        } else {
            merged.push_back(e);
        }
    }
    return merged;
}

} // namespace opspec
