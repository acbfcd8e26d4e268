#pragma once

// Direct-sum layer: a multipoint problem is a finite list of blocks with
// one boundary parameter each. The point spectrum of the direct sum is the
// multiset union of the block spectra; this module aggregates per-block
// results, projects single blocks out, and hosts the classical direct-sum
// counterexample (a sequence of unit-norm blocks whose sum of squared norms
// diverges, so the formal sum leaves the direct-sum space).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "opspec/analytic.hpp"
#include "opspec/boundary.hpp"
#include "opspec/hilbert.hpp"

namespace opspec {

/// Blocks with their boundary parameters; intervals must be ordered and
/// non-overlapping. normal() is true iff every (W, A) pair is admissible.
class MultipointProblem {
public:
    MultipointProblem(std::vector<Block> blocks, std::vector<BoundaryUnitary> extensions)
        : blocks_(std::move(blocks)), extensions_(std::move(extensions)) {
        if (blocks_.empty())
            throw validation_error("multipoint problem needs at least one block");
        if (blocks_.size() != extensions_.size())
            throw shape_error("blocks and boundary parameters differ in count");
        for (std::size_t n = 0; n < blocks_.size(); ++n) {
            if (blocks_[n].index != static_cast<int>(n) + 1)
                throw validation_error("block " + std::to_string(n + 1) +
                                       ": index must equal position (1-based)");
            if (extensions_[n].dim() != blocks_[n].dim())
                throw shape_error("block " + std::to_string(n + 1) +
                                  ": boundary parameter dimension mismatch");
            if (n > 0 && !(blocks_[n - 1].interval.b <= blocks_[n].interval.a))
                throw validation_error("block " + std::to_string(n + 1) +
                                       ": intervals must be ordered and non-overlapping");
        }
        normal_ = true;
        for (std::size_t n = 0; n < blocks_.size(); ++n)
            if (!admissibility_check(extensions_[n], blocks_[n].coefficient).admissible)
                normal_ = false;
    }

    int size() const { return static_cast<int>(blocks_.size()); }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<BoundaryUnitary>& extensions() const { return extensions_; }
    bool normal() const { return normal_; }

private:
    std::vector<Block> blocks_;
    std::vector<BoundaryUnitary> extensions_;
    bool normal_;
};

/// The n-th (1-based) block with its boundary parameter.
inline std::pair<const Block*, const BoundaryUnitary*> project_block(
    const MultipointProblem& p, int n) {
    if (n < 1 || n > p.size())
        throw std::out_of_range("project_block: index " + std::to_string(n) +
                                " outside 1.." + std::to_string(p.size()));
    return {&p.blocks()[n - 1], &p.extensions()[n - 1]};
}

/// Union eigenvalue merged across blocks.
struct AggregatedEigenvalue {
    complexd lambda;
    int multiplicity;
    std::vector<int> blocks;
    double residual;
};

/// Multiset union of per-block spectra: eigenvalues coinciding within
/// merge_tol are merged, multiplicities added, contributing blocks recorded.
inline std::vector<AggregatedEigenvalue> aggregate_spectrum(
    const std::vector<std::vector<Eigenvalue>>& per_block, double merge_tol = 1e-8) {
    if (!(merge_tol > 0)) throw validation_error("aggregate_spectrum: merge_tol > 0");
    std::vector<Eigenvalue> flat;
    for (const auto& v : per_block) flat.insert(flat.end(), v.begin(), v.end());
    std::sort(flat.begin(), flat.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        return lambda_less(a.lambda, b.lambda);
    });
    std::vector<AggregatedEigenvalue> out;
    for (const Eigenvalue& e : flat) {
        bool merged = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (std::abs(it->lambda - e.lambda) <= merge_tol) {
                it->multiplicity += e.multiplicity;
                it->residual = std::max(it->residual, e.residual);
                if (std::find(it->blocks.begin(), it->blocks.end(), e.block_index) ==
                    it->blocks.end())
                    it->blocks.push_back(e.block_index);
                merged = true;
                break;
            }
            if (e.lambda.real() - it->lambda.real() > merge_tol) break;
        }
        if (!merged) out.push_back({e.lambda, e.multiplicity, {e.block_index}, e.residual});
    }
    for (auto& a : out) std::sort(a.blocks.begin(), a.blocks.end());
    return out;
}

/// Largest coefficient spectral norm across blocks, compared to a bound c.
struct BoundedCoefficientReport {
    double sup_norm;
    bool bounded;
};

inline BoundedCoefficientReport bounded_coefficient_check(const MultipointProblem& p,
                                                          double c) {
    double sup = 0.0;
    for (const Block& b : p.blocks())
        sup = std::max(sup, b.coefficient.spectral_norm());
    return {sup, sup <= c};
}

/// Partial sums of a squared-norm sequence with a log-log growth exponent.
/// exponent >= 0.9 flags divergence (the sequence leaves the direct sum).
struct GrowthReport {
    std::vector<int> n_values;
    std::vector<double> partial_sums;
    double exponent;
    bool divergent;
};

inline GrowthReport direct_sum_membership(const std::vector<double>& squared_norms,
                                          const std::vector<int>& n_list) {
    GrowthReport rep{};
    if (n_list.empty()) throw validation_error("direct_sum_membership: empty N list");
    for (double s : squared_norms)
        if (!(s >= 0) || !std::isfinite(s))
            throw validation_error("direct_sum_membership: squared norms must be finite and >= 0");
    int prev = 0;
    for (int n : n_list) {
        if (n <= prev || n > static_cast<int>(squared_norms.size()))
            throw validation_error("direct_sum_membership: N list must be increasing and within range");
        prev = n;
    }
    std::vector<double> csum(squared_norms.size() + 1, 0.0);
    for (std::size_t k = 0; k < squared_norms.size(); ++k)
        csum[k + 1] = csum[k] + squared_norms[k];
    for (int n : n_list) {
        rep.n_values.push_back(n);
        rep.partial_sums.push_back(csum[n]);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t i = 0; i < rep.n_values.size(); ++i) {
        if (!(rep.partial_sums[i] > 0)) continue;
        const double x = std::log(double(rep.n_values[i]));
        const double y = std::log(rep.partial_sums[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2 && cnt * sxx - sx * sx > 0)
        rep.exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    else
        rep.exponent = 0.0;
    rep.divergent = rep.exponent >= 0.9;
    return rep;
}

/// The classical counterexample family: block n lives on ((n-1) l, n l) with
/// A = [1], u_n(t) = c_n sin^2(n pi s / l) f_n, ||f_n|| = alpha_n,
/// alpha_n = n^{-alpha_power}, c_n = sqrt(8 / (3 l)) n^{c_power}.
/// ||u_n||^2 = (3/8) alpha_n^2 c_n^2 l = n^{2 (c_power - alpha_power)}:
/// with the defaults every block has norm exactly 1 and the partial sums of
/// squared norms equal N, so the formal sum is not in the direct sum even
/// though every single block is admissible (the minimal operator is not
/// essentially bounded below by the coefficients).
struct CounterexampleSpec {
    int blocks = 20;
    double alpha_power = 1.0;
    double c_power = 1.0;
    double length = 1.0;
};

inline void validate(const CounterexampleSpec& spec) {
    if (spec.blocks < 1) throw validation_error("counterexample: blocks >= 1");
    if (!(spec.length > 0)) throw validation_error("counterexample: length > 0");
    if (!std::isfinite(spec.alpha_power) || !std::isfinite(spec.c_power))
        throw validation_error("counterexample: powers must be finite");
}

inline Block counterexample_block(const CounterexampleSpec& spec, int n) {
    validate(spec);
    if (n < 1 || n > spec.blocks)
        throw std::out_of_range("counterexample block index outside 1..N");
    cmat a(1, 1);
    a(0, 0) = 1.0;
    return Block(n, Interval((n - 1) * spec.length, n * spec.length), CoefficientMatrix(a));
}

inline double counterexample_alpha(const CounterexampleSpec& spec, int n) {
    return std::pow(double(n), -spec.alpha_power);
}

inline double counterexample_c(const CounterexampleSpec& spec, int n) {
    return std::sqrt(8.0 / (3.0 * spec.length)) * std::pow(double(n), spec.c_power);
}

/// Sampled u_n on an m-node grid.
inline GridFunction counterexample_function(const CounterexampleSpec& spec, int n, int m) {
    Block block = counterexample_block(spec, n);
    const double amp = counterexample_c(spec, n) * counterexample_alpha(spec, n);
    const double len = spec.length;
    return GridFunction::from_callable(block, m, [&](double t) {
        const double s = std::sin(n * M_PI * (t - block.interval.a) / len);
        cvec v(1);
        v(0) = amp * s * s;
        return v;
    });
}

/// Squared norms of the counterexample blocks: exact closed form
/// n^{2 (c_power - alpha_power)} cross-checked by trapezoid quadrature
/// (exact for these trigonometric polynomials when m - 1 > 4 n).
struct CounterexampleNorms {
    std::vector<double> closed_form; // ||u_n||^2
    std::vector<double> quadrature;
    std::vector<double> partial_sums;
};

inline CounterexampleNorms counterexample_norms(const CounterexampleSpec& spec,
                                                int quad_m = 0) {
    validate(spec);
    CounterexampleNorms out;
    double acc = 0.0;
    for (int n = 1; n <= spec.blocks; ++n) {
        const double closed = std::pow(double(n), 2.0 * (spec.c_power - spec.alpha_power));
        const int m = quad_m > 0 ? quad_m : std::max(401, 8 * n + 1);
        GridFunction u = counterexample_function(spec, n, m);
        const double quad = inner_product(u, u).real();
        if (std::abs(quad - closed) > 1e-6 * std::max(closed, 1e-12))
            throw validation_error(
                "counterexample norm cross-check failed at block " + std::to_string(n) +
                ": closed " + detail::fmt(closed) + " vs quadrature " + detail::fmt(quad));
        acc += closed;
        out.closed_form.push_back(closed);
        out.quadrature.push_back(quad);
        out.partial_sums.push_back(acc);
    }
    return out;
}

} // namespace opspec
