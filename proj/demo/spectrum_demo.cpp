// Two-block demo: eigenvalues of l(u) = -u'' + iAu under periodic and
// Dirichlet boundary parameters, by both engines, plus the merged union.

#include <opspec/opspec.hpp>

#include <cstdio>

using namespace opspec;

int main() {
    cmat a1(1, 1), a2(2, 2);
    a1 << complexd(2.0, 0.0);
    a2 << complexd(1.0, 0.0), complexd(0.0, 0.0), complexd(0.0, 0.0), complexd(2.0, 0.0);

    std::vector<Block> blocks{Block(1, Interval(0.0, 1.0), CoefficientMatrix(a1)),
                              Block(2, Interval(2.0, 3.0), CoefficientMatrix(a2))};
    std::vector<BoundaryUnitary> ext{canonical_unitary(BoundaryKind::dirichlet, 1),
                                     canonical_unitary(BoundaryKind::periodic, 2)};
    MultipointProblem prob(std::move(blocks), std::move(ext));

    SearchRegion region(0.0, 50.0, 0.0, 3.0);
    Tolerances tol;
    const int m = 201;

    std::printf("block  engine    re(lambda)      im(lambda)  mult  residual\n");
    std::vector<std::vector<Eigenvalue>> per_block;
    for (int n = 1; n <= prob.size(); ++n) {
        auto [blk, w] = project_block(prob, n);
        auto analytic = det_root_search(*blk, *w, region, tol.root_residual);
        per_block.push_back(analytic);
        for (const auto& e : analytic)
            std::printf("%5d  analytic  %14.9f  %10.6f  %4d  %.2e\n", n, e.lambda.real(),
                        e.lambda.imag(), e.multiplicity, e.residual);
        for (const auto& e : eigen_spectrum(discretize(*blk, *w, m), tol.eigen_cap))
            if (region.contains(e.lambda, 0.05))
                std::printf("%5d  discrete  %14.9f  %10.6f  %4d  %.2e\n", n,
                            e.lambda.real(), e.lambda.imag(), e.multiplicity, e.residual);
    }

    std::printf("\nunion of analytic spectra (merge radius %.1e):\n", tol.merge);
    for (const auto& u : aggregate_spectrum(per_block, tol.merge)) {
        std::printf("  lambda = %14.9f + %.6f i  mult %d  blocks {", u.lambda.real(),
                    u.lambda.imag(), u.multiplicity);
        for (std::size_t k = 0; k < u.blocks.size(); ++k)
            std::printf("%s%d", k ? ", " : "", u.blocks[k]);
        std::printf("}\n");
    }
    return 0;
}
