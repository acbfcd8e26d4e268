#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#include <algorithm>

using namespace opspec;
using testsupport::diag_block;
using testsupport::scalar_block;

namespace {

const double pi = std::acos(-1.0);

bool has_root(const std::vector<Eigenvalue>& evs, complexd lam, int mult,
              double tol = 1e-8) {
    for (const auto& e : evs)
        if (std::abs(e.lambda - lam) <= tol) return e.multiplicity == mult;
    return false;
}

} // namespace

TEST_CASE("search region validation") {
    REQUIRE_THROWS_AS(SearchRegion(1.0, 1.0, 0.0, 3.0), validation_error);
    REQUIRE_THROWS_AS(SearchRegion(0.0, 50.0, 3.0, 0.0), validation_error);
    REQUIRE_THROWS_AS(SearchRegion(0.0, 50.0, 0.0, 3.0, 4, 20), validation_error);
    SearchRegion reg(0.0, 50.0, 0.0, 3.0);
    REQUIRE(reg.contains(complexd(25, 1)));
    REQUIRE_FALSE(reg.contains(complexd(51, 1)));
    REQUIRE(reg.contains(complexd(50.5, 1), 1.0));
}

TEST_CASE("characteristic residual separates eigenvalues from regular points") {
    Block blk = scalar_block(1.0);
    BoundaryUnitary dir = canonical_unitary(BoundaryKind::dirichlet, 1);
    // sin(pi t) solves the Dirichlet problem at lambda = pi^2 + i
    REQUIRE(characteristic_residual(blk, dir, complexd(pi * pi, 1)) <= 1e-10);
    REQUIRE(characteristic_residual(blk, dir, complexd(1, 1)) > 1e-3);
    REQUIRE(characteristic_residual(blk, dir, complexd(4 * pi * pi, 1)) <= 1e-10);
}

TEST_CASE("characteristic residual handles the degenerate frequency") {
    // at lambda = i alpha the solution basis degenerates to (1, t); the
    // series branch of the fundamental pair covers it
    Block blk = scalar_block(2.0);
    BoundaryUnitary neu = canonical_unitary(BoundaryKind::neumann, 1);
    REQUIRE(characteristic_residual(blk, neu, complexd(0, 2)) <= 1e-10);
    BoundaryUnitary dir = canonical_unitary(BoundaryKind::dirichlet, 1);
    REQUIRE(characteristic_residual(blk, dir, complexd(0, 2)) > 1e-3);
}

TEST_CASE("root search reproduces the Dirichlet spectrum") {
    Block blk = scalar_block(1.0);
    BoundaryUnitary dir = canonical_unitary(BoundaryKind::dirichlet, 1);
    auto evs = det_root_search(blk, dir, SearchRegion(0.0, 50.0, 0.0, 3.0), 1e-9);
    // (pi k)^2 + i for k = 1, 2; 9 pi^2 > 50 is outside
    REQUIRE(evs.size() == 2);
    REQUIRE(has_root(evs, complexd(pi * pi, 1), 1));
    REQUIRE(has_root(evs, complexd(4 * pi * pi, 1), 1));
    for (const auto& e : evs) {
        REQUIRE(e.residual <= 1e-9);
        REQUIRE(e.engine == Engine::analytic);
    }
}

TEST_CASE("root search resolves periodic double eigenvalues") {
    Block blk = diag_block({1.0, 2.0});
    BoundaryUnitary per = canonical_unitary(BoundaryKind::periodic, 2);
    auto evs = det_root_search(blk, per, SearchRegion(0.0, 50.0, 0.0, 3.0), 1e-9);
    REQUIRE(evs.size() == 4);
    REQUIRE(has_root(evs, complexd(0, 1), 1));
    REQUIRE(has_root(evs, complexd(0, 2), 1));
    REQUIRE(has_root(evs, complexd(4 * pi * pi, 1), 2));
    REQUIRE(has_root(evs, complexd(4 * pi * pi, 2), 2));
}

TEST_CASE("root search finds the Neumann zero mode") {
    Block blk = scalar_block(2.0);
    BoundaryUnitary neu = canonical_unitary(BoundaryKind::neumann, 1);
    auto evs = det_root_search(blk, neu, SearchRegion(0.0, 50.0, 0.0, 3.0), 1e-9);
    REQUIRE(evs.size() == 3);
    REQUIRE(has_root(evs, complexd(0, 2), 1));
    REQUIRE(has_root(evs, complexd(pi * pi, 2), 1));
    REQUIRE(has_root(evs, complexd(4 * pi * pi, 2), 1));
}

TEST_CASE("root search returns nothing on an eigenvalue-free region") {
    Block blk = scalar_block(1.0);
    BoundaryUnitary dir = canonical_unitary(BoundaryKind::dirichlet, 1);
    auto evs = det_root_search(blk, dir, SearchRegion(0.2, 0.8, 0.1, 0.9, 8, 8), 1e-9);
    REQUIRE(evs.empty());
    REQUIRE_THROWS_AS(det_root_search(blk, dir, SearchRegion(0, 1, 0, 1), 0.0),
                      validation_error);
}

TEST_CASE("root search is deterministic") {
    Block blk = diag_block({1.0, 2.0});
    BoundaryUnitary per = canonical_unitary(BoundaryKind::periodic, 2);
    SearchRegion reg(0.0, 50.0, 0.0, 3.0);
    auto first = det_root_search(blk, per, reg, 1e-9);
    auto second = det_root_search(blk, per, reg, 1e-9);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        REQUIRE(first[i].lambda == second[i].lambda);
        REQUIRE(first[i].multiplicity == second[i].multiplicity);
        REQUIRE(first[i].residual == second[i].residual);
    }
}

TEST_CASE("root search on a tight window isolates one eigenvalue") {
    Block blk = scalar_block(1.0);
    BoundaryUnitary dir = canonical_unitary(BoundaryKind::dirichlet, 1);
    auto evs = det_root_search(blk, dir, SearchRegion(9.0, 11.0, 0.5, 1.5, 8, 8), 1e-9);
    REQUIRE(evs.size() == 1);
    REQUIRE(std::abs(evs[0].lambda - complexd(pi * pi, 1)) <= 1e-9);
}

TEST_CASE("rank deficiency counts eigenvalue multiplicity") {
    Block blk = scalar_block(1.0);
    BoundaryUnitary per = canonical_unitary(BoundaryKind::periodic, 1);
    BoundaryUnitary dir = canonical_unitary(BoundaryKind::dirichlet, 1);
    // the k = 1 periodic eigenvalue carries e^{+-2 pi i t}, a double root
    REQUIRE(characteristic_rank_deficiency(blk, per, complexd(4 * pi * pi, 1)) == 2);
    REQUIRE(characteristic_rank_deficiency(blk, dir, complexd(pi * pi, 1)) == 1);
    REQUIRE(characteristic_rank_deficiency(blk, dir, complexd(5, 0.3)) == 0);
}

TEST_CASE("closed-form spectra") {
    Block blk = scalar_block(1.0);
    auto dir = analytic_spectrum(BoundaryKind::dirichlet, blk, 3);
    REQUIRE(dir.size() == 3);
    for (int k = 1; k <= 3; ++k)
        REQUIRE(std::abs(dir[k - 1].lambda - complexd(pi * pi * k * k, 1)) <= 1e-12);

    auto neu = analytic_spectrum(BoundaryKind::neumann, blk, 2);
    REQUIRE(neu.size() == 3);
    REQUIRE(std::abs(neu[0].lambda - complexd(0, 1)) <= 1e-15);

    auto per = analytic_spectrum(BoundaryKind::periodic, blk, 2);
    REQUIRE(per.size() == 3);
    REQUIRE(per[0].multiplicity == 1);
    REQUIRE(per[1].multiplicity == 2);
    REQUIRE(std::abs(per[1].lambda - complexd(4 * pi * pi, 1)) <= 1e-12);
    REQUIRE(per[2].multiplicity == 2);

    REQUIRE_THROWS_AS(analytic_spectrum(BoundaryKind::custom, blk, 2), validation_error);
}

TEST_CASE("interval length scales the spectrum") {
    // on (0, 1/2) the Dirichlet frequencies are (2 pi k)^2
    Block blk = scalar_block(1.0, 0.0, 0.5);
    BoundaryUnitary dir = canonical_unitary(BoundaryKind::dirichlet, 1);
    auto evs = det_root_search(blk, dir, SearchRegion(0.0, 50.0, 0.0, 3.0), 1e-9);
    REQUIRE(evs.size() == 1);
    REQUIRE(std::abs(evs[0].lambda - complexd(4 * pi * pi, 1)) <= 1e-8);
}

TEST_CASE("root search handles a generic admissible parameter") {
    // endpoint swap: boundary conditions u(a) = u(b) combined through the
    // characteristic system give the antiperiodic family ((2k+1) pi)^2
    cmat a = cmat::Zero(2, 2);
    a(0, 0) = 1;
    a(1, 1) = 4;
    Block blk(1, Interval(0.0, 1.0), CoefficientMatrix(a));
    BoundaryUnitary w(testsupport::swap_unitary());
    auto evs = det_root_search(blk, w, SearchRegion(0.0, 50.0, 0.0, 5.0), 1e-9);
    REQUIRE(evs.size() == 2);
    REQUIRE(has_root(evs, complexd(pi * pi, 1), 2, 1e-7));
    REQUIRE(has_root(evs, complexd(pi * pi, 4), 2, 1e-7));
}
