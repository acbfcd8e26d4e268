#pragma once

#include <stdexcept>
#include <string>

namespace opspec {

/// Mismatched dimensions, intervals or grids between operands.
struct shape_error : std::invalid_argument {
    explicit shape_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Grid too coarse for the requested stencil or scheme.
struct grid_error : std::invalid_argument {
    explicit grid_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A constructor or operation invariant is violated (non-Hermitian
/// coefficient, non-unitary boundary matrix, malformed region, ...).
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// The boundary condition cannot be eliminated (singular encoding system).
struct boundary_encoding_error : std::runtime_error {
    explicit boundary_encoding_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A reference eigenvalue could not be matched in a computed spectrum.
struct matching_error : std::runtime_error {
    explicit matching_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A configured resource cap (eigensolver size) would be exceeded.
struct resource_cap_error : std::runtime_error {
    explicit resource_cap_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// The dense eigensolver failed to converge or produced bad residuals.
struct eigensolver_error : std::runtime_error {
    explicit eigensolver_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace opspec
