// Fast solver for the 2D discrete Poisson equation with a zero-Dirichlet
// boundary ring, via type-I sine transforms along both axes.
#pragma once

#include <cstddef>
#include <vector>

namespace stereotac::poisson {

/// Solves lap5(z) = rhs on an interior grid of `rows` x `cols` samples
/// (row-major), where lap5 is the 5-point Laplacian with unit grid spacing and
/// zero values on the ring just outside the grid. Exact for the discrete
/// system up to floating-point rounding; O(N log N).
std::vector<double> solve_dirichlet(const std::vector<double>& rhs, int cols, int rows);

}  // namespace stereotac::poisson
