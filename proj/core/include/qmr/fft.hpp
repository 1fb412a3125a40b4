#pragma once

#include <Eigen/Core>

#include "qmr/grid.hpp"

namespace qmr::fft {

// Unnormalized multidimensional DFTs over the grid layout (row-major, last
// axis contiguous):
//   forward:  X_m = sum_j x_j exp(-2 pi i m.j / N)
//   backward: x_j = sum_m X_m exp(+2 pi i m.j / N)
// so backward(forward(x)) = N^dim x. Plans are cached and shared; execution
// is thread-safe.
void forward(const PeriodicGrid& grid, Eigen::VectorXcd& data);
void backward(const PeriodicGrid& grid, Eigen::VectorXcd& data);

/// One-dimensional transforms of length n (power of two not required).
void forward_1d(Eigen::VectorXcd& data);
void backward_1d(Eigen::VectorXcd& data);

/// m(h k) applied as a Fourier multiplier.
GridFunction apply_multiplier(const GridFunction& u, const std::function<cplx(const Vec& xi)>& m);

}  // namespace qmr::fft
