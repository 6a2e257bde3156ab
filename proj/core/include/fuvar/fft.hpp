#pragma once

#include <Eigen/Dense>
#include <complex>

namespace fuvar::fft {

using RealGrid = Eigen::MatrixXd;
using ComplexGrid = Eigen::MatrixXcd;

// Forward real-to-complex 2-D DFT. Returns the half spectrum with
// rows x (cols/2 + 1) bins (row index = first spatial axis).
ComplexGrid forward(const RealGrid& grid);

// Inverse of forward(); includes the 1/(rows*cols) normalization.
// cols must be passed since the half spectrum does not determine it.
RealGrid inverse(const ComplexGrid& spectrum, int rows, int cols);

// Full-spectrum complex transforms, for solves that index frequencies
// across the whole torus (aliasing cosets pair bins the half spectrum
// folds together).
ComplexGrid forward_full(const RealGrid& grid);

// Inverse full-spectrum DFT, normalized; returns the real part.
RealGrid inverse_full_real(const ComplexGrid& spectrum);

} // namespace fuvar::fft
