#pragma once

#include "fuvar/fft.hpp"
#include "fuvar/rng.hpp"
#include "fuvar/types.hpp"

#include <Eigen/Sparse>

namespace fuvar {

// Gaussian kernel truncated at `radius` standard deviations per side and
// renormalized to sum 1. radius=4 keeps the truncated mass below 1e-4.
Matrix gaussian_blur_kernel(double sigma = 1.0, int radius = 4);

// Embeds an odd-sized kernel on a rows x cols torus with its center at the
// origin (negative offsets wrap), the layout whose DFT is the transfer
// function of the corresponding circular convolution.
Matrix embed_kernel_at_origin(const Matrix& kernel, int rows, int cols);

// Circular 2-D convolution with a fixed odd-sized kernel on a fixed grid,
// applied through the cached transfer function. The adjoint is correlation
// with the flipped kernel (conjugate transfer function).
class BlurOperator {
public:
    BlurOperator(Matrix kernel, int rows, int cols);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    const Matrix& kernel() const noexcept { return kernel_; }

    Matrix apply(const Matrix& grid) const;
    Matrix apply_adjoint(const Matrix& grid) const;

private:
    Matrix apply_transfer(const Matrix& grid, bool conjugate) const;

    Matrix kernel_;
    int rows_;
    int cols_;
    fft::ComplexGrid transfer_;
};

// Keeps samples at indices phase + k*factor along both axes. Grid
// dimensions must be divisible by the factor.
Matrix decimate(const Matrix& grid, int factor, int phase = 0);

// Adjoint of decimate: scatters the coarse samples back onto the fine
// grid, zero elsewhere. decimate(upsample_zero_fill(x)) == x.
Matrix upsample_zero_fill(const Matrix& coarse, int factor, int phase = 0);

// Spectral response application R * X; X holds one spectrum per column.
Matrix srf_apply(const Matrix& srf, const Matrix& spectra);

// Circular first differences and their exact adjoints.
// grad_h(x)[i,j] = x[i, (j+1) mod C] - x[i,j]; grad_v acts on rows.
Matrix grad_h(const Matrix& grid);
Matrix grad_h_adjoint(const Matrix& grid);
Matrix grad_v(const Matrix& grid);
Matrix grad_v_adjoint(const Matrix& grid);

// Correlation stencils of the two gradient operators; each sums to zero.
struct GradientMasks {
    Matrix horizontal; // 1x2: (-1, 1), anchored at the left sample
    Matrix vertical;   // 2x1: (-1; 1), anchored at the top sample
};
GradientMasks gradient_masks();

// Transfer functions of grad_h/grad_v on a rows x cols torus (half
// spectra, same layout as fft::forward).
fft::ComplexGrid grad_h_transfer(int rows, int cols);
fft::ComplexGrid grad_v_transfer(int rows, int cols);

// Gram matrix of the non-circular first-difference operator over `bands`
// spectral samples: tridiagonal with stencil (-1, 2, -1) and unit corners.
Eigen::SparseMatrix<double> spectral_diff_gram(int bands);

// Adds white Gaussian noise calibrated so the expected SNR matches the
// target. A +inf target is the noise-disabled sentinel. Entries are drawn
// row-major so the output is reproducible for a given rng state.
Matrix add_noise_snr(const Matrix& signal, double target_snr_db, Rng& rng);

} // namespace fuvar
