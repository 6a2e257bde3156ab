#include "fuvar/operators.hpp"

#include "fuvar/errors.hpp"

#include <cmath>
#include <string>

namespace fuvar {

Matrix gaussian_blur_kernel(double sigma, int radius) {
    if (sigma <= 0.0) throw InvalidArgument("gaussian_blur_kernel: sigma must be positive");
    if (radius < 0) throw InvalidArgument("gaussian_blur_kernel: radius must be nonnegative");
    const int half = static_cast<int>(std::ceil(radius * sigma));
    const int size = 2 * half + 1;
    Matrix k(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            const double di = i - half;
            const double dj = j - half;
            k(i, j) = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
        }
    k /= k.sum();
    return k;
}

Matrix embed_kernel_at_origin(const Matrix& kernel, int rows, int cols) {
    if (kernel.rows() % 2 == 0 || kernel.cols() % 2 == 0)
        throw InvalidArgument("embed_kernel_at_origin: kernel dimensions must be odd");
    if (kernel.rows() > rows || kernel.cols() > cols)
        throw InvalidArgument("embed_kernel_at_origin: kernel larger than the grid");
    const int kr = static_cast<int>(kernel.rows()) / 2;
    const int kc = static_cast<int>(kernel.cols()) / 2;
    Matrix embedded = Matrix::Zero(rows, cols);
    for (int i = 0; i < kernel.rows(); ++i)
        for (int j = 0; j < kernel.cols(); ++j) {
            const int r = ((i - kr) % rows + rows) % rows;
            const int c = ((j - kc) % cols + cols) % cols;
            embedded(r, c) += kernel(i, j);
        }
    return embedded;
}

BlurOperator::BlurOperator(Matrix kernel, int rows, int cols)
    : kernel_(std::move(kernel)), rows_(rows), cols_(cols) {
    if (rows_ <= 0 || cols_ <= 0)
        throw InvalidArgument("BlurOperator: grid dimensions must be positive");
    if (!kernel_.allFinite())
        throw InvalidArgument("BlurOperator: kernel must be finite");
    transfer_ = fft::forward(embed_kernel_at_origin(kernel_, rows_, cols_));
}

Matrix BlurOperator::apply_transfer(const Matrix& grid, bool conjugate) const {
    if (grid.rows() != rows_ || grid.cols() != cols_)
        throw DimensionError("BlurOperator: grid does not match operator dimensions");
    fft::ComplexGrid spec = fft::forward(grid);
    if (conjugate)
        spec.array() *= transfer_.array().conjugate();
    else
        spec.array() *= transfer_.array();
    return fft::inverse(spec, rows_, cols_);
}

Matrix BlurOperator::apply(const Matrix& grid) const { return apply_transfer(grid, false); }

Matrix BlurOperator::apply_adjoint(const Matrix& grid) const {
    return apply_transfer(grid, true);
}

Matrix decimate(const Matrix& grid, int factor, int phase) {
    if (factor < 1) throw InvalidArgument("decimate: factor must be >= 1");
    if (phase < 0 || phase >= factor)
        throw InvalidArgument("decimate: phase must lie in [0, factor)");
    if (grid.rows() % factor != 0 || grid.cols() % factor != 0)
        throw DimensionError("decimate: grid dimensions not divisible by factor " +
                             std::to_string(factor));
    Matrix out(grid.rows() / factor, grid.cols() / factor);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            out(i, j) = grid(phase + i * factor, phase + j * factor);
    return out;
}

Matrix upsample_zero_fill(const Matrix& coarse, int factor, int phase) {
    if (factor < 1) throw InvalidArgument("upsample_zero_fill: factor must be >= 1");
    if (phase < 0 || phase >= factor)
        throw InvalidArgument("upsample_zero_fill: phase must lie in [0, factor)");
    Matrix out = Matrix::Zero(coarse.rows() * factor, coarse.cols() * factor);
    for (Eigen::Index i = 0; i < coarse.rows(); ++i)
        for (Eigen::Index j = 0; j < coarse.cols(); ++j)
            out(phase + i * factor, phase + j * factor) = coarse(i, j);
    return out;
}

Matrix srf_apply(const Matrix& srf, const Matrix& spectra) {
    if (srf.cols() != spectra.rows())
        throw DimensionError("srf_apply: SRF has " + std::to_string(srf.cols()) +
                             " input bands, spectra have " + std::to_string(spectra.rows()));
    return srf * spectra;
}

Matrix grad_h(const Matrix& grid) {
    if (grid.rows() < 2 || grid.cols() < 2)
        throw DimensionError("grad_h: grid must be at least 2x2");
    const Eigen::Index C = grid.cols();
    Matrix out(grid.rows(), C);
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
        for (Eigen::Index j = 0; j < C; ++j)
            out(i, j) = grid(i, (j + 1) % C) - grid(i, j);
    return out;
}

Matrix grad_h_adjoint(const Matrix& grid) {
    if (grid.rows() < 2 || grid.cols() < 2)
        throw DimensionError("grad_h_adjoint: grid must be at least 2x2");
    const Eigen::Index C = grid.cols();
    Matrix out(grid.rows(), C);
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
        for (Eigen::Index j = 0; j < C; ++j)
            out(i, j) = grid(i, (j - 1 + C) % C) - grid(i, j);
    return out;
}

Matrix grad_v(const Matrix& grid) {
    if (grid.rows() < 2 || grid.cols() < 2)
        throw DimensionError("grad_v: grid must be at least 2x2");
    const Eigen::Index R = grid.rows();
    Matrix out(R, grid.cols());
    for (Eigen::Index i = 0; i < R; ++i)
        for (Eigen::Index j = 0; j < grid.cols(); ++j)
            out(i, j) = grid((i + 1) % R, j) - grid(i, j);
    return out;
}

Matrix grad_v_adjoint(const Matrix& grid) {
    if (grid.rows() < 2 || grid.cols() < 2)
        throw DimensionError("grad_v_adjoint: grid must be at least 2x2");
    const Eigen::Index R = grid.rows();
    Matrix out(R, grid.cols());
    for (Eigen::Index i = 0; i < R; ++i)
        for (Eigen::Index j = 0; j < grid.cols(); ++j)
            out(i, j) = grid((i - 1 + R) % R, j) - grid(i, j);
    return out;
}

GradientMasks gradient_masks() {
    GradientMasks masks;
    masks.horizontal = Matrix(1, 2);
    masks.horizontal << -1.0, 1.0;
    masks.vertical = Matrix(2, 1);
    masks.vertical << -1.0, 1.0;
    return masks;
}

namespace {

// Transfer function of a circular shift-invariant operator, read off its
// impulse response.
fft::ComplexGrid transfer_of(Matrix impulse) { return fft::forward(impulse); }

} // namespace

fft::ComplexGrid grad_h_transfer(int rows, int cols) {
    Matrix delta = Matrix::Zero(rows, cols);
    delta(0, 0) = 1.0;
    return transfer_of(grad_h(delta));
}

fft::ComplexGrid grad_v_transfer(int rows, int cols) {
    Matrix delta = Matrix::Zero(rows, cols);
    delta(0, 0) = 1.0;
    return transfer_of(grad_v(delta));
}

Eigen::SparseMatrix<double> spectral_diff_gram(int bands) {
    if (bands < 2) throw InvalidArgument("spectral_diff_gram: need at least 2 bands");
    Eigen::SparseMatrix<double> gram(bands, bands);
    gram.reserve(Eigen::VectorXi::Constant(bands, 3));
    for (int i = 0; i < bands; ++i) {
        const double diag = (i == 0 || i == bands - 1) ? 1.0 : 2.0;
        gram.insert(i, i) = diag;
        if (i + 1 < bands) {
            gram.insert(i, i + 1) = -1.0;
            gram.insert(i + 1, i) = -1.0;
        }
    }
    gram.makeCompressed();
    return gram;
}

Matrix add_noise_snr(const Matrix& signal, double target_snr_db, Rng& rng) {
    if (std::isnan(target_snr_db))
        throw InvalidArgument("add_noise_snr: SNR target must not be NaN");
    if (std::isinf(target_snr_db) && target_snr_db > 0.0) return signal;
    const double power = signal.squaredNorm();
    if (power == 0.0) throw InvalidArgument("add_noise_snr: signal is identically zero");
    const double variance =
        power / (static_cast<double>(signal.size()) * std::pow(10.0, target_snr_db / 10.0));
    const double sigma = std::sqrt(variance);
    Matrix out = signal;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += sigma * rng.normal();
    return out;
}

} // namespace fuvar
