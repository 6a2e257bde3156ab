#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace fuvar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Row-major flattening of the spatial grid; fixed globally so a band image
// and its vectorized form can be converted without a permutation.
inline Eigen::Index pixel_index(int row, int col, int cols) {
    return static_cast<Eigen::Index>(row) * cols + col;
}

// Reshape a flattened band (length rows*cols) into its 2-D grid and back.
Matrix vec_to_grid(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols);
Vector grid_to_vec(const Matrix& grid);

// A radiance cube of rows x cols pixels by `bands` spectral samples.
// Storage is the bands x (rows*cols) band matrix: row l holds band l
// flattened row-major, which is also the serialization order.
class ImageCube {
public:
    ImageCube(int rows, int cols, Matrix band_matrix);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int bands() const noexcept { return static_cast<int>(data_.rows()); }
    Eigen::Index pixels() const noexcept { return data_.cols(); }

    // The matrix view of the cube; zero-copy by construction.
    const Matrix& band_matrix() const noexcept { return data_; }

    double at(int row, int col, int band) const {
        return data_(band, pixel_index(row, col, cols_));
    }

    // Band `band` as a rows x cols grid.
    Matrix band_grid(int band) const;

private:
    int rows_;
    int cols_;
    Matrix data_;
};

// L x P matrix of pure-material spectra, one column per endmember.
class EndmemberMatrix {
public:
    explicit EndmemberMatrix(Matrix spectra);

    int bands() const noexcept { return static_cast<int>(data_.rows()); }
    int materials() const noexcept { return static_cast<int>(data_.cols()); }
    const Matrix& data() const noexcept { return data_; }

private:
    Matrix data_;
};

// P x M nonnegative fractional abundances with the spatial grid they live on.
class AbundanceMap {
public:
    AbundanceMap(int rows, int cols, Matrix abundances);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int materials() const noexcept { return static_cast<int>(data_.rows()); }
    Eigen::Index pixels() const noexcept { return data_.cols(); }
    const Matrix& data() const noexcept { return data_; }

    // Material `p` as a rows x cols grid.
    Matrix material_grid(int material) const;

private:
    int rows_;
    int cols_;
    Matrix data_;
};

// L x P matrix of per-band, per-endmember multiplicative scaling factors.
class ScalingFactors {
public:
    explicit ScalingFactors(Matrix factors);

    int bands() const noexcept { return static_cast<int>(data_.rows()); }
    int materials() const noexcept { return static_cast<int>(data_.cols()); }
    const Matrix& data() const noexcept { return data_; }

    static ScalingFactors ones(int bands, int materials);

private:
    Matrix data_;
};

// Sensor model tying the high-resolution scene to the observed pair:
// spatial blur kernel, decimation grid, spectral response, noise levels.
struct ObservationModel {
    Matrix blur_kernel;        // normalized, nonnegative, odd-sized
    int decimation_factor = 4;
    int decimation_phase = 0;  // index of the retained sample inside each block
    Matrix srf;                // L_m x L_h, nonnegative, no empty rows
    double snr_hs_db = 30.0;   // +inf disables noise
    double snr_ms_db = 40.0;

    void validate() const;
};

// Algorithm parameters. Defaults follow the reference experimental setup.
struct FuvarConfig {
    int endmembers = 30;
    double lambda_a = 1e-4;
    double lambda_1 = 0.01;
    double lambda_2 = 1e4;
    double rho = 1.0;
    int outer_max_iters = 10;
    double outer_rel_tol = 1e-3;
    int admm_max_iters = 100;
    double admm_rel_tol = 1e-4;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

} // namespace fuvar
