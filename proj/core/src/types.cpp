#include "fuvar/types.hpp"

#include "fuvar/errors.hpp"

#include <cmath>
#include <string>

namespace fuvar {
namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

} // namespace

Matrix vec_to_grid(const Eigen::Ref<const Eigen::VectorXd>& v, int rows, int cols) {
    if (v.size() != static_cast<Eigen::Index>(rows) * cols)
        throw DimensionError("vec_to_grid: vector length does not match grid size");
    Matrix g(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) g(r, c) = v(pixel_index(r, c, cols));
    return g;
}

Vector grid_to_vec(const Matrix& grid) {
    const int rows = static_cast<int>(grid.rows());
    const int cols = static_cast<int>(grid.cols());
    Vector v(static_cast<Eigen::Index>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) v(pixel_index(r, c, cols)) = grid(r, c);
    return v;
}

ImageCube::ImageCube(int rows, int cols, Matrix band_matrix)
    : rows_(rows), cols_(cols), data_(std::move(band_matrix)) {
    require(rows_ > 0 && cols_ > 0, "ImageCube: grid dimensions must be positive");
    require(data_.rows() > 0, "ImageCube: band count must be positive");
    if (data_.cols() != static_cast<Eigen::Index>(rows_) * cols_)
        throw DimensionError("ImageCube: band matrix has " + std::to_string(data_.cols()) +
                             " pixels, grid expects " + std::to_string(rows_ * cols_));
    require(all_finite(data_), "ImageCube: entries must be finite");
}

Matrix ImageCube::band_grid(int band) const {
    if (band < 0 || band >= bands())
        throw InvalidArgument("ImageCube: band index out of range");
    return vec_to_grid(data_.row(band).transpose(), rows_, cols_);
}

EndmemberMatrix::EndmemberMatrix(Matrix spectra) : data_(std::move(spectra)) {
    require(data_.rows() > 0 && data_.cols() > 0, "EndmemberMatrix: empty matrix");
    require(data_.cols() < data_.rows(),
            "EndmemberMatrix: material count must be below the band count");
    require(all_finite(data_), "EndmemberMatrix: entries must be finite");
    require((data_.array() >= 0.0).all(), "EndmemberMatrix: entries must be nonnegative");
}

AbundanceMap::AbundanceMap(int rows, int cols, Matrix abundances)
    : rows_(rows), cols_(cols), data_(std::move(abundances)) {
    require(rows_ > 0 && cols_ > 0, "AbundanceMap: grid dimensions must be positive");
    require(data_.rows() > 0, "AbundanceMap: material count must be positive");
    if (data_.cols() != static_cast<Eigen::Index>(rows_) * cols_)
        throw DimensionError("AbundanceMap: abundance matrix does not match the grid");
    require(all_finite(data_), "AbundanceMap: entries must be finite");
    require((data_.array() >= 0.0).all(), "AbundanceMap: entries must be nonnegative");
}

Matrix AbundanceMap::material_grid(int material) const {
    if (material < 0 || material >= materials())
        throw InvalidArgument("AbundanceMap: material index out of range");
    return vec_to_grid(data_.row(material).transpose(), rows_, cols_);
}

ScalingFactors::ScalingFactors(Matrix factors) : data_(std::move(factors)) {
    require(data_.rows() > 0 && data_.cols() > 0, "ScalingFactors: empty matrix");
    require(all_finite(data_), "ScalingFactors: entries must be finite");
    require((data_.array() >= 0.0).all(), "ScalingFactors: entries must be nonnegative");
}

ScalingFactors ScalingFactors::ones(int bands, int materials) {
    return ScalingFactors(Matrix::Ones(bands, materials));
}

void ObservationModel::validate() const {
    require(blur_kernel.size() > 0, "ObservationModel: blur kernel is empty");
    require(blur_kernel.allFinite(), "ObservationModel: blur kernel must be finite");
    require((blur_kernel.array() >= 0.0).all(),
            "ObservationModel: blur kernel must be nonnegative");
    require(std::abs(blur_kernel.sum() - 1.0) <= 1e-12,
            "ObservationModel: blur kernel must sum to 1 within 1e-12");
    require(decimation_factor >= 1, "ObservationModel: decimation factor must be >= 1");
    require(decimation_phase >= 0 && decimation_phase < decimation_factor,
            "ObservationModel: decimation phase must lie in [0, factor)");
    require(srf.size() > 0, "ObservationModel: SRF matrix is empty");
    require(srf.allFinite(), "ObservationModel: SRF must be finite");
    require((srf.array() >= 0.0).all(), "ObservationModel: SRF must be nonnegative");
    for (Eigen::Index r = 0; r < srf.rows(); ++r) {
        if ((srf.row(r).array() > 0.0).any()) continue;
        throw InvalidArgument("ObservationModel: SRF row " + std::to_string(r) +
                              " has no positive entry");
    }
    require(!std::isnan(snr_hs_db) && !std::isnan(snr_ms_db),
            "ObservationModel: SNR targets must not be NaN");
}

void FuvarConfig::validate() const {
    require(endmembers >= 1, "FuvarConfig: endmember count must be >= 1");
    require(lambda_a >= 0.0 && lambda_1 >= 0.0 && lambda_2 >= 0.0,
            "FuvarConfig: regularization weights must be nonnegative");
    require(rho > 0.0, "FuvarConfig: rho must be positive");
    require(outer_max_iters >= 1 && admm_max_iters >= 1,
            "FuvarConfig: iteration caps must be >= 1");
    require(outer_rel_tol > 0.0 && admm_rel_tol > 0.0,
            "FuvarConfig: tolerances must be positive");
}

} // namespace fuvar
