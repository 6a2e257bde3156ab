#include "fuvar/solver.hpp"

#include "fuvar/errors.hpp"
#include "fuvar/fft.hpp"
#include "fuvar/init.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace fuvar {
namespace {

constexpr double kTiny = 1e-30;

double l21_norm(const Matrix& x) {
    double sum = 0.0;
    for (Eigen::Index n = 0; n < x.cols(); ++n) sum += x.col(n).norm();
    return sum;
}

} // namespace

double objective_value(const Matrix& abundance, const Matrix& scaling, const Matrix& m_h,
                       const Matrix& y_h, const Matrix& y_m, const ObservationModel& model,
                       int rows, int cols, double lambda_a, double lambda_1,
                       double lambda_2) {
    if ((abundance.array() < 0.0).any())
        throw InvalidArgument("objective_value: abundances have negative entries");
    if ((scaling.array() < 0.0).any())
        throw InvalidArgument("objective_value: scaling factors have negative entries");

    const int bands = static_cast<int>(m_h.rows());
    const BlurOperator blur(model.blur_kernel, rows, cols);

    const Matrix z_h = m_h * abundance;
    double data_h = 0.0;
    for (int b = 0; b < bands; ++b) {
        const Matrix grid = vec_to_grid(z_h.row(b).transpose(), rows, cols);
        const Matrix coarse =
            decimate(blur.apply(grid), model.decimation_factor, model.decimation_phase);
        data_h += (y_h.row(b).transpose() - grid_to_vec(coarse)).squaredNorm();
    }

    const Matrix m_m = scaling.cwiseProduct(m_h);
    const double data_m = (y_m - model.srf * m_m * abundance).squaredNorm();

    const int materials = static_cast<int>(abundance.rows());
    Matrix gh(materials, abundance.cols()), gv(materials, abundance.cols());
    for (int p = 0; p < materials; ++p) {
        const Matrix grid = vec_to_grid(abundance.row(p).transpose(), rows, cols);
        gh.row(p) = grid_to_vec(grad_h(grid)).transpose();
        gv.row(p) = grid_to_vec(grad_v(grid)).transpose();
    }

    double psi_smooth = 0.0;
    for (Eigen::Index p = 0; p < scaling.cols(); ++p)
        for (Eigen::Index l = 0; l + 1 < scaling.rows(); ++l) {
            const double diff = scaling(l + 1, p) - scaling(l, p);
            psi_smooth += diff * diff;
        }

    return 0.5 * data_h + 0.5 * data_m + lambda_a * (l21_norm(gh) + l21_norm(gv)) +
           0.5 * lambda_1 * (scaling.array() - 1.0).matrix().squaredNorm() +
           0.5 * lambda_2 * psi_smooth;
}

namespace admm {

AbundanceSolver::AbundanceSolver(const Matrix& y_h, const Matrix& y_m, const Matrix& m_h,
                                 const Matrix& m_m, const ObservationModel& model, int rows,
                                 int cols, double lambda_a, double rho)
    : y_h_(y_h),
      y_m_(y_m),
      m_h_(m_h),
      m_m_(m_m),
      blur_(model.blur_kernel, rows, cols),
      rows_(rows),
      cols_(cols),
      factor_(model.decimation_factor),
      phase_(model.decimation_phase),
      materials_(static_cast<int>(m_h.cols())),
      hs_bands_(static_cast<int>(m_h.rows())),
      pixels_(rows * cols),
      coarse_pixels_((rows / model.decimation_factor) * (cols / model.decimation_factor)),
      lambda_a_(lambda_a),
      rho_(rho) {
    if (rho <= 0.0) throw InvalidArgument("AbundanceSolver: rho must be positive");
    if (lambda_a < 0.0) throw InvalidArgument("AbundanceSolver: lambda_a must be >= 0");
    if (rows % factor_ != 0 || cols % factor_ != 0)
        throw DimensionError("AbundanceSolver: grid not divisible by the decimation factor");
    if (m_m_.rows() != hs_bands_ || m_m_.cols() != materials_)
        throw DimensionError("AbundanceSolver: endmember matrices disagree");
    if (y_h_.rows() != hs_bands_ || y_h_.cols() != coarse_pixels_)
        throw DimensionError("AbundanceSolver: observed HSI dimensions disagree");
    if (model.srf.cols() != hs_bands_ || y_m_.rows() != model.srf.rows() ||
        y_m_.cols() != pixels_)
        throw DimensionError("AbundanceSolver: observed MSI dimensions disagree");

    r_m_m_ = model.srf * m_m_;
    rhs_data_ = r_m_m_.transpose() * y_m_;

    Matrix normal = r_m_m_.transpose() * r_m_m_ + rho_ * (m_h_.transpose() * m_h_);
    normal.diagonal().array() += 2.0 * rho_;
    normal_llt_.compute(normal);
    if (normal_llt_.info() != Eigen::Success)
        throw NumericalError("AbundanceSolver: per-pixel normal matrix is not SPD");

    grad_h_tf_ = grad_h_transfer(rows_, cols_);
    grad_v_tf_ = grad_v_transfer(rows_, cols_);
    tv_denominator_ =
        1.0 + grad_h_tf_.array().abs2() + grad_v_tf_.array().abs2();

    // Coset structure of the blur-decimation Gram operator. With blur
    // transfer H and decimation by d at phase p, the frequencies that alias
    // onto one coarse bin couple through the rank-one matrix
    // conj(g) g^T / d^2 with g = H * exp(i*phi), phi the phase modulation.
    const fft::ComplexGrid otf =
        fft::forward_full(embed_kernel_at_origin(model.blur_kernel, rows_, cols_));
    const int coarse_rows = rows_ / factor_;
    const int coarse_cols = cols_ / factor_;
    obs_gain_.resize(rows_, cols_);
    for (int k1 = 0; k1 < rows_; ++k1)
        for (int k2 = 0; k2 < cols_; ++k2) {
            const int a = k1 / coarse_rows;
            const int b = k2 / coarse_cols;
            const double phi = 2.0 * std::numbers::pi * phase_ *
                               (static_cast<double>(a) + b) / factor_;
            obs_gain_(k1, k2) =
                otf(k1, k2) * std::complex<double>(std::cos(phi), std::sin(phi));
        }
    coset_denominator_.resize(coarse_rows, coarse_cols);
    for (int u = 0; u < coarse_rows; ++u)
        for (int v = 0; v < coarse_cols; ++v) {
            double sum = static_cast<double>(factor_) * factor_;
            for (int a = 0; a < factor_; ++a)
                for (int b = 0; b < factor_; ++b)
                    sum += std::norm(obs_gain_(u + a * coarse_rows, v + b * coarse_cols));
            coset_denominator_(u, v) = sum;
        }
}

Matrix AbundanceSolver::blur_decimate_rows(const Matrix& x) const {
    Matrix out(x.rows(), coarse_pixels_);
    for (Eigen::Index b = 0; b < x.rows(); ++b) {
        const Matrix grid = vec_to_grid(x.row(b).transpose(), rows_, cols_);
        out.row(b) = grid_to_vec(decimate(blur_.apply(grid), factor_, phase_)).transpose();
    }
    return out;
}

Matrix AbundanceSolver::upsample_blur_adjoint_rows(const Matrix& y) const {
    Matrix out(y.rows(), pixels_);
    for (Eigen::Index b = 0; b < y.rows(); ++b) {
        const Matrix coarse =
            vec_to_grid(y.row(b).transpose(), rows_ / factor_, cols_ / factor_);
        out.row(b) =
            grid_to_vec(blur_.apply_adjoint(upsample_zero_fill(coarse, factor_, phase_)))
                .transpose();
    }
    return out;
}

Matrix AbundanceSolver::grad_h_rows(const Matrix& a) const {
    Matrix out(a.rows(), a.cols());
    for (Eigen::Index p = 0; p < a.rows(); ++p)
        out.row(p) =
            grid_to_vec(grad_h(vec_to_grid(a.row(p).transpose(), rows_, cols_))).transpose();
    return out;
}

Matrix AbundanceSolver::grad_v_rows(const Matrix& a) const {
    Matrix out(a.rows(), a.cols());
    for (Eigen::Index p = 0; p < a.rows(); ++p)
        out.row(p) =
            grid_to_vec(grad_v(vec_to_grid(a.row(p).transpose(), rows_, cols_))).transpose();
    return out;
}

AbundanceState AbundanceSolver::initial_state(const Matrix& a_init) const {
    if (a_init.rows() != materials_ || a_init.cols() != pixels_)
        throw DimensionError("AbundanceSolver: initial abundances have wrong shape");
    AbundanceState s;
    s.abundance = a_init;
    s.sharp_hs = m_h_ * a_init;
    s.sharp_hs_coarse = blur_decimate_rows(s.sharp_hs);
    s.hs_fit = s.sharp_hs_coarse;
    s.tv_copy = a_init;
    s.grad_h_of_tv = grad_h_rows(s.tv_copy);
    s.grad_v_of_tv = grad_v_rows(s.tv_copy);
    s.grad_h_split = s.grad_h_of_tv;
    s.grad_v_split = s.grad_v_of_tv;
    s.positive_copy = a_init.cwiseMax(0.0);
    s.dual_hs_fit = Matrix::Zero(hs_bands_, coarse_pixels_);
    s.dual_sharp_hs = Matrix::Zero(hs_bands_, pixels_);
    s.dual_tv_copy = Matrix::Zero(materials_, pixels_);
    s.dual_grad_h = Matrix::Zero(materials_, pixels_);
    s.dual_grad_v = Matrix::Zero(materials_, pixels_);
    s.dual_positive = Matrix::Zero(materials_, pixels_);
    return s;
}

void AbundanceSolver::update_abundance(AbundanceState& s) const {
    const Matrix rhs = rhs_data_ +
                       rho_ * (m_h_.transpose() * (s.sharp_hs + s.dual_sharp_hs) +
                               (s.tv_copy + s.dual_tv_copy) +
                               (s.positive_copy + s.dual_positive));
    s.abundance = normal_llt_.solve(rhs);
}

void AbundanceSolver::update_hs_fit(AbundanceState& s) const {
    s.hs_fit = (y_h_ + rho_ * (s.sharp_hs_coarse + s.dual_hs_fit)) / (1.0 + rho_);
}

void AbundanceSolver::update_sharp_hs(AbundanceState& s) const {
    // Per band: (I + F D D'F') x = target + F D (fit - dual). The left-hand
    // operator acts on each frequency-aliasing coset as identity plus a
    // rank-one term, so the solve reduces to two full-spectrum transforms
    // and a Sherman-Morrison correction per coarse bin.
    const Matrix target = m_h_ * s.abundance - s.dual_sharp_hs;
    const Matrix lifted = upsample_blur_adjoint_rows(s.hs_fit - s.dual_hs_fit);
    const int coarse_rows = rows_ / factor_;
    const int coarse_cols = cols_ / factor_;

    for (int b = 0; b < hs_bands_; ++b) {
        const Matrix rhs = vec_to_grid(target.row(b).transpose(), rows_, cols_) +
                           vec_to_grid(lifted.row(b).transpose(), rows_, cols_);
        fft::ComplexGrid spec = fft::forward_full(rhs);
        for (int u = 0; u < coarse_rows; ++u)
            for (int v = 0; v < coarse_cols; ++v) {
                std::complex<double> coupled(0.0, 0.0);
                for (int a = 0; a < factor_; ++a)
                    for (int c = 0; c < factor_; ++c)
                        coupled += obs_gain_(u + a * coarse_rows, v + c * coarse_cols) *
                                   spec(u + a * coarse_rows, v + c * coarse_cols);
                coupled /= coset_denominator_(u, v);
                for (int a = 0; a < factor_; ++a)
                    for (int c = 0; c < factor_; ++c) {
                        const int k1 = u + a * coarse_rows;
                        const int k2 = v + c * coarse_cols;
                        spec(k1, k2) -= std::conj(obs_gain_(k1, k2)) * coupled;
                    }
            }
        s.sharp_hs.row(b) = grid_to_vec(fft::inverse_full_real(spec)).transpose();
    }
    s.sharp_hs_coarse = blur_decimate_rows(s.sharp_hs);
}

void AbundanceSolver::update_tv_copy(AbundanceState& s) const {
    for (int p = 0; p < materials_; ++p) {
        const Matrix base =
            vec_to_grid((s.abundance.row(p) - s.dual_tv_copy.row(p)).transpose(), rows_, cols_);
        const Matrix gh = vec_to_grid(
            (s.grad_h_split.row(p) + s.dual_grad_h.row(p)).transpose(), rows_, cols_);
        const Matrix gv = vec_to_grid(
            (s.grad_v_split.row(p) + s.dual_grad_v.row(p)).transpose(), rows_, cols_);
        fft::ComplexGrid numerator = fft::forward(base);
        numerator.array() += grad_h_tf_.array().conjugate() * fft::forward(gh).array();
        numerator.array() += grad_v_tf_.array().conjugate() * fft::forward(gv).array();
        numerator.array() /= tv_denominator_;
        s.tv_copy.row(p) = grid_to_vec(fft::inverse(numerator, rows_, cols_)).transpose();
    }
    s.grad_h_of_tv = grad_h_rows(s.tv_copy);
    s.grad_v_of_tv = grad_v_rows(s.tv_copy);
}

void AbundanceSolver::update_gradient_splits(AbundanceState& s) const {
    // Group soft threshold across materials, one group per pixel.
    const double threshold = lambda_a_ / rho_;
    auto shrink = [&](const Matrix& v, Matrix& out) {
        out.resize(v.rows(), v.cols());
        for (Eigen::Index n = 0; n < v.cols(); ++n) {
            const double norm = v.col(n).norm();
            const double scale = (norm > 0.0) ? std::max(1.0 - threshold / norm, 0.0) : 0.0;
            out.col(n) = scale * v.col(n);
        }
    };
    shrink(s.grad_h_of_tv - s.dual_grad_h, s.grad_h_split);
    shrink(s.grad_v_of_tv - s.dual_grad_v, s.grad_v_split);
}

void AbundanceSolver::update_positive_copy(AbundanceState& s) const {
    s.positive_copy = (s.abundance - s.dual_positive).cwiseMax(0.0);
}

void AbundanceSolver::update_duals(AbundanceState& s) const {
    s.dual_hs_fit += s.sharp_hs_coarse - s.hs_fit;
    s.dual_sharp_hs += s.sharp_hs - m_h_ * s.abundance;
    s.dual_tv_copy += s.tv_copy - s.abundance;
    s.dual_grad_h += s.grad_h_split - s.grad_h_of_tv;
    s.dual_grad_v += s.grad_v_split - s.grad_v_of_tv;
    s.dual_positive += s.positive_copy - s.abundance;
}

Residuals AbundanceSolver::iterate(AbundanceState& s) const {
    // Projection of the auxiliary blocks onto the abundance equations; its
    // change over one sweep drives the dual residual.
    const Matrix coupled_before =
        m_h_.transpose() * s.sharp_hs + s.tv_copy + s.positive_copy;

    update_abundance(s);
    update_hs_fit(s);
    update_sharp_hs(s);
    update_tv_copy(s);
    update_gradient_splits(s);
    update_positive_copy(s);
    update_duals(s);

    const Matrix m_h_a = m_h_ * s.abundance;
    const Matrix coupled_after = m_h_.transpose() * s.sharp_hs + s.tv_copy + s.positive_copy;

    auto sq = [](const Matrix& m) { return m.squaredNorm(); };
    const double primal =
        std::sqrt(sq(s.sharp_hs_coarse - s.hs_fit) + sq(s.sharp_hs - m_h_a) +
                  sq(s.tv_copy - s.abundance) + sq(s.grad_h_split - s.grad_h_of_tv) +
                  sq(s.grad_v_split - s.grad_v_of_tv) + sq(s.positive_copy - s.abundance));
    const double primal_scale = std::sqrt(
        std::max(sq(s.sharp_hs_coarse), sq(s.hs_fit)) + std::max(sq(s.sharp_hs), sq(m_h_a)) +
        std::max(sq(s.tv_copy), sq(s.abundance)) +
        std::max(sq(s.grad_h_split), sq(s.grad_h_of_tv)) +
        std::max(sq(s.grad_v_split), sq(s.grad_v_of_tv)) +
        std::max(sq(s.positive_copy), sq(s.abundance)));

    const double dual = rho_ * (coupled_after - coupled_before).norm();
    const double dual_scale =
        rho_ * (m_h_.transpose() * s.dual_sharp_hs + s.dual_tv_copy + s.dual_positive).norm();

    Residuals res;
    res.primal = primal / std::max(primal_scale, kTiny);
    res.dual = dual / std::max(dual_scale, kTiny);
    return res;
}

Matrix AbundanceSolver::solve(const Matrix& a_init, double tol, int max_iters,
                              AdmmTrace* trace) const {
    AbundanceState state = initial_state(a_init);
    if (trace) {
        trace->iterations = 0;
        trace->primal_residual.clear();
        trace->dual_residual.clear();
    }
    for (int k = 0; k < max_iters; ++k) {
        const Residuals res = iterate(state);
        if (trace) {
            ++trace->iterations;
            trace->primal_residual.push_back(res.primal);
            trace->dual_residual.push_back(res.dual);
        }
        if (std::max(res.primal, res.dual) < tol) break;
    }
    if (!state.positive_copy.allFinite())
        throw NumericalError("AbundanceSolver: iterate became non-finite");
    return state.positive_copy;
}

ScalingSolver::ScalingSolver(const Matrix& y_m, const Matrix& m_h, const Matrix& abundance,
                             const Matrix& srf, double lambda_1, double lambda_2, double rho)
    : y_m_(y_m),
      m_h_(m_h),
      abundance_(abundance),
      srf_(srf),
      lambda_1_(lambda_1),
      lambda_2_(lambda_2),
      rho_(rho),
      hs_bands_(static_cast<int>(m_h.rows())),
      materials_(static_cast<int>(m_h.cols())) {
    if (rho <= 0.0) throw InvalidArgument("ScalingSolver: rho must be positive");
    if (lambda_1 < 0.0 || lambda_2 < 0.0)
        throw InvalidArgument("ScalingSolver: regularization weights must be >= 0");
    if (srf_.cols() != hs_bands_)
        throw DimensionError("ScalingSolver: SRF and endmembers disagree on bands");
    if (abundance_.rows() != materials_)
        throw DimensionError("ScalingSolver: abundances and endmembers disagree");
    if (y_m_.rows() != srf_.rows() || y_m_.cols() != abundance_.cols())
        throw DimensionError("ScalingSolver: observed MSI dimensions disagree");
    if ((abundance_.array() < 0.0).any())
        throw InvalidArgument("ScalingSolver: abundances must be nonnegative");

    Eigen::SelfAdjointEigenSolver<Matrix> es_srf(srf_.transpose() * srf_);
    Eigen::SelfAdjointEigenSolver<Matrix> es_abund(abundance_ * abundance_.transpose());
    if (es_srf.info() != Eigen::Success || es_abund.info() != Eigen::Success)
        throw NumericalError("ScalingSolver: eigendecomposition failed");
    q_srf_ = es_srf.eigenvectors();
    ev_srf_ = es_srf.eigenvalues();
    q_abund_ = es_abund.eigenvectors();
    ev_abund_ = es_abund.eigenvalues();
    denom_ = 1.0 + (ev_srf_ * ev_abund_.transpose()).array() / rho_;

    rhs_data_ = (srf_.transpose() * y_m_ * abundance_.transpose()) / rho_;

    // LDL' factors of lambda_1 I + lambda_2 H'H + rho diag(m_h^2), one
    // tridiagonal system per material column.
    tri_diag_.resize(hs_bands_, materials_);
    tri_sub_.resize(std::max(hs_bands_ - 1, 1), materials_);
    for (int p = 0; p < materials_; ++p) {
        Vector diag(hs_bands_);
        for (int l = 0; l < hs_bands_; ++l) {
            const double gram = (l == 0 || l == hs_bands_ - 1) ? 1.0 : 2.0;
            diag(l) = lambda_1_ + lambda_2_ * gram + rho_ * m_h_(l, p) * m_h_(l, p);
        }
        const double off = -lambda_2_;
        double d_prev = diag(0);
        if (d_prev <= 0.0)
            throw NumericalError("ScalingSolver: scaling system is not positive definite");
        tri_diag_(0, p) = d_prev;
        for (int l = 1; l < hs_bands_; ++l) {
            const double factor = off / d_prev;
            tri_sub_(l - 1, p) = factor;
            d_prev = diag(l) - off * factor;
            if (d_prev <= 0.0)
                throw NumericalError("ScalingSolver: scaling system is not positive definite");
            tri_diag_(l, p) = d_prev;
        }
    }
}

ScalingState ScalingSolver::initial_state(const Matrix& psi_init) const {
    if (psi_init.rows() != hs_bands_ || psi_init.cols() != materials_)
        throw DimensionError("ScalingSolver: initial scaling factors have wrong shape");
    ScalingState s;
    s.scaling = psi_init;
    s.scaled_endmembers = psi_init.cwiseProduct(m_h_);
    s.dual = Matrix::Zero(hs_bands_, materials_);
    return s;
}

void ScalingSolver::update_scaled_endmembers(ScalingState& s) const {
    const Matrix c = rhs_data_ + s.scaling.cwiseProduct(m_h_) - s.dual;
    Matrix transformed = q_srf_.transpose() * c * q_abund_;
    transformed.array() /= denom_;
    s.scaled_endmembers = q_srf_ * transformed * q_abund_.transpose();
}

void ScalingSolver::update_scaling(ScalingState& s) const {
    const Matrix rhs_all =
        rho_ * m_h_.cwiseProduct(s.scaled_endmembers + s.dual).array() + lambda_1_;
    for (int p = 0; p < materials_; ++p) {
        Vector z(hs_bands_);
        z(0) = rhs_all(0, p);
        for (int l = 1; l < hs_bands_; ++l)
            z(l) = rhs_all(l, p) - tri_sub_(l - 1, p) * z(l - 1);
        for (int l = 0; l < hs_bands_; ++l) z(l) /= tri_diag_(l, p);
        for (int l = hs_bands_ - 2; l >= 0; --l) z(l) -= tri_sub_(l, p) * z(l + 1);
        s.scaling.col(p) = z;
    }
    s.scaling = s.scaling.cwiseMax(0.0);
}

void ScalingSolver::update_dual(ScalingState& s) const {
    s.dual += s.scaled_endmembers - s.scaling.cwiseProduct(m_h_);
}

double ScalingSolver::equation_residual(const ScalingState& s) const {
    const Matrix c = rhs_data_ + s.scaling.cwiseProduct(m_h_) - s.dual;
    const Matrix lhs = (srf_.transpose() * (srf_ * s.scaled_endmembers)) *
                           (abundance_ * abundance_.transpose()) / rho_ +
                       s.scaled_endmembers;
    return (lhs - c).norm() / std::max(c.norm(), kTiny);
}

Residuals ScalingSolver::iterate(ScalingState& s) const {
    const Matrix scaling_before = s.scaling;
    update_scaled_endmembers(s);
    update_scaling(s);
    update_dual(s);

    const Matrix constraint = s.scaling.cwiseProduct(m_h_);
    const double primal = (s.scaled_endmembers - constraint).norm();
    const double primal_scale =
        std::max(s.scaled_endmembers.norm(), constraint.norm());
    const double dual = rho_ * (s.scaling - scaling_before).cwiseProduct(m_h_).norm();
    const double dual_scale = rho_ * s.dual.cwiseProduct(m_h_).norm();

    Residuals res;
    res.primal = primal / std::max(primal_scale, kTiny);
    res.dual = dual / std::max(dual_scale, kTiny);
    return res;
}

Matrix ScalingSolver::solve(const Matrix& psi_init, double tol, int max_iters,
                            AdmmTrace* trace) const {
    ScalingState state = initial_state(psi_init);
    if (trace) {
        trace->iterations = 0;
        trace->primal_residual.clear();
        trace->dual_residual.clear();
    }
    for (int k = 0; k < max_iters; ++k) {
        const Residuals res = iterate(state);
        if (trace) {
            ++trace->iterations;
            trace->primal_residual.push_back(res.primal);
            trace->dual_residual.push_back(res.dual);
        }
        if (std::max(res.primal, res.dual) < tol) break;
    }
    if (!state.scaling.allFinite())
        throw NumericalError("ScalingSolver: iterate became non-finite");
    return state.scaling;
}

} // namespace admm

Matrix admm_solve_abundances_folded(const Matrix& y_h, const Matrix& y_m, const Matrix& m_h,
                                    const Matrix& m_m, const ObservationModel& model,
                                    int rows, int cols, const Matrix& a_init,
                                    double lambda_a, double rho, double tol, int max_iters,
                                    AdmmTrace* trace) {
    admm::AbundanceSolver solver(y_h, y_m, m_h, m_m, model, rows, cols, lambda_a, rho);
    return solver.solve(a_init, tol, max_iters, trace);
}

Matrix admm_solve_abundances(const Matrix& y_h, const Matrix& y_m, const Matrix& m_h,
                             const Matrix& psi, const ObservationModel& model, int rows,
                             int cols, const Matrix& a_init, double lambda_a, double rho,
                             double tol, int max_iters, AdmmTrace* trace) {
    if (psi.rows() != m_h.rows() || psi.cols() != m_h.cols())
        throw DimensionError("admm_solve_abundances: scaling factors have wrong shape");
    return admm_solve_abundances_folded(y_h, y_m, m_h, psi.cwiseProduct(m_h), model, rows,
                                        cols, a_init, lambda_a, rho, tol, max_iters, trace);
}

Matrix admm_solve_scaling(const Matrix& y_m, const Matrix& m_h, const Matrix& abundance,
                          const Matrix& srf, const Matrix& psi_init, double lambda_1,
                          double lambda_2, double rho, double tol, int max_iters,
                          AdmmTrace* trace) {
    admm::ScalingSolver solver(y_m, m_h, abundance, srf, lambda_1, lambda_2, rho);
    return solver.solve(psi_init, tol, max_iters, trace);
}

FusionResult fuvar(const ImageCube& y_h, const ImageCube& y_m, const EndmemberMatrix& m_h,
                   const ObservationModel& model, const FuvarConfig& config,
                   const FusionOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    model.validate();

    const int bands = m_h.bands();
    const int materials = m_h.materials();
    const int rows = y_m.rows();
    const int cols = y_m.cols();
    const int d = model.decimation_factor;
    if (y_h.bands() != bands)
        throw DimensionError("fuvar: HSI band count does not match the endmembers");
    if (model.srf.cols() != bands || y_m.bands() != model.srf.rows())
        throw DimensionError("fuvar: MSI band count does not match the SRF");
    if (y_h.rows() * d != rows || y_h.cols() * d != cols)
        throw DimensionError("fuvar: HSI grid is not the MSI grid decimated by " +
                             std::to_string(d));

    // Coarse-grid constrained least squares, upsampled to the fine grid.
    const Matrix a_coarse = fcls_abundances(y_h.band_matrix(), m_h.data());
    Matrix abundance = bicubic_upsample(a_coarse, y_h.rows(), y_h.cols(), d);
    Matrix scaling = Matrix::Ones(bands, materials);

    SolveReport report;
    report.initial_objective =
        objective_value(abundance, scaling, m_h.data(), y_h.band_matrix(),
                        y_m.band_matrix(), model, rows, cols, config.lambda_a,
                        config.lambda_1, config.lambda_2);

    double rel_a = std::numeric_limits<double>::infinity();
    double rel_psi = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < config.outer_max_iters; ++sweep) {
        AdmmTrace trace_a;
        const Matrix m_m = scaling.cwiseProduct(m_h.data());
        Matrix abundance_next = admm_solve_abundances_folded(
            y_h.band_matrix(), y_m.band_matrix(), m_h.data(), m_m, model, rows, cols,
            abundance, config.lambda_a, config.rho, config.admm_rel_tol,
            config.admm_max_iters, &trace_a);
        rel_a = (abundance_next - abundance).norm() / std::max(abundance.norm(), kTiny);
        abundance = std::move(abundance_next);
        report.inner_iters_a.push_back(trace_a.iterations);

        if (options.freeze_scaling) {
            rel_psi = 0.0;
            report.inner_iters_psi.push_back(0);
        } else {
            AdmmTrace trace_psi;
            Matrix scaling_next = admm_solve_scaling(
                y_m.band_matrix(), m_h.data(), abundance, model.srf, scaling,
                config.lambda_1, config.lambda_2, config.rho, config.admm_rel_tol,
                config.admm_max_iters, &trace_psi);
            rel_psi = (scaling_next - scaling).norm() / std::max(scaling.norm(), kTiny);
            scaling = std::move(scaling_next);
            report.inner_iters_psi.push_back(trace_psi.iterations);
        }

        const double objective =
            objective_value(abundance, scaling, m_h.data(), y_h.band_matrix(),
                            y_m.band_matrix(), model, rows, cols, config.lambda_a,
                            config.lambda_1, config.lambda_2);
        if (!std::isfinite(objective))
            throw NumericalError("fuvar: objective is not finite at sweep " +
                                 std::to_string(sweep + 1) + "; aborting");
        report.objective.push_back(objective);
        ++report.outer_iters;

        if (rel_a < config.outer_rel_tol && rel_psi < config.outer_rel_tol) break;
    }
    report.final_rel_change_a = rel_a;
    report.final_rel_change_psi = rel_psi;

    Matrix z_h = m_h.data() * abundance;
    Matrix z_m = scaling.cwiseProduct(m_h.data()) * abundance;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    return FusionResult{
        ImageCube(rows, cols, std::move(z_h)),
        ImageCube(rows, cols, std::move(z_m)),
        AbundanceMap(rows, cols, std::move(abundance)),
        ScalingFactors(std::move(scaling)),
        std::move(report),
    };
}

} // namespace fuvar
