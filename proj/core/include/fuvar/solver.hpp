#pragma once

#include "fuvar/operators.hpp"
#include "fuvar/types.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace fuvar {

struct AdmmTrace {
    int iterations = 0;
    std::vector<double> primal_residual; // relative, one entry per iteration
    std::vector<double> dual_residual;
};

struct SolveReport {
    int outer_iters = 0;
    double initial_objective = 0.0;
    std::vector<double> objective; // value after each outer sweep
    double final_rel_change_a = 0.0;
    double final_rel_change_psi = 0.0;
    std::vector<int> inner_iters_a;
    std::vector<int> inner_iters_psi;
    double wall_seconds = 0.0;
};

// Full cost of the fusion problem at a feasible point (abundances and
// scaling factors nonnegative): the two data misfits, the group-sparse
// spatial gradient penalty, and the two scaling regularizers.
double objective_value(const Matrix& abundance, const Matrix& scaling, const Matrix& m_h,
                       const Matrix& y_h, const Matrix& y_m, const ObservationModel& model,
                       int rows, int cols, double lambda_a, double lambda_1, double lambda_2);

namespace admm {

struct Residuals {
    double primal = 0.0;
    double dual = 0.0;
};

// Splitting state of the abundance subproblem. One matrix per auxiliary
// variable, plus its scaled dual. `sharp_hs_coarse`, `grad_h_of_tv` and
// `grad_v_of_tv` are derived caches kept in sync by the updates that write
// sharp_hs and tv_copy.
struct AbundanceState {
    Matrix abundance;       // P x M, the coupling variable
    Matrix hs_fit;          // L x N, split tied to the observed HSI
    Matrix sharp_hs;        // L x M, high-resolution HSI surrogate
    Matrix tv_copy;         // P x M, abundance copy feeding the gradients
    Matrix grad_h_split;    // P x M
    Matrix grad_v_split;    // P x M
    Matrix positive_copy;   // P x M, nonnegativity split
    Matrix dual_hs_fit;     // L x N
    Matrix dual_sharp_hs;   // L x M
    Matrix dual_tv_copy;    // P x M
    Matrix dual_grad_h;     // P x M
    Matrix dual_grad_v;     // P x M
    Matrix dual_positive;   // P x M

    Matrix sharp_hs_coarse; // blur-decimated sharp_hs (L x N)
    Matrix grad_h_of_tv;    // per-material circular gradients of tv_copy
    Matrix grad_v_of_tv;
};

// ADMM for the abundance subproblem with the scaling factors held fixed.
// The multispectral mixing matrix enters only through the product
// m_m = psi (.) m_h, which the caller folds in.
class AbundanceSolver {
public:
    AbundanceSolver(const Matrix& y_h, const Matrix& y_m, const Matrix& m_h,
                    const Matrix& m_m, const ObservationModel& model, int rows, int cols,
                    double lambda_a, double rho);

    AbundanceState initial_state(const Matrix& a_init) const;
    Residuals iterate(AbundanceState& state) const;
    Matrix solve(const Matrix& a_init, double tol, int max_iters,
                 AdmmTrace* trace = nullptr) const;

    // Individual sub-updates in their canonical order, exposed so each
    // closed form can be verified in isolation.
    void update_abundance(AbundanceState& state) const;
    void update_hs_fit(AbundanceState& state) const;
    void update_sharp_hs(AbundanceState& state) const;
    void update_tv_copy(AbundanceState& state) const;
    void update_gradient_splits(AbundanceState& state) const;
    void update_positive_copy(AbundanceState& state) const;
    void update_duals(AbundanceState& state) const;

    // Row-wise observation helpers (each row of x is one band image).
    Matrix blur_decimate_rows(const Matrix& x) const;
    Matrix upsample_blur_adjoint_rows(const Matrix& y) const;
    // Per-material circular gradients of a P x M stack.
    Matrix grad_h_rows(const Matrix& a) const;
    Matrix grad_v_rows(const Matrix& a) const;

    const Matrix& mixed_ms() const noexcept { return r_m_m_; } // R (psi (.) m_h)
    double rho() const noexcept { return rho_; }
    double lambda_a() const noexcept { return lambda_a_; }

private:
    Matrix y_h_, y_m_, m_h_, m_m_;
    BlurOperator blur_;
    int rows_, cols_, factor_, phase_;
    int materials_, hs_bands_, pixels_, coarse_pixels_;
    double lambda_a_, rho_;
    Matrix r_m_m_;                  // L_m x P
    Matrix rhs_data_;               // (R m_m)' y_m, P x M
    Eigen::LLT<Matrix> normal_llt_; // factor of the per-pixel normal matrix
    fft::ComplexGrid grad_h_tf_, grad_v_tf_;
    Eigen::ArrayXXd tv_denominator_;
    // Blur-decimation normal solve: the observation Gram operator is
    // rank-one on each frequency-aliasing coset, so (I + F D D'F') inverts
    // in closed form per coset. obs_gain_ carries the blur transfer values
    // with the decimation-phase modulation folded in.
    fft::ComplexGrid obs_gain_;
    Eigen::ArrayXXd coset_denominator_; // (rows/d) x (cols/d)
};

// Splitting state of the scaling-factor subproblem.
struct ScalingState {
    Matrix scaled_endmembers; // L x P, split for psi (.) m_h
    Matrix scaling;           // L x P
    Matrix dual;              // L x P
};

// ADMM for the scaling-factor subproblem with the abundances held fixed.
class ScalingSolver {
public:
    ScalingSolver(const Matrix& y_m, const Matrix& m_h, const Matrix& abundance,
                  const Matrix& srf, double lambda_1, double lambda_2, double rho);

    ScalingState initial_state(const Matrix& psi_init) const;
    Residuals iterate(ScalingState& state) const;
    Matrix solve(const Matrix& psi_init, double tol, int max_iters,
                 AdmmTrace* trace = nullptr) const;

    // Linear-matrix-equation update of the scaled endmembers, solved by
    // simultaneous diagonalization of R'R and A A'.
    void update_scaled_endmembers(ScalingState& state) const;
    // Band-separable sparse SPD solve for the scaling factors, then
    // projection onto the nonnegative orthant.
    void update_scaling(ScalingState& state) const;
    void update_dual(ScalingState& state) const;

    // Relative residual of the linear matrix equation at the current state.
    double equation_residual(const ScalingState& state) const;

    double rho() const noexcept { return rho_; }

private:
    Matrix y_m_, m_h_, abundance_, srf_;
    double lambda_1_, lambda_2_, rho_;
    int hs_bands_, materials_;
    Matrix q_srf_, q_abund_;    // eigenvectors of R'R and A A'
    Vector ev_srf_, ev_abund_;  // their eigenvalues
    Eigen::ArrayXXd denom_;     // 1 + ev_srf_i * ev_abund_j / rho
    Matrix rhs_data_;           // (1/rho) R' y_m A'
    // Per-material LDL' factors of the tridiagonal-plus-diagonal systems.
    Matrix tri_diag_, tri_sub_;
};

} // namespace admm

// Abundance subproblem entry point (scaling factors fixed). Accepts the
// scaling matrix and folds it into the endmembers; the solver itself only
// ever sees the product.
Matrix admm_solve_abundances(const Matrix& y_h, const Matrix& y_m, const Matrix& m_h,
                             const Matrix& psi, const ObservationModel& model, int rows,
                             int cols, const Matrix& a_init, double lambda_a, double rho,
                             double tol, int max_iters, AdmmTrace* trace = nullptr);

// Same solve with the product m_m = psi (.) m_h already folded in.
Matrix admm_solve_abundances_folded(const Matrix& y_h, const Matrix& y_m, const Matrix& m_h,
                                    const Matrix& m_m, const ObservationModel& model,
                                    int rows, int cols, const Matrix& a_init,
                                    double lambda_a, double rho, double tol, int max_iters,
                                    AdmmTrace* trace = nullptr);

// Scaling-factor subproblem entry point (abundances fixed).
Matrix admm_solve_scaling(const Matrix& y_m, const Matrix& m_h, const Matrix& abundance,
                          const Matrix& srf, const Matrix& psi_init, double lambda_1,
                          double lambda_2, double rho, double tol, int max_iters,
                          AdmmTrace* trace = nullptr);

struct FusionOptions {
    bool freeze_scaling = false; // hold the scaling factors at ones (ablation)
};

struct FusionResult {
    ImageCube z_h;
    ImageCube z_m;
    AbundanceMap abundances;
    ScalingFactors scaling;
    SolveReport report;
};

// Alternating solver: abundances by ADMM, then scaling factors by ADMM,
// warm-started across sweeps, until both relative changes fall below the
// outer tolerance or the sweep cap is reached. Abundances are initialized
// by constrained least squares on the coarse grid followed by bicubic
// upsampling; scaling starts at ones.
FusionResult fuvar(const ImageCube& y_h, const ImageCube& y_m, const EndmemberMatrix& m_h,
                   const ObservationModel& model, const FuvarConfig& config,
                   const FusionOptions& options = {});

} // namespace fuvar
