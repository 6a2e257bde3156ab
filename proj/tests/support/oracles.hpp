#pragma once

// Test-side oracles, built from first principles (index arithmetic and
// scalar loops) so they stay independent of the library's FFT and solver
// paths.

#include <fuvar/types.hpp>

#include <cmath>
#include <vector>

namespace oracles {

using fuvar::Matrix;
using fuvar::Vector;

inline Eigen::Index flat(int r, int c, int cols) {
    return static_cast<Eigen::Index>(r) * cols + c;
}

// Dense matrix of circular convolution with an odd-sized kernel, acting on
// row-major vectorized grids.
inline Matrix dense_blur_matrix(const Matrix& kernel, int rows, int cols) {
    const int kr = static_cast<int>(kernel.rows()) / 2;
    const int kc = static_cast<int>(kernel.cols()) / 2;
    const Eigen::Index m = static_cast<Eigen::Index>(rows) * cols;
    Matrix out = Matrix::Zero(m, m);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            for (int a = -kr; a <= kr; ++a)
                for (int b = -kc; b <= kc; ++b) {
                    const int si = ((i - a) % rows + rows) % rows;
                    const int sj = ((j - b) % cols + cols) % cols;
                    out(flat(i, j, cols), flat(si, sj, cols)) += kernel(a + kr, b + kc);
                }
    return out;
}

// Dense selection matrix of phase-aligned decimation by `factor`.
inline Matrix dense_decimate_matrix(int rows, int cols, int factor, int phase) {
    const int cr = rows / factor, cc = cols / factor;
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(cr) * cc,
                              static_cast<Eigen::Index>(rows) * cols);
    for (int i = 0; i < cr; ++i)
        for (int j = 0; j < cc; ++j)
            out(flat(i, j, cc), flat(phase + i * factor, phase + j * factor, cols)) = 1.0;
    return out;
}

// Dense circular horizontal first-difference operator on row-major grids.
inline Matrix dense_grad_h_matrix(int rows, int cols) {
    const Eigen::Index m = static_cast<Eigen::Index>(rows) * cols;
    Matrix out = Matrix::Zero(m, m);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            out(flat(i, j, cols), flat(i, (j + 1) % cols, cols)) += 1.0;
            out(flat(i, j, cols), flat(i, j, cols)) -= 1.0;
        }
    return out;
}

inline Matrix dense_grad_v_matrix(int rows, int cols) {
    const Eigen::Index m = static_cast<Eigen::Index>(rows) * cols;
    Matrix out = Matrix::Zero(m, m);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            out(flat(i, j, cols), flat((i + 1) % rows, j, cols)) += 1.0;
            out(flat(i, j, cols), flat(i, j, cols)) -= 1.0;
        }
    return out;
}

// Non-circular first-difference matrix over `bands` spectral samples.
inline Matrix dense_spectral_diff_matrix(int bands) {
    Matrix h = Matrix::Zero(bands - 1, bands);
    for (int i = 0; i + 1 < bands; ++i) {
        h(i, i) = -1.0;
        h(i, i + 1) = 1.0;
    }
    return h;
}

// Row-form observation matrix W (M x N) with Y_h = M_h * A * W, composed
// from the dense blur and decimation matrices.
inline Matrix dense_observation_rowform(const Matrix& kernel, int rows, int cols, int factor,
                                        int phase) {
    const Matrix c = dense_blur_matrix(kernel, rows, cols);
    const Matrix d = dense_decimate_matrix(rows, cols, factor, phase);
    return (d * c).transpose();
}

// Projected-gradient minimization of
//   0.5 ||Y_h - M_h A W||_F^2 + 0.5 ||G A - Y_m||_F^2  s.t. A >= 0
// where G = R (psi (.) M_h). Smooth problem (no gradient penalty), fixed
// step 1/L with L an upper bound on the quadratic's Lipschitz constant.
inline Matrix projected_gradient_abundance(const Matrix& y_h, const Matrix& y_m,
                                           const Matrix& m_h, const Matrix& g,
                                           const Matrix& w, Matrix a, int iterations) {
    const double lip = std::pow(m_h.operatorNorm() * w.operatorNorm(), 2) +
                       std::pow(g.operatorNorm(), 2);
    const double step = 1.0 / lip;
    for (int it = 0; it < iterations; ++it) {
        const Matrix grad = m_h.transpose() * (m_h * a * w - y_h) * w.transpose() +
                            g.transpose() * (g * a - y_m);
        a = (a - step * grad).cwiseMax(0.0);
    }
    return a;
}

inline double abundance_objective(const Matrix& y_h, const Matrix& y_m, const Matrix& m_h,
                                  const Matrix& g, const Matrix& w, const Matrix& a) {
    return 0.5 * (y_h - m_h * a * w).squaredNorm() + 0.5 * (y_m - g * a).squaredNorm();
}

// Projected-gradient minimization of the scaling-factor cost
//   0.5 ||Y_m - R (psi (.) M_h) A||^2 + (l1/2) ||psi - 1||^2
//   + (l2/2) ||H psi||^2   s.t. psi >= 0.
inline Matrix projected_gradient_scaling(const Matrix& y_m, const Matrix& m_h,
                                         const Matrix& a, const Matrix& r, double lambda_1,
                                         double lambda_2, Matrix psi, int iterations) {
    const int bands = static_cast<int>(m_h.rows());
    const Matrix h = dense_spectral_diff_matrix(bands);
    const Matrix hth = h.transpose() * h;
    const double lip = std::pow(r.operatorNorm() * a.operatorNorm(), 2) *
                           m_h.array().square().maxCoeff() +
                       lambda_1 + lambda_2 * 4.0;
    const double step = 1.0 / lip;
    for (int it = 0; it < iterations; ++it) {
        const Matrix residual = r * psi.cwiseProduct(m_h) * a - y_m;
        const Matrix grad = m_h.cwiseProduct(r.transpose() * residual * a.transpose()) +
                            lambda_1 * (psi.array() - 1.0).matrix() + lambda_2 * hth * psi;
        psi = (psi - step * grad).cwiseMax(0.0);
    }
    return psi;
}

inline double scaling_objective(const Matrix& y_m, const Matrix& m_h, const Matrix& a,
                                const Matrix& r, double lambda_1, double lambda_2,
                                const Matrix& psi) {
    const int bands = static_cast<int>(m_h.rows());
    const Matrix h = dense_spectral_diff_matrix(bands);
    return 0.5 * (y_m - r * psi.cwiseProduct(m_h) * a).squaredNorm() +
           0.5 * lambda_1 * (psi.array() - 1.0).matrix().squaredNorm() +
           0.5 * lambda_2 * (h * psi).squaredNorm();
}

// Group l21 norm over pixel columns.
inline double l21(const Matrix& x) {
    double sum = 0.0;
    for (Eigen::Index n = 0; n < x.cols(); ++n) sum += x.col(n).norm();
    return sum;
}

} // namespace oracles
