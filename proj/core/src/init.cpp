#include "fuvar/init.hpp"

#include "fuvar/errors.hpp"
#include "fuvar/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace fuvar {

VcaResult vca_extract(const Matrix& y, int p, std::uint64_t seed) {
    const int bands = static_cast<int>(y.rows());
    const Eigen::Index pixels = y.cols();
    if (p < 1) throw InvalidArgument("vca_extract: endmember count must be >= 1");
    if (pixels <= p)
        throw InvalidArgument("vca_extract: need more pixels than endmembers");
    if (p > bands) throw InvalidArgument("vca_extract: endmember count exceeds band count");
    if (!y.allFinite()) throw InvalidArgument("vca_extract: input must be finite");

    Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(p - 1) <= 1e-9 * sv(0))
        throw NumericalError("vca_extract: data rank below " + std::to_string(p) +
                             "; use a smaller endmember count");

    // Signal-subspace coordinates and projective normalization onto the
    // hyperplane x'u = 1, so the data simplex becomes a convex polytope
    // whose vertices are the purest pixels.
    const Matrix basis = svd.matrixU().leftCols(p);
    Matrix coords = basis.transpose() * y; // p x N
    const Vector center = coords.rowwise().mean();
    Matrix hull(p, pixels);
    for (Eigen::Index n = 0; n < pixels; ++n) {
        double scale = coords.col(n).dot(center);
        const double floor = 1e-12 * center.norm() * coords.col(n).norm() +
                             std::numeric_limits<double>::min();
        if (std::abs(scale) < floor) scale = (scale < 0.0) ? -floor : floor;
        hull.col(n) = coords.col(n) / scale;
    }

    Rng rng(seed);
    Matrix vertices = Matrix::Zero(p, p);
    vertices(p - 1, 0) = 1.0;
    std::vector<int> indices(p, 0);
    for (int i = 0; i < p; ++i) {
        Vector direction(p);
        for (int attempt = 0;; ++attempt) {
            Vector w(p);
            for (int k = 0; k < p; ++k) w(k) = rng.normal();
            if (p == 1) {
                direction = Vector::Ones(1);
                break;
            }
            // Component of w orthogonal to the vertices found so far.
            const Vector z = vertices.colPivHouseholderQr().solve(w);
            direction = w - vertices * z;
            const double norm = direction.norm();
            if (norm > 1e-12) {
                direction /= norm;
                break;
            }
            if (attempt > 32)
                throw NumericalError("vca_extract: could not draw an orthogonal direction");
        }
        Eigen::Index best = 0;
        double best_val = -1.0;
        for (Eigen::Index n = 0; n < pixels; ++n) {
            const double v = std::abs(direction.dot(hull.col(n)));
            if (v > best_val) {
                best_val = v;
                best = n;
            }
        }
        indices[i] = static_cast<int>(best);
        vertices.col(i) = hull.col(best);
    }

    Matrix selected(bands, p);
    for (int i = 0; i < p; ++i) selected.col(i) = y.col(indices[i]).cwiseMax(0.0);
    return VcaResult{EndmemberMatrix(std::move(selected)), std::move(indices), p};
}

namespace {

// Lawson-Hanson active-set nonnegative least squares.
Vector nnls(const Matrix& a, const Vector& b, int max_outer) {
    const int n = static_cast<int>(a.cols());
    Vector x = Vector::Zero(n);
    std::vector<bool> passive(n, false);
    const double tol = 1e-12 * (a.transpose() * b).cwiseAbs().maxCoeff() +
                       std::numeric_limits<double>::min();

    for (int outer = 0; outer < max_outer; ++outer) {
        const Vector w = a.transpose() * (b - a * x);
        int enter = -1;
        double best = tol;
        for (int j = 0; j < n; ++j)
            if (!passive[j] && w(j) > best) {
                best = w(j);
                enter = j;
            }
        if (enter < 0) break;
        passive[enter] = true;

        for (int inner = 0; inner < max_outer; ++inner) {
            std::vector<int> support;
            for (int j = 0; j < n; ++j)
                if (passive[j]) support.push_back(j);
            Matrix as(a.rows(), support.size());
            for (std::size_t k = 0; k < support.size(); ++k) as.col(k) = a.col(support[k]);
            const Vector z = as.colPivHouseholderQr().solve(b);

            bool feasible = true;
            double alpha = 1.0;
            int leave = -1;
            for (std::size_t k = 0; k < support.size(); ++k) {
                if (z(k) > 0.0) continue;
                feasible = false;
                const double xi = x(support[k]);
                const double step = xi / (xi - z(k));
                if (step < alpha) {
                    alpha = step;
                    leave = support[k];
                }
            }
            if (feasible) {
                x.setZero();
                for (std::size_t k = 0; k < support.size(); ++k) x(support[k]) = z(k);
                break;
            }
            for (std::size_t k = 0; k < support.size(); ++k) {
                const int j = support[k];
                x(j) += alpha * (z(k) - x(j));
            }
            if (leave >= 0) {
                x(leave) = 0.0;
                passive[leave] = false;
            }
            for (int j = 0; j < n; ++j)
                if (passive[j] && x(j) <= 0.0 && j != enter) {
                    x(j) = std::max(x(j), 0.0);
                }
        }
    }
    return x;
}

// Equality-constrained least squares on a support: minimizes
// ||y - M_S a||^2 subject to sum(a) = 1, via the KKT system.
void solve_kkt(const Matrix& m, const Vector& y, const std::vector<int>& support,
               Vector& a_support, double& multiplier) {
    const int k = static_cast<int>(support.size());
    Matrix ms(m.rows(), k);
    for (int i = 0; i < k; ++i) ms.col(i) = m.col(support[i]);
    Matrix kkt(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = ms.transpose() * ms;
    kkt.topRightCorner(k, 1).setOnes();
    kkt.bottomLeftCorner(1, k).setOnes();
    kkt(k, k) = 0.0;
    Vector rhs(k + 1);
    rhs.head(k) = ms.transpose() * y;
    rhs(k) = 1.0;
    const Vector sol = kkt.colPivHouseholderQr().solve(rhs);
    a_support = sol.head(k);
    multiplier = sol(k);
}

} // namespace

Matrix fcls_abundances(const Matrix& y, const Matrix& m) {
    const int bands = static_cast<int>(m.rows());
    const int materials = static_cast<int>(m.cols());
    if (y.rows() != bands)
        throw DimensionError("fcls_abundances: spectra and endmembers disagree on bands");
    if (materials >= bands)
        throw InvalidArgument("fcls_abundances: material count must be below band count");
    {
        Eigen::JacobiSVD<Matrix> svd(m);
        const Vector& sv = svd.singularValues();
        if (sv(0) <= 0.0 || sv(materials - 1) <= 1e-10 * sv(0))
            throw NumericalError("fcls_abundances: endmember matrix is rank deficient");
    }

    const double delta = 1e3;
    Matrix augmented(bands + 1, materials);
    augmented.topRows(bands) = m;
    augmented.bottomRows(1).setConstant(delta);

    const int max_active_set_iters = 4 * materials * materials + 40;
    Matrix abundances(materials, y.cols());

    for (Eigen::Index n = 0; n < y.cols(); ++n) {
        Vector b(bands + 1);
        b.head(bands) = y.col(n);
        b(bands) = delta;
        const Vector warm = nnls(augmented, b, max_active_set_iters);

        std::vector<int> support;
        for (int j = 0; j < materials; ++j)
            if (warm(j) > 0.0) support.push_back(j);
        if (support.empty()) {
            // Empty support cannot satisfy the sum constraint; fall back to
            // the best single endmember.
            int best = 0;
            double best_err = std::numeric_limits<double>::infinity();
            for (int j = 0; j < materials; ++j) {
                const double err = (y.col(n) - m.col(j)).squaredNorm();
                if (err < best_err) {
                    best_err = err;
                    best = j;
                }
            }
            support.push_back(best);
        }

        Vector a_support;
        double nu = 0.0;
        for (int iter = 0;; ++iter) {
            if (iter >= max_active_set_iters)
                throw NumericalError("fcls_abundances: active set did not converge");
            solve_kkt(m, y.col(n), support, a_support, nu);

            // Drop the most negative coefficient, if any.
            int drop = -1;
            double most_negative = -1e-12;
            for (std::size_t k = 0; k < support.size(); ++k)
                if (a_support(static_cast<Eigen::Index>(k)) < most_negative) {
                    most_negative = a_support(static_cast<Eigen::Index>(k));
                    drop = static_cast<int>(k);
                }
            if (drop >= 0 && support.size() > 1) {
                support.erase(support.begin() + drop);
                continue;
            }

            // Dual feasibility of the inactive set.
            Vector full = Vector::Zero(materials);
            for (std::size_t k = 0; k < support.size(); ++k)
                full(support[k]) = a_support(static_cast<Eigen::Index>(k));
            const Vector gradient = m.transpose() * (m * full - y.col(n));
            int add = -1;
            double worst = -1e-10 * (1.0 + std::abs(nu));
            for (int j = 0; j < materials; ++j) {
                if (full(j) > 0.0) continue;
                const double slack = gradient(j) + nu;
                if (slack < worst) {
                    worst = slack;
                    add = j;
                }
            }
            if (add >= 0) {
                support.push_back(add);
                std::sort(support.begin(), support.end());
                continue;
            }
            abundances.col(n) = full;
            break;
        }
    }
    return abundances;
}

Matrix bicubic_upsample(const Matrix& coarse, int coarse_rows, int coarse_cols, int factor) {
    if (factor < 1) throw InvalidArgument("bicubic_upsample: factor must be >= 1");
    if (coarse.cols() != static_cast<Eigen::Index>(coarse_rows) * coarse_cols)
        throw DimensionError("bicubic_upsample: abundance matrix does not match the grid");
    if (factor == 1) return coarse;

    const int fine_rows = coarse_rows * factor;
    const int fine_cols = coarse_cols * factor;
    const int materials = static_cast<int>(coarse.rows());

    // Catmull-Rom weights at offset t for the four nodes -1, 0, 1, 2.
    auto weights = [](double t, double w[4]) {
        const double t2 = t * t, t3 = t2 * t;
        w[0] = -0.5 * t3 + t2 - 0.5 * t;
        w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
        w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
        w[3] = 0.5 * t3 - 0.5 * t2;
    };

    std::vector<int> base_r(fine_rows), base_c(fine_cols);
    std::vector<std::array<double, 4>> wr(fine_rows), wc(fine_cols);
    for (int i = 0; i < fine_rows; ++i) {
        base_r[i] = i / factor;
        weights(static_cast<double>(i % factor) / factor, wr[i].data());
    }
    for (int j = 0; j < fine_cols; ++j) {
        base_c[j] = j / factor;
        weights(static_cast<double>(j % factor) / factor, wc[j].data());
    }
    auto clamp_r = [&](int r) { return std::clamp(r, 0, coarse_rows - 1); };
    auto clamp_c = [&](int c) { return std::clamp(c, 0, coarse_cols - 1); };

    Matrix fine(materials, static_cast<Eigen::Index>(fine_rows) * fine_cols);
    for (int p = 0; p < materials; ++p) {
        for (int i = 0; i < fine_rows; ++i)
            for (int j = 0; j < fine_cols; ++j) {
                double acc = 0.0;
                for (int dr = -1; dr <= 2; ++dr) {
                    const int rr = clamp_r(base_r[i] + dr);
                    double row_acc = 0.0;
                    for (int dc = -1; dc <= 2; ++dc) {
                        const int cc = clamp_c(base_c[j] + dc);
                        row_acc += wc[j][dc + 1] *
                                   coarse(p, pixel_index(rr, cc, coarse_cols));
                    }
                    acc += wr[i][dr + 1] * row_acc;
                }
                fine(p, pixel_index(i, j, fine_cols)) = std::max(acc, 0.0);
            }
    }
    return fine;
}

} // namespace fuvar
