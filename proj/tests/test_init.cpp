#include <doctest.h>

#include <fuvar/errors.hpp>
#include <fuvar/init.hpp>
#include <fuvar/operators.hpp>
#include <fuvar/rng.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace fuvar;

namespace {

// Spectra library for the pure-pixel experiments: well separated smooth
// columns.
Matrix test_endmembers(int bands, int materials, Rng& rng) {
    Matrix m(bands, materials);
    for (int p = 0; p < materials; ++p) {
        const double center = (p + 0.5) * bands / materials;
        for (int l = 0; l < bands; ++l) {
            const double t = (l - center) / (bands / 6.0);
            m(l, p) = 0.1 + std::exp(-0.5 * t * t) + 0.02 * rng.uniform();
        }
    }
    return m;
}

// Mixed pixels on the simplex plus one pure pixel per material.
Matrix simplex_abundances(int materials, int pixels, Rng& rng) {
    Matrix a(materials, pixels);
    for (int n = 0; n < pixels; ++n) {
        double total = 0.0;
        for (int p = 0; p < materials; ++p) {
            a(p, n) = rng.uniform(0.05, 1.0);
            total += a(p, n);
        }
        a.col(n) /= total;
    }
    for (int p = 0; p < materials; ++p) {
        a.col(p).setZero();
        a(p, p) = 1.0; // pure pixels up front
    }
    return a;
}

// Greedy column matching by spectral distance.
double match_distance(const Matrix& found, const Matrix& truth) {
    double worst = 0.0;
    for (int p = 0; p < truth.cols(); ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (int q = 0; q < found.cols(); ++q)
            best = std::min(best, (found.col(q) - truth.col(p)).norm());
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

TEST_CASE("vca recovers pure pixels from noiseless mixtures") {
    Rng rng(3);
    const int bands = 20, materials = 3, pixels = 100;
    const Matrix m = test_endmembers(bands, materials, rng);
    const Matrix a = simplex_abundances(materials, pixels, rng);
    const Matrix y = m * a;

    const VcaResult result = vca_extract(y, materials, 17);
    CHECK(result.projection_dim == materials);
    CHECK(match_distance(result.endmembers.data(), m) < 1e-8);

    std::vector<int> sorted = result.selected_pixel_indices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("vca is deterministic for a fixed seed") {
    Rng rng(5);
    const Matrix m = test_endmembers(16, 3, rng);
    const Matrix a = simplex_abundances(3, 60, rng);
    const Matrix y = m * a;
    const VcaResult r1 = vca_extract(y, 3, 42);
    const VcaResult r2 = vca_extract(y, 3, 42);
    CHECK(r1.selected_pixel_indices == r2.selected_pixel_indices);
}

TEST_CASE("vca recovery is invariant under pixel permutation") {
    Rng rng(7);
    const Matrix m = test_endmembers(18, 3, rng);
    const Matrix a = simplex_abundances(3, 80, rng);
    const Matrix y = m * a;

    Matrix permuted(y.rows(), y.cols());
    std::vector<int> order(static_cast<std::size_t>(y.cols()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
    for (Eigen::Index n = 0; n < y.cols(); ++n)
        permuted.col(n) = y.col(order[static_cast<std::size_t>(n)]);

    const Matrix found = vca_extract(y, 3, 9).endmembers.data();
    const Matrix found_permuted = vca_extract(permuted, 3, 9).endmembers.data();
    CHECK(match_distance(found_permuted, found) < 1e-8);
}

TEST_CASE("vca rejects rank-deficient data") {
    Rng rng(9);
    const Matrix m = test_endmembers(12, 2, rng);
    Matrix a(2, 50);
    for (int n = 0; n < 50; ++n) {
        a(0, n) = rng.uniform();
        a(1, n) = 1.0 - a(0, n);
    }
    const Matrix y = m * a; // rank 2
    CHECK_THROWS_AS(vca_extract(y, 3, 1), NumericalError);
}

TEST_CASE("fcls solves pure and exact-mixture pixels") {
    Rng rng(11);
    const Matrix m = test_endmembers(20, 4, rng);

    Matrix y(20, 2);
    y.col(0) = m.col(2);
    y.col(1) = 0.5 * m.col(0) + 0.5 * m.col(1);
    const Matrix a = fcls_abundances(y, m);

    CHECK(a(2, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(a.col(0).sum() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(a(0, 1) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(a(1, 1) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(std::abs(a(2, 1)) <= 1e-8);
    CHECK(std::abs(a(3, 1)) <= 1e-8);
}

TEST_CASE("fcls matches exhaustive support enumeration on random problems") {
    Rng rng(13);
    const int bands = 12, materials = 5;
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m(bands, materials);
        for (int l = 0; l < bands; ++l)
            for (int p = 0; p < materials; ++p) m(l, p) = rng.uniform(0.05, 1.0);
        Vector y(bands);
        for (int l = 0; l < bands; ++l) y(l) = rng.uniform(0.0, 1.0);

        const Matrix a = fcls_abundances(y, m);
        const double objective = (y - m * a.col(0)).squaredNorm();

        // Exhaustive oracle over all supports: equality-constrained least
        // squares per support, keep the best feasible candidate.
        double best = std::numeric_limits<double>::infinity();
        for (int mask = 1; mask < (1 << materials); ++mask) {
            std::vector<int> support;
            for (int p = 0; p < materials; ++p)
                if (mask & (1 << p)) support.push_back(p);
            const int k = static_cast<int>(support.size());
            Matrix ms(bands, k);
            for (int i = 0; i < k; ++i) ms.col(i) = m.col(support[i]);
            Matrix kkt = Matrix::Zero(k + 1, k + 1);
            kkt.topLeftCorner(k, k) = ms.transpose() * ms;
            kkt.topRightCorner(k, 1).setOnes();
            kkt.bottomLeftCorner(1, k).setOnes();
            Vector rhs(k + 1);
            rhs.head(k) = ms.transpose() * y;
            rhs(k) = 1.0;
            const Vector sol = kkt.fullPivLu().solve(rhs);
            if ((sol.head(k).array() < -1e-12).any()) continue;
            best = std::min(best, (y - ms * sol.head(k)).squaredNorm());
        }
        CHECK(objective <= best + 1e-8);
        CHECK(objective >= best - 1e-8);

        // Constraint invariants and first-order condition.
        CHECK((a.col(0).array() >= -1e-12).all());
        CHECK(std::abs(a.col(0).sum() - 1.0) <= 1e-8);
        const Vector gradient = m.transpose() * (m * a.col(0) - y);
        double nu = 0.0;
        int support_count = 0;
        for (int p = 0; p < materials; ++p)
            if (a(p, 0) > 1e-10) {
                nu -= gradient(p);
                ++support_count;
            }
        nu /= std::max(support_count, 1);
        for (int p = 0; p < materials; ++p) {
            if (a(p, 0) > 1e-10)
                CHECK(std::abs(gradient(p) + nu) <= 1e-8 * (1.0 + gradient.norm()));
            else
                CHECK(gradient(p) + nu >= -1e-8 * (1.0 + gradient.norm()));
        }
    }
}

TEST_CASE("fcls rejects rank-deficient endmembers") {
    Matrix m(6, 3);
    m.col(0).setConstant(1.0);
    m.col(1).setConstant(2.0);
    m.col(2).setLinSpaced(6, 0.1, 0.6);
    Vector y = Vector::Ones(6);
    CHECK_THROWS_AS(fcls_abundances(y, m), NumericalError);
}

TEST_CASE("bicubic upsampling: identity, constants, linear ramps") {
    Rng rng(15);
    Matrix coarse(2, 12);
    for (int n = 0; n < 12; ++n) {
        coarse(0, n) = rng.uniform();
        coarse(1, n) = rng.uniform();
    }
    CHECK((bicubic_upsample(coarse, 3, 4, 1) - coarse).cwiseAbs().maxCoeff() == 0.0);

    const Matrix flat = Matrix::Constant(1, 16, 0.42);
    const Matrix fine_flat = bicubic_upsample(flat, 4, 4, 3);
    CHECK((fine_flat.array() - 0.42).abs().maxCoeff() < 1e-12);

    // Linear ramp: exact away from the replicated edges.
    const int cr = 6, cc = 8, d = 4;
    Matrix ramp(1, cr * cc);
    for (int i = 0; i < cr; ++i)
        for (int j = 0; j < cc; ++j) ramp(0, i * cc + j) = 0.3 * i + 0.2 * j + 0.5;
    const Matrix fine = bicubic_upsample(ramp, cr, cc, d);
    for (int i = d; i < (cr - 2) * d; ++i)
        for (int j = d; j < (cc - 2) * d; ++j) {
            const double expected =
                0.3 * (static_cast<double>(i) / d) + 0.2 * (static_cast<double>(j) / d) + 0.5;
            CHECK(std::abs(fine(0, i * cc * d + j) - expected) < 1e-10);
        }
}

TEST_CASE("upsampling then decimating returns the coarse samples") {
    Rng rng(17);
    const int cr = 5, cc = 6, d = 3;
    Matrix coarse(3, cr * cc);
    for (Eigen::Index idx = 0; idx < coarse.size(); ++idx)
        coarse(idx / coarse.cols(), idx % coarse.cols()) = rng.uniform();
    const Matrix fine = bicubic_upsample(coarse, cr, cc, d);
    for (int p = 0; p < 3; ++p) {
        const Matrix grid = vec_to_grid(fine.row(p).transpose(), cr * d, cc * d);
        const Matrix back = decimate(grid, d, 0);
        const Matrix expected = vec_to_grid(coarse.row(p).transpose(), cr, cc);
        CHECK((back - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
}
