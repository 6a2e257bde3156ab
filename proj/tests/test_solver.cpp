#include <doctest.h>

#include "support/oracles.hpp"
#include "support/tiny.hpp"

#include <fuvar/errors.hpp>
#include <fuvar/rng.hpp>
#include <fuvar/solver.hpp>

#include <cmath>
#include <limits>

using namespace fuvar;

namespace {

// Identity observation model: 1x1 kernel, no decimation, identity SRF.
ObservationModel identity_model(int bands) {
    ObservationModel model;
    model.blur_kernel = Matrix::Ones(1, 1);
    model.decimation_factor = 1;
    model.decimation_phase = 0;
    model.srf = Matrix::Identity(bands, bands);
    model.snr_hs_db = std::numeric_limits<double>::infinity();
    model.snr_ms_db = std::numeric_limits<double>::infinity();
    return model;
}

} // namespace

TEST_CASE("objective value matches a from-scratch evaluation on a tiny instance") {
    const tiny::Problem p = tiny::make(1, 20.0);
    Rng rng(2);
    Matrix a(p.materials, p.rows * p.cols);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a(i / a.cols(), i % a.cols()) = rng.uniform(0.0, 1.0);
    Matrix psi(p.bands, p.materials);
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        psi(i / psi.cols(), i % psi.cols()) = rng.uniform(0.5, 1.5);

    const double lambda_a = 0.03, lambda_1 = 0.2, lambda_2 = 3.0;
    const double via_lib =
        objective_value(a, psi, p.m_h, p.y_h, p.y_m, p.model, p.rows, p.cols, lambda_a,
                        lambda_1, lambda_2);

    // Scalar re-evaluation through the dense operator matrices.
    const Matrix w =
        oracles::dense_observation_rowform(p.model.blur_kernel, p.rows, p.cols, 2, 0);
    const Matrix g = p.model.srf * psi.cwiseProduct(p.m_h);
    const Matrix gh = oracles::dense_grad_h_matrix(p.rows, p.cols);
    const Matrix gv = oracles::dense_grad_v_matrix(p.rows, p.cols);
    Matrix grad_h_stack(p.materials, a.cols()), grad_v_stack(p.materials, a.cols());
    for (int q = 0; q < p.materials; ++q) {
        grad_h_stack.row(q) = (gh * a.row(q).transpose()).transpose();
        grad_v_stack.row(q) = (gv * a.row(q).transpose()).transpose();
    }
    const Matrix h = oracles::dense_spectral_diff_matrix(p.bands);
    const double expected = 0.5 * (p.y_h - p.m_h * a * w).squaredNorm() +
                            0.5 * (p.y_m - g * a).squaredNorm() +
                            lambda_a * (oracles::l21(grad_h_stack) +
                                        oracles::l21(grad_v_stack)) +
                            0.5 * lambda_1 * (psi.array() - 1.0).matrix().squaredNorm() +
                            0.5 * lambda_2 * (h * psi).squaredNorm();
    CHECK(via_lib == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("objective terms vanish in the degenerate configurations") {
    const tiny::Problem p = tiny::make(3, std::numeric_limits<double>::infinity());
    // Constant abundances and unit scaling: all regularizers are zero.
    const Matrix a = Matrix::Constant(p.materials, p.rows * p.cols, 0.5);
    const Matrix ones = Matrix::Ones(p.bands, p.materials);
    const double with_reg = objective_value(a, ones, p.m_h, p.y_h, p.y_m, p.model, p.rows,
                                            p.cols, 5.0, 7.0, 9.0);
    const double without_reg = objective_value(a, ones, p.m_h, p.y_h, p.y_m, p.model,
                                               p.rows, p.cols, 0.0, 0.0, 0.0);
    CHECK(with_reg == doctest::Approx(without_reg).epsilon(1e-14));

    // Noiseless data generated by (a_true, psi): the data terms vanish.
    const double at_truth = objective_value(p.a_true, p.psi, p.m_h, p.y_h, p.y_m, p.model,
                                            p.rows, p.cols, 0.0, 2.0, 3.0);
    const Matrix h = oracles::dense_spectral_diff_matrix(p.bands);
    const double reg_only = 1.0 * (p.psi.array() - 1.0).matrix().squaredNorm() +
                            1.5 * (h * p.psi).squaredNorm();
    CHECK(at_truth == doctest::Approx(reg_only).epsilon(1e-8));

    CHECK_THROWS_AS(objective_value(-a, ones, p.m_h, p.y_h, p.y_m, p.model, p.rows, p.cols,
                                    0.0, 0.0, 0.0),
                    InvalidArgument);
}

TEST_CASE("abundance admm matches the projected-gradient oracle without blur") {
    Rng rng(4);
    const int bands = 6, materials = 2, rows = 4, cols = 4;
    const Eigen::Index pixels = rows * cols;
    Matrix m_h(bands, materials);
    for (Eigen::Index i = 0; i < m_h.size(); ++i)
        m_h(i / materials, i % materials) = rng.uniform(0.2, 1.0);
    Matrix y_h(bands, pixels), y_m(bands, pixels);
    for (Eigen::Index i = 0; i < y_h.size(); ++i) {
        y_h(i / pixels, i % pixels) = rng.uniform(0.0, 1.0);
        y_m(i / pixels, i % pixels) = rng.uniform(0.0, 1.0);
    }
    const ObservationModel model = identity_model(bands);
    const Matrix a0 = Matrix::Constant(materials, pixels, 0.5);

    const Matrix a_admm = admm_solve_abundances_folded(
        y_h, y_m, m_h, m_h, model, rows, cols, a0, 0.0, 1.0, 1e-9, 4000);

    const Matrix w = Matrix::Identity(pixels, pixels);
    const Matrix a_oracle =
        oracles::projected_gradient_abundance(y_h, y_m, m_h, m_h, w, a0, 100000);

    const double f_admm = oracles::abundance_objective(y_h, y_m, m_h, m_h, w, a_admm);
    const double f_oracle = oracles::abundance_objective(y_h, y_m, m_h, m_h, w, a_oracle);
    CHECK(std::abs(f_admm - f_oracle) <= 1e-6 * std::abs(f_oracle));

    // Where the constraint is inactive the normal-equation solution applies.
    const Matrix normal = 2.0 * m_h.transpose() * m_h;
    const Matrix rhs = m_h.transpose() * (y_h + y_m);
    const Matrix unconstrained = normal.ldlt().solve(rhs);
    for (Eigen::Index n = 0; n < pixels; ++n)
        if ((a_admm.col(n).array() > 1e-3).all())
            CHECK((a_admm.col(n) - unconstrained.col(n)).norm() <=
                  1e-5 * (1.0 + unconstrained.col(n).norm()));
}

TEST_CASE("abundance admm recovers a planted interior solution") {
    const tiny::Problem p = tiny::make(5, std::numeric_limits<double>::infinity());
    const Matrix a0 = Matrix::Constant(p.materials, p.rows * p.cols, 0.5);
    const Matrix recovered = admm_solve_abundances_folded(
        p.y_h, p.y_m, p.m_h, p.m_m, p.model, p.rows, p.cols, a0, 0.0, 1.0, 1e-10, 5000);
    CHECK((recovered - p.a_true).norm() <= 1e-4 * p.a_true.norm());
}

TEST_CASE("converged abundance iterates are a fixed point of the sweep") {
    const tiny::Problem p = tiny::make(6, 20.0);
    admm::AbundanceSolver solver(p.y_h, p.y_m, p.m_h, p.m_m, p.model, p.rows, p.cols, 0.0,
                                 1.0);
    admm::AbundanceState state =
        solver.initial_state(Matrix::Constant(p.materials, p.rows * p.cols, 0.5));
    for (int k = 0; k < 4000; ++k) {
        const auto res = solver.iterate(state);
        if (std::max(res.primal, res.dual) < 1e-11) break;
    }
    const Matrix w =
        oracles::dense_observation_rowform(p.model.blur_kernel, p.rows, p.cols, 2, 0);
    const Matrix g = p.model.srf * p.m_m;
    const double before =
        oracles::abundance_objective(p.y_h, p.y_m, p.m_h, g, w, state.positive_copy);
    solver.iterate(state);
    const double after =
        oracles::abundance_objective(p.y_h, p.y_m, p.m_h, g, w, state.positive_copy);
    CHECK(std::abs(after - before) <= 1e-8 * std::abs(before));
}

TEST_CASE("scaling admm returns ones when the unit prior dominates") {
    const tiny::Problem p = tiny::make(7, std::numeric_limits<double>::infinity());
    // Observations generated with unit scaling.
    const Matrix y_m = p.model.srf * p.m_h * p.a_true;
    const Matrix psi0 = Matrix::Constant(p.bands, p.materials, 1.3);
    const Matrix psi = admm_solve_scaling(y_m, p.m_h, p.a_true, p.model.srf, psi0, 1e6,
                                          0.0, 1.0, 1e-10, 500);
    CHECK((psi.array() - 1.0).abs().maxCoeff() <= 1e-3);
}

TEST_CASE("scaling admm matches the projected-gradient oracle") {
    for (std::uint64_t seed : {8, 9, 10}) {
        const tiny::Problem p = tiny::make(seed, 20.0);
        const double lambda_1 = 0.05, lambda_2 = 2.0;
        const Matrix psi0 = Matrix::Ones(p.bands, p.materials);
        const Matrix psi = admm_solve_scaling(p.y_m, p.m_h, p.a_true, p.model.srf, psi0,
                                              lambda_1, lambda_2, 1.0, 1e-10, 2000);
        const Matrix oracle = oracles::projected_gradient_scaling(
            p.y_m, p.m_h, p.a_true, p.model.srf, lambda_1, lambda_2, psi0, 100000);
        const double f_admm = oracles::scaling_objective(p.y_m, p.m_h, p.a_true,
                                                         p.model.srf, lambda_1, lambda_2, psi);
        const double f_oracle = oracles::scaling_objective(
            p.y_m, p.m_h, p.a_true, p.model.srf, lambda_1, lambda_2, oracle);
        CHECK(std::abs(f_admm - f_oracle) <= 1e-6 * std::abs(f_oracle));
    }
}

TEST_CASE("full fusion descends, stays feasible, and reports consistently") {
    SceneSpec spec;
    spec.rows = 16;
    spec.cols = 16;
    spec.bands = 32;
    spec.msi_bands = 8;
    spec.decimation = 2;
    spec.endmembers = 3;
    spec.rng_seed = 33;
    const Scene scene = build_scene(spec);

    FuvarConfig config;
    config.endmembers = 3;
    config.outer_max_iters = 5;
    config.admm_max_iters = 40;

    const FusionResult result =
        fuvar::fuvar(scene.y_h, scene.y_m, scene.endmembers, scene.model, config);

    CHECK(result.report.outer_iters >= 1);
    CHECK(static_cast<int>(result.report.objective.size()) == result.report.outer_iters);
    CHECK(result.report.objective.back() <= result.report.initial_objective);
    double previous = result.report.initial_objective;
    for (const double value : result.report.objective) {
        CHECK(value <= previous * 1.005);
        previous = value;
    }
    CHECK((result.abundances.data().array() >= 0.0).all());
    CHECK((result.scaling.data().array() >= 0.0).all());
    CHECK(result.report.wall_seconds > 0.0);

    // Output cubes are the model images of the estimates.
    const Matrix z_h_expected = scene.endmembers.data() * result.abundances.data();
    CHECK((result.z_h.band_matrix() - z_h_expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fusion is deterministic and the ablation keeps unit scaling") {
    SceneSpec spec;
    spec.rows = 12;
    spec.cols = 12;
    spec.bands = 16;
    spec.msi_bands = 4;
    spec.decimation = 2;
    spec.rng_seed = 44;
    const Scene scene = build_scene(spec);

    FuvarConfig config;
    config.endmembers = 3;
    config.outer_max_iters = 3;
    config.admm_max_iters = 30;

    const FusionResult a = fuvar::fuvar(scene.y_h, scene.y_m, scene.endmembers, scene.model, config);
    const FusionResult b = fuvar::fuvar(scene.y_h, scene.y_m, scene.endmembers, scene.model, config);
    CHECK((a.z_h.band_matrix() - b.z_h.band_matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.scaling.data() - b.scaling.data()).cwiseAbs().maxCoeff() == 0.0);

    const FusionResult frozen = fuvar::fuvar(scene.y_h, scene.y_m, scene.endmembers, scene.model,
                                      config, FusionOptions{true});
    CHECK((frozen.scaling.data().array() == 1.0).all());
}

TEST_CASE("fusion validates input dimensions") {
    const tiny::Problem p = tiny::make(11);
    const ImageCube y_h(2, 2, p.y_h);
    const ImageCube y_m(4, 4, p.y_m);
    const EndmemberMatrix m_h(p.m_h);
    FuvarConfig config;
    config.endmembers = p.materials;

    ObservationModel bad = p.model;
    bad.decimation_factor = 4; // grids now disagree
    CHECK_THROWS_AS(fuvar::fuvar(y_h, y_m, m_h, bad, config), DimensionError);
}
