#include "fuvar/synth.hpp"

#include "fuvar/errors.hpp"
#include "fuvar/fft.hpp"
#include "fuvar/operators.hpp"
#include "fuvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fuvar {
namespace {

// Seed stream tags, one per generated artifact.
enum : std::uint64_t {
    kTagAbundances = 1,
    kTagEndmembers = 2,
    kTagScaling = 3,
    kTagNoiseHs = 4,
    kTagNoiseMs = 5,
};

double column_angle(const Vector& a, const Vector& b) {
    const double c = a.dot(b) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

} // namespace

void SceneSpec::validate() const {
    if (rows < 2 || cols < 2) throw InvalidArgument("SceneSpec: grid must be at least 2x2");
    if (endmembers < 2) throw InvalidArgument("SceneSpec: need at least 2 endmembers");
    if (endmembers > 8) throw InvalidArgument("SceneSpec: endmember generator supports up to 8");
    if (bands < 2) throw InvalidArgument("SceneSpec: need at least 2 bands");
    if (msi_bands < 1 || msi_bands > bands)
        throw InvalidArgument("SceneSpec: MS band count must lie in [1, bands]");
    if (decimation < 1) throw InvalidArgument("SceneSpec: decimation must be >= 1");
    if (rows % decimation != 0 || cols % decimation != 0)
        throw InvalidArgument("SceneSpec: grid dimensions must be divisible by the decimation");
    if (psi_breakpoints < 2) throw InvalidArgument("SceneSpec: need at least 2 breakpoints");
    if (psi_breakpoints > bands)
        throw InvalidArgument("SceneSpec: more breakpoints than bands");
    if (psi_amplitude < 0.0 || psi_amplitude >= 1.0)
        throw InvalidArgument("SceneSpec: psi amplitude must lie in [0, 1) to keep positivity");
    if (grf_smoothness < 0.0) throw InvalidArgument("SceneSpec: smoothness must be nonnegative");
}

AbundanceMap gen_abundances_grf(const SceneSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.rng_seed, kTagAbundances));
    const int R = spec.rows, C = spec.cols, P = spec.endmembers;
    const int nbins = C / 2 + 1;

    std::vector<Matrix> fields;
    fields.reserve(P);
    for (int p = 0; p < P; ++p) {
        Matrix white(R, C);
        for (int i = 0; i < R; ++i)
            for (int j = 0; j < C; ++j) white(i, j) = rng.normal();

        fft::ComplexGrid spec_w = fft::forward(white);
        for (int i = 0; i < R; ++i) {
            const double ki = (i <= R / 2) ? i : i - R;
            for (int k = 0; k < nbins; ++k) {
                const double f2 = ki * ki + static_cast<double>(k) * k;
                spec_w(i, k) *= std::pow(1.0 + f2, -spec.grf_smoothness / 2.0);
            }
        }
        Matrix field = fft::inverse(spec_w, R, C);
        const double mean = field.mean();
        field.array() -= mean;
        const double sd = std::sqrt(field.squaredNorm() / field.size());
        if (sd > 0.0) field *= spec.grf_gain / sd;
        fields.push_back(std::move(field));
    }

    Matrix abundances(P, static_cast<Eigen::Index>(R) * C);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            const Eigen::Index n = pixel_index(i, j, C);
            double top = fields[0](i, j);
            for (int p = 1; p < P; ++p) top = std::max(top, fields[p](i, j));
            double total = 0.0;
            for (int p = 0; p < P; ++p) {
                const double e = std::exp(fields[p](i, j) - top);
                abundances(p, n) = e;
                total += e;
            }
            abundances.col(n) /= total;
        }
    return AbundanceMap(R, C, std::move(abundances));
}

EndmemberMatrix gen_endmembers(const SceneSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.rng_seed, kTagEndmembers));
    const int L = spec.bands, P = spec.endmembers;
    const double min_angle = 15.0 * std::numbers::pi / 180.0;

    for (int attempt = 0; attempt < 100; ++attempt) {
        Matrix m(L, P);
        for (int p = 0; p < P; ++p) {
            const double baseline = rng.uniform(0.05, 0.3);
            const int bumps = 3 + static_cast<int>(rng.uniform_index(3));
            Vector col = Vector::Constant(L, baseline);
            for (int b = 0; b < bumps; ++b) {
                const double center = rng.uniform(0.0, L - 1.0);
                const double width = rng.uniform(L / 30.0, L / 8.0);
                const double amp = rng.uniform(0.2, 1.0);
                for (int l = 0; l < L; ++l) {
                    const double t = (l - center) / width;
                    col(l) += amp * std::exp(-0.5 * t * t);
                }
            }
            m.col(p) = col;
        }
        bool separated = true;
        for (int p = 0; p < P && separated; ++p)
            for (int q = p + 1; q < P && separated; ++q)
                if (column_angle(m.col(p), m.col(q)) < min_angle) separated = false;
        if (separated) return EndmemberMatrix(std::move(m));
    }
    throw NumericalError("gen_endmembers: could not reach the 15-degree mutual angle "
                         "after 100 redraws");
}

ScalingFactors gen_scaling_piecewise(const SceneSpec& spec) {
    spec.validate();
    Rng rng(derive_seed(spec.rng_seed, kTagScaling));
    const int L = spec.bands, P = spec.endmembers, K = spec.psi_breakpoints;

    std::vector<int> knots(K);
    for (int j = 0; j < K; ++j)
        knots[j] = static_cast<int>(std::llround(static_cast<double>(j) * (L - 1) / (K - 1)));

    Matrix psi(L, P);
    for (int p = 0; p < P; ++p) {
        std::vector<double> values(K);
        for (int j = 0; j < K; ++j)
            values[j] = rng.uniform(1.0 - spec.psi_amplitude, 1.0 + spec.psi_amplitude);
        for (int j = 0; j + 1 < K; ++j) {
            const int l0 = knots[j], l1 = knots[j + 1];
            for (int l = l0; l <= l1; ++l) {
                const double t = (l1 == l0) ? 0.0
                                            : static_cast<double>(l - l0) / (l1 - l0);
                psi(l, p) = (1.0 - t) * values[j] + t * values[j + 1];
            }
        }
    }
    return ScalingFactors(std::move(psi));
}

Matrix gen_srf_uniform(int bands, int msi_bands) {
    if (msi_bands < 1 || msi_bands > bands)
        throw InvalidArgument("gen_srf_uniform: MS band count must lie in [1, bands]");
    Matrix srf = Matrix::Zero(msi_bands, bands);
    const int base = bands / msi_bands;
    const int remainder = bands % msi_bands;
    int start = 0;
    for (int r = 0; r < msi_bands; ++r) {
        const int size = base + (r < remainder ? 1 : 0);
        const double w = 1.0 / size;
        double partial = 0.0;
        for (int j = 0; j < size - 1; ++j) {
            srf(r, start + j) = w;
            partial += w;
        }
        // Last group entry balances the running sum so each row adds to
        // exactly 1.0 under left-to-right summation.
        srf(r, start + size - 1) = 1.0 - partial;
        start += size;
    }
    return srf;
}

Scene build_scene(const SceneSpec& spec) {
    spec.validate();

    AbundanceMap abundances = gen_abundances_grf(spec);
    EndmemberMatrix endmembers = gen_endmembers(spec);
    ScalingFactors scaling = gen_scaling_piecewise(spec);

    ObservationModel model;
    model.blur_kernel = gaussian_blur_kernel(1.0, 4);
    model.decimation_factor = spec.decimation;
    model.decimation_phase = 0;
    model.srf = gen_srf_uniform(spec.bands, spec.msi_bands);
    model.snr_hs_db = spec.snr_hs_db;
    model.snr_ms_db = spec.snr_ms_db;
    model.validate();

    const Matrix& a = abundances.data();
    const Matrix& mh = endmembers.data();
    const Matrix mm = scaling.data().cwiseProduct(mh);

    Matrix zh = mh * a;
    Matrix zm = mm * a;

    const BlurOperator blur(model.blur_kernel, spec.rows, spec.cols);
    const int coarse_rows = spec.rows / spec.decimation;
    const int coarse_cols = spec.cols / spec.decimation;
    Matrix yh_clean(spec.bands, static_cast<Eigen::Index>(coarse_rows) * coarse_cols);
    for (int b = 0; b < spec.bands; ++b) {
        const Matrix grid = vec_to_grid(zh.row(b).transpose(), spec.rows, spec.cols);
        yh_clean.row(b) =
            grid_to_vec(decimate(blur.apply(grid), spec.decimation, model.decimation_phase))
                .transpose();
    }
    Matrix ym_clean = srf_apply(model.srf, zm);

    Rng rng_hs(derive_seed(spec.rng_seed, kTagNoiseHs));
    Rng rng_ms(derive_seed(spec.rng_seed, kTagNoiseMs));
    Matrix yh = add_noise_snr(yh_clean, spec.snr_hs_db, rng_hs);
    Matrix ym = add_noise_snr(ym_clean, spec.snr_ms_db, rng_ms);

    return Scene{
        ImageCube(spec.rows, spec.cols, std::move(zh)),
        ImageCube(spec.rows, spec.cols, std::move(zm)),
        ImageCube(coarse_rows, coarse_cols, std::move(yh)),
        ImageCube(spec.rows, spec.cols, std::move(ym)),
        ImageCube(coarse_rows, coarse_cols, std::move(yh_clean)),
        ImageCube(spec.rows, spec.cols, std::move(ym_clean)),
        std::move(abundances),
        std::move(scaling),
        std::move(endmembers),
        std::move(model),
    };
}

} // namespace fuvar
