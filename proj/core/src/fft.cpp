#include "fuvar/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <utility>

namespace fuvar::fft {
namespace {

// One FFTW plan pair per grid size, with persistent aligned buffers.
// Plans use FFTW_ESTIMATE so planning is deterministic run to run.
struct PlanEntry {
    int rows = 0;
    int cols = 0;
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    PlanEntry(int r, int c) : rows(r), cols(c) {
        const int nbins = c / 2 + 1;
        real = fftw_alloc_real(static_cast<std::size_t>(r) * c);
        spec = fftw_alloc_complex(static_cast<std::size_t>(r) * nbins);
        fwd = fftw_plan_dft_r2c_2d(r, c, real, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_2d(r, c, spec, real, FFTW_ESTIMATE);
    }

    ~PlanEntry() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
    }

    PlanEntry(const PlanEntry&) = delete;
    PlanEntry& operator=(const PlanEntry&) = delete;
};

PlanEntry& plan_for(int rows, int cols) {
    static std::map<std::pair<int, int>, std::unique_ptr<PlanEntry>> cache;
    auto key = std::make_pair(rows, cols);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<PlanEntry>(rows, cols)).first;
    }
    return *it->second;
}

// Full complex transforms share one in-place buffer per grid size.
struct FullPlanEntry {
    int rows = 0;
    int cols = 0;
    fftw_complex* buffer = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    FullPlanEntry(int r, int c) : rows(r), cols(c) {
        buffer = fftw_alloc_complex(static_cast<std::size_t>(r) * c);
        fwd = fftw_plan_dft_2d(r, c, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        inv = fftw_plan_dft_2d(r, c, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~FullPlanEntry() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(buffer);
    }

    FullPlanEntry(const FullPlanEntry&) = delete;
    FullPlanEntry& operator=(const FullPlanEntry&) = delete;
};

FullPlanEntry& full_plan_for(int rows, int cols) {
    static std::map<std::pair<int, int>, std::unique_ptr<FullPlanEntry>> cache;
    auto key = std::make_pair(rows, cols);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<FullPlanEntry>(rows, cols)).first;
    }
    return *it->second;
}

} // namespace

ComplexGrid forward(const RealGrid& grid) {
    const int rows = static_cast<int>(grid.rows());
    const int cols = static_cast<int>(grid.cols());
    const int nbins = cols / 2 + 1;
    PlanEntry& plan = plan_for(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            plan.real[static_cast<std::size_t>(i) * cols + j] = grid(i, j);
    fftw_execute(plan.fwd);
    ComplexGrid out(rows, nbins);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < nbins; ++k) {
            const fftw_complex& z = plan.spec[static_cast<std::size_t>(i) * nbins + k];
            out(i, k) = std::complex<double>(z[0], z[1]);
        }
    return out;
}

RealGrid inverse(const ComplexGrid& spectrum, int rows, int cols) {
    const int nbins = cols / 2 + 1;
    PlanEntry& plan = plan_for(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < nbins; ++k) {
            fftw_complex& z = plan.spec[static_cast<std::size_t>(i) * nbins + k];
            z[0] = spectrum(i, k).real();
            z[1] = spectrum(i, k).imag();
        }
    fftw_execute(plan.inv);
    RealGrid out(rows, cols);
    const double scale = 1.0 / (static_cast<double>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            out(i, j) = plan.real[static_cast<std::size_t>(i) * cols + j] * scale;
    return out;
}

ComplexGrid forward_full(const RealGrid& grid) {
    const int rows = static_cast<int>(grid.rows());
    const int cols = static_cast<int>(grid.cols());
    FullPlanEntry& plan = full_plan_for(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            fftw_complex& z = plan.buffer[static_cast<std::size_t>(i) * cols + j];
            z[0] = grid(i, j);
            z[1] = 0.0;
        }
    fftw_execute(plan.fwd);
    ComplexGrid out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            const fftw_complex& z = plan.buffer[static_cast<std::size_t>(i) * cols + j];
            out(i, j) = std::complex<double>(z[0], z[1]);
        }
    return out;
}

RealGrid inverse_full_real(const ComplexGrid& spectrum) {
    const int rows = static_cast<int>(spectrum.rows());
    const int cols = static_cast<int>(spectrum.cols());
    FullPlanEntry& plan = full_plan_for(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            fftw_complex& z = plan.buffer[static_cast<std::size_t>(i) * cols + j];
            z[0] = spectrum(i, j).real();
            z[1] = spectrum(i, j).imag();
        }
    fftw_execute(plan.inv);
    RealGrid out(rows, cols);
    const double scale = 1.0 / (static_cast<double>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            out(i, j) = plan.buffer[static_cast<std::size_t>(i) * cols + j][0] * scale;
    return out;
}

} // namespace fuvar::fft
