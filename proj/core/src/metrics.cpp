#include "fuvar/metrics.hpp"

#include "fuvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fuvar {
namespace {

void check_pair(const ImageCube& a, const ImageCube& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.bands() != b.bands())
        throw DimensionError("metrics: cube dimensions disagree");
    if (!a.band_matrix().allFinite() || !b.band_matrix().allFinite())
        throw InvalidArgument("metrics: non-finite input");
}

} // namespace

double psnr(const ImageCube& reference, const ImageCube& estimate,
            const MetricOptions& options) {
    check_pair(reference, estimate);
    const Matrix& z = reference.band_matrix();
    const Matrix& zhat = estimate.band_matrix();
    const double pixels = static_cast<double>(reference.pixels());

    double sum_db = 0.0;
    for (int b = 0; b < reference.bands(); ++b) {
        const double err = (z.row(b) - zhat.row(b)).squaredNorm();
        if (err == 0.0) return std::numeric_limits<double>::infinity();
        const double peak = z.row(b).maxCoeff();
        const double numerator =
            options.psnr_paper_literal ? pixels * peak : pixels * peak * peak;
        if (numerator <= 0.0)
            throw InvalidArgument("psnr: reference band " + std::to_string(b) +
                                  " has nonpositive peak");
        sum_db += 10.0 * std::log10(numerator / err);
    }
    return sum_db / reference.bands();
}

double sam(const ImageCube& reference, const ImageCube& estimate) {
    check_pair(reference, estimate);
    const Matrix& z = reference.band_matrix();
    const Matrix& zhat = estimate.band_matrix();

    double sum = 0.0;
    for (Eigen::Index n = 0; n < reference.pixels(); ++n) {
        if (z.col(n) == zhat.col(n)) continue; // identical spectra, angle exactly 0
        const double nz = z.col(n).norm();
        const double ne = zhat.col(n).norm();
        if (nz == 0.0 || ne == 0.0)
            throw InvalidArgument("sam: pixel " + std::to_string(n) +
                                  " has one zero-norm spectrum");
        const double c = std::clamp(z.col(n).dot(zhat.col(n)) / (nz * ne), -1.0, 1.0);
        sum += std::acos(c);
    }
    return sum / static_cast<double>(reference.pixels());
}

double ergas(const ImageCube& reference, const ImageCube& estimate,
             Eigen::Index coarse_pixels, const MetricOptions& options) {
    check_pair(reference, estimate);
    if (coarse_pixels <= 0) throw InvalidArgument("ergas: coarse pixel count must be positive");
    const Matrix& z = reference.band_matrix();
    const Matrix& zhat = estimate.band_matrix();
    const double fine_pixels = static_cast<double>(reference.pixels());

    double sum = 0.0;
    for (int b = 0; b < reference.bands(); ++b) {
        const double mean =
            options.ergas_reference_mean ? z.row(b).mean() : zhat.row(b).mean();
        if (mean == 0.0)
            throw InvalidArgument("ergas: band " + std::to_string(b) + " has zero mean");
        sum += (z.row(b) - zhat.row(b)).squaredNorm() / (mean * mean);
    }
    const double scale = static_cast<double>(coarse_pixels) /
                         (static_cast<double>(reference.bands()) * fine_pixels);
    return 100.0 * std::sqrt(scale * sum);
}

namespace {

struct PatchStats {
    double mean1 = 0.0, mean2 = 0.0;
    double var1 = 0.0, var2 = 0.0;
    double cov = 0.0;
    bool identical = true;
};

PatchStats patch_stats(const ImageCube& a, const ImageCube& b, int band, int r0, int c0,
                       int pr, int pc) {
    PatchStats s;
    const double n = static_cast<double>(pr) * pc;
    double s1 = 0.0, s2 = 0.0;
    for (int r = r0; r < r0 + pr; ++r)
        for (int c = c0; c < c0 + pc; ++c) {
            const double x = a.at(r, c, band);
            const double y = b.at(r, c, band);
            s1 += x;
            s2 += y;
            if (x != y) s.identical = false;
        }
    s.mean1 = s1 / n;
    s.mean2 = s2 / n;
    for (int r = r0; r < r0 + pr; ++r)
        for (int c = c0; c < c0 + pc; ++c) {
            const double dx = a.at(r, c, band) - s.mean1;
            const double dy = b.at(r, c, band) - s.mean2;
            s.var1 += dx * dx;
            s.var2 += dy * dy;
            s.cov += dx * dy;
        }
    s.var1 /= n;
    s.var2 /= n;
    s.cov /= n;
    return s;
}

} // namespace

double uiqi(const ImageCube& reference, const ImageCube& estimate,
            const MetricOptions& options) {
    check_pair(reference, estimate);
    const int patch = options.uiqi_patch;
    if (patch < 1) throw InvalidArgument("uiqi: patch size must be positive");

    const bool whole_image = reference.rows() < patch || reference.cols() < patch;
    const int pr = whole_image ? reference.rows() : patch;
    const int pc = whole_image ? reference.cols() : patch;
    const int tiles_r = whole_image ? 1 : reference.rows() / patch;
    const int tiles_c = whole_image ? 1 : reference.cols() / patch;
    const double patches = static_cast<double>(tiles_r) * tiles_c;

    double sum = 0.0;
    for (int b = 0; b < reference.bands(); ++b) {
        for (int tr = 0; tr < tiles_r; ++tr)
            for (int tc = 0; tc < tiles_c; ++tc) {
                const PatchStats s =
                    patch_stats(reference, estimate, b, tr * pr, tc * pc, pr, pc);
                if (s.identical) {
                    sum += 1.0;
                    continue;
                }
                const double denom =
                    (s.var1 + s.var2) * (s.mean1 * s.mean1 + s.mean2 * s.mean2) + 1e-300;
                sum += 4.0 * s.cov * s.mean1 * s.mean2 / denom;
            }
    }
    return sum / (static_cast<double>(reference.bands()) * patches);
}

MetricReport evaluate_all(const ImageCube& reference, const ImageCube& estimate,
                          Eigen::Index coarse_pixels, const MetricOptions& options) {
    MetricReport report;
    report.psnr_db = psnr(reference, estimate, options);
    report.sam_rad = sam(reference, estimate);
    report.ergas = ergas(reference, estimate, coarse_pixels, options);
    report.uiqi = uiqi(reference, estimate, options);
    return report;
}

} // namespace fuvar
