#pragma once

// Scalar-loop reference implementations of the four quality metrics,
// written directly from their printed definitions.

#include <fuvar/types.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace metric_oracles {

using fuvar::ImageCube;

inline double psnr(const ImageCube& z, const ImageCube& zh) {
    double acc = 0.0;
    for (int b = 0; b < z.bands(); ++b) {
        double err = 0.0, peak = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < z.rows(); ++r)
            for (int c = 0; c < z.cols(); ++c) {
                const double d = z.at(r, c, b) - zh.at(r, c, b);
                err += d * d;
                peak = std::max(peak, z.at(r, c, b));
            }
        if (err == 0.0) return std::numeric_limits<double>::infinity();
        acc += 10.0 * std::log10(static_cast<double>(z.pixels()) * peak * peak / err);
    }
    return acc / z.bands();
}

inline double sam(const ImageCube& z, const ImageCube& zh) {
    double acc = 0.0;
    for (int r = 0; r < z.rows(); ++r)
        for (int c = 0; c < z.cols(); ++c) {
            double dot = 0.0, nz = 0.0, ne = 0.0;
            bool same = true;
            for (int b = 0; b < z.bands(); ++b) {
                const double x = z.at(r, c, b), y = zh.at(r, c, b);
                dot += x * y;
                nz += x * x;
                ne += y * y;
                if (x != y) same = false;
            }
            if (same) continue;
            acc += std::acos(std::clamp(dot / std::sqrt(nz * ne), -1.0, 1.0));
        }
    return acc / static_cast<double>(z.pixels());
}

inline double ergas(const ImageCube& z, const ImageCube& zh, long n_coarse) {
    double acc = 0.0;
    for (int b = 0; b < z.bands(); ++b) {
        double err = 0.0, mean = 0.0;
        for (int r = 0; r < z.rows(); ++r)
            for (int c = 0; c < z.cols(); ++c) {
                const double d = z.at(r, c, b) - zh.at(r, c, b);
                err += d * d;
                mean += zh.at(r, c, b);
            }
        mean /= static_cast<double>(z.pixels());
        acc += err / (mean * mean);
    }
    return 100.0 * std::sqrt(static_cast<double>(n_coarse) /
                             (static_cast<double>(z.bands()) * z.pixels()) * acc);
}

// Whole-image single-patch variant (images at or below the patch size).
inline double uiqi_whole(const ImageCube& z, const ImageCube& zh) {
    double acc = 0.0;
    const double n = static_cast<double>(z.pixels());
    for (int b = 0; b < z.bands(); ++b) {
        bool identical = true;
        double m1 = 0.0, m2 = 0.0;
        for (int r = 0; r < z.rows(); ++r)
            for (int c = 0; c < z.cols(); ++c) {
                m1 += z.at(r, c, b);
                m2 += zh.at(r, c, b);
                if (z.at(r, c, b) != zh.at(r, c, b)) identical = false;
            }
        if (identical) {
            acc += 1.0;
            continue;
        }
        m1 /= n;
        m2 /= n;
        double v1 = 0.0, v2 = 0.0, cov = 0.0;
        for (int r = 0; r < z.rows(); ++r)
            for (int c = 0; c < z.cols(); ++c) {
                const double dx = z.at(r, c, b) - m1;
                const double dy = zh.at(r, c, b) - m2;
                v1 += dx * dx;
                v2 += dy * dy;
                cov += dx * dy;
            }
        v1 /= n;
        v2 /= n;
        cov /= n;
        acc += 4.0 * cov * m1 * m2 / ((v1 + v2) * (m1 * m1 + m2 * m2) + 1e-300);
    }
    return acc / z.bands();
}

} // namespace metric_oracles
