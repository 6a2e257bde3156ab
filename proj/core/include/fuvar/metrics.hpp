#pragma once

#include "fuvar/types.hpp"

namespace fuvar {

struct MetricOptions {
    // The reference PSNR formula squares the band peak; the literal printed
    // form does not and loses scale invariance. Kept switchable for audits.
    bool psnr_paper_literal = false;
    // ERGAS normalizes by the estimate's band mean as printed; the switch
    // uses the reference mean instead.
    bool ergas_reference_mean = false;
    int uiqi_patch = 32;
};

struct MetricReport {
    double psnr_db = 0.0;
    double sam_rad = 0.0;
    double ergas = 0.0;
    double uiqi = 0.0;
};

// Mean over bands of 10*log10(M * peak^2 / bandwise squared error), peak
// taken from the reference band. Returns +inf if any band error is exactly
// zero.
double psnr(const ImageCube& reference, const ImageCube& estimate,
            const MetricOptions& options = {});

// Mean over pixels of the angle between reference and estimate spectra,
// in radians. A pixel whose spectra are both zero contributes 0.
double sam(const ImageCube& reference, const ImageCube& estimate);

// Relative global reconstruction error; `coarse_pixels` is the pixel count
// of the observed low-resolution image.
double ergas(const ImageCube& reference, const ImageCube& estimate,
             Eigen::Index coarse_pixels, const MetricOptions& options = {});

// Universal image quality index over non-overlapping patches, averaged
// across bands. Images smaller than the patch in either dimension are
// scored as a single whole-image patch.
double uiqi(const ImageCube& reference, const ImageCube& estimate,
            const MetricOptions& options = {});

MetricReport evaluate_all(const ImageCube& reference, const ImageCube& estimate,
                          Eigen::Index coarse_pixels, const MetricOptions& options = {});

} // namespace fuvar
