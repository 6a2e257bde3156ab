#pragma once

#include "fuvar/types.hpp"

#include <cstdint>

namespace fuvar {

// Parameters of the synthetic-scene protocol: smooth random abundances,
// procedurally generated endmembers, piecewise-linear scaling factors,
// blur + decimation + uniform SRF observation, calibrated noise.
struct SceneSpec {
    int rows = 100;
    int cols = 100;
    int endmembers = 3;
    int bands = 224;
    int decimation = 4;
    int msi_bands = 16;
    double snr_hs_db = 30.0;
    double snr_ms_db = 40.0;
    int psi_breakpoints = 5;
    double psi_amplitude = 0.2;
    double grf_smoothness = 2.0; // spectral decay exponent of the random fields
    double grf_gain = 5.0;       // logit scale before the softmax simplex map
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct Scene {
    ImageCube z_h;        // high-resolution HS reference
    ImageCube z_m;        // high-resolution MS reference (with variability)
    ImageCube y_h;        // observed low-resolution HSI
    ImageCube y_m;        // observed MSI
    ImageCube y_h_clean;  // observations before noise, for residual checks
    ImageCube y_m_clean;
    AbundanceMap abundances;
    ScalingFactors scaling;
    EndmemberMatrix endmembers;
    ObservationModel model;
};

// Spatially correlated abundance maps: spectrally filtered seeded white
// noise (isotropic power spectrum (1+|k|^2)^-smoothness over integer
// cycles per image), unit-variance normalized, softmax-mapped per pixel.
AbundanceMap gen_abundances_grf(const SceneSpec& spec);

// Smooth nonnegative spectra built from 3-5 Gaussian bumps plus a
// baseline, redrawn until all mutual spectral angles are >= 15 degrees.
EndmemberMatrix gen_endmembers(const SceneSpec& spec);

// Per-material piecewise-linear scaling over band index with knot values
// drawn uniformly from [1-amplitude, 1+amplitude].
ScalingFactors gen_scaling_piecewise(const SceneSpec& spec);

// Piecewise-uniform spectral response: each MS band averages a contiguous
// group of HS bands; group sizes differ by at most one, longer groups
// first; rows sum to exactly 1.
Matrix gen_srf_uniform(int bands, int msi_bands);

// Full protocol. The generation is a pure function of the spec.
Scene build_scene(const SceneSpec& spec);

} // namespace fuvar
