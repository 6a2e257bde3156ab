#pragma once

#include "fuvar/types.hpp"

#include <cstdint>
#include <vector>

namespace fuvar {

struct VcaResult {
    EndmemberMatrix endmembers;
    std::vector<int> selected_pixel_indices;
    int projection_dim = 0;
};

// Vertex component analysis: projects the data onto its p-dimensional
// principal subspace, normalizes pixels onto a hyperplane, and iteratively
// picks the pixel with the largest projection onto directions orthogonal
// to the vertices found so far. Returned spectra are columns of `y`
// (negative noise excursions clipped to zero). Deterministic per seed.
VcaResult vca_extract(const Matrix& y, int p, std::uint64_t seed);

// Fully constrained least squares per pixel: min ||y - M a||^2 subject to
// a >= 0 and sum(a) = 1. Support discovery runs nonnegative least squares
// on the sum-augmented system (delta = 1e3); the support solution is then
// polished by exact KKT solves until the first-order residual of the
// original problem is at machine-level precision.
Matrix fcls_abundances(const Matrix& y, const Matrix& m);

// Per-material Catmull-Rom bicubic interpolation (a = -0.5) from an
// n1 x n2 grid to an (n1*factor) x (n2*factor) grid. Coarse sample k maps
// to fine index k*factor, edges replicate, outputs are clipped to >= 0.
Matrix bicubic_upsample(const Matrix& coarse, int coarse_rows, int coarse_cols, int factor);

} // namespace fuvar
