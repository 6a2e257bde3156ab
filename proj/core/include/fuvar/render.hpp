#pragma once

#include "fuvar/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fuvar {

// Writes an 8-bit RGB PNG (no interlacing, filter type 0 on every
// scanline, fixed compression settings, so output bytes are reproducible).
void write_png_rgb8(const std::string& path, const std::vector<std::uint8_t>& rgb,
                    int width, int height);

// Renders three bands of a cube as an RGB composite. Each channel is
// linearly stretched so its 0.999 intensity quantile maps to 255, values
// above are clipped, values below 0 map to 0.
void render_composite(const ImageCube& cube, const std::array<int, 3>& band_indices,
                      const std::string& out_png);

// Nearest band index of a wavelength under a linear wavelength grid.
int nearest_band_index(double wavelength_um, double wl_min_um, double wl_max_um, int bands);

// Nearest-rank upper quantile of the values (q in (0, 1]).
double quantile(std::vector<double> values, double q);

} // namespace fuvar
