#include "fuvar/render.hpp"

#include "fuvar/errors.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace fuvar {
namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& data) {
    put_u32_be(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc =
        ::crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

} // namespace

void write_png_rgb8(const std::string& path, const std::vector<std::uint8_t>& rgb,
                    int width, int height) {
    if (width <= 0 || height <= 0)
        throw InvalidArgument("write_png_rgb8: image dimensions must be positive");
    if (rgb.size() != static_cast<std::size_t>(width) * height * 3)
        throw DimensionError("write_png_rgb8: pixel buffer does not match dimensions");

    // Scanlines with a leading filter byte (0 = none).
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * width));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        const std::uint8_t* row = rgb.data() + static_cast<std::size_t>(y) * width * 3;
        raw.insert(raw.end(), row, row + 3 * width);
    }

    uLongf bound = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (::compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                    9) != Z_OK)
        throw NumericalError("write_png_rgb8: deflate failed");
    compressed.resize(bound);

    std::vector<std::uint8_t> png;
    static const std::uint8_t signature[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    png.insert(png.end(), signature, signature + 8);

    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(width));
    put_u32_be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", compressed);
    append_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoError::Code::open_failed, "write_png_rgb8: cannot open " + path);
    out.write(reinterpret_cast<const char*>(png.data()),
              static_cast<std::streamsize>(png.size()));
    if (!out) throw IoError(IoError::Code::open_failed, "write_png_rgb8: write failed");
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InvalidArgument("quantile: empty sample");
    if (q <= 0.0 || q > 1.0) throw InvalidArgument("quantile: q must lie in (0, 1]");
    std::sort(values.begin(), values.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

int nearest_band_index(double wavelength_um, double wl_min_um, double wl_max_um, int bands) {
    if (bands < 1) throw InvalidArgument("nearest_band_index: need at least one band");
    if (wl_max_um <= wl_min_um)
        throw InvalidArgument("nearest_band_index: wavelength grid is degenerate");
    const double t = (wavelength_um - wl_min_um) / (wl_max_um - wl_min_um);
    const long idx = std::lround(t * (bands - 1));
    return static_cast<int>(std::clamp(idx, 0L, static_cast<long>(bands - 1)));
}

void render_composite(const ImageCube& cube, const std::array<int, 3>& band_indices,
                      const std::string& out_png) {
    for (int b : band_indices)
        if (b < 0 || b >= cube.bands())
            throw InvalidArgument("render_composite: band index out of range");

    const int width = cube.cols();
    const int height = cube.rows();
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3, 0);

    for (int channel = 0; channel < 3; ++channel) {
        const int band = band_indices[static_cast<std::size_t>(channel)];
        std::vector<double> values(static_cast<std::size_t>(cube.pixels()));
        for (Eigen::Index n = 0; n < cube.pixels(); ++n)
            values[static_cast<std::size_t>(n)] = cube.band_matrix()(band, n);
        const double peak = quantile(values, 0.999);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const double v = cube.at(y, x, band);
                double scaled = 0.0;
                if (peak > 0.0) scaled = 255.0 * v / peak;
                const long byte = std::lround(std::clamp(scaled, 0.0, 255.0));
                rgb[(static_cast<std::size_t>(y) * width + x) * 3 +
                    static_cast<std::size_t>(channel)] = static_cast<std::uint8_t>(byte);
            }
    }
    write_png_rgb8(out_png, rgb, width, height);
}

} // namespace fuvar
