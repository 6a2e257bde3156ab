#pragma once

#include "fuvar/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace fuvar {

// Cube file format ("cube v1"): an ASCII header line
//   CUBE1 <rows> <cols> <bands>\n
// followed by rows*cols*bands little-endian IEEE 754 doubles, band-major,
// row-major within each band.
ImageCube read_cube(const std::string& path);
void write_cube(const ImageCube& cube, const std::string& path);

// Headerless CSV matrices (one record per matrix row). Readers accept both
// LF and CRLF records; writers emit LF and shortest round-trip doubles.
Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const Matrix& m, const std::string& path);

// Line-oriented key=value files (configs, manifests, run reports).
// '#'-prefixed lines and blank lines are ignored on read.
std::vector<std::pair<std::string, std::string>> read_key_value(const std::string& path);
void write_key_value(const std::vector<std::pair<std::string, std::string>>& entries,
                     const std::string& path);

// FNV-1a 64-bit digest of a file, as 16 hex characters.
std::string file_hash_hex(const std::string& path);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

} // namespace fuvar
