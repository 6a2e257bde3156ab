#include "fuvar/io.hpp"

#include "fuvar/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace fuvar {
namespace {

static_assert(std::numeric_limits<double>::is_iec559, "IEEE 754 doubles required");

void put_le_double(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    std::array<unsigned char, 8> raw;
    for (int i = 0; i < 8; ++i) raw[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(raw.data()), 8);
}

bool get_le_double(std::istream& is, double& v) {
    std::array<unsigned char, 8> raw;
    if (!is.read(reinterpret_cast<char*>(raw.data()), 8)) return false;
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
    std::memcpy(&v, &bits, sizeof v);
    return true;
}

} // namespace

std::string format_double(double value) {
    std::array<char, 64> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
    return std::string(buf.data(), end);
}

ImageCube read_cube(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Code::open_failed, "read_cube: cannot open " + path);

    std::string header;
    if (!std::getline(in, header))
        throw IoError(IoError::Code::bad_header, "read_cube: missing header in " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    std::istringstream hs(header);
    std::string magic;
    long rows = 0, cols = 0, bands = 0;
    hs >> magic >> rows >> cols >> bands;
    if (!hs || magic != "CUBE1" || rows <= 0 || cols <= 0 || bands <= 0)
        throw IoError(IoError::Code::bad_header, "read_cube: malformed header '" + header + "'");
    std::string trailing;
    if (hs >> trailing)
        throw IoError(IoError::Code::bad_header, "read_cube: trailing header fields");

    const Eigen::Index pixels = static_cast<Eigen::Index>(rows) * cols;
    Matrix data(bands, pixels);
    for (long b = 0; b < bands; ++b) {
        for (Eigen::Index n = 0; n < pixels; ++n) {
            double v;
            if (!get_le_double(in, v))
                throw IoError(IoError::Code::size_mismatch,
                              "read_cube: payload shorter than header declares");
            if (!std::isfinite(v))
                throw IoError(IoError::Code::non_finite,
                              "read_cube: non-finite value in payload");
            data(b, n) = v;
        }
    }
    char extra;
    if (in.read(&extra, 1))
        throw IoError(IoError::Code::size_mismatch,
                      "read_cube: payload longer than header declares");
    return ImageCube(static_cast<int>(rows), static_cast<int>(cols), std::move(data));
}

void write_cube(const ImageCube& cube, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(IoError::Code::open_failed, "write_cube: cannot open " + path);
    out << "CUBE1 " << cube.rows() << ' ' << cube.cols() << ' ' << cube.bands() << '\n';
    const Matrix& m = cube.band_matrix();
    for (int b = 0; b < cube.bands(); ++b)
        for (Eigen::Index n = 0; n < cube.pixels(); ++n) put_le_double(out, m(b, n));
    if (!out) throw IoError(IoError::Code::open_failed, "write_cube: write failed for " + path);
}

Matrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(IoError::Code::open_failed, "read_csv_matrix: cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            std::string field = line.substr(pos, comma == std::string::npos
                                                     ? std::string::npos
                                                     : comma - pos);
            double v;
            auto first = field.data();
            auto last = field.data() + field.size();
            while (first < last && (*first == ' ' || *first == '\t')) ++first;
            auto [end, ec] = std::from_chars(first, last, v);
            while (end < last && (*end == ' ' || *end == '\t')) ++end;
            if (ec != std::errc() || end != last)
                throw IoError(IoError::Code::bad_value,
                              "read_csv_matrix: bad numeric field '" + field + "'");
            row.push_back(v);
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(IoError::Code::size_mismatch,
                          "read_csv_matrix: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw IoError(IoError::Code::size_mismatch, "read_csv_matrix: empty file " + path);

    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

void write_csv_matrix(const Matrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(IoError::Code::open_failed, "write_csv_matrix: cannot open " + path);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

std::vector<std::pair<std::string, std::string>> read_key_value(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(IoError::Code::open_failed, "read_key_value: cannot open " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw IoError(IoError::Code::bad_value, "read_key_value: missing '=' in '" + line + "'");
        entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return entries;
}

void write_key_value(const std::vector<std::pair<std::string, std::string>>& entries,
                     const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(IoError::Code::open_failed, "write_key_value: cannot open " + path);
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(IoError::Code::open_failed, "file_hash_hex: cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return s;
}

} // namespace fuvar
