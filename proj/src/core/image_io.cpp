// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

#include "core/errors.hpp"

namespace sarcr {

namespace {

void putU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void putF64(std::vector<std::uint8_t>& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t getU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

double getF64(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = bits << 8 | p[i];
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

}  // namespace

std::vector<std::uint8_t> encodeCimg(const ComplexImage& img) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + 16 * img.pixels.size());
  for (char ch : {'C', 'I', 'M', 'G'}) out.push_back(static_cast<std::uint8_t>(ch));
  putU32(out, static_cast<std::uint32_t>(img.pixels.rows()));
  putU32(out, static_cast<std::uint32_t>(img.pixels.cols()));
  putU32(out, 0);  // reserved, pads the header to 16 bytes
  for (Eigen::Index i = 0; i < img.pixels.rows(); ++i) {
    for (Eigen::Index j = 0; j < img.pixels.cols(); ++j) {
      putF64(out, img.pixels(i, j).real());
      putF64(out, img.pixels(i, j).imag());
    }
  }
  return out;
}

ComplexImage decodeCimg(const std::uint8_t* data, std::size_t size) {
  if (size < 16 || std::memcmp(data, "CIMG", 4) != 0) {
    fail(ErrorClass::kData, "MalformedImage", "missing CIMG header");
  }
  const std::uint32_t rows = getU32(data + 4), cols = getU32(data + 8);
  const std::size_t need = 16 + static_cast<std::size_t>(rows) * cols * 16;
  if (rows == 0 || cols == 0) fail(ErrorClass::kData, "MalformedImage", "empty raster");
  if (size < need) {
    fail(ErrorClass::kData, "TruncatedData",
         "CIMG needs " + std::to_string(need) + " bytes, got " + std::to_string(size));
  }
  ComplexImage img;
  img.pixels.resize(rows, cols);
  const std::uint8_t* p = data + 16;
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t j = 0; j < cols; ++j, p += 16) img.pixels(i, j) = cd(getF64(p), getF64(p + 8));
  }
  return img;
}

std::vector<std::uint8_t> readFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorClass::kIo, "FileNotFound", "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void writeFileBytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorClass::kIo, "WriteFailed", "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorClass::kIo, "WriteFailed", "short write to " + path);
}

void writeCimg(const std::string& path, const ComplexImage& img) { writeFileBytes(path, encodeCimg(img)); }

ComplexImage readCimg(const std::string& path) {
  const auto bytes = readFileBytes(path);
  return decodeCimg(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> logGray(const RealMatrix& m, double floorDb) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(m.size()), 0);
  const double mx = m.size() ? m.maxCoeff() : 0.0;
  if (!(mx > 0.0)) return out;
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j, ++k) {
      const double v = m(i, j);
      const double db = v > 0.0 ? 20.0 * std::log10(v / mx) : floorDb;
      const double t = std::clamp((db - floorDb) / -floorDb, 0.0, 1.0);
      out[k] = static_cast<std::uint8_t>(std::lround(255.0 * t));
    }
  }
  return out;
}

namespace {

void writePng(const std::string& path, const std::uint8_t* pixels, int rows, int cols, int channels) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) fail(ErrorClass::kIo, "WriteFailed", "cannot open " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorClass::kIo, "PngError", "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorClass::kIo, "PngError", "libpng failed writing " + path);
  }
  png_init_io(png, fp.get());
  // Fixed encoder settings keep output byte-identical across runs.
  png_set_compression_level(png, 9);
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < rows; ++r) {
    png_write_row(png, const_cast<png_bytep>(pixels + static_cast<std::size_t>(r) * cols * channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void writePngGray(const std::string& path, const std::vector<std::uint8_t>& gray, int rows, int cols) {
  writePng(path, gray.data(), rows, cols, 1);
}

void writePngRgb(const std::string& path, const std::vector<std::uint8_t>& rgb, int rows, int cols) {
  writePng(path, rgb.data(), rows, cols, 3);
}

void writeMagnitudePng(const std::string& path, const RealMatrix& magnitude, double floorDb) {
  writePngGray(path, logGray(magnitude, floorDb), static_cast<int>(magnitude.rows()),
               static_cast<int>(magnitude.cols()));
}

}  // namespace sarcr
