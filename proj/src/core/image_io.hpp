// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/imaging.hpp"

namespace sarcr {

// CIMG: "CIMG", u32 rows, u32 cols (little endian), then rows*cols pairs of
// little-endian float64 (re, im) in row-major order.
std::vector<std::uint8_t> encodeCimg(const ComplexImage& img);
ComplexImage decodeCimg(const std::uint8_t* data, std::size_t size);
void writeCimg(const std::string& path, const ComplexImage& img);
ComplexImage readCimg(const std::string& path);

// 8-bit grayscale of 20 log10(m / max m), floored at floorDb.
std::vector<std::uint8_t> logGray(const RealMatrix& magnitude, double floorDb = -40.0);
void writePngGray(const std::string& path, const std::vector<std::uint8_t>& gray, int rows, int cols);
void writePngRgb(const std::string& path, const std::vector<std::uint8_t>& rgb, int rows, int cols);
void writeMagnitudePng(const std::string& path, const RealMatrix& magnitude, double floorDb = -40.0);

std::vector<std::uint8_t> readFileBytes(const std::string& path);
void writeFileBytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace sarcr
