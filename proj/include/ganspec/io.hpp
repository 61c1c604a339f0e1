#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ganspec/spectral.hpp"
#include "ganspec/tensor.hpp"

namespace ganspec {

/// "RT01": magic, u32 LE height, width, channels, then float32 LE samples.
void write_rt01(std::ostream& out, const RealTensor& tensor);
RealTensor read_rt01(std::istream& in);

/// "SF01": magic, u32 LE height, width, channels, u8 dc_centered, float32 LE.
void write_sf01(std::ostream& out, const SpectrumFeature& feature);
SpectrumFeature read_sf01(std::istream& in);

/// 8-bit binary PGM (P5) of one channel, values mapped from [lo, hi] to
/// [0, 255] and clamped.
void write_pgm(std::ostream& out, const RealTensor& plane, double lo = -1.0, double hi = 1.0,
               int channel = 0);

/// PNG or baseline JPEG decoded to [0, 1] (8-bit samples / 255). Gray images
/// load as 1 channel, color as 3; alpha is dropped.
RealTensor read_image(const std::filesystem::path& path);
/// 8-bit PNG; samples are clamped to [0, 1] and rounded.
void write_png(const std::filesystem::path& path, const RealTensor& img);

std::vector<std::uint8_t> encode_jpeg(const RealTensor& img, int quality);
RealTensor decode_jpeg(const std::vector<std::uint8_t>& bytes);
/// Encode at `quality` then decode (libjpeg defaults: 4:2:0 chroma).
RealTensor jpeg_roundtrip(const RealTensor& img, int quality);

/// Loads whichever of the formats above matches the extension
/// (.rt01, .png, .jpg, .jpeg).
RealTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const std::filesystem::path& path, const RealTensor& img);

}  // namespace ganspec
