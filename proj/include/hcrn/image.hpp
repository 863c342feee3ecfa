#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hcrn/tensor.hpp"

namespace hcrn {

/// 8-bit interleaved RGB raster as stored on disk.
struct RawImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> rgb;  // rows * cols * 3

  bool operator==(const RawImage&) const = default;
};

/// Binary P6, maxval 255. Header comments are accepted. Errors raise
/// IngestionError mentioning `origin`.
RawImage decode_ppm(std::span<const std::uint8_t> bytes, const std::string& origin);
std::vector<std::uint8_t> encode_ppm(const RawImage& image);

void write_ppm(const std::filesystem::path& path, const RawImage& image);

/// Decodes by extension: .ppm always, .jpg/.jpeg and .png when the optional
/// codecs were compiled in.
RawImage read_image(const std::filesystem::path& path);

bool jpeg_supported();
bool png_supported();

#if defined(HCRN_HAVE_JPEG)
/// Baseline JPEG encoder, used by tests and the synthetic data tool.
std::vector<std::uint8_t> encode_jpeg(const RawImage& image, int quality);
#endif

/// [rows x cols x 3] with values v / 255.
Tensor to_tensor(const RawImage& image);

/// Inverse of to_tensor with rounding and clamping to [0, 255].
RawImage to_raw(const Tensor& pixels);

inline constexpr std::size_t kModelRows = 60;
inline constexpr std::size_t kModelCols = 80;

/// Bilinear resampling with pixel-corner alignment: output pixel centres map
/// to src = (dst + 0.5) * in / out - 0.5, clamped to the edge. Equal sizes
/// give a bit-exact copy.
Tensor resize_bilinear(const Tensor& image, std::size_t rows = kModelRows,
                       std::size_t cols = kModelCols);

/// Luma weights 0.299 R + 0.587 G + 0.114 B.
Tensor to_grayscale(const Tensor& image);

}  // namespace hcrn
