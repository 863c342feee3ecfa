#include "hcrn/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "hcrn/error.hpp"

#if defined(HCRN_HAVE_JPEG)
#include <csetjmp>

#include <jpeglib.h>
#endif

#if defined(HCRN_HAVE_PNG)
#include <png.h>
#endif

namespace hcrn {
namespace {

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PpmHeaderReader {
 public:
  PpmHeaderReader(std::span<const std::uint8_t> bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  void expect_magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '6') fail("not a binary P6 PPM");
    pos_ = 2;
  }

  std::size_t number() {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (++digits > 9) fail("header value too large");
    }
    if (digits == 0) fail("malformed header");
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("missing raster separator");
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw IngestionError("'" + origin_ + "': " + why);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

#if defined(HCRN_HAVE_JPEG)
struct JpegErrorTrap {
  jpeg_error_mgr base;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr info) {
  auto* trap = reinterpret_cast<JpegErrorTrap*>(info->err);
  (*info->err->format_message)(info, trap->message);
  std::longjmp(trap->jump, 1);
}

// No C++ objects with destructors live between setjmp and the longjmp
// targets below.
RawImage decode_jpeg(std::span<const std::uint8_t> bytes, const std::string& origin) {
  jpeg_decompress_struct info;
  JpegErrorTrap trap;
  info.err = jpeg_std_error(&trap.base);
  trap.base.error_exit = jpeg_error_exit;
  RawImage image;
  std::vector<std::uint8_t>* out = &image.rgb;
  if (setjmp(trap.jump)) {
    jpeg_destroy_decompress(&info);
    throw IngestionError("'" + origin + "': " + trap.message);
  }
  jpeg_create_decompress(&info);
  jpeg_mem_src(&info, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&info, TRUE);
  info.out_color_space = JCS_RGB;
  jpeg_start_decompress(&info);
  image.rows = info.output_height;
  image.cols = info.output_width;
  out->resize(image.rows * image.cols * 3);
  while (info.output_scanline < info.output_height) {
    JSAMPROW row = out->data() + static_cast<std::size_t>(info.output_scanline) * image.cols * 3;
    jpeg_read_scanlines(&info, &row, 1);
  }
  jpeg_finish_decompress(&info);
  jpeg_destroy_decompress(&info);
  return image;
}
#endif

#if defined(HCRN_HAVE_PNG)
RawImage decode_png(std::span<const std::uint8_t> bytes, const std::string& origin) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw IngestionError("'" + origin + "': " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  RawImage image;
  image.rows = png.height;
  image.cols = png.width;
  image.rgb.resize(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, image.rgb.data(), 0, nullptr)) {
    const std::string why = png.message;
    png_image_free(&png);
    throw IngestionError("'" + origin + "': " + why);
  }
  return image;
}
#endif

}  // namespace

RawImage decode_ppm(std::span<const std::uint8_t> bytes, const std::string& origin) {
  PpmHeaderReader header(bytes, origin);
  header.expect_magic();
  RawImage image;
  image.cols = header.number();
  image.rows = header.number();
  const std::size_t maxval = header.number();
  if (image.rows == 0 || image.cols == 0) header.fail("zero image extent");
  if (maxval != 255) header.fail("maxval " + std::to_string(maxval) + " (only 255 is supported)");
  const std::size_t start = header.raster_offset();
  const std::size_t need = image.rows * image.cols * 3;
  if (bytes.size() - start < need) header.fail("truncated raster");
  image.rgb.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                   bytes.begin() + static_cast<std::ptrdiff_t>(start + need));
  return image;
}

std::vector<std::uint8_t> encode_ppm(const RawImage& image) {
  const std::string header =
      "P6\n" + std::to_string(image.cols) + " " + std::to_string(image.rows) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

void write_ppm(const std::filesystem::path& path, const RawImage& image) {
  const auto bytes = encode_ppm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

RawImage read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  const std::string origin = path.string();
  if (ext == ".ppm") return decode_ppm(read_bytes(path), origin);
#if defined(HCRN_HAVE_JPEG)
  if (ext == ".jpg" || ext == ".jpeg") return decode_jpeg(read_bytes(path), origin);
#endif
#if defined(HCRN_HAVE_PNG)
  if (ext == ".png") return decode_png(read_bytes(path), origin);
#endif
  throw IngestionError("'" + origin + "': unsupported image format '" + ext + "'");
}

bool jpeg_supported() {
#if defined(HCRN_HAVE_JPEG)
  return true;
#else
  return false;
#endif
}

bool png_supported() {
#if defined(HCRN_HAVE_PNG)
  return true;
#else
  return false;
#endif
}

#if defined(HCRN_HAVE_JPEG)
std::vector<std::uint8_t> encode_jpeg(const RawImage& image, int quality) {
  jpeg_compress_struct info;
  jpeg_error_mgr err;
  info.err = jpeg_std_error(&err);
  jpeg_create_compress(&info);
  unsigned char* buffer = nullptr;
  unsigned long size = 0;
  jpeg_mem_dest(&info, &buffer, &size);
  info.image_width = static_cast<JDIMENSION>(image.cols);
  info.image_height = static_cast<JDIMENSION>(image.rows);
  info.input_components = 3;
  info.in_color_space = JCS_RGB;
  jpeg_set_defaults(&info);
  jpeg_set_quality(&info, quality, TRUE);
  jpeg_start_compress(&info, TRUE);
  while (info.next_scanline < info.image_height) {
    auto* row = const_cast<JSAMPLE*>(image.rgb.data() +
                                     static_cast<std::size_t>(info.next_scanline) * image.cols * 3);
    jpeg_write_scanlines(&info, &row, 1);
  }
  jpeg_finish_compress(&info);
  std::vector<std::uint8_t> out(buffer, buffer + size);
  jpeg_destroy_compress(&info);
  std::free(buffer);
  return out;
}
#endif

Tensor to_tensor(const RawImage& image) {
  Tensor t({image.rows, image.cols, 3});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = image.rgb[i] / 255.0;
  return t;
}

RawImage to_raw(const Tensor& pixels) {
  if (pixels.rank() != 3 || pixels.extent(2) != 3) {
    throw DimensionError("to_raw: expected [HxWx3], got " + shape_string(pixels.shape()));
  }
  RawImage image{pixels.extent(0), pixels.extent(1), std::vector<std::uint8_t>(pixels.size())};
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    image.rgb[i] = static_cast<std::uint8_t>(std::lround(std::clamp(pixels[i], 0.0, 1.0) * 255.0));
  }
  return image;
}

Tensor resize_bilinear(const Tensor& image, std::size_t rows, std::size_t cols) {
  if (image.rank() != 3) {
    throw DimensionError("resize_bilinear: expected [HxWxC], got " + shape_string(image.shape()));
  }
  const std::size_t in_rows = image.extent(0), in_cols = image.extent(1), ch = image.extent(2);
  const double ry = static_cast<double>(in_rows) / static_cast<double>(rows);
  const double rx = static_cast<double>(in_cols) / static_cast<double>(cols);

  struct Tap {
    std::size_t lo, hi;
    double frac;
  };
  auto taps = [](std::size_t out, std::size_t in, double ratio) {
    std::vector<Tap> t(out);
    const double last = static_cast<double>(in - 1);
    for (std::size_t d = 0; d < out; ++d) {
      const double s = std::clamp((static_cast<double>(d) + 0.5) * ratio - 0.5, 0.0, last);
      const auto lo = static_cast<std::size_t>(std::floor(s));
      t[d] = {lo, std::min(lo + 1, in - 1), s - static_cast<double>(lo)};
    }
    return t;
  };
  const auto ty = taps(rows, in_rows, ry);
  const auto tx = taps(cols, in_cols, rx);

  Tensor out({rows, cols, ch});
  const double* src = image.data();
  for (std::size_t y = 0; y < rows; ++y) {
    const Tap& a = ty[y];
    for (std::size_t x = 0; x < cols; ++x) {
      const Tap& b = tx[x];
      for (std::size_t c = 0; c < ch; ++c) {
        const double v00 = src[(a.lo * in_cols + b.lo) * ch + c];
        const double v01 = src[(a.lo * in_cols + b.hi) * ch + c];
        const double v10 = src[(a.hi * in_cols + b.lo) * ch + c];
        const double v11 = src[(a.hi * in_cols + b.hi) * ch + c];
        const double top = v00 * (1.0 - b.frac) + v01 * b.frac;
        const double bottom = v10 * (1.0 - b.frac) + v11 * b.frac;
        out[(y * cols + x) * ch + c] = top * (1.0 - a.frac) + bottom * a.frac;
      }
    }
  }
  return out;
}

Tensor to_grayscale(const Tensor& image) {
  if (image.rank() != 3 || image.extent(2) != 3) {
    throw DimensionError("to_grayscale: expected [HxWx3], got " + shape_string(image.shape()));
  }
  const std::size_t rows = image.extent(0), cols = image.extent(1);
  Tensor gray({rows, cols});
  for (std::size_t i = 0; i < rows * cols; ++i) {
    gray[i] = 0.299 * image[3 * i] + 0.587 * image[3 * i + 1] + 0.114 * image[3 * i + 2];
  }
  return gray;
}

}  // namespace hcrn
