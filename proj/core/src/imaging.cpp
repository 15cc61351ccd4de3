#include "mrad/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mrad/error.hpp"

namespace mrad {
namespace {

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<std::uint8_t> bytes;
};

class PngImage {
 public:
  PngImage() {
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() noexcept { return &image_; }
  png_image* operator->() noexcept { return &image_; }

 private:
  png_image image_{};
};

void require_readable(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open '" + path.string() + "' for reading");
}

// want_gray: decode as 1 channel and reject colour files; otherwise 3 channels.
DecodedPng decode_png(const std::filesystem::path& path, bool want_gray) {
  require_readable(path);
  PngImage png;
  if (!png_image_begin_read_from_file(png.get(), path.string().c_str())) {
    throw FormatError("cannot decode '" + path.string() + "': " + png->message);
  }
  if (png->format & PNG_FORMAT_FLAG_LINEAR) {
    throw FormatError("unsupported bit depth in '" + path.string() + "': expected 8-bit samples");
  }
  if (want_gray && (png->format & PNG_FORMAT_FLAG_COLOR)) {
    throw FormatError("'" + path.string() + "' is not a single-channel image");
  }
  DecodedPng out;
  out.width = static_cast<int>(png->width);
  out.height = static_cast<int>(png->height);
  out.channels = want_gray ? 1 : 3;
  png->format = want_gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  out.bytes.resize(PNG_IMAGE_SIZE(*png.get()));
  if (!png_image_finish_read(png.get(), nullptr, out.bytes.data(), 0, nullptr)) {
    throw FormatError("cannot decode '" + path.string() + "': " + png->message);
  }
  return out;
}

void encode_png(const std::filesystem::path& path, int width, int height, bool gray,
                const std::uint8_t* bytes) {
  PngImage png;
  png->width = static_cast<png_uint_32>(width);
  png->height = static_cast<png_uint_32>(height);
  png->format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  {
    std::ofstream probe(path, std::ios::binary | std::ios::trunc);
    if (!probe) throw IoError("cannot open '" + path.string() + "' for writing");
  }
  if (!png_image_write_to_file(png.get(), path.string().c_str(), 0, bytes, 0, nullptr)) {
    throw IoError("cannot write '" + path.string() + "': " + png->message);
  }
}

std::uint8_t quantize(double channel) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(channel, 0.0, 1.0) * 255.0));
}

}  // namespace

std::vector<CellBounds> partition(int width, int height, GridSpec grid) {
  if (grid.rows < 1 || grid.cols < 1) {
    throw std::invalid_argument("partition: grid dimensions must be positive");
  }
  if (grid.cols > width || grid.rows > height) {
    throw std::invalid_argument("partition: grid " + to_string(grid) + " exceeds image " +
                                std::to_string(width) + "x" + std::to_string(height));
  }
  const int cw = width / grid.cols;
  const int ch = height / grid.rows;
  std::vector<CellBounds> cells;
  cells.reserve(static_cast<std::size_t>(grid.rows) * static_cast<std::size_t>(grid.cols));
  for (int r = 0; r < grid.rows; ++r) {
    const int y0 = r * ch;
    const int y1 = (r == grid.rows - 1) ? height : y0 + ch;
    for (int c = 0; c < grid.cols; ++c) {
      const int x0 = c * cw;
      const int x1 = (c == grid.cols - 1) ? width : x0 + cw;
      cells.push_back({x0, y0, x1, y1});
    }
  }
  return cells;
}

GridSpec parse_grid(const std::string& text) {
  const auto sep = text.find_first_of("xX");
  GridSpec grid{0, 0};
  if (sep != std::string::npos) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto r1 = std::from_chars(begin, begin + sep, grid.rows);
    auto r2 = std::from_chars(begin + sep + 1, end, grid.cols);
    if (r1.ec == std::errc{} && r1.ptr == begin + sep && r2.ec == std::errc{} && r2.ptr == end &&
        grid.rows > 0 && grid.cols > 0) {
      return grid;
    }
  }
  throw std::invalid_argument("invalid grid '" + text + "' (expected ROWSxCOLS, e.g. 4x4)");
}

std::string to_string(GridSpec grid) {
  return std::to_string(grid.rows) + "x" + std::to_string(grid.cols);
}

void validate_image(const ImageRGB& image) {
  for (const Color& c : image.values()) {
    for (int k = 0; k < 3; ++k) {
      if (!(c[k] >= 0.0 && c[k] <= 1.0)) {
        throw std::invalid_argument("image channel value outside [0, 1]");
      }
    }
  }
}

ImageRGB load_image(const std::filesystem::path& path) {
  const DecodedPng png = decode_png(path, false);
  std::vector<Color> pixels(static_cast<std::size_t>(png.width) * png.height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = Color(png.bytes[3 * i], png.bytes[3 * i + 1], png.bytes[3 * i + 2]) / 255.0;
  }
  return ImageRGB(png.width, png.height, std::move(pixels));
}

void save_image(const ImageRGB& image, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(image.size() * 3);
  for (std::size_t i = 0; i < image.size(); ++i) {
    for (int k = 0; k < 3; ++k) bytes[3 * i + k] = quantize(image[i][k]);
  }
  encode_png(path, image.width(), image.height(), false, bytes.data());
}

std::uint8_t label_to_gray(Label label) noexcept {
  switch (label) {
    case Label::Background: return 0;
    case Label::Foreground: return 128;
    case Label::Anomaly: return 255;
  }
  return 0;
}

Label gray_to_label(std::uint8_t gray) {
  switch (gray) {
    case 0: return Label::Background;
    case 128: return Label::Foreground;
    case 255: return Label::Anomaly;
    default:
      throw FormatError("mask value " + std::to_string(gray) +
                        " is not one of {0, 128, 255}");
  }
}

LabelMask load_mask(const std::filesystem::path& path) {
  const Raster<std::uint8_t> gray = load_gray8(path);
  std::vector<Label> labels(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    try {
      labels[i] = gray_to_label(gray[i]);
    } catch (const FormatError& e) {
      throw FormatError("'" + path.string() + "': " + e.what());
    }
  }
  return LabelMask(gray.width(), gray.height(), std::move(labels));
}

void save_label_mask(const LabelMask& mask, const std::filesystem::path& path) {
  Raster<std::uint8_t> gray(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) gray[i] = label_to_gray(mask[i]);
  save_gray8(gray, path);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  Raster<std::uint8_t> gray(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) gray[i] = mask[i] ? 255 : 0;
  save_gray8(gray, path);
}

BinaryMask load_binary_mask(const std::filesystem::path& path) {
  Raster<std::uint8_t> gray = load_gray8(path);
  for (auto& v : gray.values()) {
    if (v != 0 && v != 255) {
      throw FormatError("'" + path.string() + "': binary mask value " + std::to_string(v) +
                        " is not 0 or 255");
    }
    v = v ? 1 : 0;
  }
  return gray;
}

void save_gray8(const Raster<std::uint8_t>& gray, const std::filesystem::path& path) {
  encode_png(path, gray.width(), gray.height(), true, gray.values().data());
}

Raster<std::uint8_t> load_gray8(const std::filesystem::path& path) {
  DecodedPng png = decode_png(path, true);
  return Raster<std::uint8_t>(png.width, png.height, std::move(png.bytes));
}

}  // namespace mrad
