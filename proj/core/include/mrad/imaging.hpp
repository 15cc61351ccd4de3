#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mrad/raster.hpp"

namespace mrad {

/// RGB colour with channels in [0, 1].
using Color = Eigen::Vector3d;

/// Query / reference raster. Channels are normalised to [0, 1] on load.
using ImageRGB = Raster<Color>;

enum class Label : std::uint8_t { Background = 0, Foreground = 1, Anomaly = 2 };

/// Three-class ground-truth segmentation.
using LabelMask = Raster<Label>;

/// Final anomaly map; each element is 0 or 1.
using BinaryMask = Raster<std::uint8_t>;

struct GridSpec {
  int rows = 4;
  int cols = 4;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct CellBounds {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  std::size_t area() const noexcept {
    return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height());
  }
  bool contains(int x, int y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  friend bool operator==(const CellBounds&, const CellBounds&) = default;
};

/// Splits a width x height image into grid.rows x grid.cols cells, row-major.
/// Every cell gets floor(dim / n) pixels per axis; the remainder goes to the
/// last cell of that axis. Throws std::invalid_argument when the grid has a
/// non-positive dimension or is larger than the image.
std::vector<CellBounds> partition(int width, int height, GridSpec grid);

/// Parses "RxC" (e.g. "4x4"). Throws std::invalid_argument on bad input.
GridSpec parse_grid(const std::string& text);
std::string to_string(GridSpec grid);

/// Throws std::invalid_argument if any channel is outside [0, 1] or non-finite.
void validate_image(const ImageRGB& image);

/// Decodes an 8-bit RGB / RGBA / gray PNG. Alpha is discarded, gray is
/// replicated into all three channels. Throws IoError or FormatError.
ImageRGB load_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG, rounding channels to the nearest of 256 levels.
void save_image(const ImageRGB& image, const std::filesystem::path& path);

/// Decodes a single-channel 8-bit PNG with gray values {0, 128, 255} mapped to
/// {Background, Foreground, Anomaly}. Any other value is a FormatError.
LabelMask load_mask(const std::filesystem::path& path);
void save_label_mask(const LabelMask& mask, const std::filesystem::path& path);

/// Writes 0 for normal pixels and 255 for anomalous ones.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
/// Reads a {0, 255} gray PNG back into a BinaryMask.
BinaryMask load_binary_mask(const std::filesystem::path& path);

/// Low-level 8-bit single-channel PNG access, used for score-map previews.
void save_gray8(const Raster<std::uint8_t>& gray, const std::filesystem::path& path);
Raster<std::uint8_t> load_gray8(const std::filesystem::path& path);

std::uint8_t label_to_gray(Label label) noexcept;
Label gray_to_label(std::uint8_t gray);  // FormatError outside {0,128,255}

}  // namespace mrad
