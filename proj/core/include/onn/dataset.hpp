#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "onn/field.hpp"

namespace onn {

/// Raw 8-bit images as stored in IDX files, one label per image.
struct RawDataset {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  ///< count * rows * cols, row-major
  std::vector<std::uint8_t> labels;  ///< count entries, values 0..9
};

/// Loads an IDX image/label pair.  Throws FormatError on malformed input
/// and requires 28x28 images with matching image/label counts.
RawDataset load_idx(const std::string& image_path, const std::string& label_path);

/// Upscales one raw image to active_size^2, normalizes it to peak 1,
/// and embeds it centered in a padded_size^2 intensity grid.
RealGrid preprocess(const RawDataset& data, std::size_t index,
                    const OpticalConfig& config, bool bilinear = false);

}  // namespace onn
