#include "onn/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "onn/errors.hpp"

namespace onn {

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw FormatError(path + ": truncated header");
  return (std::uint32_t(bytes[0]) << 24) | (std::uint32_t(bytes[1]) << 16) |
         (std::uint32_t(bytes[2]) << 8) | std::uint32_t(bytes[3]);
}

std::ifstream open_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path + ": cannot open");
  return in;
}

}  // namespace

RawDataset load_idx(const std::string& image_path, const std::string& label_path) {
  RawDataset data;

  {
    std::ifstream in = open_binary(image_path);
    const std::uint32_t magic = read_be32(in, image_path);
    if (magic != 2051)
      throw FormatError(image_path + ": bad image magic " + std::to_string(magic));
    data.count = read_be32(in, image_path);
    data.rows = read_be32(in, image_path);
    data.cols = read_be32(in, image_path);
    if (data.rows != 28 || data.cols != 28)
      throw FormatError(image_path + ": expected 28x28 images, got " +
                        std::to_string(data.rows) + "x" + std::to_string(data.cols));
    data.pixels.resize(data.count * data.rows * data.cols);
    if (!in.read(reinterpret_cast<char*>(data.pixels.data()),
                 std::streamsize(data.pixels.size())))
      throw FormatError(image_path + ": truncated pixel data");
  }

  {
    std::ifstream in = open_binary(label_path);
    const std::uint32_t magic = read_be32(in, label_path);
    if (magic != 2049)
      throw FormatError(label_path + ": bad label magic " + std::to_string(magic));
    const std::uint32_t count = read_be32(in, label_path);
    if (count != data.count)
      throw FormatError(label_path + ": label count " + std::to_string(count) +
                        " does not match image count " + std::to_string(data.count));
    data.labels.resize(count);
    if (!in.read(reinterpret_cast<char*>(data.labels.data()),
                 std::streamsize(data.labels.size())))
      throw FormatError(label_path + ": truncated label data");
  }

  for (std::size_t i = 0; i < data.labels.size(); ++i)
    if (data.labels[i] > 9)
      throw FormatError(label_path + ": label " + std::to_string(int(data.labels[i])) +
                        " at index " + std::to_string(i) + " out of range");
  return data;
}

RealGrid preprocess(const RawDataset& data, std::size_t index,
                    const OpticalConfig& config, bool bilinear) {
  if (index >= data.count)
    throw ShapeError("sample index " + std::to_string(index) + " out of range");
  validate(config);

  const std::size_t n = std::size_t(config.active_size);
  const std::uint8_t* src = data.pixels.data() + index * data.rows * data.cols;

  // Upscale 28x28 -> active_size^2 in [0,1].
  std::vector<double> active(n * n);
  if (bilinear) {
    const double scale_y = double(data.rows) / double(n);
    const double scale_x = double(data.cols) / double(n);
    for (std::size_t y = 0; y < n; ++y) {
      const double sy = (double(y) + 0.5) * scale_y - 0.5;
      const double cy = std::clamp(sy, 0.0, double(data.rows - 1));
      const std::size_t y0 = std::size_t(cy);
      const std::size_t y1 = std::min(y0 + 1, data.rows - 1);
      const double fy = cy - double(y0);
      for (std::size_t x = 0; x < n; ++x) {
        const double sx = (double(x) + 0.5) * scale_x - 0.5;
        const double cx = std::clamp(sx, 0.0, double(data.cols - 1));
        const std::size_t x0 = std::size_t(cx);
        const std::size_t x1 = std::min(x0 + 1, data.cols - 1);
        const double fx = cx - double(x0);
        const double top = double(src[y0 * data.cols + x0]) * (1.0 - fx) +
                           double(src[y0 * data.cols + x1]) * fx;
        const double bottom = double(src[y1 * data.cols + x0]) * (1.0 - fx) +
                              double(src[y1 * data.cols + x1]) * fx;
        active[y * n + x] = (top * (1.0 - fy) + bottom * fy) / 255.0;
      }
    }
  } else {
    for (std::size_t y = 0; y < n; ++y) {
      const std::size_t sy = (y * data.rows) / n;
      for (std::size_t x = 0; x < n; ++x) {
        const std::size_t sx = (x * data.cols) / n;
        active[y * n + x] = double(src[sy * data.cols + sx]) / 255.0;
      }
    }
  }

  double peak = 0.0;
  for (double v : active) peak = std::max(peak, v);
  if (peak > 0.0)
    for (double& v : active) v /= peak;

  // Embed centered in the padded grid.
  RealGrid grid;
  grid.width = config.padded_size;
  grid.height = config.padded_size;
  grid.pitch = config.pitch;
  grid.data.assign(std::size_t(grid.width) * grid.height, 0.0);
  const std::size_t offset = (std::size_t(config.padded_size) - n) / 2;
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x)
      grid.data[(y + offset) * grid.width + (x + offset)] = active[y * n + x];
  return grid;
}

}  // namespace onn
