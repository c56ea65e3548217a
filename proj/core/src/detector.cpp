#include "onn/detector.hpp"

#include <cmath>

namespace onn {

DetectorLayout build_detector(const OpticalConfig& config, double disk_radius,
                              double ring_radius) {
  validate(config);
  if (disk_radius <= 0 || ring_radius <= 0)
    throw GeometryError("detector radii must be positive");
  const int n = config.padded_size;
  const double pitch = config.pitch;
  if (ring_radius + disk_radius >= 0.5 * n * pitch)
    throw GeometryError("detector disks do not fit inside the frame");

  DetectorLayout layout;
  layout.grid_width = n;
  layout.grid_height = n;
  layout.pitch = pitch;
  layout.disk_radius = disk_radius;
  layout.ring_radius = ring_radius;
  layout.centers.resize(layout.num_labels);
  layout.masks.resize(layout.num_labels);

  const int cx = n / 2, cy = n / 2;
  std::vector<int> owner(std::size_t(n) * n, -1);
  const double r2 = disk_radius * disk_radius;
  for (int label = 0; label < layout.num_labels; ++label) {
    const double angle = 2.0 * M_PI * label / layout.num_labels;
    const double lx = ring_radius * std::cos(angle);
    const double ly = ring_radius * std::sin(angle);
    layout.centers[label] = {lx, ly};
    // scan only the bounding box of the disk
    const int x_lo = std::max(0, int(std::floor((lx - disk_radius) / pitch)) + cx - 1);
    const int x_hi = std::min(n - 1, int(std::ceil((lx + disk_radius) / pitch)) + cx + 1);
    const int y_lo = std::max(0, cy - int(std::ceil((ly + disk_radius) / pitch)) - 1);
    const int y_hi = std::min(n - 1, cy - int(std::floor((ly - disk_radius) / pitch)) + 1);
    for (int iy = y_lo; iy <= y_hi; ++iy) {
      const double py = (cy - iy) * pitch;
      for (int ix = x_lo; ix <= x_hi; ++ix) {
        const double px = (ix - cx) * pitch;
        const double dx = px - lx, dy = py - ly;
        if (dx * dx + dy * dy <= r2) {
          const int idx = iy * n + ix;
          if (owner[idx] >= 0) throw GeometryError("detector disks overlap");
          owner[idx] = label;
          layout.masks[label].push_back(idx);
        }
      }
    }
  }
  return layout;
}

ScoreVector readout(const ComplexField& field, const DetectorLayout& layout) {
  if (field.width != layout.grid_width || field.height != layout.grid_height)
    throw ShapeError("field dimensions do not match detector layout");
  ScoreVector scores{};
  for (int label = 0; label < layout.num_labels; ++label) {
    double sum = 0.0;
    for (int idx : layout.masks[label]) {
      const auto& v = field.data[idx];
      sum += v.real() * v.real() + v.imag() * v.imag();
    }
    scores[label] = sum;
  }
  return scores;
}

int predict(const ScoreVector& scores) {
  int best = 0;
  for (int k = 1; k < int(scores.size()); ++k)
    if (scores[k] > scores[best]) best = k;
  return best;
}

namespace {
constexpr double kEps = 1e-12;
}

double loss(const ScoreVector& scores, int label, LossKind kind) {
  if (kind == LossKind::kSoftmax) {
    double max_score = scores[0];
    for (double s : scores) max_score = std::max(max_score, s);
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - max_score);
    return -(scores[label] - max_score) + std::log(sum);
  }
  double total = 0.0;
  for (double s : scores) total += s;
  return -std::log((scores[label] + kEps) / (total + 10.0 * kEps));
}

ScoreVector loss_gradient(const ScoreVector& scores, int label, LossKind kind) {
  ScoreVector grad{};
  if (kind == LossKind::kSoftmax) {
    double max_score = scores[0];
    for (double s : scores) max_score = std::max(max_score, s);
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - max_score);
    for (int k = 0; k < int(scores.size()); ++k)
      grad[k] = std::exp(scores[k] - max_score) / sum;
    grad[label] -= 1.0;
    return grad;
  }
  double total = 0.0;
  for (double s : scores) total += s;
  const double inv_total = 1.0 / (total + 10.0 * kEps);
  for (auto& g : grad) g = inv_total;
  grad[label] -= 1.0 / (scores[label] + kEps);
  return grad;
}

}  // namespace onn
