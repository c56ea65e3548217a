#pragma once

#include <array>

#include "onn/field.hpp"

namespace onn {

/// Ten rasterized disk regions on the output plane. Label k sits at angle
/// 2*pi*k/10 counterclockwise from the +x axis, ring_radius from the field
/// center; label 0 lies on the positive x axis. A pixel belongs to a disk
/// iff its center lies within disk_radius of the label center. The x axis
/// runs along columns and y points up (toward lower row indices).
struct DetectorLayout {
  int num_labels = 10;
  int grid_width = 0;
  int grid_height = 0;
  double pitch = 0.0;
  double disk_radius = 100e-6;
  double ring_radius = 1e-3;
  std::vector<std::array<double, 2>> centers;  ///< per-label (x, y) in meters
  std::vector<std::vector<int>> masks;         ///< per-label flat pixel indices
};

/// Rasterizes the layout; throws GeometryError if the disks leave the
/// frame (ring_radius + disk_radius must stay inside half the aperture)
/// or if any two rasterized disks share a pixel.
DetectorLayout build_detector(const OpticalConfig& config, double disk_radius = 100e-6,
                              double ring_radius = 1e-3);

/// Summed intensities per label.
using ScoreVector = std::array<double, 10>;

/// scores[k] = sum of |field[p]|^2 over label k's disk pixels.
ScoreVector readout(const ComplexField& field, const DetectorLayout& layout);

/// Argmax over the ten scores; ties break toward the lowest label index.
int predict(const ScoreVector& scores);

enum class LossKind {
  kNormalizedIntensity,  ///< -log of the label's share of detected intensity
  kSoftmax,              ///< cross-entropy on softmax over raw scores
};

/// Training loss for one sample. The normalized-intensity form is
/// L = -log((scores[label] + eps) / (sum + 10*eps)) with eps = 1e-12,
/// so a zero field gives ln 10 rather than a singularity.
double loss(const ScoreVector& scores, int label,
            LossKind kind = LossKind::kNormalizedIntensity);

/// dL/dscores for the chosen loss.
ScoreVector loss_gradient(const ScoreVector& scores, int label,
                          LossKind kind = LossKind::kNormalizedIntensity);

}  // namespace onn
