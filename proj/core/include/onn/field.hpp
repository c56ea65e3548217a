#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "onn/errors.hpp"

namespace onn {

/// Physical parameters of a simulation run. Lengths are in meters.
struct OpticalConfig {
  double wavelength = 780e-9;  ///< laser wavelength
  double pitch = 8e-6;         ///< pixel pitch of the modulator grid
  int active_size = 300;       ///< side of the block carrying the image
  int padded_size = 600;       ///< side of the zero-padded simulation grid
  double z = 0.100;            ///< free-space propagation distance
};

/// Throws ConfigError unless all values are positive, padded >= active,
/// and padded_size is even (the centered frequency grid needs it).
void validate(const OpticalConfig& config);

/// A two-dimensional grid of complex amplitudes with a physical pixel
/// pitch. Row-major, origin at the top-left; the physical center sits at
/// pixel (width/2, height/2). Intensity at a pixel is |amplitude|^2.
struct ComplexField {
  int width = 0;
  int height = 0;
  double pitch = 0.0;
  std::vector<std::complex<double>> data;

  std::complex<double>& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  const std::complex<double>& at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  std::size_t size() const { return data.size(); }
};

/// A real-valued grid with the same raster conventions as ComplexField.
struct RealGrid {
  int width = 0;
  int height = 0;
  double pitch = 0.0;
  std::vector<double> data;

  double& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  const double& at(int x, int y) const { return data[std::size_t(y) * width + x]; }
};

/// Per-pixel phase values in radians, unconstrained in R. Wrapping to
/// [0, 2pi) happens only on export so optimizer updates stay smooth.
struct PhaseMask {
  int width = 0;
  int height = 0;
  std::vector<double> phase;
};

ComplexField make_field(int width, int height, double pitch);
PhaseMask make_mask(int width, int height, double value = 0.0);

/// Throws ShapeError/ConfigError if dimensions are degenerate, the data
/// length disagrees, or any entry is non-finite.
void validate(const ComplexField& field);

/// output[p] = field[p] * exp(i * mask[p]); magnitudes are untouched.
ComplexField apply_phase_mask(const ComplexField& field, const PhaseMask& mask);

/// Sum of |amplitude|^2 over all pixels.
double total_power(const ComplexField& field);

/// Centers the active block in a padded_size^2 grid of zeros. For odd
/// offsets the top-left corner lands at floor((padded - active) / 2).
ComplexField embed(const ComplexField& active, const OpticalConfig& config);

}  // namespace onn
