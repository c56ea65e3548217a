#include "onn/field.hpp"

#include <cmath>

namespace onn {

void validate(const OpticalConfig& config) {
  if (config.wavelength <= 0) throw ConfigError("wavelength must be positive");
  if (config.pitch <= 0) throw ConfigError("pitch must be positive");
  if (config.active_size < 1) throw ConfigError("active_size must be >= 1");
  if (config.padded_size < config.active_size)
    throw ConfigError("padded_size must be >= active_size");
  if (config.padded_size % 2 != 0) throw ConfigError("padded_size must be even");
  if (config.z <= 0) throw ConfigError("z must be positive");
}

ComplexField make_field(int width, int height, double pitch) {
  if (width < 1 || height < 1) throw ShapeError("field dimensions must be >= 1");
  if (pitch <= 0) throw ConfigError("pitch must be positive");
  ComplexField f;
  f.width = width;
  f.height = height;
  f.pitch = pitch;
  f.data.assign(std::size_t(width) * height, {0.0, 0.0});
  return f;
}

PhaseMask make_mask(int width, int height, double value) {
  if (width < 1 || height < 1) throw ShapeError("mask dimensions must be >= 1");
  PhaseMask m;
  m.width = width;
  m.height = height;
  m.phase.assign(std::size_t(width) * height, value);
  return m;
}

void validate(const ComplexField& field) {
  if (field.width < 1 || field.height < 1) throw ShapeError("field dimensions must be >= 1");
  if (field.pitch <= 0) throw ConfigError("field pitch must be positive");
  if (field.data.size() != std::size_t(field.width) * field.height)
    throw ShapeError("field data length does not match dimensions");
  for (const auto& v : field.data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error("field contains non-finite values");
}

ComplexField apply_phase_mask(const ComplexField& field, const PhaseMask& mask) {
  if (field.width != mask.width || field.height != mask.height)
    throw ShapeError("phase mask dimensions do not match field");
  ComplexField out = field;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] *= std::complex<double>(std::cos(mask.phase[i]), std::sin(mask.phase[i]));
  return out;
}

double total_power(const ComplexField& field) {
  double sum = 0.0;
  for (const auto& v : field.data) sum += v.real() * v.real() + v.imag() * v.imag();
  return sum;
}

ComplexField embed(const ComplexField& active, const OpticalConfig& config) {
  validate(config);
  if (active.width != config.active_size || active.height != config.active_size)
    throw ShapeError("active field does not match config.active_size");
  const int pad = config.padded_size;
  const int off = (pad - config.active_size) / 2;
  ComplexField out = make_field(pad, pad, active.pitch);
  for (int y = 0; y < active.height; ++y)
    for (int x = 0; x < active.width; ++x) out.at(x + off, y + off) = active.at(x, y);
  return out;
}

}  // namespace onn
