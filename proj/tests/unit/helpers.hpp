#pragma once

#include <complex>
#include <random>

#include "onn/field.hpp"
#include "onn/propagation.hpp"
#include "onn/rng.hpp"

namespace onn::testing {

/// Small geometry that keeps unit tests fast. z stays below the grid's
/// aliasing limit for sizes >= 16 at 8 um pitch.
inline OpticalConfig tiny_config(std::size_t size, double z = 1e-3) {
  OpticalConfig config;
  config.active_size = size > 2 ? size - 2 : size;
  config.padded_size = size;
  config.z = z;
  return config;
}

inline ComplexField random_field(std::size_t size, std::uint64_t seed,
                                 double pitch = 8e-6) {
  std::mt19937_64 rng(seed);
  ComplexField field;
  field.width = size;
  field.height = size;
  field.pitch = pitch;
  field.data.resize(size * size);
  for (auto& v : field.data)
    v = {2.0 * rand_unit(rng) - 1.0, 2.0 * rand_unit(rng) - 1.0};
  return field;
}

/// Strips evanescent content by propagating over z = 0.
inline ComplexField band_limit(const ComplexField& field, const OpticalConfig& config) {
  return propagate(field, make_transfer(config, 0.0));
}

/// Real inner product treating each complex pixel as two real coordinates.
inline double inner(const ComplexField& a, const ComplexField& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    sum += a.data[i].real() * b.data[i].real() + a.data[i].imag() * b.data[i].imag();
  return sum;
}

inline double rel_error(double got, double want) {
  const double scale = std::max(std::abs(got), std::abs(want));
  return scale == 0.0 ? 0.0 : std::abs(got - want) / scale;
}

}  // namespace onn::testing
