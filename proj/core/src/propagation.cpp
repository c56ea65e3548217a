#include "onn/propagation.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "fft.hpp"

namespace onn {
namespace {

// Frequency of FFT bin k on a grid of N samples with the given pitch:
// k for k < N/2, k - N otherwise, in cycles per meter.
double bin_frequency(int k, int n, double pitch) {
  const int signed_k = (k < n / 2) ? k : k - n;
  return double(signed_k) / (double(n) * pitch);
}

void check_match(const ComplexField& field, const TransferFunction& tf) {
  if (field.width != tf.width || field.height != tf.height)
    throw ShapeError("field dimensions do not match transfer function");
}

ComplexField apply_transfer(const ComplexField& field, const TransferFunction& tf,
                            bool conjugate) {
  check_match(field, tf);
  const std::size_t n = field.data.size();
  std::vector<std::complex<double>> spectrum(n);
  detail::fft2(field.width, field.height, field.data.data(), spectrum.data());
  if (conjugate) {
    for (std::size_t i = 0; i < n; ++i) spectrum[i] *= std::conj(tf.values[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) spectrum[i] *= tf.values[i];
  }
  ComplexField out = field;
  detail::ifft2(field.width, field.height, spectrum.data(), out.data.data());
  return out;
}

}  // namespace

TransferFunction make_transfer(const OpticalConfig& config, double z) {
  validate(config);
  if (!std::isfinite(z)) throw ConfigError("propagation distance must be finite");
  const int n = config.padded_size;
  const double inv_wl2 = 1.0 / (config.wavelength * config.wavelength);
  TransferFunction tf;
  tf.width = n;
  tf.height = n;
  tf.z = z;
  tf.wavelength = config.wavelength;
  tf.pitch = config.pitch;
  tf.values.resize(std::size_t(n) * n);
  for (int ky = 0; ky < n; ++ky) {
    const double fy = bin_frequency(ky, n, config.pitch);
    for (int kx = 0; kx < n; ++kx) {
      const double fx = bin_frequency(kx, n, config.pitch);
      const double arg = inv_wl2 - fx * fx - fy * fy;
      std::complex<double>& value = tf.values[std::size_t(ky) * n + kx];
      if (arg >= 0.0) {
        const double phase = 2.0 * M_PI * z * std::sqrt(arg);
        value = {std::cos(phase), std::sin(phase)};
      } else {
        value = {0.0, 0.0};
      }
    }
  }
  return tf;
}

ComplexField propagate(const ComplexField& field, const TransferFunction& tf) {
  return apply_transfer(field, tf, false);
}

ComplexField propagate_adjoint(const ComplexField& upstream, const TransferFunction& tf) {
  return apply_transfer(upstream, tf, true);
}

AliasingReport aliasing_check(const OpticalConfig& config, double z) {
  validate(config);
  // The transfer phase 2*pi*z*sqrt(1/wl^2 - f^2) is adequately sampled when
  // its local frequency stays below the Nyquist limit of the frequency grid,
  // i.e. z * f / sqrt(1/wl^2 - f^2) <= 1/(2*df) for every grid frequency f.
  // Solving at the band edge f = 1/(2*pitch) gives the largest usable z.
  // If the grid band reaches the evanescent cutoff the bound collapses to 0.
  AliasingReport report;
  report.z = z;
  const double ratio = 2.0 * config.pitch / config.wavelength;
  if (ratio > 1.0) {
    const double aperture = double(config.padded_size) * config.pitch;
    report.z_max = 0.5 * aperture * std::sqrt(ratio * ratio - 1.0);
  } else {
    report.z_max = 0.0;
  }
  report.pass = std::abs(z) <= report.z_max;
  return report;
}

std::shared_ptr<const TransferFunction> shared_transfer(const OpticalConfig& config, double z) {
  using Key = std::tuple<std::uint64_t, std::uint64_t, int, std::uint64_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const TransferFunction>> cache;

  auto bits = [](double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    return u;
  };
  const Key key{bits(config.wavelength), bits(config.pitch), config.padded_size, bits(z)};

  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto tf = std::make_shared<const TransferFunction>(make_transfer(config, z));
  cache.emplace(key, tf);
  return tf;
}

}  // namespace onn
