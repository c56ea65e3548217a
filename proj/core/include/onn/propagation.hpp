#pragma once

#include <memory>

#include "onn/field.hpp"

namespace onn {

/// Per-frequency complex factors of the angular spectrum method, laid out
/// in FFT index order. Propagating modes have modulus exactly 1; evanescent
/// modes (f_x^2 + f_y^2 > 1/lambda^2) are zeroed so the adjoint is exact.
struct TransferFunction {
  int width = 0;
  int height = 0;
  double z = 0.0;
  double wavelength = 0.0;
  double pitch = 0.0;
  std::vector<std::complex<double>> values;
};

/// Builds the transfer function for distance z (may be negative). Each
/// frequency pair lives on the grid f in {-N/2, ..., N/2-1} / (N * pitch).
TransferFunction make_transfer(const OpticalConfig& config, double z);

/// output = IFFT( FFT(field) .* tf ). The FFT pair is normalized so the
/// z = 0 transfer is the identity on band-limited fields.
ComplexField propagate(const ComplexField& field, const TransferFunction& tf);

/// Applies the conjugate transfer: the exact adjoint of propagate under
/// the real inner product on (re, im) pairs.
ComplexField propagate_adjoint(const ComplexField& upstream, const TransferFunction& tf);

/// Result of the transfer-function sampling diagnostic.
struct AliasingReport {
  double z = 0.0;
  double z_max = 0.0;  ///< largest distance with adequately sampled phase
  bool pass = false;   ///< |z| <= z_max
};

/// Checks the sampling criterion of the band-limited angular spectrum
/// method for the full grid bandwidth. Diagnostic only: the propagation
/// itself never applies a band limit and relies on zero padding instead.
AliasingReport aliasing_check(const OpticalConfig& config, double z);

/// Cached transfer lookup keyed on the exact (wavelength, pitch, size, z)
/// bits; concurrent reads are safe, insertion is serialized.
std::shared_ptr<const TransferFunction> shared_transfer(const OpticalConfig& config, double z);

}  // namespace onn
