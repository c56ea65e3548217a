#pragma once

#include <cstdint>
#include <memory>

#include "onn/detector.hpp"
#include "onn/nonlinearity.hpp"
#include "onn/propagation.hpp"

namespace onn {

/// Trainable phase values plus Adam moment accumulators. The mask is the
/// network's only trainable layer.
struct ModelState {
  PhaseMask mask;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::uint64_t step = 0;
  OpticalConfig config;
  bool nonlinear = false;
  SaturationParams sat;
};

/// Fresh state with a zero mask and zeroed moments.
ModelState make_model(const OpticalConfig& config, bool nonlinear = false,
                      SaturationParams sat = {});

/// Intermediate fields retained by forward for the backward pass.
struct Tape {
  ComplexField masked;      ///< field after the phase mask
  ComplexField propagated;  ///< field after free-space propagation
  ComplexField activated;   ///< after the absorber; empty when linear
  ScoreVector scores{};
  bool nonlinear = false;
  SaturationParams sat;
  std::shared_ptr<const TransferFunction> transfer;
  const DetectorLayout* layout = nullptr;
};

/// One pass through the pipeline: amplitude = sqrt(image) -> phase mask ->
/// propagate over config.z -> optional saturable absorber -> detector
/// readout. `image` must be the preprocessed padded grid. When `tape` is
/// given it retains what backward needs.
ScoreVector forward(const RealGrid& image, const ModelState& state,
                    const DetectorLayout& layout, bool nonlinear, Tape* tape = nullptr);

/// Exact gradient of loss(scores, label) with respect to every mask phase,
/// composed from the layer adjoints recorded on the tape.
std::vector<double> backward(const Tape& tape, int label,
                             LossKind kind = LossKind::kNormalizedIntensity);

}  // namespace onn
