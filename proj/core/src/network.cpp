#include "onn/network.hpp"

#include <cmath>

namespace onn {

ModelState make_model(const OpticalConfig& config, bool nonlinear, SaturationParams sat) {
  validate(config);
  if (nonlinear) validate(sat);
  ModelState state;
  state.mask = make_mask(config.padded_size, config.padded_size);
  state.adam_m.assign(state.mask.phase.size(), 0.0);
  state.adam_v.assign(state.mask.phase.size(), 0.0);
  state.config = config;
  state.nonlinear = nonlinear;
  state.sat = sat;
  return state;
}

ScoreVector forward(const RealGrid& image, const ModelState& state,
                    const DetectorLayout& layout, bool nonlinear, Tape* tape) {
  const int n = state.config.padded_size;
  if (image.width != n || image.height != n)
    throw ShapeError("input grid does not match config.padded_size");
  if (state.mask.width != n || state.mask.height != n)
    throw ShapeError("mask does not match config.padded_size");
  if (layout.grid_width != n || layout.grid_height != n)
    throw ShapeError("detector layout does not match config.padded_size");

  // intensity encoding: the image is what a camera would see, so the field
  // amplitude is its square root, with zero phase
  ComplexField field = make_field(n, n, state.config.pitch);
  for (std::size_t i = 0; i < field.data.size(); ++i) {
    if (!(image.data[i] >= 0.0) || !std::isfinite(image.data[i]))
      throw Error("input intensities must be finite and nonnegative");
    field.data[i] = {std::sqrt(image.data[i]), 0.0};
  }

  ComplexField masked = apply_phase_mask(field, state.mask);
  auto transfer = shared_transfer(state.config, state.config.z);
  ComplexField propagated = propagate(masked, *transfer);

  const ComplexField* readout_field = &propagated;
  ComplexField activated;
  if (nonlinear) {
    activated = apply_saturable(propagated, state.sat);
    readout_field = &activated;
  }
  const ScoreVector scores = readout(*readout_field, layout);

  if (tape) {
    tape->masked = std::move(masked);
    tape->propagated = std::move(propagated);
    tape->activated = std::move(activated);
    tape->scores = scores;
    tape->nonlinear = nonlinear;
    tape->sat = state.sat;
    tape->transfer = transfer;
    tape->layout = &layout;
  }
  return scores;
}

std::vector<double> backward(const Tape& tape, int label, LossKind kind) {
  if (!tape.layout || !tape.transfer) throw Error("backward called with an empty tape");
  if (label < 0 || label >= tape.layout->num_labels) throw Error("label out of range");
  const int w = tape.masked.width, h = tape.masked.height;
  if (tape.propagated.width != w || tape.propagated.height != h ||
      (tape.nonlinear && (tape.activated.width != w || tape.activated.height != h)) ||
      tape.layout->grid_width != w || tape.layout->grid_height != h ||
      tape.transfer->width != w || tape.transfer->height != h)
    throw ShapeError("tape fields are inconsistent; was it produced by forward?");

  const ScoreVector score_grad = loss_gradient(tape.scores, label, kind);

  // readout adjoint: scores[k] = sum |w[p]|^2 over disk k, so the gradient
  // with respect to w[p] in (re, im) coordinates is 2 * g_k * w[p]
  const ComplexField& post = tape.nonlinear ? tape.activated : tape.propagated;
  ComplexField upstream = make_field(w, h, post.pitch);
  for (int k = 0; k < tape.layout->num_labels; ++k) {
    const double gk = 2.0 * score_grad[k];
    for (int idx : tape.layout->masks[k]) upstream.data[idx] = gk * post.data[idx];
  }

  if (tape.nonlinear) upstream = saturable_vjp(tape.propagated, tape.sat, upstream);
  upstream = propagate_adjoint(upstream, *tape.transfer);

  // phase-mask adjoint: dL/dphi[p] = Im(conj(masked[p]) * upstream[p])
  std::vector<double> gradient(std::size_t(w) * h);
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    const std::complex<double> u = tape.masked.data[i];
    const std::complex<double> g = upstream.data[i];
    gradient[i] = u.real() * g.imag() - u.imag() * g.real();
  }
  return gradient;
}

}  // namespace onn
