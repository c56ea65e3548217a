#pragma once

#include <string>
#include <vector>

#include "onn/field.hpp"

namespace onn {

/// Parameters of the saturable-absorber transmission curve
///   T(I) = exp(-n_sat / (1 + I/i_sat)).
/// i_sat carries whatever intensity units the fields use (physical
/// microwatt scale or camera pixel-value scale); n_sat is dimensionless.
struct SaturationParams {
  double n_sat = 2.6;
  double i_sat = 0.6;
};

void validate(const SaturationParams& params);

/// One measured input/output intensity pair from the calibration sweep.
struct CalibrationSample {
  double i_in = 0.0;
  double i_out = 0.0;
};

/// T(I) in (0, 1]; strictly increasing in I for n_sat > 0. Rejects I < 0.
double transmission(double i_in, const SaturationParams& params);

/// dT/dI = T * n_sat / (i_sat * (1 + I/i_sat)^2).
double transmission_derivative(double i_in, const SaturationParams& params);

/// output[p] = field[p] * sqrt(T(|field[p]|^2)): the amplitude shrinks,
/// the phase is untouched. Acting on |a|^2 keeps the map smooth in
/// (re, im) everywhere, including zero-amplitude pixels.
ComplexField apply_saturable(const ComplexField& field, const SaturationParams& params);

/// Exact vector-Jacobian product of apply_saturable at `field`, treating
/// each complex pixel as two real coordinates.
ComplexField saturable_vjp(const ComplexField& field, const SaturationParams& params,
                           const ComplexField& upstream);

/// Outcome of fit_saturation.
struct FitResult {
  SaturationParams params;
  double rms_residual = 0.0;
  int n_flagged = 0;  ///< samples with i_out > i_in (kept, not rejected)
  int iterations = 0;
  bool i_sat_identifiable = true;  ///< false when the data show no absorption
};

/// Fewer than 3 samples or too little spread in i_in to pin the curve down.
struct IdentifiabilityError : Error {
  using Error::Error;
};

/// The damped Gauss-Newton loop hit its iteration cap; carries the best iterate.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& message, FitResult best_iterate)
      : Error(message), best(std::move(best_iterate)) {}
  FitResult best;
};

/// Optional override of the coarse seeding grid for the fit.
struct InitGrid {
  std::vector<double> n_sat;  ///< empty: log-spaced over [0.01, 20]
  std::vector<double> i_sat;  ///< empty: log-spaced over [min positive i_in / 10, 10 * max i_in]
};

/// Least-squares fit of (n_sat, i_sat) to measured samples: damped
/// Gauss-Newton started from the best point of a log-spaced grid. The
/// damping doubles when a step increases the residual and halves when it
/// decreases, capped at 200 iterations.
FitResult fit_saturation(const std::vector<CalibrationSample>& samples,
                         const InitGrid& grid = {});

/// Reads two-column numeric text (i_in i_out per line); '#' starts a
/// comment, blank lines are skipped.
std::vector<CalibrationSample> read_calibration_file(const std::string& path);

/// Writes the fit report as key-value text: n_sat, i_sat, rms_residual, n_flagged.
void write_fit_report(const std::string& path, const FitResult& result);

}  // namespace onn
