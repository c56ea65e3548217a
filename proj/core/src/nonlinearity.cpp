#include "onn/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace onn {

void validate(const SaturationParams& params) {
  if (!(params.n_sat >= 0.0)) throw ConfigError("n_sat must be >= 0");
  if (!(params.i_sat > 0.0)) throw ConfigError("i_sat must be > 0");
}

double transmission(double i_in, const SaturationParams& params) {
  if (i_in < 0.0) throw Error("intensity must be nonnegative");
  return std::exp(-params.n_sat / (1.0 + i_in / params.i_sat));
}

double transmission_derivative(double i_in, const SaturationParams& params) {
  const double u = 1.0 + i_in / params.i_sat;
  return std::exp(-params.n_sat / u) * params.n_sat / (params.i_sat * u * u);
}

ComplexField apply_saturable(const ComplexField& field, const SaturationParams& params) {
  validate(params);
  ComplexField out = field;
  for (auto& v : out.data) {
    const double intensity = v.real() * v.real() + v.imag() * v.imag();
    v *= std::sqrt(transmission(intensity, params));
  }
  return out;
}

ComplexField saturable_vjp(const ComplexField& field, const SaturationParams& params,
                           const ComplexField& upstream) {
  if (field.width != upstream.width || field.height != upstream.height)
    throw ShapeError("upstream dimensions do not match field");
  validate(params);
  // Per pixel, w = v * r(I) with I = |v|^2 and r = sqrt(T). In real
  // coordinates the Jacobian-transpose action on the upstream gradient g is
  //   vbar = g * r + 2 * r'(I) * Re(conj(g) * v) * v,
  // with r'(I) = T'(I) / (2 * sqrt(T)); finite at I = 0 since T > 0.
  ComplexField out = field;
  for (std::size_t i = 0; i < field.data.size(); ++i) {
    const std::complex<double> v = field.data[i];
    const std::complex<double> g = upstream.data[i];
    const double intensity = v.real() * v.real() + v.imag() * v.imag();
    const double r = std::sqrt(transmission(intensity, params));
    const double rp = transmission_derivative(intensity, params) / (2.0 * r);
    const double align = g.real() * v.real() + g.imag() * v.imag();
    out.data[i] = g * r + (2.0 * rp * align) * v;
  }
  return out;
}

namespace {

struct Objective {
  const std::vector<CalibrationSample>& samples;

  // residuals r_j = i_out_j - i_in_j * T(i_in_j) and the Jacobian of the
  // model in log-parameter coordinates (keeps both parameters positive)
  double ssr(double n_sat, double i_sat) const {
    double sum = 0.0;
    for (const auto& s : samples) {
      const double t = std::exp(-n_sat / (1.0 + s.i_in / i_sat));
      const double r = s.i_out - s.i_in * t;
      sum += r * r;
    }
    return sum;
  }

  void jacobian(double n_sat, double i_sat, std::vector<double>& residual,
                std::vector<double>& j_logn, std::vector<double>& j_logs) const {
    residual.resize(samples.size());
    j_logn.resize(samples.size());
    j_logs.resize(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const double x = samples[k].i_in;
      const double u = 1.0 + x / i_sat;
      const double f = x * std::exp(-n_sat / u);
      residual[k] = samples[k].i_out - f;
      j_logn[k] = -f * n_sat / u;                          // d f / d log(n_sat)
      j_logs[k] = -f * n_sat * (x / i_sat) / (u * u);      // d f / d log(i_sat)
    }
  }
};

}  // namespace

FitResult fit_saturation(const std::vector<CalibrationSample>& samples, const InitGrid& grid) {
  if (samples.size() < 3)
    throw IdentifiabilityError("need at least 3 calibration samples");
  double min_pos = std::numeric_limits<double>::infinity();
  double max_in = 0.0;
  int n_flagged = 0;
  for (const auto& s : samples) {
    if (s.i_in < 0.0 || s.i_out < 0.0)
      throw Error("calibration intensities must be nonnegative");
    if (s.i_in > 0.0) min_pos = std::min(min_pos, s.i_in);
    max_in = std::max(max_in, s.i_in);
    if (s.i_out > s.i_in) ++n_flagged;
  }
  if (!std::isfinite(min_pos) || max_in < 4.0 * min_pos)
    throw IdentifiabilityError("calibration sweep must span at least a factor of 4 in i_in");

  // Degenerate no-absorption data: T == 1 fits exactly and i_sat is free.
  bool absorbed = false;
  for (const auto& s : samples)
    if (s.i_out < s.i_in * (1.0 - 1e-12)) absorbed = true;
  if (!absorbed) {
    FitResult result;
    result.params = {0.0, max_in};
    result.rms_residual = std::sqrt(Objective{samples}.ssr(0.0, max_in) / samples.size());
    result.n_flagged = n_flagged;
    result.i_sat_identifiable = false;
    return result;
  }

  const Objective objective{samples};

  auto log_spaced = [](double lo, double hi, int count) {
    std::vector<double> values(count);
    for (int i = 0; i < count; ++i)
      values[i] = lo * std::pow(hi / lo, double(i) / (count - 1));
    return values;
  };
  const std::vector<double> n_grid =
      grid.n_sat.empty() ? log_spaced(0.01, 20.0, 25) : grid.n_sat;
  const std::vector<double> s_grid =
      grid.i_sat.empty() ? log_spaced(min_pos / 10.0, 10.0 * max_in, 25) : grid.i_sat;

  double best_n = n_grid.front(), best_s = s_grid.front();
  double best_ssr = std::numeric_limits<double>::infinity();
  for (double n : n_grid)
    for (double s : s_grid) {
      const double ssr = objective.ssr(n, s);
      if (ssr < best_ssr) {
        best_ssr = ssr;
        best_n = n;
        best_s = s;
      }
    }

  // Levenberg-damped Gauss-Newton on (log n_sat, log i_sat).
  double log_n = std::log(best_n), log_s = std::log(best_s);
  double ssr = best_ssr;
  double damping = 1e-3;
  std::vector<double> residual, j_n, j_s;
  int iterations = 0;
  bool converged = false;
  const int max_iterations = 200;

  while (iterations < max_iterations) {
    ++iterations;
    const double n_sat = std::exp(log_n), i_sat = std::exp(log_s);
    if (n_sat < 1e-12) {  // slid to the absorption-free boundary
      FitResult result;
      result.params = {0.0, i_sat};
      result.rms_residual = std::sqrt(objective.ssr(0.0, i_sat) / samples.size());
      result.n_flagged = n_flagged;
      result.iterations = iterations;
      result.i_sat_identifiable = false;
      return result;
    }
    objective.jacobian(n_sat, i_sat, residual, j_n, j_s);
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t k = 0; k < residual.size(); ++k) {
      a11 += j_n[k] * j_n[k];
      a12 += j_n[k] * j_s[k];
      a22 += j_s[k] * j_s[k];
      b1 += j_n[k] * residual[k];
      b2 += j_s[k] * residual[k];
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 60 && !stepped; ++attempt) {
      const double d11 = a11 * (1.0 + damping), d22 = a22 * (1.0 + damping);
      const double det = d11 * d22 - a12 * a12;
      if (det == 0.0 || !std::isfinite(det)) {
        damping *= 2.0;
        continue;
      }
      const double step_n = (b1 * d22 - b2 * a12) / det;
      const double step_s = (b2 * d11 - b1 * a12) / det;
      const double trial_ssr = objective.ssr(std::exp(log_n + step_n), std::exp(log_s + step_s));
      if (trial_ssr <= ssr) {
        log_n += step_n;
        log_s += step_s;
        damping = std::max(damping * 0.5, 1e-12);
        const double improvement = ssr - trial_ssr;
        const double step_norm = std::sqrt(step_n * step_n + step_s * step_s);
        ssr = trial_ssr;
        stepped = true;
        if (step_norm < 1e-11 || improvement <= 1e-30 * (1.0 + ssr)) converged = true;
      } else {
        damping *= 2.0;
      }
    }
    if (!stepped) converged = true;  // no downhill direction left at any damping
    if (converged) break;
  }

  FitResult result;
  result.params = {std::exp(log_n), std::exp(log_s)};
  result.rms_residual = std::sqrt(ssr / samples.size());
  result.n_flagged = n_flagged;
  result.iterations = iterations;
  if (!converged)
    throw ConvergenceError("saturation fit did not converge in 200 iterations", result);
  return result;
}

std::vector<CalibrationSample> read_calibration_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open calibration file: " + path);
  std::vector<CalibrationSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream fields(line);
    double i_in, i_out;
    std::string extra;
    if (!(fields >> i_in >> i_out) || (fields >> extra))
      throw FormatError(path + ":" + std::to_string(line_no) +
                        ": expected two numeric columns");
    samples.push_back({i_in, i_out});
  }
  return samples;
}

void write_fit_report(const std::string& path, const FitResult& result) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write fit report: " + path);
  out.precision(17);
  out << "n_sat = " << result.params.n_sat << "\n"
      << "i_sat = " << result.params.i_sat << "\n"
      << "rms_residual = " << result.rms_residual << "\n"
      << "n_flagged = " << result.n_flagged << "\n";
}

}  // namespace onn
