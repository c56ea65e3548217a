#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "onn/errors.hpp"
#include "onn/nonlinearity.hpp"
#include "onn/rng.hpp"

using namespace onn;
using namespace onn::testing;

namespace {

/// Deterministic standard normal via Box-Muller on our own uniform bits.
double rand_normal(std::mt19937_64& rng) {
  const double u1 = rand_unit(rng) + 1e-300;
  const double u2 = rand_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<CalibrationSample> synthesize(const SaturationParams& truth,
                                          double i_max, int count,
                                          double noise = 0.0,
                                          std::uint64_t seed = 5) {
  std::mt19937_64 rng(seed);
  std::vector<CalibrationSample> samples;
  for (int k = 0; k < count; ++k) {
    const double i_in = i_max * (k + 1) / count;
    double i_out = i_in * transmission(i_in, truth);
    if (noise > 0.0) i_out *= 1.0 + noise * rand_normal(rng);
    samples.push_back({i_in, i_out});
  }
  return samples;
}

}  // namespace

TEST_CASE("transmission at the reference operating points") {
  const SaturationParams params{2.6, 0.6};
  CHECK(transmission(0.0, params) == doctest::Approx(0.07427357821433388).epsilon(1e-15));
  CHECK(transmission(params.i_sat, params) ==
        doctest::Approx(0.2725317930340126).epsilon(1e-15));
  // far above saturation the medium is transparent
  CHECK(transmission(1e12, params) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(transmission(-1.0, params), Error);
}

TEST_CASE("transmission bounds and strict monotonicity over random intensities") {
  const SaturationParams params{2.6, 0.6};
  const double floor = std::exp(-params.n_sat);
  std::mt19937_64 rng(17);
  double previous_i = 0.0;
  double previous_t = transmission(0.0, params);
  for (int k = 0; k < 100000; ++k) {
    const double i = previous_i + 1e-4 + 0.05 * rand_unit(rng);
    const double t = transmission(i, params);
    CHECK(t >= floor);
    CHECK(t <= 1.0);
    CHECK(t > previous_t);  // strictly increasing
    previous_i = i;
    previous_t = t;
  }
}

TEST_CASE("transmission derivative matches finite differences") {
  const SaturationParams params{1.7, 0.9};
  for (double i : {0.0, 0.3, 0.9, 2.5, 40.0}) {
    const double h = 1e-6 * std::max(1.0, i);
    const double fd = (transmission(i + h, params) -
                       transmission(std::max(0.0, i - h), params)) /
                      (i - h < 0.0 ? h : 2.0 * h);
    CHECK(transmission_derivative(i, params) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("saturation parameter validation") {
  CHECK_NOTHROW(validate(SaturationParams{0.0, 1.0}));
  CHECK_THROWS_AS(validate(SaturationParams{-0.1, 1.0}), ConfigError);
  CHECK_THROWS_AS(validate(SaturationParams{1.0, 0.0}), ConfigError);
}

TEST_CASE("apply_saturable: zero field, identity at n_sat = 0, Eq.-value pixel") {
  const SaturationParams params{2.6, 0.6};

  ComplexField zero = make_field(4, 4, 8e-6);
  const ComplexField zero_out = apply_saturable(zero, params);
  for (const auto& v : zero_out.data) CHECK(v == std::complex<double>(0.0, 0.0));

  const ComplexField field = random_field(8, 23);
  const ComplexField identity = apply_saturable(field, SaturationParams{0.0, 0.6});
  for (std::size_t i = 0; i < field.data.size(); ++i)
    CHECK(identity.data[i] == field.data[i]);

  ComplexField pixel = make_field(2, 2, 8e-6);
  const double amplitude = std::sqrt(params.i_sat);
  pixel.at(0, 0) = std::polar(amplitude, 0.8);
  const ComplexField out = apply_saturable(pixel, params);
  CHECK(std::norm(out.at(0, 0)) ==
        doctest::Approx(params.i_sat * 0.2725317930340126).epsilon(1e-12));
  CHECK(std::arg(out.at(0, 0)) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("apply_saturable never raises amplitude or rotates phase") {
  const SaturationParams params{2.6, 0.6};
  const ComplexField field = random_field(32, 29);
  const ComplexField out = apply_saturable(field, params);
  for (std::size_t i = 0; i < field.data.size(); ++i) {
    CHECK(std::abs(out.data[i]) <= std::abs(field.data[i]) * (1.0 + 1e-15));
    if (std::abs(field.data[i]) > 0.0) {
      // phases equal: the output is a nonnegative real multiple of the input
      const std::complex<double> cross =
          out.data[i] * std::conj(field.data[i]);
      CHECK(std::abs(cross.imag()) <= 1e-15 * std::abs(cross));
      CHECK(cross.real() >= 0.0);
    }
  }
}

TEST_CASE("intensity map i T(i) never folds over") {
  const SaturationParams params{5.0, 0.3};
  double previous = 0.0;
  for (int k = 1; k <= 10000; ++k) {
    const double i = 1e-3 * k;
    const double mapped = i * transmission(i, params);
    CHECK(mapped > previous);
    previous = mapped;
  }
}

TEST_CASE("saturable_vjp is the identity when n_sat = 0") {
  const ComplexField field = random_field(8, 37);
  const ComplexField upstream = random_field(8, 38);
  const ComplexField vjp =
      saturable_vjp(field, SaturationParams{0.0, 1.0}, upstream);
  for (std::size_t i = 0; i < upstream.data.size(); ++i)
    CHECK(std::abs(vjp.data[i] - upstream.data[i]) < 1e-15);
}

TEST_CASE("saturable_vjp at a zero field is the small-signal transmission") {
  const SaturationParams params{2.6, 0.6};
  ComplexField zero = make_field(4, 4, 8e-6);
  const ComplexField upstream = random_field(4, 39);
  const ComplexField vjp = saturable_vjp(zero, params, upstream);
  const double gain = std::sqrt(std::exp(-params.n_sat));
  for (std::size_t i = 0; i < upstream.data.size(); ++i)
    CHECK(std::abs(vjp.data[i] - upstream.data[i] * gain) < 1e-15);
}

TEST_CASE("saturable_vjp matches central finite differences") {
  // scalar loss: L(field) = Re<upstream, apply_saturable(field)>
  const SaturationParams params{2.6, 0.6};
  const ComplexField field = random_field(8, 41);
  const ComplexField upstream = random_field(8, 42);
  const ComplexField vjp = saturable_vjp(field, params, upstream);

  auto loss_at = [&](const ComplexField& f) {
    const ComplexField activated = apply_saturable(f, params);
    double sum = 0.0;
    for (std::size_t i = 0; i < f.data.size(); ++i)
      sum += upstream.data[i].real() * activated.data[i].real() +
             upstream.data[i].imag() * activated.data[i].imag();
    return sum;
  };

  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < field.data.size(); ++i) {
    for (int part = 0; part < 2; ++part) {
      ComplexField plus = field, minus = field;
      const std::complex<double> delta = part == 0
                                             ? std::complex<double>(h, 0.0)
                                             : std::complex<double>(0.0, h);
      plus.data[i] += delta;
      minus.data[i] -= delta;
      const double fd = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
      const double analytic = part == 0 ? vjp.data[i].real() : vjp.data[i].imag();
      if (std::abs(fd) > 1e-9) worst = std::max(worst, rel_error(analytic, fd));
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("saturable_vjp rejects shape mismatch") {
  const ComplexField field = random_field(8, 43);
  const ComplexField upstream = random_field(4, 44);
  CHECK_THROWS_AS(saturable_vjp(field, SaturationParams{1.0, 1.0}, upstream),
                  ShapeError);
}

TEST_CASE("fit recovers the microwatt-scale parameters from noiseless data") {
  const SaturationParams truth{2.6, 0.6};
  const FitResult fit = fit_saturation(synthesize(truth, 6.0, 50));
  CHECK(rel_error(fit.params.n_sat, truth.n_sat) < 1e-6);
  CHECK(rel_error(fit.params.i_sat, truth.i_sat) < 1e-6);
  CHECK(fit.rms_residual < 1e-10);
  CHECK(fit.n_flagged == 0);
  CHECK(fit.i_sat_identifiable);
}

TEST_CASE("fit recovers the camera-count-scale parameters") {
  const SaturationParams truth{1.3, 520.0};
  const FitResult fit = fit_saturation(synthesize(truth, 2000.0, 50));
  CHECK(rel_error(fit.params.n_sat, truth.n_sat) < 1e-6);
  CHECK(rel_error(fit.params.i_sat, truth.i_sat) < 1e-6);
}

TEST_CASE("fit tolerates 1 percent multiplicative noise to 5 percent error") {
  // The objective weights residuals in linear intensity, so with
  // multiplicative noise the sweep must not extend deep into saturation:
  // points far above i_sat carry the largest absolute noise but no curve
  // information. Topping out at 3 * i_sat keeps the estimator sharp.
  const SaturationParams truth{2.6, 0.6};
  const FitResult fit = fit_saturation(synthesize(truth, 1.8, 400, 0.01, 99));
  CHECK(rel_error(fit.params.n_sat, truth.n_sat) < 0.05);
  CHECK(rel_error(fit.params.i_sat, truth.i_sat) < 0.05);
}

TEST_CASE("fit identifiability guards") {
  const SaturationParams truth{2.6, 0.6};
  SUBCASE("fewer than 3 samples") {
    CHECK_THROWS_AS(fit_saturation(synthesize(truth, 6.0, 2)), IdentifiabilityError);
  }
  SUBCASE("narrow intensity span") {
    std::vector<CalibrationSample> narrow;
    for (int k = 0; k < 10; ++k) {
      const double i_in = 1.0 + 0.01 * k;  // 1.09x span, far below 4x
      narrow.push_back({i_in, i_in * transmission(i_in, truth)});
    }
    CHECK_THROWS_AS(fit_saturation(narrow), IdentifiabilityError);
  }
}

TEST_CASE("absorption-free data pin n_sat to zero and flag i_sat") {
  std::vector<CalibrationSample> clear;
  for (int k = 1; k <= 20; ++k) clear.push_back({0.1 * k, 0.1 * k});
  const FitResult fit = fit_saturation(clear);
  CHECK(fit.params.n_sat <= 1e-12);
  CHECK_FALSE(fit.i_sat_identifiable);
}

TEST_CASE("samples above unity transmission are kept and counted") {
  const SaturationParams truth{2.6, 0.6};
  std::vector<CalibrationSample> samples = synthesize(truth, 6.0, 50);
  samples[7].i_out = samples[7].i_in * 1.02;   // camera noise artifacts
  samples[31].i_out = samples[31].i_in * 1.01;
  const FitResult fit = fit_saturation(samples);
  CHECK(fit.n_flagged == 2);
}

TEST_CASE("calibration file round trip with comments and blank lines") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "onn_cal_test";
  fs::create_directories(dir);
  const std::string path = (dir / "sweep.txt").string();
  {
    std::ofstream out(path);
    out << "# calibration sweep\n\n";
    out << "0.5 0.1\n";
    out << "1.0 0.4   # trailing comment\n";
    out << "  2.5\t1.9 \n";
  }
  const std::vector<CalibrationSample> samples = read_calibration_file(path);
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].i_in == 0.5);
  CHECK(samples[0].i_out == 0.1);
  CHECK(samples[2].i_in == 2.5);
  CHECK(samples[2].i_out == 1.9);

  SUBCASE("malformed line reports its number") {
    const std::string bad_path = (dir / "bad.txt").string();
    {
      std::ofstream out(bad_path);
      out << "0.5 0.1\nnot numbers here\n";
    }
    try {
      read_calibration_file(bad_path);
      FAIL("expected FormatError");
    } catch (const FormatError& error) {
      CHECK(std::string(error.what()).find(":2") != std::string::npos);
    }
  }
}

TEST_CASE("fit report contains the key-value summary") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "onn_cal_test";
  fs::create_directories(dir);
  const std::string path = (dir / "fit.txt").string();
  const SaturationParams truth{1.3, 520.0};
  write_fit_report(path, fit_saturation(synthesize(truth, 2000.0, 50)));

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("n_sat") != std::string::npos);
  CHECK(text.find("i_sat") != std::string::npos);
  CHECK(text.find("rms_residual") != std::string::npos);
  CHECK(text.find("n_flagged") != std::string::npos);
}
