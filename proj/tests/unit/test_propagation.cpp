#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "onn/errors.hpp"
#include "onn/propagation.hpp"

using namespace onn;
using namespace onn::testing;

TEST_CASE("transfer function values: DC phase, evanescent cut, modulus bound") {
  OpticalConfig config = tiny_config(32);
  const double z = 1e-3;
  const TransferFunction tf = make_transfer(config, z);
  REQUIRE(tf.values.size() == 32 * 32);

  // DC bin sits at index 0 in FFT order and must carry exp(i 2 pi z / lambda).
  const double dc_phase =
      2.0 * M_PI * z * std::sqrt(1.0 / (config.wavelength * config.wavelength));
  CHECK(tf.values[0].real() == doctest::Approx(std::cos(dc_phase)).epsilon(1e-12));
  CHECK(tf.values[0].imag() == doctest::Approx(std::sin(dc_phase)).epsilon(1e-12));

  int evanescent = 0;
  for (const auto& v : tf.values) {
    CHECK(std::abs(v) <= 1.0 + 1e-15);
    if (v == std::complex<double>(0.0, 0.0)) ++evanescent;
  }
  // pitch 8 um at 780 nm: the grid corner frequency sqrt(2)/(2 pitch) is
  // below 1/lambda, so nothing is evanescent on this grid
  CHECK(evanescent == 0);

  SUBCASE("coarse grid produces evanescent zeros") {
    config.pitch = 500e-9;  // corner frequency now exceeds 1/lambda
    const TransferFunction coarse = make_transfer(config, z);
    int zeros = 0;
    for (const auto& v : coarse.values)
      if (v == std::complex<double>(0.0, 0.0)) ++zeros;
    CHECK(zeros > 0);
  }
}

TEST_CASE("transfer at z = 0 is one on propagating modes") {
  const OpticalConfig config = tiny_config(16);
  const TransferFunction tf = make_transfer(config, 0.0);
  for (const auto& v : tf.values)
    CHECK(std::abs(v - std::complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("transfer at +z and -z are conjugate on propagating modes") {
  const OpticalConfig config = tiny_config(16);
  const TransferFunction fwd = make_transfer(config, 2e-4);
  const TransferFunction bwd = make_transfer(config, -2e-4);
  for (std::size_t i = 0; i < fwd.values.size(); ++i) {
    const std::complex<double> product = fwd.values[i] * bwd.values[i];
    CHECK(std::abs(product - std::complex<double>(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("propagate over z = 0 is the identity on band-limited fields") {
  const OpticalConfig config = tiny_config(32);
  const ComplexField field = band_limit(random_field(32, 21), config);
  const ComplexField out = propagate(field, make_transfer(config, 0.0));
  for (std::size_t i = 0; i < field.data.size(); ++i)
    CHECK(std::abs(out.data[i] - field.data[i]) <=
          1e-12 * std::max(1.0, std::abs(field.data[i])));
}

TEST_CASE("uniform plane wave is the DC eigenmode") {
  const OpticalConfig config = tiny_config(32);
  const double z = 1e-3;
  ComplexField wave = make_field(32, 32, config.pitch);
  for (auto& v : wave.data) v = {1.0, 0.0};

  const ComplexField out = propagate(wave, make_transfer(config, z));
  const double phase =
      2.0 * M_PI * z * std::sqrt(1.0 / (config.wavelength * config.wavelength));
  const std::complex<double> expected(std::cos(phase), std::sin(phase));
  for (const auto& v : out.data) CHECK(std::abs(v - expected) < 1e-10);

  // eigenmode phase agrees with the direct 2 pi z / lambda form at a scale
  // where one-ulp differences in the square root cannot matter
  const double z_small = 1e-6;
  const ComplexField out_small = propagate(wave, make_transfer(config, z_small));
  const std::complex<double> direct(std::cos(2.0 * M_PI * z_small / config.wavelength),
                                    std::sin(2.0 * M_PI * z_small / config.wavelength));
  for (const auto& v : out_small.data) CHECK(std::abs(v - direct) < 1e-10);
}

TEST_CASE("Gaussian beam waist grows by the analytic formula") {
  OpticalConfig config;  // full 600 grid, 8 um pitch, 780 nm
  const double w0 = 200e-6;
  const double z = 0.100;
  ComplexField beam = make_field(600, 600, config.pitch);
  const int c = 300;
  for (int y = 0; y < 600; ++y)
    for (int x = 0; x < 600; ++x) {
      const double px = (x - c) * config.pitch;
      const double py = (y - c) * config.pitch;
      beam.at(x, y) = std::exp(-(px * px + py * py) / (w0 * w0));
    }

  const ComplexField out = propagate(beam, make_transfer(config, z));

  // For intensity exp(-2 r^2 / w^2), <x^2> = w^2 / 4.
  double sum = 0.0, sum_x2 = 0.0;
  for (int y = 0; y < 600; ++y)
    for (int x = 0; x < 600; ++x) {
      const double intensity = std::norm(out.at(x, y));
      const double px = (x - c) * config.pitch;
      sum += intensity;
      sum_x2 += intensity * px * px;
    }
  const double w_measured = 2.0 * std::sqrt(sum_x2 / sum);
  const double w_expected =
      w0 * std::sqrt(1.0 + std::pow(z * config.wavelength / (M_PI * w0 * w0), 2.0));
  CHECK(w_expected == doctest::Approx(2.3539531013170073e-4).epsilon(1e-12));
  CHECK(std::abs(w_measured - w_expected) / w_expected < 0.01);
}

TEST_CASE("adjoint inner-product identity across grid sizes") {
  for (int size : {16, 32, 64}) {
    OpticalConfig config = tiny_config(std::size_t(size));
    const TransferFunction tf = make_transfer(config, 1e-3);
    const ComplexField x = random_field(std::size_t(size), 31 + std::uint64_t(size));
    const ComplexField y = random_field(std::size_t(size), 47 + std::uint64_t(size));
    const double lhs = inner(propagate(x, tf), y);
    const double rhs = inner(x, propagate_adjoint(y, tf));
    CHECK(rel_error(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("adjoint inner-product identity at the full 600 grid") {
  OpticalConfig config;
  const TransferFunction tf = make_transfer(config, config.z);
  const ComplexField x = random_field(600, 61);
  const ComplexField y = random_field(600, 62);
  CHECK(rel_error(inner(propagate(x, tf), y), inner(x, propagate_adjoint(y, tf))) <
        1e-10);
}

TEST_CASE("adjoint round trip restores band-limited fields") {
  const OpticalConfig config = tiny_config(32);
  const TransferFunction tf = make_transfer(config, 1e-3);
  const ComplexField x = band_limit(random_field(32, 71), config);
  const ComplexField back = propagate_adjoint(propagate(x, tf), tf);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    CHECK(std::abs(back.data[i] - x.data[i]) < 1e-12);
}

TEST_CASE("power is conserved for evanescent-free fields") {
  const OpticalConfig config = tiny_config(32);
  const ComplexField field = band_limit(random_field(32, 81), config);
  const ComplexField out = propagate(field, make_transfer(config, 1e-3));
  CHECK(rel_error(total_power(out), total_power(field)) < 1e-10);
}

TEST_CASE("power never increases") {
  OpticalConfig config = tiny_config(32);
  config.pitch = 500e-9;  // force evanescent loss
  const ComplexField field = random_field(32, 91, config.pitch);
  const ComplexField out = propagate(field, make_transfer(config, 1e-3));
  CHECK(total_power(out) <= total_power(field) * (1.0 + 1e-10));
  CHECK(total_power(out) < total_power(field));  // some content was evanescent
}

TEST_CASE("propagation composes: z1 then z2 equals z1 + z2") {
  const OpticalConfig config = tiny_config(32);
  const ComplexField field = band_limit(random_field(32, 101), config);
  const ComplexField two_step = propagate(propagate(field, make_transfer(config, 4e-4)),
                                          make_transfer(config, 6e-4));
  const ComplexField one_step = propagate(field, make_transfer(config, 1e-3));
  for (std::size_t i = 0; i < field.data.size(); ++i)
    CHECK(std::abs(two_step.data[i] - one_step.data[i]) <=
          1e-9 * std::max(1.0, std::abs(one_step.data[i])));
}

TEST_CASE("propagation is linear") {
  const OpticalConfig config = tiny_config(16);
  const TransferFunction tf = make_transfer(config, 1e-3);
  const ComplexField f = random_field(16, 111);
  const ComplexField g = random_field(16, 112);
  const std::complex<double> a(0.7, -0.3), b(-1.1, 0.2);

  ComplexField combo = make_field(16, 16, config.pitch);
  for (std::size_t i = 0; i < combo.data.size(); ++i)
    combo.data[i] = a * f.data[i] + b * g.data[i];

  const ComplexField lhs = propagate(combo, tf);
  const ComplexField pf = propagate(f, tf);
  const ComplexField pg = propagate(g, tf);
  for (std::size_t i = 0; i < lhs.data.size(); ++i)
    CHECK(std::abs(lhs.data[i] - (a * pf.data[i] + b * pg.data[i])) < 1e-12);
}

TEST_CASE("propagate rejects shape mismatch") {
  const OpticalConfig config = tiny_config(16);
  const TransferFunction tf = make_transfer(config, 1e-3);
  const ComplexField wrong = random_field(32, 113);
  CHECK_THROWS_AS(propagate(wrong, tf), ShapeError);
  CHECK_THROWS_AS(propagate_adjoint(wrong, tf), ShapeError);
}

TEST_CASE("deterministic FFT plans: repeated propagation is bitwise identical") {
  const OpticalConfig config = tiny_config(64);
  const TransferFunction tf = make_transfer(config, 1e-3);
  const ComplexField field = random_field(64, 121);
  const ComplexField first = propagate(field, tf);
  const ComplexField second = propagate(field, tf);
  for (std::size_t i = 0; i < first.data.size(); ++i)
    CHECK(first.data[i] == second.data[i]);
}

TEST_CASE("aliasing check against the frozen constant and a search oracle") {
  OpticalConfig config;  // 600 x 600, 8 um, 780 nm

  SUBCASE("z = 0 passes with positive headroom") {
    const AliasingReport report = aliasing_check(config, 0.0);
    CHECK(report.pass);
    CHECK(report.z_max > 0.0);
  }
  SUBCASE("absurd distance fails") {
    const AliasingReport fail = aliasing_check(config, 1e6 * 0.0492);
    CHECK_FALSE(fail.pass);
  }
  SUBCASE("frozen regression value") {
    const AliasingReport report = aliasing_check(config, config.z);
    CHECK(report.z_max ==
          doctest::Approx(0.04917223443217986).epsilon(1e-12));
  }
}

TEST_CASE("aliasing z_max matches an independent bisection of the sampling rule") {
  // Oracle: largest z where the transfer phase step between adjacent
  // frequency samples stays <= pi everywhere along the worst (edge) axis.
  const OpticalConfig config = tiny_config(128, 1e-3);
  const double df = 1.0 / (config.padded_size * config.pitch);
  const double inv_lambda_sq = 1.0 / (config.wavelength * config.wavelength);
  auto phase_at = [&](double f, double z) {
    return 2.0 * M_PI * z * std::sqrt(inv_lambda_sq - f * f);
  };
  auto max_step = [&](double z) {
    double worst = 0.0;
    for (int k = 0; k < config.padded_size / 2; ++k)
      worst = std::max(worst,
                       std::abs(phase_at(k * df, z) - phase_at((k + 1) * df, z)));
    return worst;
  };
  double lo = 0.0, hi = 1.0;
  while (max_step(hi) < M_PI) hi *= 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (max_step(mid) <= M_PI ? lo : hi) = mid;
  }
  // The closed form evaluates the phase slope exactly at the band edge, so
  // it is slightly conservative relative to the discrete step between the
  // two outermost samples; the gap is the one-bin discretization error.
  const AliasingReport report = aliasing_check(config, 0.0);
  CHECK(report.z_max <= lo * (1.0 + 1e-12));
  CHECK(report.z_max > 0.98 * lo);
}

TEST_CASE("default full-scale geometry at z = 100 mm exceeds the sampling bound") {
  // The default instrument configuration (600 x 600 at 8 um, z = 100 mm)
  // relies on 2x zero padding rather than a band limit; the diagnostic
  // reports the overrun instead of blocking.
  OpticalConfig config;
  const AliasingReport report = aliasing_check(config, config.z);
  CHECK_FALSE(report.pass);
  CHECK(report.z_max < config.z);
}

TEST_CASE("shared transfer cache returns the same instance for equal keys") {
  OpticalConfig config = tiny_config(16);
  const auto a = shared_transfer(config, 1e-3);
  const auto b = shared_transfer(config, 1e-3);
  CHECK(a.get() == b.get());
  const auto c = shared_transfer(config, 2e-3);
  CHECK(a.get() != c.get());
  config.pitch = 9e-6;
  const auto d = shared_transfer(config, 1e-3);
  CHECK(a.get() != d.get());
}
