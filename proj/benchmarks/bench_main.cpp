// Microbenchmarks for the hot paths: propagation, the full differentiable
// pipeline at desk and full scale, the activation, and the calibration fit.

#include <benchmark/benchmark.h>

#include <random>

#include "onn/network.hpp"
#include "onn/rng.hpp"

namespace {

onn::OpticalConfig config_for(int padded) {
  onn::OpticalConfig config;
  config.active_size = padded / 2;
  config.padded_size = padded;
  config.pitch = padded == 150 ? 32e-6 : 8e-6;
  return config;
}

onn::ComplexField random_field(const onn::OpticalConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  onn::ComplexField field = onn::make_field(config.padded_size, config.padded_size,
                                            config.pitch);
  for (auto& v : field.data)
    v = {onn::rand_unit(rng), onn::rand_unit(rng)};
  return field;
}

onn::RealGrid random_image(const onn::OpticalConfig& config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  onn::RealGrid grid;
  grid.width = config.padded_size;
  grid.height = config.padded_size;
  grid.pitch = config.pitch;
  grid.data.resize(std::size_t(grid.width) * grid.height);
  for (double& v : grid.data) v = onn::rand_unit(rng);
  return grid;
}

void BM_Propagate(benchmark::State& state) {
  const onn::OpticalConfig config = config_for(int(state.range(0)));
  const onn::ComplexField field = random_field(config, 11);
  const onn::TransferFunction tf = onn::make_transfer(config, config.z);
  for (auto _ : state)
    benchmark::DoNotOptimize(onn::propagate(field, tf));
}
BENCHMARK(BM_Propagate)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_ApplySaturable(benchmark::State& state) {
  const onn::OpticalConfig config = config_for(int(state.range(0)));
  const onn::ComplexField field = random_field(config, 12);
  const onn::SaturationParams params;
  for (auto _ : state)
    benchmark::DoNotOptimize(onn::apply_saturable(field, params));
}
BENCHMARK(BM_ApplySaturable)->Arg(150)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
  const onn::OpticalConfig config = config_for(int(state.range(0)));
  const bool nonlinear = state.range(1) != 0;
  onn::ModelState model = onn::make_model(config, nonlinear);
  std::mt19937_64 rng(13);
  for (double& p : model.mask.phase)
    p = (2.0 * onn::rand_unit(rng) - 1.0) * M_PI;
  const onn::DetectorLayout layout =
      onn::build_detector(config, 100e-6, 1e-3);
  const onn::RealGrid image = random_image(config, 14);
  for (auto _ : state) {
    onn::Tape tape;
    onn::forward(image, model, layout, nonlinear, &tape);
    benchmark::DoNotOptimize(onn::backward(tape, 3));
  }
}
BENCHMARK(BM_ForwardBackward)
    ->Args({150, 0})
    ->Args({150, 1})
    ->Args({600, 0})
    ->Args({600, 1})
    ->Unit(benchmark::kMillisecond);

void BM_FitSaturation(benchmark::State& state) {
  const onn::SaturationParams truth{2.6, 0.6};
  std::vector<onn::CalibrationSample> samples;
  for (int i = 0; i < 50; ++i) {
    const double i_in = 0.01 + 0.1 * i;
    samples.push_back({i_in, i_in * onn::transmission(i_in, truth)});
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(onn::fit_saturation(samples));
}
BENCHMARK(BM_FitSaturation)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
