#include "onn/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "onn/checkpoint.hpp"
#include "onn/errors.hpp"

namespace onn {

namespace {

namespace fs = std::filesystem;

std::string joined(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

void prepare_output_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec)
    throw Error("output_dir '" + config.output_dir + "': " + ec.message());
  write_config(config, joined(config.output_dir, "config.txt"));
}

RawDataset load_split(const RunConfig& config, bool training_split) {
  const char* images = training_split ? "train-images-idx3-ubyte" : "t10k-images-idx3-ubyte";
  const char* labels = training_split ? "train-labels-idx1-ubyte" : "t10k-labels-idx1-ubyte";
  try {
    return load_idx(joined(config.data_dir, images), joined(config.data_dir, labels));
  } catch (const Error& error) {
    throw ConfigError("data_dir '" + config.data_dir + "': " + error.what());
  }
}

ModelState load_model(const RunConfig& config) {
  if (config.checkpoint.empty())
    throw ConfigError("config key 'checkpoint' is required for this command");
  return load_checkpoint(config.checkpoint);
}

void write_confusion(const std::string& path, const EvalResult& result) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const auto& row : result.confusion) {
    for (std::size_t col = 0; col < row.size(); ++col)
      out << row[col] << (col + 1 < row.size() ? "," : "\n");
  }
  if (!out.flush()) throw Error("failed writing " + path);
}

/// Minimal binary PGM reader for simulate inputs: P5, maxval 255 or
/// 65535, rescaled to 8-bit. The image must be 28x28.
RawDataset read_pgm_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);

  auto next_token = [&]() -> std::string {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {  // header comment runs to end of line
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!token.empty()) return token;
        continue;
      }
      token.push_back(char(c));
    }
    if (token.empty()) throw FormatError(path + ": truncated header");
    return token;
  };

  if (next_token() != "P5") throw FormatError(path + ": not a binary PGM");
  const unsigned long width = std::stoul(next_token());
  const unsigned long height = std::stoul(next_token());
  const unsigned long maxval = std::stoul(next_token());
  if (width != 28 || height != 28)
    throw FormatError(path + ": simulate expects a 28x28 image, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  if (maxval != 255 && maxval != 65535)
    throw FormatError(path + ": unsupported maxval " + std::to_string(maxval));

  RawDataset data;
  data.count = 1;
  data.rows = height;
  data.cols = width;
  data.pixels.resize(width * height);
  data.labels.assign(1, 0);
  const std::size_t bytes_per_pixel = maxval == 255 ? 1 : 2;
  std::vector<unsigned char> raw(width * height * bytes_per_pixel);
  if (!in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size())))
    throw FormatError(path + ": truncated pixel data");
  for (std::size_t i = 0; i < data.pixels.size(); ++i) {
    if (maxval == 255) {
      data.pixels[i] = raw[i];
    } else {
      const unsigned value = (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
      data.pixels[i] = std::uint8_t(std::floor(value / 65535.0 * 255.0 + 0.5));
    }
  }
  return data;
}

}  // namespace

int cmd_train(const RunConfig& config) {
  config.validate();
  prepare_output_dir(config);

  const RawDataset train_data = load_split(config, true);
  const RawDataset test_data = load_split(config, false);
  const DetectorLayout layout =
      build_detector(config.optics, config.disk_radius, config.ring_radius);
  ModelState state =
      make_model(config.optics, config.training.nonlinear, config.training.sat);

  const std::string last_path = joined(config.output_dir, "checkpoint-last.onnc");
  const std::string best_path = joined(config.output_dir, "checkpoint-best.onnc");
  const auto on_epoch = [&](const ModelState& snapshot, const EpochRecord& record,
                            bool is_best) {
    save_checkpoint(last_path, snapshot);
    if (is_best) save_checkpoint(best_path, snapshot);
    std::printf("epoch %zu/%zu  train_loss %.6f  test_accuracy %.4f\n",
                record.epoch, config.training.epochs, record.train_loss,
                record.test_accuracy);
    std::fflush(stdout);
  };

  const std::vector<EpochRecord> history =
      train(train_data, test_data, state, layout, config.training, on_epoch);

  write_history(joined(config.output_dir, "history.csv"), history);
  export_mask_pgm(joined(config.output_dir, "mask.pgm"), state.mask);
  export_mask_raw(joined(config.output_dir, "mask.omsk"), state.mask);
  std::printf("final test accuracy = %.17g\n", history.back().test_accuracy);
  return 0;
}

int cmd_eval(const RunConfig& config, bool no_mask) {
  ModelState state = load_model(config);
  prepare_output_dir(config);
  if (no_mask)
    std::fill(state.mask.phase.begin(), state.mask.phase.end(), 0.0);

  const RawDataset test_data = load_split(config, false);
  const DetectorLayout layout =
      build_detector(state.config, config.disk_radius, config.ring_radius);

  // Evaluation honors the checkpoint's own activation settings.
  TrainConfig eval_config = config.training;
  eval_config.nonlinear = state.nonlinear;
  eval_config.sat = state.sat;

  const std::vector<std::size_t> indices = test_slice(test_data, eval_config);
  const EvalResult result = evaluate(state, test_data, indices, layout, eval_config);
  write_confusion(joined(config.output_dir, "confusion.csv"), result);
  std::printf("test accuracy = %.17g\n", result.accuracy);
  return 0;
}

int cmd_calibrate(const RunConfig& config, const std::string& samples_path) {
  prepare_output_dir(config);
  const std::vector<CalibrationSample> samples = read_calibration_file(samples_path);
  const FitResult fit = fit_saturation(samples);
  write_fit_report(joined(config.output_dir, "fit.txt"), fit);
  std::printf("n_sat = %.17g\n", fit.params.n_sat);
  std::printf("i_sat = %.17g\n", fit.params.i_sat);
  std::printf("rms_residual = %.17g\n", fit.rms_residual);
  if (!fit.i_sat_identifiable)
    std::printf("note: no measurable absorption; i_sat is not identifiable\n");
  return 0;
}

int cmd_simulate(const RunConfig& config, const SimulateInput& input,
                 bool override_nonlinear, bool override_sat) {
  ModelState state = load_model(config);
  prepare_output_dir(config);
  const bool nonlinear =
      override_nonlinear ? config.training.nonlinear : state.nonlinear;
  if (override_sat) state.sat = config.training.sat;

  RawDataset data;
  std::size_t index = 0;
  if (input.index.has_value()) {
    data = load_split(config, false);
    index = *input.index;
    if (index >= data.count)
      throw ConfigError("sample index " + std::to_string(index) +
                        " out of range (test set has " +
                        std::to_string(data.count) + " images)");
  } else if (!input.image_path.empty()) {
    data = read_pgm_image(input.image_path);
  } else {
    throw ConfigError("simulate needs --index or --image");
  }

  const RealGrid image = preprocess(data, index, state.config, config.training.bilinear);
  bool all_zero = true;
  for (double v : image.data)
    if (v != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) std::fprintf(stderr, "warning: input image is all zero\n");

  const DetectorLayout layout =
      build_detector(state.config, config.disk_radius, config.ring_radius);
  Tape tape;
  const ScoreVector scores = forward(image, state, layout, nonlinear, &tape);

  write_pgm16(joined(config.output_dir, "input.pgm"), image.width, image.height,
              image.data);

  // Post-mask phase, wrapped like the mask export.
  PhaseMask masked_phase =
      make_mask(state.config.padded_size, state.config.padded_size);
  for (std::size_t i = 0; i < tape.masked.data.size(); ++i)
    masked_phase.phase[i] =
        std::atan2(tape.masked.data[i].imag(), tape.masked.data[i].real());
  export_mask_pgm(joined(config.output_dir, "phase.pgm"), masked_phase);

  const ComplexField& output = nonlinear ? tape.activated : tape.propagated;
  std::vector<double> intensity(output.data.size());
  for (std::size_t i = 0; i < output.data.size(); ++i)
    intensity[i] = std::norm(output.data[i]);
  write_pgm16(joined(config.output_dir, "output.pgm"), output.width, output.height,
              intensity);

  for (int label = 0; label < 10; ++label)
    std::printf("score[%d] = %.17g\n", label, scores[label]);
  std::printf("prediction = %d\n", predict(scores));
  return 0;
}

int cmd_export_mask(const RunConfig& config) {
  const ModelState state = load_model(config);
  prepare_output_dir(config);
  export_mask_pgm(joined(config.output_dir, "mask.pgm"), state.mask);
  export_mask_raw(joined(config.output_dir, "mask.omsk"), state.mask);
  std::printf("wrote mask.pgm and mask.omsk to %s\n", config.output_dir.c_str());
  return 0;
}

}  // namespace onn
