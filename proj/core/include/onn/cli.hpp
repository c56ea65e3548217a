#pragma once

#include <optional>
#include <string>

#include "onn/run_config.hpp"

namespace onn {

/// Trains a model and writes history.csv, checkpoint-last.onnc,
/// checkpoint-best.onnc, mask.pgm, mask.omsk, and config.txt into
/// config.output_dir. Prints per-epoch progress and the final test
/// accuracy. Returns the process exit status.
int cmd_train(const RunConfig& config);

/// Evaluates config.checkpoint on the test slice, prints the accuracy,
/// and writes confusion.csv. `no_mask` zeroes the phase mask first to
/// reproduce the mask-free baseline.
int cmd_eval(const RunConfig& config, bool no_mask);

/// Fits saturation parameters to a two-column sample file, prints them,
/// and writes fit.txt.
int cmd_calibrate(const RunConfig& config, const std::string& samples_path);

/// Input source for cmd_simulate: a test-set index or a 28x28 PGM file.
struct SimulateInput {
  std::optional<std::size_t> index;
  std::string image_path;
};

/// Runs one forward pass of config.checkpoint, writes input.pgm,
/// phase.pgm, and output.pgm, and prints the ten scores plus the
/// prediction. `override_nonlinear`/`override_sat` replace the
/// checkpoint's stored activation settings with the config's.
int cmd_simulate(const RunConfig& config, const SimulateInput& input,
                 bool override_nonlinear, bool override_sat);

/// Writes config.checkpoint's mask as mask.pgm and mask.omsk.
int cmd_export_mask(const RunConfig& config);

}  // namespace onn
