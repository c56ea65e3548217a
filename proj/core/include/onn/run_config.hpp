#pragma once

#include <string>

#include "onn/train.hpp"

namespace onn {

/// Complete description of a run: optics, detector geometry, training
/// settings, and file locations. Serialized as flat `key = value` lines;
/// unknown keys are rejected so typos cannot silently change a run.
struct RunConfig {
  OpticalConfig optics;
  TrainConfig training;
  double disk_radius = 100e-6;
  double ring_radius = 1e-3;
  std::string data_dir = "data";
  std::string output_dir = "out";
  std::string checkpoint;

  /// Validates every component invariant plus the detector fit.
  void validate() const;
};

/// Assigns one key. Throws ConfigError naming the key when it is unknown
/// or its value fails to parse.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

/// Reads `key = value` lines; '#' starts a comment, blank lines are
/// skipped. Errors carry the path and line number.
void load_config_file(RunConfig& config, const std::string& path);

/// Named parameter bundles. "desk" shrinks the grid to 75/150 at 32 um
/// pitch (same 4.8 mm aperture) and sets 2000/500 samples for 20 epochs.
void apply_preset(RunConfig& config, const std::string& name);

/// Writes every key with full precision; reloading reproduces `config`
/// exactly.
void write_config(const RunConfig& config, const std::string& path);

}  // namespace onn
