// Command-line front end: argument parsing only; the subcommand logic
// lives in onn::cmd_*.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "onn/cli.hpp"
#include "onn/errors.hpp"

namespace {

/// Splits a --set argument "key=value" and applies it.
void apply_set(onn::RunConfig& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw onn::ConfigError("--set expects key=value, got '" + assignment + "'");
  auto trim = [](std::string text) {
    const auto begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) return std::string();
    const auto end = text.find_last_not_of(" \t");
    return text.substr(begin, end - begin + 1);
  };
  onn::apply_config_value(config, trim(assignment.substr(0, eq)),
                          trim(assignment.substr(eq + 1)));
}

struct SharedOptions {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::string data_dir;
  std::string output_dir;
  std::string checkpoint;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "config file of key = value lines");
    app->add_option("--preset", preset, "named parameter bundle (desk)");
    app->add_option("--set", sets, "override one config key, e.g. --set seed=7")
        ->type_name("KEY=VALUE");
    app->add_option("--data", data_dir, "directory with the MNIST IDX files");
    app->add_option("--output", output_dir, "output directory");
    app->add_option("--checkpoint", checkpoint, "model checkpoint path");
  }

  /// Merge order: preset, then config file, then --set and flags.
  onn::RunConfig merge() const {
    onn::RunConfig config;
    if (!preset.empty()) onn::apply_preset(config, preset);
    if (!config_file.empty()) onn::load_config_file(config, config_file);
    for (const std::string& assignment : sets) apply_set(config, assignment);
    if (!data_dir.empty()) config.data_dir = data_dir;
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (!checkpoint.empty()) config.checkpoint = checkpoint;
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-space optical neural network simulator"};
  app.require_subcommand(1);

  SharedOptions train_opts, eval_opts, calib_opts, sim_opts, mask_opts;

  CLI::App* train = app.add_subcommand("train", "train a phase mask on MNIST");
  train_opts.attach(train);

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_opts.attach(eval);
  bool no_mask = false;
  eval->add_flag("--no-mask", no_mask, "zero the mask (baseline)");

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "fit saturation parameters to samples");
  calib_opts.attach(calibrate);
  std::string samples_path;
  calibrate->add_option("samples", samples_path, "two-column I_in I_out file")
      ->required();

  CLI::App* simulate =
      app.add_subcommand("simulate", "run one image through a checkpoint");
  sim_opts.attach(simulate);
  onn::SimulateInput sim_input;
  std::size_t sim_index = 0;
  CLI::Option* index_opt =
      simulate->add_option("--index", sim_index, "test-set sample index");
  simulate->add_option("--image", sim_input.image_path, "28x28 PGM image");
  bool sim_nonlinear = false, sim_linear = false;
  simulate->add_flag("--nonlinear", sim_nonlinear, "force the absorber on");
  simulate->add_flag("--linear", sim_linear, "force the absorber off");

  CLI::App* export_mask =
      app.add_subcommand("export-mask", "write mask.pgm and mask.omsk");
  mask_opts.attach(export_mask);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return onn::cmd_train(train_opts.merge());
    if (eval->parsed()) return onn::cmd_eval(eval_opts.merge(), no_mask);
    if (calibrate->parsed())
      return onn::cmd_calibrate(calib_opts.merge(), samples_path);
    if (simulate->parsed()) {
      onn::RunConfig config = sim_opts.merge();
      if (sim_nonlinear && sim_linear)
        throw onn::ConfigError("--nonlinear and --linear are mutually exclusive");
      const bool override_nonlinear = sim_nonlinear || sim_linear;
      if (override_nonlinear) config.training.nonlinear = sim_nonlinear;
      bool override_sat = false;
      for (const std::string& assignment : sim_opts.sets)
        if (assignment.find("n_sat") != std::string::npos ||
            assignment.find("i_sat") != std::string::npos)
          override_sat = true;
      if (index_opt->count() > 0) sim_input.index = sim_index;
      return onn::cmd_simulate(config, sim_input, override_nonlinear, override_sat);
    }
    if (export_mask->parsed()) return onn::cmd_export_mask(mask_opts.merge());
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
  return 0;
}
