#include "onn/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "onn/errors.hpp"

namespace onn {

namespace {

std::string trim(const std::string& text) {
  const std::size_t begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const std::size_t end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double parsed = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("config key '" + key + "': cannot parse number '" + value + "'");
  return parsed;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
    throw ConfigError("config key '" + key + "': cannot parse integer '" + value + "'");
  return parsed;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  return std::size_t(parse_u64(key, value));
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw ConfigError("config key '" + key + "': cannot parse boolean '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
  onn::validate(optics);
  training.validate();
  if (!(disk_radius > 0.0) || !(ring_radius > 0.0))
    throw ConfigError("disk_radius and ring_radius must be positive");
}

void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value) {
  if (key == "wavelength")
    config.optics.wavelength = parse_double(key, value);
  else if (key == "pitch")
    config.optics.pitch = parse_double(key, value);
  else if (key == "active_size")
    config.optics.active_size = parse_count(key, value);
  else if (key == "padded_size")
    config.optics.padded_size = parse_count(key, value);
  else if (key == "z")
    config.optics.z = parse_double(key, value);
  else if (key == "disk_radius")
    config.disk_radius = parse_double(key, value);
  else if (key == "ring_radius")
    config.ring_radius = parse_double(key, value);
  else if (key == "n_sat")
    config.training.sat.n_sat = parse_double(key, value);
  else if (key == "i_sat")
    config.training.sat.i_sat = parse_double(key, value);
  else if (key == "epochs")
    config.training.epochs = parse_count(key, value);
  else if (key == "train_count")
    config.training.train_count = parse_count(key, value);
  else if (key == "test_count")
    config.training.test_count = parse_count(key, value);
  else if (key == "batch_size")
    config.training.batch_size = parse_count(key, value);
  else if (key == "learning_rate")
    config.training.learning_rate = parse_double(key, value);
  else if (key == "beta1")
    config.training.beta1 = parse_double(key, value);
  else if (key == "beta2")
    config.training.beta2 = parse_double(key, value);
  else if (key == "adam_epsilon")
    config.training.adam_epsilon = parse_double(key, value);
  else if (key == "seed")
    config.training.seed = parse_u64(key, value);
  else if (key == "threads")
    config.training.threads = parse_count(key, value);
  else if (key == "nonlinear")
    config.training.nonlinear = parse_bool(key, value);
  else if (key == "bilinear")
    config.training.bilinear = parse_bool(key, value);
  else if (key == "stratified_test")
    config.training.stratified_test = parse_bool(key, value);
  else if (key == "timing")
    config.training.timing = parse_bool(key, value);
  else if (key == "softmax")
    config.training.loss = parse_bool(key, value) ? LossKind::kSoftmax
                                                  : LossKind::kNormalizedIntensity;
  else if (key == "data_dir")
    config.data_dir = value;
  else if (key == "output_dir")
    config.output_dir = value;
  else if (key == "checkpoint")
    config.checkpoint = value;
  else
    throw ConfigError("unknown config key '" + key + "'");
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_number) +
                        ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(line_number) + ": empty key");
    try {
      apply_config_value(config, key, value);
    } catch (const ConfigError& error) {
      throw ConfigError(path + ":" + std::to_string(line_number) + ": " +
                        error.what());
    }
  }
}

void apply_preset(RunConfig& config, const std::string& name) {
  if (name == "desk") {
    // Same 4.8 mm aperture and z = 100 mm as the full grid, at 1/16 the
    // pixel count, with a short training schedule to match.
    config.optics.active_size = 75;
    config.optics.padded_size = 150;
    config.optics.pitch = 32e-6;
    config.training.epochs = 20;
    config.training.train_count = 2000;
    config.training.test_count = 500;
    return;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

void write_config(const RunConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write config file " + path);
  char buffer[64];
  auto real = [&](const char* key, double v) {
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    out << key << " = " << buffer << "\n";
  };
  auto count = [&](const char* key, std::uint64_t v) {
    out << key << " = " << v << "\n";
  };
  auto flag = [&](const char* key, bool v) {
    out << key << " = " << (v ? "true" : "false") << "\n";
  };
  auto text = [&](const char* key, const std::string& v) {
    out << key << " = " << v << "\n";
  };

  real("wavelength", config.optics.wavelength);
  real("pitch", config.optics.pitch);
  count("active_size", config.optics.active_size);
  count("padded_size", config.optics.padded_size);
  real("z", config.optics.z);
  real("disk_radius", config.disk_radius);
  real("ring_radius", config.ring_radius);
  real("n_sat", config.training.sat.n_sat);
  real("i_sat", config.training.sat.i_sat);
  count("epochs", config.training.epochs);
  count("train_count", config.training.train_count);
  count("test_count", config.training.test_count);
  count("batch_size", config.training.batch_size);
  real("learning_rate", config.training.learning_rate);
  real("beta1", config.training.beta1);
  real("beta2", config.training.beta2);
  real("adam_epsilon", config.training.adam_epsilon);
  count("seed", config.training.seed);
  count("threads", config.training.threads);
  flag("nonlinear", config.training.nonlinear);
  flag("bilinear", config.training.bilinear);
  flag("stratified_test", config.training.stratified_test);
  flag("timing", config.training.timing);
  flag("softmax", config.training.loss == LossKind::kSoftmax);
  text("data_dir", config.data_dir);
  text("output_dir", config.output_dir);
  if (!config.checkpoint.empty()) text("checkpoint", config.checkpoint);
  if (!out.flush()) throw Error("failed writing config file " + path);
}

}  // namespace onn
