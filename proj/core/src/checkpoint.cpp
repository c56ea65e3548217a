#include "onn/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "onn/errors.hpp"

namespace onn {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {char(v & 0xff), char((v >> 8) & 0xff),
                         char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = char((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

void put_f64(std::ostream& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw FormatError(path + ": truncated");
  return std::uint32_t(bytes[0]) | (std::uint32_t(bytes[1]) << 8) |
         (std::uint32_t(bytes[2]) << 16) | (std::uint32_t(bytes[3]) << 24);
}

std::uint64_t get_u64(std::istream& in, const std::string& path) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8))
    throw FormatError(path + ": truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in, const std::string& path) {
  return std::bit_cast<double>(get_u64(in, path));
}

void expect_magic(std::istream& in, const std::string& path, const char* magic) {
  char found[4];
  if (!in.read(found, 4) || std::string(found, 4) != magic)
    throw FormatError(path + ": missing " + magic + " magic");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelState& state) {
  std::ofstream out = open_output(path);
  out.write("ONNC", 4);
  put_u32(out, kCheckpointVersion);
  put_f64(out, state.config.wavelength);
  put_f64(out, state.config.pitch);
  put_u32(out, std::uint32_t(state.config.active_size));
  put_u32(out, std::uint32_t(state.config.padded_size));
  put_f64(out, state.config.z);
  put_u32(out, state.nonlinear ? 1 : 0);
  put_f64(out, state.sat.n_sat);
  put_f64(out, state.sat.i_sat);
  put_u32(out, std::uint32_t(state.mask.width));
  put_u32(out, std::uint32_t(state.mask.height));
  for (double v : state.mask.phase) put_f64(out, v);
  for (double v : state.adam_m) put_f64(out, v);
  for (double v : state.adam_v) put_f64(out, v);
  put_u64(out, state.step);
  if (!out.flush()) throw Error("failed writing " + path);
}

ModelState load_checkpoint(const std::string& path) {
  std::ifstream in = open_input(path);
  expect_magic(in, path, "ONNC");
  const std::uint32_t version = get_u32(in, path);
  if (version != kCheckpointVersion)
    throw FormatError(path + ": unsupported checkpoint version " +
                      std::to_string(version));

  ModelState state;
  state.config.wavelength = get_f64(in, path);
  state.config.pitch = get_f64(in, path);
  state.config.active_size = get_u32(in, path);
  state.config.padded_size = get_u32(in, path);
  state.config.z = get_f64(in, path);
  state.nonlinear = get_u32(in, path) != 0;
  state.sat.n_sat = get_f64(in, path);
  state.sat.i_sat = get_f64(in, path);
  const std::uint32_t width = get_u32(in, path);
  const std::uint32_t height = get_u32(in, path);
  validate(state.config);
  if (int(width) != state.config.padded_size || int(height) != state.config.padded_size)
    throw FormatError(path + ": mask dims do not match the padded grid");

  const std::size_t n = std::size_t(width) * height;
  state.mask.width = width;
  state.mask.height = height;
  state.mask.phase.resize(n);
  state.adam_m.resize(n);
  state.adam_v.resize(n);
  for (double& v : state.mask.phase) v = get_f64(in, path);
  for (double& v : state.adam_m) v = get_f64(in, path);
  for (double& v : state.adam_v) v = get_f64(in, path);
  state.step = get_u64(in, path);
  return state;
}

void export_mask_raw(const std::string& path, const PhaseMask& mask) {
  std::ofstream out = open_output(path);
  out.write("OMSK", 4);
  put_u32(out, std::uint32_t(mask.width));
  put_u32(out, std::uint32_t(mask.height));
  put_u32(out, 0);  // reserved
  for (double v : mask.phase) put_f64(out, v);
  if (!out.flush()) throw Error("failed writing " + path);
}

PhaseMask import_mask_raw(const std::string& path) {
  std::ifstream in = open_input(path);
  expect_magic(in, path, "OMSK");
  PhaseMask mask;
  mask.width = get_u32(in, path);
  mask.height = get_u32(in, path);
  if (mask.width == 0 || mask.height == 0)
    throw FormatError(path + ": zero mask dimension");
  const std::uint32_t reserved = get_u32(in, path);
  if (reserved != 0)
    throw FormatError(path + ": nonzero reserved field");
  mask.phase.resize(std::size_t(mask.width) * mask.height);
  for (double& v : mask.phase) v = get_f64(in, path);
  return mask;
}

namespace {

void write_pgm_bytes(const std::string& path, std::size_t width, std::size_t height,
                     const std::vector<std::uint16_t>& gray) {
  std::ofstream out = open_output(path);
  out << "P5\n" << width << " " << height << "\n65535\n";
  for (std::uint16_t g : gray) {
    const char bytes[2] = {char((g >> 8) & 0xff), char(g & 0xff)};  // big-endian
    out.write(bytes, 2);
  }
  if (!out.flush()) throw Error("failed writing " + path);
}

}  // namespace

void export_mask_pgm(const std::string& path, const PhaseMask& mask) {
  const double two_pi = 2.0 * M_PI;
  std::vector<std::uint16_t> gray(mask.phase.size());
  for (std::size_t i = 0; i < mask.phase.size(); ++i) {
    double wrapped = mask.phase[i] - two_pi * std::floor(mask.phase[i] / two_pi);
    if (wrapped >= two_pi) wrapped = 0.0;  // guard the floor rounding edge
    gray[i] = std::uint16_t(std::floor(wrapped / two_pi * 65535.0 + 0.5));
  }
  write_pgm_bytes(path, mask.width, mask.height, gray);
}

void write_pgm16(const std::string& path, std::size_t width, std::size_t height,
                 const std::vector<double>& values) {
  if (values.size() != width * height)
    throw ShapeError("write_pgm16: value count does not match dimensions");
  double peak = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error("write_pgm16: values must be finite and nonnegative");
    peak = std::max(peak, v);
  }
  std::vector<std::uint16_t> gray(values.size(), 0);
  if (peak > 0.0)
    for (std::size_t i = 0; i < values.size(); ++i)
      gray[i] = std::uint16_t(std::floor(values[i] / peak * 65535.0 + 0.5));
  write_pgm_bytes(path, width, height, gray);
}

}  // namespace onn
