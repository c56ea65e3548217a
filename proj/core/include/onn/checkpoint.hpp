#pragma once

#include <string>
#include <vector>

#include "onn/network.hpp"

namespace onn {

/// Binary checkpoint, format version 1, all fields little-endian:
/// "ONNC", u32 version, f64 wavelength, f64 pitch, u32 active_size,
/// u32 padded_size, f64 z, u32 nonlinear, f64 n_sat, f64 i_sat,
/// u32 mask width, u32 mask height, then mask/m/v arrays as f64 and a
/// u64 step counter. Readers reject unknown versions.
void save_checkpoint(const std::string& path, const ModelState& state);
ModelState load_checkpoint(const std::string& path);

/// Raw mask dump: "OMSK", u32 width, u32 height, u32 reserved = 0, then
/// row-major little-endian f64 phases, unwrapped. Bitwise lossless.
void export_mask_raw(const std::string& path, const PhaseMask& mask);
PhaseMask import_mask_raw(const std::string& path);

/// 16-bit binary portable graymap of the mask: phase wrapped to [0, 2*pi)
/// and mapped linearly onto [0, 65535] with half-up rounding.
void export_mask_pgm(const std::string& path, const PhaseMask& mask);

/// 16-bit PGM of arbitrary values scaled so the largest maps to 65535
/// (all-zero data stays zero). Used for simulation snapshots.
void write_pgm16(const std::string& path, std::size_t width, std::size_t height,
                 const std::vector<double>& values);

}  // namespace onn
