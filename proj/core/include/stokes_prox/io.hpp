#pragma once

#include <filesystem>

#include "stokes_prox/measurement.hpp"
#include "stokes_prox/stack.hpp"

namespace stokes_prox {

/// Path of the JSON sidecar that describes a `.f64` binary: same stem, `.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& binary);

/// Writes the stack as flat little-endian f64 plus the sidecar
/// {"height", "width", "channels", "order": "row-major", "dtype": "f64le"}.
void write_stack(const ChannelStack& stack, const std::filesystem::path& binary);

/// Inverse of write_stack. Throws IoError when a file is missing and
/// FormatError when the sidecar and the binary disagree.
ChannelStack read_stack(const std::filesystem::path& binary);

/// DataCube directory: manifest.json, psf.f64, frame_####.f64 and
/// weights_####.f64 (two planes each: left beam, right beam).
void write_cube(const DataCube& cube, const std::filesystem::path& directory);
DataCube read_cube(const std::filesystem::path& directory);

}  // namespace stokes_prox
