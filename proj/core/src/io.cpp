#include "stokes_prox/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "stokes_prox/errors.hpp"

namespace stokes_prox {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string frame_name(const char* prefix, std::size_t k) {
  std::ostringstream os;
  os << prefix << std::setw(4) << std::setfill('0') << k << ".f64";
  return os.str();
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "read failed");
  return os.str();
}

json read_json(const fs::path& path) {
  const std::string text = read_bytes(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_bytes(path, j.dump(2) + "\n"); }

template <class T>
T json_field(const json& j, const char* key, const fs::path& path) {
  if (!j.contains(key)) throw FormatError(path.string() + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": bad value for '" + key + "': " + e.what());
  }
}

std::string encode_f64le(std::span<const double> values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
  }
  return bytes;
}

std::vector<double> decode_f64le(const std::string& bytes) {
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
    }
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

}  // namespace

fs::path sidecar_path(const fs::path& binary) {
  fs::path p = binary;
  p.replace_extension(".json");
  return p;
}

void write_stack(const ChannelStack& stack, const fs::path& binary) {
  if (!stack.all_finite()) throw FormatError("write_stack: stack has non-finite values: " + binary.string());
  write_bytes(binary, encode_f64le(stack.values()));
  json side = {{"height", stack.height()},
               {"width", stack.width()},
               {"channels", stack.channels()},
               {"order", "row-major"},
               {"dtype", "f64le"}};
  write_json(sidecar_path(binary), side);
}

ChannelStack read_stack(const fs::path& binary) {
  const fs::path side_path = sidecar_path(binary);
  const json side = read_json(side_path);
  const auto height = json_field<std::size_t>(side, "height", side_path);
  const auto width = json_field<std::size_t>(side, "width", side_path);
  const auto channels = json_field<std::size_t>(side, "channels", side_path);
  if (side.contains("dtype") && side.at("dtype") != "f64le") {
    throw FormatError(side_path.string() + ": unsupported dtype");
  }
  if (side.contains("order") && side.at("order") != "row-major") {
    throw FormatError(side_path.string() + ": unsupported order");
  }
  const std::string bytes = read_bytes(binary);
  const std::size_t expected = height * width * channels;
  if (bytes.size() != expected * 8) {
    throw FormatError(binary.string() + ": sidecar describes " + std::to_string(expected) +
                      " values but the binary holds " + std::to_string(bytes.size()) + " bytes");
  }
  ChannelStack stack(channels, Shape{height, width}, decode_f64le(bytes));
  if (!stack.all_finite()) throw FormatError(binary.string() + ": non-finite values");
  return stack;
}

void write_cube(const DataCube& cube, const fs::path& directory) {
  cube.validate();
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError(directory.string(), "cannot create directory");

  const Shape shape = cube.shape;
  json schedule = json::array();
  for (std::size_t k = 0; k < cube.frames.size(); ++k) {
    const auto& f = cube.frames[k];
    schedule.push_back({{"left", f.left_modulation}, {"right", f.right_modulation}});
    write_stack(ChannelStack(2, shape, f.measurements), directory / frame_name("frame_", k));
    write_stack(ChannelStack(2, shape, f.weights), directory / frame_name("weights_", k));
  }
  write_stack(ChannelStack(1, shape, std::vector<double>(cube.psf.kernel().begin(), cube.psf.kernel().end())),
              directory / "psf.f64");

  json manifest = {{"K", cube.frames.size()},
                   {"height", shape.height},
                   {"width", shape.width},
                   {"components", cube.components()},
                   {"readout_variance", cube.readout_variance},
                   {"seed", cube.seed},
                   {"psf", "psf.f64"},
                   {"schedule", schedule}};
  write_json(directory / "manifest.json", manifest);
}

DataCube read_cube(const fs::path& directory) {
  const fs::path manifest_path = directory / "manifest.json";
  const json manifest = read_json(manifest_path);
  const auto k_frames = json_field<std::size_t>(manifest, "K", manifest_path);
  const Shape shape{json_field<std::size_t>(manifest, "height", manifest_path),
                    json_field<std::size_t>(manifest, "width", manifest_path)};
  const auto psf_name = json_field<std::string>(manifest, "psf", manifest_path);
  const auto schedule = json_field<json>(manifest, "schedule", manifest_path);
  if (!schedule.is_array() || schedule.size() != k_frames) {
    throw FormatError(manifest_path.string() + ": schedule length differs from K");
  }

  const ChannelStack psf_plane = read_stack(directory / psf_name);
  if (psf_plane.channels() != 1 || psf_plane.shape() != shape) {
    throw FormatError(manifest_path.string() + ": PSF shape differs from frame shape");
  }
  DataCube cube{shape, {}, PsfKernel(shape, psf_plane.raw()),
                json_field<double>(manifest, "readout_variance", manifest_path),
                json_field<std::uint64_t>(manifest, "seed", manifest_path)};
  cube.frames.resize(k_frames);
  for (std::size_t k = 0; k < k_frames; ++k) {
    auto& f = cube.frames[k];
    const auto d = read_stack(directory / frame_name("frame_", k));
    const auto w = read_stack(directory / frame_name("weights_", k));
    if (d.channels() != 2 || d.shape() != shape || w.channels() != 2 || w.shape() != shape) {
      throw FormatError(directory.string() + ": frame " + std::to_string(k) + " has the wrong layout");
    }
    f.measurements = d.raw();
    f.weights = w.raw();
    f.left_modulation = json_field<std::vector<double>>(schedule[k], "left", manifest_path);
    f.right_modulation = json_field<std::vector<double>>(schedule[k], "right", manifest_path);
  }
  try {
    cube.validate();
  } catch (const Error& e) {
    throw FormatError(directory.string() + ": " + e.what());
  }
  return cube;
}

}  // namespace stokes_prox
