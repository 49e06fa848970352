#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cascade {

// Record written next to every output file. `argv` is the canonical argument
// list (seed made explicit) and is all that replay needs.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::uint64_t> seeds;
  std::string version;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
};

std::string manifest_path_for(const std::string& output_path);

void write_manifest(const std::string& path, const RunManifest& manifest);
// Throws std::runtime_error on unreadable or malformed files.
RunManifest read_manifest(const std::string& path);

}  // namespace cascade
