#include "cascade/manifest.h"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cascade {

std::string manifest_path_for(const std::string& output_path) { return output_path + ".manifest.json"; }

void write_manifest(const std::string& path, const RunManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["command"] = manifest.command;
  doc["argv"] = manifest.argv;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : manifest.parameters) params[key] = value;
  doc["parameters"] = params;
  doc["seeds"] = manifest.seeds;
  doc["version"] = manifest.version;
  doc["outputs"] = manifest.outputs;
  doc["wall_seconds"] = manifest.wall_seconds;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest '" + path + "'");
  out << doc.dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest '" + path + "'");
  RunManifest manifest;
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    manifest.command = doc.at("command").get<std::string>();
    manifest.argv = doc.at("argv").get<std::vector<std::string>>();
    for (const auto& [key, value] : doc.at("parameters").items()) {
      manifest.parameters.emplace_back(key, value.get<std::string>());
    }
    manifest.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    manifest.version = doc.at("version").get<std::string>();
    manifest.outputs = doc.at("outputs").get<std::vector<std::string>>();
    manifest.wall_seconds = doc.at("wall_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed manifest '" + path + "': " + e.what());
  }
  return manifest;
}

}  // namespace cascade
