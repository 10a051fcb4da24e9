#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace framecast::pipe {

inline constexpr const char* kVersion = "0.1.0";

// Every command that produces files drops a manifest.json next to them:
// the full command line, the merged config, content hashes of the input
// files and the active kernel backend. Enough to re-run the step and to
// tell afterwards whether two runs could even have matched.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config;
  std::map<std::string, std::string> inputs;  // path -> content hash
  double seconds = 0.0;

  // Hashes the file and records it; missing files throw IoError.
  void add_input(const std::filesystem::path& path);
};

void write_manifest(const std::filesystem::path& file, const RunManifest& m);

}  // namespace framecast::pipe
