#include "pipeline/manifest.hpp"

#include <fstream>

#include "core/errors.hpp"
#include "core/hash.hpp"
#include "kern/kernels.hpp"

namespace framecast::pipe {

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs[path.string()] = hex64(hash_file(path.string()));
}

void write_manifest(const std::filesystem::path& file, const RunManifest& m) {
  nlohmann::json doc{
      {"tool", "framecast"},
      {"version", kVersion},
      {"command", m.command},
      {"argv", m.argv},
      {"kernel_backend", kern::backend_name(kern::active_backend())},
      {"config", m.config},
      {"inputs", m.inputs},
      {"wall_seconds", m.seconds},
  };
  std::ofstream out(file);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("cannot write " + file.string());
}

}  // namespace framecast::pipe
