// SPDX-License-Identifier: Apache-2.0
#include "papr/io/weights.hpp"

#include <fstream>

#include "papr/io/config.hpp"
#include "papr/io/tensor_file.hpp"

namespace papr::io {

ParameterSet load_weights(const std::filesystem::path& dir, const ModelSpec& spec) {
  const KeyValueFile manifest = KeyValueFile::load(dir / kManifestName);
  const auto layout = parameter_layout(spec);
  for (const auto& [name, file] : manifest.entries()) {
    bool known = false;
    for (const auto& p : layout) known = known || p.name == name;
    if (!known) throw SpecError(manifest.origin() + ": unexpected parameter '" + name + "'");
  }
  ParameterSet params;
  for (const auto& p : layout) {
    if (!manifest.contains(p.name)) throw SpecError(manifest.origin() + ": missing parameter '" + p.name + "'");
    const std::filesystem::path file = dir / manifest.get(p.name);
    Tensor t = read_tensor_file(file);
    if (t.dims() != p.dims) {
      throw SpecError(file.string() + ": parameter '" + p.name + "' has shape " + dims_to_string(t.dims()) +
                      ", expected " + dims_to_string(p.dims));
    }
    params.emplace(p.name, std::move(t));
  }
  return params;
}

void save_weights(const std::filesystem::path& dir, const ParameterSet& params) {
  std::filesystem::create_directories(dir);
  KeyValueFile manifest;
  for (const auto& [name, t] : params) {
    const std::string file = name + ".ptsr";
    write_tensor_file(dir / file, t);
    manifest.set(name, file);
  }
  std::ofstream out(dir / kManifestName, std::ios::trunc);
  if (!out) throw IoError("cannot create " + (dir / kManifestName).string());
  out << manifest.serialize();
}

}  // namespace papr::io
