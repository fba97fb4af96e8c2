// SPDX-License-Identifier: Apache-2.0
#include "papr/io/mask_record.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "papr/io/config.hpp"
#include "papr/io/tensor_file.hpp"

namespace papr::io {

std::string format_mask_record(const PruneMask& mask) {
  std::string out = "# papr prune mask\n";
  out += "grid = " + format_size_list(mask.grid.extents()) + "\n";
  out += "z = " + format_double(mask.z) + "\n";
  out += "keep_count = " + std::to_string(mask.keep_count()) + "\n";
  out += "kept = " + format_size_list(mask.kept) + "\n";
  return out;
}

PruneMask parse_mask_record(const std::string& text) {
  const KeyValueFile kv = KeyValueFile::parse(text, "<mask>");
  for (const auto& [k, v] : kv.entries()) {
    if (k != "grid" && k != "z" && k != "keep_count" && k != "kept") throw SpecError("mask record: unknown key '" + k + "'");
  }
  PruneMask mask;
  mask.grid = PatchGrid(parse_size_list(kv.get("grid"), "grid"));
  mask.z = parse_double(kv.get("z"), "z");
  mask.kept = parse_size_list(kv.get("kept"), "kept");
  const std::size_t count = parse_size(kv.get("keep_count"), "keep_count");
  if (count != mask.kept.size()) throw SpecError("mask record: keep_count does not match kept list");
  if (count != keep_count(mask.z, mask.grid.n_patches())) {
    throw SpecError("mask record: keep_count inconsistent with z and grid");
  }
  std::set<std::size_t> seen;
  for (auto i : mask.kept) {
    if (i >= mask.grid.n_patches() || !seen.insert(i).second) throw SpecError("mask record: invalid kept index");
  }
  return mask;
}

void write_mask_record(const std::filesystem::path& path, const PruneMask& mask) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out << format_mask_record(mask);
  if (!out) throw IoError("write failed: " + path.string());
}

PruneMask read_mask_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_mask_record(os.str());
}

}  // namespace papr::io
