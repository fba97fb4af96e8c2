// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "papr/model_spec.hpp"

namespace papr::io {

/// Ordered `key = value` lines. Blank lines and text after `#` are
/// ignored; keys may not repeat.
class KeyValueFile {
 public:
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<config>");
  static KeyValueFile load(const std::filesystem::path& path);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  bool contains(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value);
  std::string serialize() const;
  const std::string& origin() const { return origin_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string origin_;
};

std::vector<std::size_t> parse_size_list(const std::string& value, const std::string& key);
std::size_t parse_size(const std::string& value, const std::string& key);
double parse_double(const std::string& value, const std::string& key);
bool parse_bool(const std::string& value, const std::string& key);
std::string format_size_list(const std::vector<std::size_t>& values);
/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Model description file. Every ModelSpec field has a key; keys not used by
/// the declared family are rejected, as are unknown keys and missing
/// required keys.
ModelSpec parse_model_config(const KeyValueFile& kv);
ModelSpec parse_model_config(const std::string& text);
ModelSpec load_model_config(const std::filesystem::path& path);
/// Canonical form: every key of the family, fixed order.
std::string serialize_model_config(const ModelSpec& spec);

}  // namespace papr::io
