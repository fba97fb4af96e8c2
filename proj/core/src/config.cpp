// SPDX-License-Identifier: Apache-2.0
#include "papr/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "papr/io/tensor_file.hpp"

namespace papr::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw SpecError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw SpecError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.contains(key)) throw SpecError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv.entries_.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse(os.str(), path.string());
}

bool KeyValueFile::contains(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& KeyValueFile::get(const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return e.second;
  }
  throw SpecError(origin_ + ": missing required key '" + key + "'");
}

void KeyValueFile::set(const std::string& key, std::string value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(key, std::move(value));
}

std::string KeyValueFile::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

std::size_t parse_size(const std::string& value, const std::string& key) {
  const std::string v = trim(value);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw SpecError("key '" + key + "': expected a non-negative integer, got '" + value + "'");
  }
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& value, const std::string& key) {
  std::vector<std::size_t> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) out.push_back(parse_size(item, key));
  if (out.empty()) throw SpecError("key '" + key + "': empty list");
  return out;
}

double parse_double(const std::string& value, const std::string& key) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw SpecError("key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw SpecError("key '" + key + "': expected true or false, got '" + value + "'");
}

std::string format_size_list(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw SpecError("cannot format number");
  return std::string(buf, ptr);
}

namespace {

struct KeySet {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

KeySet keys_for(Family f) {
  switch (f) {
    case Family::TokenVit:
      return {{"family", "input", "depth", "dim", "heads", "patch"},
              {"name", "in_channels", "num_classes", "mlp_ratio", "tubelet", "class_token"}};
    case Family::Hierarchical:
      return {{"family", "input", "block", "patch", "stage_dims", "stage_depths"},
              {"name", "in_channels", "num_classes", "mlp_ratio", "kernel", "stage_heads"}};
    case Family::ConvNet:
      return {{"family", "input", "preset"}, {"name", "in_channels", "num_classes", "channels", "kernels", "strides"}};
  }
  return {};
}

}  // namespace

ModelSpec parse_model_config(const KeyValueFile& kv) {
  ModelSpec s;
  s.family = parse_family(kv.get("family"));
  const KeySet keys = keys_for(s.family);
  std::set<std::string> allowed(keys.required.begin(), keys.required.end());
  allowed.insert(keys.optional.begin(), keys.optional.end());
  for (const auto& [k, v] : kv.entries()) {
    if (!allowed.count(k)) {
      throw SpecError(kv.origin() + ": key '" + k + "' is not valid for family " + to_string(s.family));
    }
  }
  for (const auto& k : keys.required) {
    if (!kv.contains(k)) throw SpecError(kv.origin() + ": missing required key '" + k + "'");
  }

  auto has = [&](const char* k) { return kv.contains(k); };
  s.input = parse_size_list(kv.get("input"), "input");
  if (has("name")) s.name = kv.get("name");
  if (has("in_channels")) s.in_channels = parse_size(kv.get("in_channels"), "in_channels");
  if (has("num_classes")) s.num_classes = parse_size(kv.get("num_classes"), "num_classes");
  if (has("mlp_ratio")) s.mlp_ratio = parse_double(kv.get("mlp_ratio"), "mlp_ratio");
  if (has("depth")) s.depth = parse_size(kv.get("depth"), "depth");
  if (has("dim")) s.dim = parse_size(kv.get("dim"), "dim");
  if (has("heads")) s.heads = parse_size(kv.get("heads"), "heads");
  if (has("patch")) s.patch = parse_size(kv.get("patch"), "patch");
  if (has("tubelet")) s.tubelet = parse_size(kv.get("tubelet"), "tubelet");
  if (has("class_token")) s.class_token = parse_bool(kv.get("class_token"), "class_token");
  if (has("block")) s.block = parse_block_kind(kv.get("block"));
  if (has("stage_dims")) s.stage_dims = parse_size_list(kv.get("stage_dims"), "stage_dims");
  if (has("stage_depths")) s.stage_depths = parse_size_list(kv.get("stage_depths"), "stage_depths");
  if (has("stage_heads")) s.stage_heads = parse_size_list(kv.get("stage_heads"), "stage_heads");
  if (has("kernel")) s.kernel = parse_size(kv.get("kernel"), "kernel");
  if (has("preset")) s.preset = kv.get("preset");
  if (has("channels")) s.channels = parse_size_list(kv.get("channels"), "channels");
  if (has("kernels")) s.kernels = parse_size_list(kv.get("kernels"), "kernels");
  if (has("strides")) s.strides = parse_size_list(kv.get("strides"), "strides");
  try {
    s.validate();
  } catch (const SpecError& e) {
    throw SpecError(kv.origin() + ": " + e.what());
  }
  return s;
}

ModelSpec parse_model_config(const std::string& text) { return parse_model_config(KeyValueFile::parse(text)); }

ModelSpec load_model_config(const std::filesystem::path& path) { return parse_model_config(KeyValueFile::load(path)); }

std::string serialize_model_config(const ModelSpec& s) {
  s.validate();
  KeyValueFile kv;
  kv.set("family", to_string(s.family));
  if (!s.name.empty()) kv.set("name", s.name);
  kv.set("input", format_size_list(s.input));
  kv.set("in_channels", std::to_string(s.in_channels));
  kv.set("num_classes", std::to_string(s.num_classes));
  switch (s.family) {
    case Family::TokenVit:
      kv.set("depth", std::to_string(s.depth));
      kv.set("dim", std::to_string(s.dim));
      kv.set("heads", std::to_string(s.heads));
      kv.set("mlp_ratio", format_double(s.mlp_ratio));
      kv.set("patch", std::to_string(s.patch));
      kv.set("tubelet", std::to_string(s.tubelet));
      kv.set("class_token", s.class_token ? "true" : "false");
      break;
    case Family::Hierarchical:
      kv.set("block", to_string(s.block));
      kv.set("patch", std::to_string(s.patch));
      kv.set("stage_dims", format_size_list(s.stage_dims));
      kv.set("stage_depths", format_size_list(s.stage_depths));
      if (!s.stage_heads.empty()) kv.set("stage_heads", format_size_list(s.stage_heads));
      kv.set("kernel", std::to_string(s.kernel));
      kv.set("mlp_ratio", format_double(s.mlp_ratio));
      break;
    case Family::ConvNet:
      kv.set("preset", s.preset);
      if (!s.channels.empty()) {
        kv.set("channels", format_size_list(s.channels));
        kv.set("kernels", format_size_list(s.kernels));
        kv.set("strides", format_size_list(s.strides));
      }
      break;
  }
  return kv.serialize();
}

}  // namespace papr::io
