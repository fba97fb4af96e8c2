// SPDX-License-Identifier: Apache-2.0
#include "papr/report.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

namespace papr {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool right) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

std::string layer_type(const std::string& name) {
  const auto dot = name.rfind('.');
  return dot == std::string::npos ? name : name.substr(dot + 1);
}

}  // namespace

std::string format_report_table(const FlopReport& report) {
  struct Row {
    std::string name;
    std::string kind;
    Macs baseline = 0;
    Macs pruned = 0;
    std::size_t count = 0;
  };
  std::vector<Row> rows;
  std::map<std::string, std::size_t> index;
  for (const auto& e : report.entries) {
    const std::string key = to_string(e.kind) + "/" + layer_type(e.name);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, rows.size()).first;
      rows.push_back({layer_type(e.name), to_string(e.kind)});
    }
    Row& r = rows[it->second];
    r.baseline += e.baseline;
    r.pruned += e.pruned;
    ++r.count;
  }

  std::ostringstream os;
  os << "model " << report.model << "  z=" << fixed(report.z, 3) << "  tokens " << report.tokens_baseline << " -> "
     << report.tokens_pruned << "\n";
  os << pad("layer", 16, false) << pad("kind", 14, false) << pad("x", 6, true) << pad("base GMACs", 14, true)
     << pad("pruned GMACs", 14, true) << "\n";
  for (const auto& r : rows) {
    os << pad(r.name, 16, false) << pad(r.kind, 14, false) << pad(std::to_string(r.count), 6, true)
       << pad(fixed(FlopReport::giga(r.baseline), 4), 14, true) << pad(fixed(FlopReport::giga(r.pruned), 4), 14, true)
       << "\n";
  }
  os << pad("total", 36, false) << pad(fixed(FlopReport::giga(report.baseline_macs()), 4), 14, true)
     << pad(fixed(FlopReport::giga(report.pruned_macs()), 4), 14, true) << "\n";
  if (report.proposal > 0) {
    os << pad("+ proposal " + report.proposal_model, 36, false) << pad("", 14, true)
       << pad(fixed(FlopReport::giga(report.pruned_macs_with_proposal()), 4), 14, true) << "\n";
  }
  os << "reduction " << fixed(report.reduction_ratio(), 4) << "  block reduction "
     << fixed(report.block_reduction_ratio(), 4) << "  pixel share " << fixed(report.pixel_share(), 4) << "\n";
  os << "(GFLOPs = 2 x GMACs: baseline " << fixed(2.0 * FlopReport::giga(report.baseline_macs()), 4) << ", pruned "
     << fixed(2.0 * FlopReport::giga(report.pruned_macs()), 4) << ")\n";
  return os.str();
}

std::string format_report_records(const FlopReport& report) {
  std::ostringstream os;
  os << "model=" << report.model << "\n";
  os << "z=" << fixed(report.z, 6) << "\n";
  os << "tokens_baseline=" << report.tokens_baseline << "\n";
  os << "tokens_pruned=" << report.tokens_pruned << "\n";
  os << "baseline_macs=" << report.baseline_macs() << "\n";
  os << "pruned_macs=" << report.pruned_macs() << "\n";
  os << "proposal_macs=" << report.proposal << "\n";
  os << "proposal_model=" << report.proposal_model << "\n";
  os << "baseline_flops=" << 2 * report.baseline_macs() << "\n";
  os << "pruned_flops=" << 2 * report.pruned_macs() << "\n";
  os << "baseline_gmacs=" << fixed(FlopReport::giga(report.baseline_macs()), 6) << "\n";
  os << "pruned_gmacs=" << fixed(FlopReport::giga(report.pruned_macs()), 6) << "\n";
  os << "pruned_with_proposal_gmacs=" << fixed(FlopReport::giga(report.pruned_macs_with_proposal()), 6) << "\n";
  os << "reduction_ratio=" << fixed(report.reduction_ratio(), 6) << "\n";
  os << "block_reduction_ratio=" << fixed(report.block_reduction_ratio(), 6) << "\n";
  os << "pixel_share=" << fixed(report.pixel_share(), 6) << "\n";
  for (const auto& e : report.entries) {
    os << "entry." << e.name << "=" << to_string(e.kind) << "," << e.baseline << "," << e.pruned << "\n";
  }
  return os.str();
}

}  // namespace papr
