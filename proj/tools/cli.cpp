// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "papr/flops.hpp"
#include "papr/io/config.hpp"
#include "papr/io/mask_record.hpp"
#include "papr/io/netpbm.hpp"
#include "papr/io/tensor_file.hpp"
#include "papr/io/weights.hpp"
#include "papr/models.hpp"
#include "papr/psm.hpp"
#include "papr/report.hpp"

namespace fs = std::filesystem;

namespace papr::cli {

namespace {

/// Bad input discovered before any computation; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string proposal;
  std::string backbone;
  std::string weights;
  std::string proposal_weights;
  std::string out = ".";
  std::string z = "0.5";
  std::string grid;
  std::string clip;
  std::string format = "table";
  std::uint64_t seed = 0;
  std::size_t heatmap_scale = 1;
  bool no_prune = false;
};

// Outputs are staged in memory and written only after every step succeeded.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string text) {
    files_.emplace_back(name, std::vector<std::uint8_t>(text.begin(), text.end()));
  }
  void add(const std::string& name, std::vector<std::uint8_t> bytes) { files_.emplace_back(name, std::move(bytes)); }

  void commit() const {
    fs::create_directories(dir_);
    for (const auto& [name, bytes] : files_) io::write_file_bytes(dir_ / name, bytes);
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::vector<std::uint8_t>>> files_;
};

double parse_z(const std::string& text) {
  double z = 0.0;
  try {
    z = io::parse_double(text, "z");
  } catch (const SpecError&) {
    throw UsageError("--z: expected a number, got '" + text + "'");
  }
  if (!(z > 0.0 && z <= 1.0)) throw UsageError("--z must be in (0, 1], got " + text);
  return z;
}

std::vector<double> parse_z_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_z(item));
  if (out.empty()) throw UsageError("--z: empty list");
  return out;
}

std::pair<double, double> parse_clip(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError("--clip-percentiles expects lo,hi");
  try {
    const double lo = io::parse_double(text.substr(0, comma), "clip");
    const double hi = io::parse_double(text.substr(comma + 1), "clip");
    if (!(lo >= 0.0 && hi <= 100.0 && lo < hi)) throw UsageError("--clip-percentiles needs 0 <= lo < hi <= 100");
    return {lo, hi};
  } catch (const SpecError&) {
    throw UsageError("--clip-percentiles expects two numbers, got '" + text + "'");
  }
}

PatchGrid parse_grid(const std::string& text) {
  Dims extents;
  std::istringstream in(text);
  std::string item;
  try {
    while (std::getline(in, item, 'x')) extents.push_back(io::parse_size(item, "grid"));
    return PatchGrid(extents);
  } catch (const std::exception&) {
    throw UsageError("--grid expects HxW or TxHxW with positive extents, got '" + text + "'");
  }
}

ModelSpec load_spec(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  try {
    return io::load_model_config(path);
  } catch (const std::exception& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

ModelSpec load_proposal_spec(const std::string& path) {
  ModelSpec spec = load_spec(path, "--proposal");
  if (spec.family != Family::ConvNet) throw UsageError("--proposal must describe a convnet");
  if (spec.preset != "custom") {
    throw UsageError("--proposal: preset '" + spec.preset + "' is FLOP-count only; runnable proposals are custom stacks");
  }
  return spec;
}

Tensor load_image(const std::string& path) {
  if (path.empty()) throw UsageError("an input image is required");
  Tensor image;
  try {
    const std::string ext = fs::path(path).extension().string();
    image = (ext == ".ppm") ? io::read_ppm(path) : io::read_tensor_file(path);
  } catch (const std::exception& e) {
    throw UsageError(std::string("input: ") + e.what());
  }
  if (image.rank() != 3 || image.dim(0) != 3) {
    throw UsageError("input must be a colour image or a [3,H,W] tensor, got " + dims_to_string(image.dims()));
  }
  return image;
}

Tensor load_frames(const std::string& dir) {
  if (dir.empty() || !fs::is_directory(dir)) throw UsageError("frame directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no .ppm frames in '" + dir + "'");
  std::vector<Tensor> frames;
  for (const auto& f : files) frames.push_back(load_image(f.string()));
  const Dims frame_dims = frames.front().dims();
  Dims dims{frames.size()};
  dims.insert(dims.end(), frame_dims.begin(), frame_dims.end());
  Tensor clip(dims);
  const std::size_t n = frames.front().numel();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].dims() != frame_dims) throw UsageError("frame " + files[i].string() + " differs in size");
    std::copy(frames[i].data().begin(), frames[i].data().end(),
              clip.data().begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return clip;
}

void require_image_fits(const ModelSpec& spec, std::size_t h, std::size_t w, const char* flag) {
  if (spec.height() != h || spec.width() != w) {
    throw UsageError(std::string(flag) + " expects " + std::to_string(spec.height()) + "x" +
                     std::to_string(spec.width()) + " input, image is " + std::to_string(h) + "x" + std::to_string(w));
  }
}

ParameterSet parameters_for(const ModelSpec& spec, const std::string& weights_dir, std::uint64_t seed,
                            const char* flag) {
  try {
    if (!weights_dir.empty()) return io::load_weights(weights_dir, spec);
    return random_parameters(spec, seed);
  } catch (const std::exception& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::string format_values(const Tensor& t) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < t.numel(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(t[i]));
    if (i) out += ',';
    out += buf;
  }
  return out;
}

std::string logits_record(const Tensor& logits, double z, bool pruned) {
  const auto data = logits.data();
  const auto best = std::max_element(data.begin(), data.end()) - data.begin();
  std::string out = "pruned = " + std::string(pruned ? "true" : "false") + "\n";
  out += "z = " + io::format_double(z) + "\n";
  out += "argmax = " + std::to_string(best) + "\n";
  out += "logits = " + format_values(logits) + "\n";
  return out;
}

PatchGrid grid_from(const Options& o) {
  if (!o.grid.empty()) return parse_grid(o.grid);
  if (o.backbone.empty()) throw UsageError("psm needs --grid or --backbone");
  const ModelSpec backbone = load_spec(o.backbone, "--backbone");
  if (backbone.family == Family::TokenVit) return PatchGrid(token_grid(backbone));
  if (backbone.family == Family::Hierarchical) {
    return PatchGrid({backbone.height() / backbone.patch, backbone.width() / backbone.patch});
  }
  throw UsageError("--backbone must be a token-vit or hierarchical model");
}

std::optional<std::pair<double, double>> clip_from(const Options& o) {
  if (o.clip.empty()) return std::nullopt;
  return parse_clip(o.clip);
}

void add_reports(OutputSet& outputs, const FlopReport& report, const std::string& stem) {
  outputs.add(stem + ".txt", format_report_table(report));
  outputs.add(stem + ".kv", format_report_records(report));
}

int cmd_psm(const Options& o, std::ostream& out) {
  const ModelSpec proposal = load_proposal_spec(o.proposal);
  const double z = parse_z(o.z);
  const PatchGrid grid = grid_from(o);
  if (grid.rank() != 2) throw UsageError("psm works on 2-D grids; use `papr video` for clips");
  const auto clip = clip_from(o);
  const Tensor image = load_image(o.input);
  require_image_fits(proposal, image.dim(1), image.dim(2), "--proposal");
  const ProposalNet net = build_proposal(proposal, parameters_for(proposal, o.weights, o.seed, "--weights"));

  const RegionProposal rp = region_proposal(net.forward(image));
  const PatchSignificanceMap psm = build_psm(rp, grid);
  const PruneMask mask = build_mask(psm, z);
  const PatchSignificanceMap shown = normalize_psm(psm, clip);

  OutputSet outputs(o.out);
  outputs.add("heatmap.pgm", io::encode_netpbm(io::heatmap_raster(shown, o.heatmap_scale)));
  outputs.add("mask.txt", io::format_mask_record(mask));
  outputs.commit();
  out << "grid " << grid.to_string() << ": kept " << mask.keep_count() << " of " << grid.n_patches() << " patches\n";
  return kOk;
}

int cmd_e2e(const Options& o, std::ostream& out) {
  const ModelSpec proposal = load_proposal_spec(o.proposal);
  const ModelSpec backbone = load_spec(o.backbone, "--backbone");
  if (backbone.family == Family::ConvNet || backbone.is_video()) {
    throw UsageError("--backbone must be an image token-vit or a hierarchical model");
  }
  if (backbone.family == Family::Hierarchical && backbone.block != HierBlockKind::ConvNeXt) {
    throw UsageError("--backbone: only convnext hierarchical blocks are runnable");
  }
  const double z = o.no_prune ? 1.0 : parse_z(o.z);
  const Tensor image = load_image(o.input);
  require_image_fits(backbone, image.dim(1), image.dim(2), "--backbone");
  require_image_fits(proposal, image.dim(1), image.dim(2), "--proposal");
  const ParameterSet backbone_params = parameters_for(backbone, o.weights, o.seed + 1, "--weights");
  const ParameterSet proposal_params = parameters_for(proposal, o.proposal_weights, o.seed, "--proposal-weights");

  OutputSet outputs(o.out);
  std::optional<RegionProposal> rp;
  if (!o.no_prune) rp = region_proposal(build_proposal(proposal, proposal_params).forward(image));

  Tensor logits;
  if (backbone.family == Family::TokenVit) {
    const VisionTransformer vit = build_vit(backbone, backbone_params);
    const Tensor batch = image.reshaped({1, 3, image.dim(1), image.dim(2)});
    if (rp) {
      const PruneMask mask = build_mask(build_psm(*rp, PatchGrid(token_grid(backbone))), z);
      logits = vit.forward_pruned(batch, std::span<const PruneMask>(&mask, 1));
      outputs.add("mask.txt", io::format_mask_record(mask));
    } else {
      logits = vit.forward(batch);
    }
  } else {
    const HierarchicalNet net = build_hierarchical(backbone, backbone_params);
    if (rp) {
      logits = net.forward_pruned(image, *rp, z);
      const auto grids = net.stage_grids(image.dim(1), image.dim(2));
      for (std::size_t s = 0; s < grids.size(); ++s) {
        outputs.add("mask_stage" + std::to_string(s) + ".txt", io::format_mask_record(build_mask(build_psm(*rp, grids[s]), z)));
      }
    } else {
      logits = net.forward(image);
    }
  }

  FlopReport report = count_model(backbone, z);
  if (!o.no_prune) attach_proposal(report, count_proposal(proposal));
  const std::string record = logits_record(logits, z, !o.no_prune);
  outputs.add("logits.txt", record);
  add_reports(outputs, report, "flops");
  outputs.commit();
  out << record;
  out << "reduction_ratio = " << io::format_double(report.reduction_ratio()) << "\n";
  out << "block_reduction_ratio = " << io::format_double(report.block_reduction_ratio()) << "\n";
  return kOk;
}

int cmd_flops(const Options& o, std::ostream& out) {
  const ModelSpec backbone = load_spec(o.backbone, "--backbone");
  const std::vector<double> zs = parse_z_list(o.z);
  std::optional<FlopReport> proposal;
  if (!o.proposal.empty()) {
    const ModelSpec p = load_spec(o.proposal, "--proposal");
    if (p.family != Family::ConvNet) throw UsageError("--proposal must describe a convnet");
    proposal = count_proposal(p);
  }
  if (o.format != "table" && o.format != "kv") throw UsageError("--format must be table or kv");

  OutputSet outputs(o.out);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    FlopReport report = count_model(backbone, zs[i]);
    if (proposal && zs[i] < 1.0) attach_proposal(report, *proposal);
    if (i) out << "\n";
    out << (o.format == "kv" ? format_report_records(report) : format_report_table(report));
    add_reports(outputs, report, "flops_z" + io::format_double(zs[i]));
  }
  if (!o.out.empty() && o.out != "-") outputs.commit();
  return kOk;
}

int cmd_video(const Options& o, std::ostream& out) {
  const ModelSpec proposal = load_proposal_spec(o.proposal);
  const ModelSpec backbone = load_spec(o.backbone, "--backbone");
  if (backbone.family != Family::TokenVit || !backbone.is_video()) {
    throw UsageError("--backbone must be a token-vit with T,H,W input");
  }
  const double z = parse_z(o.z);
  const auto clip = clip_from(o);
  const Tensor frames = load_frames(o.input);
  if (frames.dim(0) != backbone.frames()) {
    throw UsageError("--backbone expects " + std::to_string(backbone.frames()) + " frames, found " +
                     std::to_string(frames.dim(0)));
  }
  require_image_fits(backbone, frames.dim(2), frames.dim(3), "--backbone");
  require_image_fits(proposal, frames.dim(2), frames.dim(3), "--proposal");
  const ProposalNet net = build_proposal(proposal, parameters_for(proposal, o.weights, o.seed, "--weights"));

  const PatchGrid grid(token_grid(backbone));
  const RegionProposal rp = region_proposal(net.forward_clip(frames));
  const PatchSignificanceMap psm = build_psm(rp, grid);
  const PruneMask mask = build_mask(psm, z);

  const std::size_t slice = grid.extents()[1] * grid.extents()[2];
  std::vector<std::size_t> per_slice(grid.extents()[0], 0);
  for (auto i : mask.kept) ++per_slice[i / slice];

  FlopReport report = count_video_vit(backbone, z);
  FlopReport per_frame = count_proposal(proposal);
  attach_proposal(report, per_frame);
  report.proposal *= frames.dim(0);

  OutputSet outputs(o.out);
  outputs.add("mask.txt", io::format_mask_record(mask));
  outputs.add("heatmap.pgm", io::encode_netpbm(io::heatmap_raster(normalize_psm(psm, clip), o.heatmap_scale)));
  outputs.add("slices.txt", "kept_per_slice = " + io::format_size_list(per_slice) + "\n");
  add_reports(outputs, report, "flops");
  outputs.commit();
  out << "grid " << grid.to_string() << ": kept " << mask.keep_count() << " of " << grid.n_patches()
      << " patches; per slice " << io::format_size_list(per_slice) << "\n";
  return kOk;
}

int cmd_init_weights(const Options& o, std::ostream& out) {
  const ModelSpec spec = load_spec(o.backbone, "--config");
  ParameterSet params;
  try {
    params = random_parameters(spec, o.seed);
  } catch (const SpecError& e) {
    throw UsageError(e.what());
  }
  io::save_weights(o.out, params);
  out << "wrote " << params.size() << " tensors to " << o.out << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patch-significance pruning: proposal maps, pruned inference and FLOP accounting", "papr"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Seed for random weights when none are supplied");
    cmd->add_option("--out", o.out, "Output directory");
  };
  auto add_z = [&](CLI::App* cmd) { cmd->add_option("--z", o.z, "Patch keep ratio in (0, 1]"); };
  auto add_heatmap = [&](CLI::App* cmd) {
    cmd->add_option("--clip-percentiles", o.clip, "Clip the heatmap to lo,hi percentiles before scaling");
    cmd->add_option("--heatmap-scale", o.heatmap_scale, "Nearest-neighbour upscale factor for the heatmap")
        ->check(CLI::PositiveNumber);
  };

  auto* psm = app.add_subcommand("psm", "Patch significance heatmap and prune mask for one image");
  psm->add_option("input", o.input, "Image (.ppm) or [3,H,W] tensor file")->required();
  psm->add_option("--proposal", o.proposal, "Proposal convnet config")->required();
  psm->add_option("--weights", o.weights, "Proposal weights directory");
  psm->add_option("--grid", o.grid, "Target patch grid, e.g. 14x14");
  psm->add_option("--backbone", o.backbone, "Backbone config (grid source when --grid is absent)");
  add_z(psm);
  add_heatmap(psm);
  add_common(psm);

  auto* e2e = app.add_subcommand("e2e", "Pruned (or dense) inference of one image");
  e2e->add_option("input", o.input, "Image (.ppm) or [3,H,W] tensor file")->required();
  e2e->add_option("--proposal", o.proposal, "Proposal convnet config")->required();
  e2e->add_option("--backbone", o.backbone, "Backbone config")->required();
  e2e->add_option("--weights", o.weights, "Backbone weights directory");
  e2e->add_option("--proposal-weights", o.proposal_weights, "Proposal weights directory");
  e2e->add_flag("--no-prune", o.no_prune, "Run the dense baseline");
  add_z(e2e);
  add_common(e2e);

  auto* flops = app.add_subcommand("flops", "Analytical MAC/FLOP report over a z sweep");
  flops->add_option("--backbone", o.backbone, "Model config")->required();
  flops->add_option("--proposal", o.proposal, "Proposal convnet config (cost added to pruned runs)");
  flops->add_option("--z", o.z, "Comma-separated keep ratios")->default_val("1");
  flops->add_option("--format", o.format, "Standard output format: table or kv");
  flops->add_option("--out", o.out, "Directory for report files ('-' for none)")->default_val("-");

  auto* video = app.add_subcommand("video", "Spatio-temporal mask for a clip of .ppm frames");
  video->add_option("input", o.input, "Directory of .ppm frames (sorted by name)")->required();
  video->add_option("--proposal", o.proposal, "Proposal convnet config")->required();
  video->add_option("--backbone", o.backbone, "Video token-vit config")->required();
  video->add_option("--weights", o.weights, "Proposal weights directory");
  add_z(video);
  add_heatmap(video);
  add_common(video);

  auto* init = app.add_subcommand("init-weights", "Write seeded random weights as tensor files + manifest");
  init->add_option("--config", o.backbone, "Model config")->required();
  add_common(init);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "papr: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*psm) return cmd_psm(o, out);
    if (*e2e) return cmd_e2e(o, out);
    if (*flops) return cmd_flops(o, out);
    if (*video) return cmd_video(o, out);
    if (*init) return cmd_init_weights(o, out);
  } catch (const UsageError& e) {
    err << "papr: " << e.what() << "\n";
    return kUsage;
  } catch (const SpecError& e) {
    err << "papr: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "papr: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace papr::cli
