// csx: command-line front end for the coherence simplex toolkit.

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csx/config.hpp"
#include "csx/errors.hpp"
#include "csx/io.hpp"
#include "csx/nodal.hpp"
#include "csx/parallel.hpp"
#include "csx/propagation.hpp"
#include "csx/render.hpp"
#include "csx/topology.hpp"
#include "csx/verify.hpp"

namespace fs = std::filesystem;
using namespace csx;

namespace {

struct Globals {
  std::string config;
  std::string out_dir;
  int threads = 0;
  bool quiet = false;
};

Globals g;

std::ostream& say() {
  static std::ostringstream sink;
  if (g.quiet) {
    sink.str({});
    return sink;
  }
  return std::cout;
}

std::optional<RunConfig> maybe_config() {
  if (g.config.empty()) return std::nullopt;
  return load_run_config(KeyValueConfig::load(g.config));
}

RunConfig need_config(const char* cmd) {
  auto rc = maybe_config();
  if (!rc) throw ConfigError(std::string(cmd) + " needs --config");
  return *rc;
}

fs::path out_dir(const std::optional<RunConfig>& rc) {
  fs::path dir = !g.out_dir.empty() ? fs::path(g.out_dir) : rc ? rc->output_dir : fs::path("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::string slice_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "slice_%04zu.csg", k);
  return buf;
}

int cmd_hierarchy(int d_max, int p_max) {
  if (d_max < 1 || p_max < 0) throw Error(ErrorKind::kInvalidArgument, "need D_max >= 1 and p_max >= 0");
  const auto table = hierarchy_table(d_max, p_max);
  const fs::path dir = out_dir(maybe_config());
  write_text(dir / "hierarchy.txt", hierarchy_text(table));
  write_text(dir / "hierarchy.csv", hierarchy_csv(table));
  say() << hierarchy_text(table);
  return 0;
}

int cmd_simulate() {
  const RunConfig rc = need_config("simulate");
  const fs::path dir = out_dir(rc);
  const Axis axis = rc.ensemble.domain.axis();
  std::vector<ManifestEntry> manifest;
  const std::size_t count = rc.time.count();
  for (std::size_t k = 0; k < count; ++k) {
    const double t = rc.time.at(k);
    const CoherenceField field = evolve_ensemble_g1(rc.ensemble, axis, axis, t, rc.spin_pairs);
    write_dump(dir / slice_name(k), field);
    manifest.push_back({k, t, t, slice_name(k)});
    if (rc.render && (k == 0 || k + 1 == count)) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "_%04zu.png", k);
      write_image(dir / ("phase" + std::string(stem)), render_field(field, RenderKind::kPhase));
      write_image(dir / ("density" + std::string(stem)), render_field(field, RenderKind::kDensity));
    }
  }
  write_manifest(dir / "manifest.txt", manifest);
  say() << "wrote " << count << " slice(s) and manifest.txt to " << dir.string() << "\n";
  return 0;
}

int cmd_detect(const std::string& dump, std::optional<double> floor, std::vector<int> radii) {
  const auto rc = maybe_config();
  DetectionSpec spec = rc ? rc->detection : DetectionSpec{};
  if (floor) spec.amplitude_floor = *floor;
  if (!radii.empty()) spec.radii_cells = radii;
  const CoherenceField field = read_dump(dump);
  if (field.order != 1) throw Error(ErrorKind::kInvalidArgument, "detect needs a g1 dump");
  const auto maps = winding_maps(field, spec.amplitude_floor);
  const auto defects = scan_defects(field, maps, spec.radii_cells);
  const fs::path dir = out_dir(rc);
  write_text(dir / "winding.csv", winding_csv(maps, field.axis0, field.axis1));
  write_text(dir / "cores.csv", cores_csv(maps));
  write_text(dir / "defects.csv", defects_csv(defects, field.spin_pairs()));
  std::size_t cores = 0;
  for (const auto& m : maps) cores += m.cores.size();
  say() << cores << " core(s), " << defects.size() << " defect location(s)\n";
  say() << std::setprecision(6);
  for (const auto& d : defects) {
    say() << "  x=" << d.x << " x'=" << d.x_prime << " r=" << d.radius_cells << " w="
          << format_winding(d.winding) << "\n";
  }
  return 0;
}

int cmd_trace(const std::string& manifest, const std::string& pair_name, std::optional<double> match,
              std::optional<double> pair_r, std::optional<long> max_anom, std::optional<int> refine) {
  const auto rc = maybe_config();
  TrackingSpec spec = rc ? rc->tracking : TrackingSpec{};
  if (!pair_name.empty()) spec.spin_pair = SpinPair::parse(pair_name);
  if (match) spec.match_radius_cells = *match;
  if (pair_r) spec.pair_radius_cells = *pair_r;
  if (max_anom) spec.max_anomalies = static_cast<std::size_t>(std::max(0L, *max_anom));
  const CoherenceStack stack = load_stack(manifest);
  if (stack.slices.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "trace needs a manifest with at least two slices");
  }
  stack.validate();
  if (stack.mode != StackMode::kEqualTime) throw Error(ErrorKind::kInvalidArgument, "trace needs equal-time slices");
  TrackingParams params{spec.match_radius_cells, spec.pair_radius_cells, spec.max_anomalies,
                        spec.refine_depth};
  if (refine) params.refine_depth = *refine;
  const auto& ref = stack.slices.front();
  std::vector<SliceCores> slices;
  for (const auto& s : stack.slices) slices.push_back(extract_slice_cores(s, spec.spin_pair));
  if (params.refine_depth > 0) {
    // Inserted slices come from the run's ensemble, which must match the stack grid.
    if (!rc) throw ConfigError("refinement needs --config with the run's ensemble");
    const Axis axis = rc->ensemble.domain.axis();
    if (!(axis == ref.axis0) || !(axis == ref.axis1)) {
      throw ConfigError("config grid does not match the stack grid");
    }
    const SliceSource source = [&](double t) {
      return extract_slice_cores(evolve_ensemble_g1(rc->ensemble, axis, axis, t, {spec.spin_pair}),
                                 spec.spin_pair);
    };
    slices = refine_slices(slices, source, axis, axis, params);
  }
  const NodalLineSet set = link_cores(slices, ref.axis0, ref.axis1, stack.dt, spec.spin_pair, params);
  const ConservationReport report = conservation_report(set, slices);
  const fs::path dir = out_dir(rc);
  write_text(dir / "lines.csv", lines_csv(set));
  write_text(dir / "events.csv", events_csv(set));
  write_text(dir / "anomalies.csv", anomalies_csv(set));
  write_text(dir / "conservation.txt", conservation_text(report, set));
  say() << conservation_text(report, set).substr(0, 512);
  return report.ok() ? 0 : 1;
}

int cmd_render(const std::string& dump, const std::string& kind_name, const std::string& out) {
  const RenderKind kind = parse_render_kind(kind_name);
  const CoherenceField field = read_dump(dump);
  fs::path target = out.empty() ? out_dir(maybe_config()) / (kind_name + ".png") : fs::path(out);
  target = write_image(target, render_field(field, kind));
  say() << "wrote " << target.string() << "\n";
  return 0;
}

int cmd_verify(const std::vector<std::string>& configs, const std::vector<std::string>& dumps) {
  std::vector<std::string> all = configs;
  if (!g.config.empty()) all.insert(all.begin(), g.config);
  if (all.empty() && dumps.empty()) throw ConfigError("verify needs --config, config files or --dump");
  VerifyReport rep;
  for (const auto& c : all) {
    rep.merge(verify_run(load_run_config(KeyValueConfig::load(c)), fs::path(c).stem().string()));
  }
  for (const auto& d : dumps) rep.merge(verify_field(read_dump(d), fs::path(d).filename().string()));
  say() << rep.text();
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"csx: coherence simplex simulator and analysis toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", g.config, "run description (key = value file)");
  app.add_option("--out-dir", g.out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", g.threads, "worker threads, 0 = default")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "suppress stdout reports");

  int d_max = 3, p_max = 2;
  auto* hier = app.add_subcommand("hierarchy", "codimension table of vortical and solitonic defects");
  hier->add_option("D_max", d_max, "largest physical dimension");
  hier->add_option("p_max", p_max, "largest correlation order");

  auto* sim = app.add_subcommand("simulate", "evaluate g1 at every time of the run, write dumps + manifest");

  std::string dump_path;
  std::optional<double> floor;
  std::vector<int> radii;
  auto* det = app.add_subcommand("detect", "winding maps, cores and defect vectors of a g1 dump");
  det->add_option("dump", dump_path, "grid dump")->required();
  det->add_option("--floor", floor, "amplitude floor relative to slice maximum");
  det->add_option("--radii", radii, "loop half-widths in cells")->delimiter(',');

  std::string manifest, pair_name;
  std::optional<double> match, pair_r;
  std::optional<long> max_anom;
  auto* tr = app.add_subcommand("trace", "nodal lines, events and conservation report of a stack");
  tr->add_option("manifest", manifest, "stack manifest")->required();
  tr->add_option("--spin-pair", pair_name, "uu, ud, du or dd");
  tr->add_option("--match-radius", match, "cells");
  tr->add_option("--pair-radius", pair_r, "cells");
  tr->add_option("--max-anomalies", max_anom, "tolerated unmatched cores");
  std::optional<int> refine;
  tr->add_option("--refine-depth", refine, "bisection levels for unmatched intervals (needs --config)")
      ->check(CLI::Range(0, 30));

  std::string kind = "phase", out;
  auto* ren = app.add_subcommand("render", "2x2 tiled density or phase image of a dump");
  ren->add_option("dump", dump_path, "grid dump")->required();
  ren->add_option("--kind", kind, "density or phase");
  ren->add_option("--out", out, "image path (.png, or .ppm)");

  std::vector<std::string> configs, dumps;
  auto* ver = app.add_subcommand("verify", "invariant report for runs or dumps");
  ver->add_option("configs", configs, "run descriptions");
  ver->add_option("--dump", dumps, "grid dumps to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_thread_count(g.threads);
    if (*hier) return cmd_hierarchy(d_max, p_max);
    if (*sim) return cmd_simulate();
    if (*det) return cmd_detect(dump_path, floor, radii);
    if (*tr) return cmd_trace(manifest, pair_name, match, pair_r, max_anom, refine);
    if (*ren) return cmd_render(dump_path, kind, out);
    if (*ver) return cmd_verify(configs, dumps);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
