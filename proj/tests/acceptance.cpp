// Acceptance run: one PASS/FAIL line per criterion, exit 0 only if all pass.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "csx/config.hpp"
#include "csx/errors.hpp"
#include "csx/nodal.hpp"
#include "csx/propagation.hpp"
#include "csx/topology.hpp"
#include "csx/verify.hpp"

namespace fs = std::filesystem;
using namespace csx;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> outcomes;
std::vector<G1Deviations> all_devs;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  outcomes.push_back({id, name, pass, detail});
  std::cerr << "criterion " << id << " done" << std::endl;
}

MixedEnsemble ensemble_from(const std::string& cfg, std::size_t n) {
  MixedEnsemble e = build_ensemble(KeyValueConfig::load(fs::path(CSX_CONFIG_DIR) / cfg));
  e.domain.n = n;
  e.domain.validate();
  return e;
}

CoherenceField g1_of(const MixedEnsemble& e, double t = 0.0) {
  CoherenceField g = evolve_ensemble_g1(e, e.domain.axis(), e.domain.axis(), t);
  all_devs.push_back(g1_deviations(g));
  return g;
}

// ---------------------------------------------------------------- 1

void criterion_hierarchy() {
  const auto t0 = Clock::now();
  const auto table = hierarchy_table(3, 2);
  const int cv[3][3] = {{-1, 0, 2}, {0, 2, 6}, {1, 4, 10}};
  bool ok = table.size() == 18;
  for (const auto& e : table) {
    const int m = e.order == 0 ? e.dimension : 2 * e.order * e.dimension;
    ok = ok && e.embedding == m && e.codimension == m - e.consumed;
    if (e.kind == DefectKind::kVortical) {
      ok = ok && e.codimension == cv[e.dimension - 1][e.order];
      ok = ok && e.representable == !(e.dimension == 1 && e.order == 0);
    } else {
      ok = ok && e.kind == DefectKind::kSolitonic && e.representable;
    }
  }
  const double lib_s = seconds_since(t0);

  const fs::path dir = fs::temp_directory_path() / "csx_acceptance_hierarchy";
  const auto t1 = Clock::now();
  const std::string cmd = std::string(CSX_CLI_PATH) + " --quiet --out-dir " + dir.string() + " hierarchy 3 2";
  const int status = std::system(cmd.c_str());
  const double cli_s = seconds_since(t1);
  std::ifstream csv(dir / "hierarchy.csv");
  std::stringstream ss;
  ss << csv.rdbuf();
  const bool cli_ok = WIFEXITED(status) && WEXITSTATUS(status) == 0 && ss.str() == hierarchy_csv(table);
  std::ostringstream d;
  d << std::setprecision(3) << "18 entries exact=" << (ok ? "yes" : "no") << " cli=" << (cli_ok ? "ok" : "bad")
    << " runtime=" << cli_s << "s (lib " << lib_s << "s) tol<1s";
  report(1, "hierarchy", ok && cli_ok && cli_s < 1.0, d.str());
}

// ---------------------------------------------------------------- 2, 3, 9

struct Detection {
  CoherenceField g;
  MixedEnsemble ens;
  std::vector<WindingMap> maps;
  std::vector<DefectRecord> hits;
  double seconds = 0.0;
};

Detection detect(const std::string& cfg, std::size_t n, int scale, const std::vector<int>& target) {
  Detection out;
  const auto t0 = Clock::now();
  out.ens = ensemble_from(cfg, n);
  out.g = g1_of(out.ens);
  out.maps = winding_maps(out.g);
  std::vector<int> radii;
  for (int r : DetectionSpec{}.radii_cells) radii.push_back(r * scale);
  for (const auto& rec : scan_defects(out.g, out.maps, radii))
    if (rec.winding == target) out.hits.push_back(rec);
  out.seconds = seconds_since(t0);
  return out;
}

void criterion_defect(int id, const std::string& name, const std::string& cfg, const std::vector<int>& target,
                      std::vector<Detection>& keep) {
  Detection coarse = detect(cfg, 512, 1, target);
  Detection fine = detect(cfg, 1023, 2, target);
  // Stable: some coarse hit has a fine hit within its loop half-width.
  bool stable = false;
  double best = INFINITY;
  for (const auto& a : coarse.hits) {
    const double r = a.radius_cells * coarse.ens.domain.spacing();
    for (const auto& b : fine.hits) {
      const double dist = std::hypot(a.x - b.x, a.x_prime - b.x_prime);
      best = std::min(best, dist);
      stable = stable || dist <= r;
    }
  }
  std::ostringstream d;
  d << std::setprecision(4) << format_winding(target) << " hits 512:" << coarse.hits.size()
    << " 1023:" << fine.hits.size();
  if (!coarse.hits.empty()) {
    const auto& h = coarse.hits.front();
    d << " at (x,x')=(" << h.x << "," << h.x_prime << ") r=" << h.radius_cells;
  }
  d << " shift=" << best << " runtime=" << coarse.seconds << "s/" << fine.seconds << "s tol<10s";
  report(id, name, !coarse.hits.empty() && !fine.hits.empty() && stable && coarse.seconds < 10.0, d.str());
  keep.push_back(std::move(coarse));
  keep.push_back(std::move(fine));
}

// Plaquette windings rebuilt from edges sampled 100x finer than the grid.
struct OracleTally {
  std::size_t plaquettes = 0;
  std::size_t mismatches = 0;
  std::size_t loops = 0;
  std::size_t loop_mismatches = 0;
};

void refined_oracle(const Detection& det, OracleTally& tally) {
  constexpr std::size_t R = 100;
  const MixedEnsemble& e = det.ens;
  const Axis ax = e.domain.axis();
  const std::size_t n = ax.n, nr = (n - 1) * R + 1;
  const double hr = ax.spacing / R;
  const std::size_t members = e.size();
  for (std::size_t k = 0; k < det.maps.size(); ++k) {
    const SpinPair p = det.g.spin_pairs()[k];
    const WindingMap& map = det.maps[k];
    // coarse[m][i], fine[m][j]: member m, spin s at grid / refined nodes.
    auto table = [&](Spin s, std::size_t count, double step, bool conj) {
      std::vector<cd> t(members * count);
      for (std::size_t m = 0; m < members; ++m)
        for (std::size_t i = 0; i < count; ++i) {
          const double x = std::min(ax.origin + static_cast<double>(i) * step, ax.upper());
          const cd v = evaluate_packet(e.packets[m], s, x, 0.0, e.constants, e.domain);
          t[m * count + i] = conj ? e.weights[m] * std::conj(v) : v;
        }
      return t;
    };
    const auto row_c = table(p.first, n, ax.spacing, true);   // conj psi_s(x) w, coarse x
    const auto col_f = table(p.second, nr, hr, false);        // psi_s'(x'), refined x'
    const auto row_f = table(p.first, nr, hr, true);          // refined x
    const auto col_c = table(p.second, n, ax.spacing, false); // coarse x'
    // along_u(r, c): phase change from (x_r, x'_c) to (x_r, x'_{c+1}).
    Array2D<double> along_u(n, n - 1), along_v(n - 1, n);
    std::vector<double> ph(nr);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < nr; ++j) {
        cd g{};
        for (std::size_t m = 0; m < members; ++m) g += row_c[m * n + r] * col_f[m * nr + j];
        ph[j] = std::arg(g);
      }
      for (std::size_t c = 0; c + 1 < n; ++c) {
        double s = 0.0;
        for (std::size_t j = c * R; j < (c + 1) * R; ++j) s += wrap_phase(ph[j + 1] - ph[j]);
        along_u(r, c) = s;
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t j = 0; j < nr; ++j) {
        cd g{};
        for (std::size_t m = 0; m < members; ++m) g += row_f[m * nr + j] * col_c[m * n + c];
        ph[j] = std::arg(g);
      }
      for (std::size_t r = 0; r + 1 < n; ++r) {
        double s = 0.0;
        for (std::size_t j = r * R; j < (r + 1) * R; ++j) s += wrap_phase(ph[j + 1] - ph[j]);
        along_v(r, c) = s;
      }
    }
    const CoherenceSampler exact(e, 0.0, 0.0);
    const Sampler sampler = [&](double u, double v) { return exact(p, v, u); };
    for (std::size_t r = 0; r + 1 < n; ++r) {
      for (std::size_t c = 0; c + 1 < n; ++c) {
        if (map.indeterminate(r, c)) continue;
        const double circ = along_u(r, c) + along_v(r, c + 1) - along_u(r + 1, c) - along_v(r, c);
        const long m = std::lround(circ / (2 * std::numbers::pi));
        ++tally.plaquettes;
        if (m != map.charge(r, c)) ++tally.mismatches;
        if (map.charge(r, c) != 0) {
          const Point2 centre{ax.coordinate(c) + 0.5 * ax.spacing, ax.coordinate(r) + 0.5 * ax.spacing};
          ++tally.loops;
          try {
            if (loop_circulation(sampler, square_loop(centre, 0.5 * ax.spacing, R)) != map.charge(r, c))
              ++tally.loop_mismatches;
          } catch (const OnCoreError&) {
            ++tally.loop_mismatches;
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------- 4

void criterion_huygens() {
  const auto t0 = Clock::now();
  MixedEnsemble e = ensemble_from("two_packet.cfg", 512);
  e.domain.boundary = Boundary::kPeriodic;
  e = [&] {
    MixedEnsemble r = e;
    for (auto& p : r.packets) p = normalize_packet(p, r.domain);
    return r;
  }();
  const Axis ax = e.domain.axis();
  const auto g0 = g1_of(e, 0.0);
  const auto want = g1_of(e, 1.0);
  const auto got = huygens_propagate_g1(g0, PropagationKernel(KernelKind::kFreePeriodicSpectral, ax, 1.0));
  all_devs.push_back(g1_deviations(got));
  double scale = 0.0, diff = 0.0;
  for (std::size_t k = 0; k < got.values.size(); ++k)
    for (std::size_t c = 0; c < got.values[k].size(); ++c) {
      scale = std::max(scale, std::abs(want.values[k].data()[c]));
      diff = std::max(diff, std::abs(got.values[k].data()[c] - want.values[k].data()[c]));
    }
  const double rel = diff / scale;
  std::ostringstream d;
  d << std::setprecision(3) << "periodic 512^2 tau=1 max|dg|/max|g|=" << rel << " tol<1e-6 runtime="
    << seconds_since(t0) << "s";
  report(4, "huygens-route", rel < 1e-6, d.str());
}

// ---------------------------------------------------------------- 5

double wolf_l2(std::size_t n, double dt, SpinPair p, Argument which) {
  MixedEnsemble e = ensemble_from("two_packet.cfg", n);
  e.domain.boundary = Boundary::kPeriodic;
  for (auto& pk : e.packets) pk = normalize_packet(pk, e.domain);
  const Axis ax = e.domain.axis();
  const double t = 0.5;
  const StackMode mode = which == Argument::kSecond ? StackMode::kSecondOnly : StackMode::kFirstOnly;
  const double tf = which == Argument::kSecond ? t : t - dt;
  const double ts = which == Argument::kSecond ? t - dt : t;
  const auto s = build_stack(e, ax, ax, tf, ts, dt, 3, mode, {p});
  return wolf_residual(s, which).l2_norm;
}

void criterion_wolf() {
  const auto t0 = Clock::now();
  double lo = INFINITY, hi = -INFINITY;
  for (SpinPair p : all_spin_pairs()) {
    for (Argument a : {Argument::kFirst, Argument::kSecond}) {
      const double r = wolf_l2(512, 0.01, p, a) / wolf_l2(1024, 0.005, p, a);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  // Plane waves exp(i(kx - k^2 t/2)) with analytic derivatives.
  std::vector<WeightedMode> waves;
  for (auto [k, w] : {std::pair{0.7, 0.5}, std::pair{-1.9, 0.5}}) {
    waves.push_back({w, [k](Spin s, double x, double t) {
                       const double q = s == Spin::kUp ? k : -0.5 * k;
                       const cd v = std::polar(1.0, q * x - 0.5 * q * q * t);
                       return PointDerivatives{v, cd{0, q} * v, -q * q * v, cd{0, -0.5 * q * q} * v};
                     }});
  }
  const Axis ax{-6.0, 12.0 / 512, 512, true};
  double plane = 0.0;
  for (Argument a : {Argument::kFirst, Argument::kSecond})
    plane = std::max(plane, analytic_wolf_residual(waves, ax, ax, 0.8, 1.7, a).max_norm);
  std::ostringstream d;
  d << std::setprecision(4) << "L2 ratio (h,dt)->(h/2,dt/2) in [" << lo << ", " << hi
    << "] tol [3.5,4.5]; plane-wave residual=" << plane << " tol<1e-10 runtime=" << seconds_since(t0) << "s";
  report(5, "wolf-residual", lo >= 3.5 && hi <= 4.5 && plane < 1e-10, d.str());
}

// ---------------------------------------------------------------- 6

struct TrackTally {
  std::size_t checked = 0;
  std::size_t inconsistent = 0;
};

void criterion_circulation(TrackTally& tally) {
  const auto t0 = Clock::now();
  const RunConfig rc = load_run_config(KeyValueConfig::load(fs::path(CSX_CONFIG_DIR) / "ring_lines.cfg"));
  const MixedEnsemble& e = rc.ensemble;
  const Axis ax = e.domain.axis();
  const std::size_t count = rc.time.count();
  const TrackingParams params{rc.tracking.match_radius_cells, rc.tracking.pair_radius_cells,
                              rc.tracking.max_anomalies, rc.tracking.refine_depth};
  bool ok = count >= 100 && e.domain.periodic() && e.domain.length == 12.0 && rc.time.end == 5.0;
  std::ostringstream d;
  d << "slices=" << count;
  for (SpinPair p : all_spin_pairs()) {
    try {
      const auto run = track_ensemble(e, ax, ax, rc.time.start, rc.time.step, count, p, params);
      const auto rep = conservation_report(run.set, run.slices);
      const std::size_t loops = run.set.count(LineTopology::kLoop), open = run.set.count(LineTopology::kOpen);
      ok = ok && rep.net_constant && rep.events_balanced && loops >= 1 && open >= 1;
      tally.checked += rep.slices.size();
      for (const auto& s : rep.slices) tally.inconsistent += !s.consistent;
      d << " | " << p.name() << ": net=" << (rep.slices.empty() ? 0 : rep.slices.front().net)
        << (rep.net_constant ? " const" : " DRIFTS") << " events=" << run.set.events.size()
        << (rep.events_balanced ? " paired" : " UNPAIRED") << " loops=" << loops << " open=" << open
        << " refined=" << run.slices.size();
    } catch (const UnderResolvedError& err) {
      ok = false;
      d << " | " << p.name() << ": " << err.what();
    }
  }
  // Invariants on the full base stack.
  for (std::size_t k = 0; k < count; ++k) all_devs.push_back(g1_deviations(evolve_ensemble_g1(e, ax, ax, rc.time.at(k))));
  const double s = seconds_since(t0);
  d << std::setprecision(3) << " runtime=" << s << "s tol<120s";
  report(6, "circulation-conservation", ok && s < 120.0, d.str());
}

// ---------------------------------------------------------------- 7

void criterion_invariants() {
  const auto rep = g1_invariant_report(all_devs, "g1");
  std::ostringstream d;
  d << std::setprecision(3) << all_devs.size() << " fields;";
  for (const auto& c : rep.checks) d << " " << c.name.substr(3) << "=" << c.value;
  d << " tol<1e-12, periodic total winding == 0";
  report(7, "g1-invariants", rep.ok(), d.str());
}

// ---------------------------------------------------------------- 8

void criterion_pure() {
  const RunConfig rc = load_run_config(KeyValueConfig::load(fs::path(CSX_CONFIG_DIR) / "pure.cfg"));
  std::size_t cores = 0, slices = 0;
  std::vector<double> times;
  for (std::size_t k = 0; k < rc.time.count(); ++k) times.push_back(rc.time.at(k));
  for (double t = 0.0; t <= 5.0 + 1e-12; t += 0.25) times.push_back(t);
  for (const Boundary b : {Boundary::kPeriodic, Boundary::kOpen}) {
    MixedEnsemble e = rc.ensemble;
    e.domain.boundary = b;
    for (auto& p : e.packets) p = normalize_packet(p, e.domain);
    for (double t : times) {
      const auto g = g1_of(e, t);
      for (const auto& m : winding_maps(g)) cores += m.cores.size();
      ++slices;
    }
  }
  std::ostringstream d;
  d << cores << " cores over " << slices << " slices x 4 spin pairs (periodic and open)";
  report(8, "pure-state-null", cores == 0, d.str());
}

}  // namespace

int main() {
  std::cout << "csx acceptance" << std::endl;
  try {
    criterion_hierarchy();
    std::vector<Detection> dets;
    criterion_defect(2, "two-packet-defect", "two_packet.cfg", {1, 1, 1, 1}, dets);
    criterion_defect(3, "three-packet-defect", "three_packet.cfg", {0, -1, 1, 0}, dets);
    criterion_huygens();
    criterion_wolf();
    TrackTally track;
    criterion_circulation(track);
    criterion_pure();
    criterion_invariants();

    const auto t0 = Clock::now();
    OracleTally tally;
    for (const auto& det : dets) refined_oracle(det, tally);
    std::ostringstream d;
    d << std::setprecision(3) << "plaquettes " << tally.plaquettes << " mismatches " << tally.mismatches
      << "; nonzero loops " << tally.loops << " mismatches " << tally.loop_mismatches
      << "; tracked slices " << track.checked << " inconsistent " << track.inconsistent
      << " runtime=" << seconds_since(t0) << "s";
    report(9, "oracle-cross-checks",
           tally.mismatches == 0 && tally.loop_mismatches == 0 && tally.loops > 0 && track.checked > 0 &&
               track.inconsistent == 0,
           d.str());
  } catch (const std::exception& e) {
    for (const auto& o : outcomes) std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << o.id << "  " << o.name << "  " << o.detail << '\n';
    std::cout << "FAIL  aborted: " << e.what() << std::endl;
    return 1;
  }
  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  bool all = outcomes.size() == 9;
  for (const auto& o : outcomes) {
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << o.id << "  " << o.name << "  " << o.detail << '\n';
    all = all && o.pass;
  }
  std::cout << (all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << std::endl;
  return all ? 0 : 1;
}
