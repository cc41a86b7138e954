#include "csx/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "csx/errors.hpp"
#include "csx/nodal.hpp"
#include "csx/propagation.hpp"
#include "csx/topology.hpp"

namespace csx {

bool VerifyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void VerifyReport::merge(const VerifyReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::string VerifyReport::text() const {
  std::ostringstream os;
  os << std::setprecision(3);
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << c.value
       << " tol=" << c.tolerance;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  os << (ok() ? "ALL PASS" : "FAILED") << '\n';
  return os.str();
}

G1Deviations g1_deviations(const CoherenceField& g1) {
  if (g1.order != 1) throw Error(ErrorKind::kInvalidArgument, "invariant checks need a g1 field");
  G1Deviations d;
  const bool square = g1.equal_time() && g1.same_axes();
  const std::size_t n0 = g1.axis0.n, n1 = g1.axis1.n;
  for (const SpinPair p : g1.spin_pairs()) {
    const auto& a = g1.component(p);
    const SpinPair q{p.second, p.first};
    if (square && g1.has(q)) {
      d.hermiticity_checked = true;
      const auto& b = g1.component(q);
      for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
          d.hermiticity = std::max(d.hermiticity, std::abs(a(i, j) - std::conj(b(j, i))));
    }
    if (square && p.first == p.second) {
      for (std::size_t i = 0; i < n0; ++i) {
        d.diagonal_negativity = std::max(d.diagonal_negativity, -a(i, i).real());
        d.diagonal_negativity = std::max(d.diagonal_negativity, std::abs(a(i, i).imag()));
      }
    }
    const SpinPair dl{p.first, p.first}, dr{p.second, p.second};
    if (square && g1.has(dl) && g1.has(dr)) {
      d.cauchy_schwarz_checked = true;
      const auto& l = g1.component(dl);
      const auto& r = g1.component(dr);
      for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
          d.cauchy_schwarz = std::max(d.cauchy_schwarz,
                                      std::norm(a(i, j)) - l(i, i).real() * r(j, j).real());
    }
  }
  if (g1.axis0.periodic && g1.axis1.periodic) {
    d.periodic_checked = true;
    for (const auto& m : winding_maps(g1)) d.periodic_net += std::labs(m.net());
  }
  return d;
}

VerifyReport g1_invariant_report(const std::vector<G1Deviations>& devs, const std::string& label) {
  G1Deviations worst;
  for (const auto& d : devs) {
    worst.hermiticity = std::max(worst.hermiticity, d.hermiticity);
    worst.cauchy_schwarz = std::max(worst.cauchy_schwarz, d.cauchy_schwarz);
    worst.diagonal_negativity = std::max(worst.diagonal_negativity, d.diagonal_negativity);
    worst.periodic_net = std::max(worst.periodic_net, d.periodic_net);
    worst.hermiticity_checked = worst.hermiticity_checked || d.hermiticity_checked;
    worst.cauchy_schwarz_checked = worst.cauchy_schwarz_checked || d.cauchy_schwarz_checked;
    worst.periodic_checked = worst.periodic_checked || d.periodic_checked;
  }
  VerifyReport rep;
  const std::string n = std::to_string(devs.size()) + " slice(s)";
  if (worst.hermiticity_checked)
    rep.add({label + ".hermiticity", worst.hermiticity < 1e-12, worst.hermiticity, 1e-12, n});
  if (worst.cauchy_schwarz_checked)
    rep.add({label + ".cauchy_schwarz", worst.cauchy_schwarz < 1e-12, worst.cauchy_schwarz, 1e-12, n});
  rep.add({label + ".diagonal_nonnegative", worst.diagonal_negativity < 1e-12,
           worst.diagonal_negativity, 1e-12, n});
  if (worst.periodic_checked)
    rep.add({label + ".periodic_total_winding", worst.periodic_net == 0,
             static_cast<double>(worst.periodic_net), 0.0, n});
  return rep;
}

VerifyReport verify_field(const CoherenceField& g1, const std::string& label) {
  return g1_invariant_report({g1_deviations(g1)}, label);
}

VerifyReport verify_run(const RunConfig& run, const std::string& label) {
  const MixedEnsemble& ens = run.ensemble;
  const Axis axis = ens.domain.axis();
  const std::size_t count = run.time.count();
  std::vector<G1Deviations> devs;
  std::vector<std::vector<SliceCores>> cores(run.spin_pairs.size());
  double trace_drift = 0.0;
  double trace0 = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = run.time.at(k);
    const CoherenceField g = evolve_ensemble_g1(ens, axis, axis, t, run.spin_pairs);
    devs.push_back(g1_deviations(g));
    for (std::size_t p = 0; p < run.spin_pairs.size(); ++p) {
      cores[p].push_back(extract_slice_cores(g, run.spin_pairs[p], run.detection.amplitude_floor));
    }
    if (ens.domain.periodic()) {
      double tr = 0.0;
      for (const SpinPair p : run.spin_pairs) {
        if (p.first != p.second) continue;
        const auto& a = g.component(p);
        for (std::size_t i = 0; i < axis.n; ++i) tr += a(i, i).real() * axis.spacing;
      }
      if (k == 0) trace0 = tr;
      trace_drift = std::max(trace_drift, std::abs(tr - trace0));
    }
  }
  VerifyReport rep = g1_invariant_report(devs, label);
  if (ens.domain.periodic()) {
    rep.add({label + ".trace_conservation", trace_drift < 1e-8, trace_drift, 1e-8, ""});
  }

  if (ens.size() == 1) {
    std::size_t found = 0;
    for (const auto& series : cores)
      for (const auto& s : series) found += s.points.size();
    rep.add({label + ".pure_state_no_cores", found == 0, static_cast<double>(found), 0.0, ""});
  }

  if (count >= 3) {
    const TrackingParams params{run.tracking.match_radius_cells, run.tracking.pair_radius_cells,
                                run.tracking.max_anomalies, run.tracking.refine_depth};
    for (std::size_t p = 0; p < run.spin_pairs.size(); ++p) {
      const std::string name = label + ".conservation[" + run.spin_pairs[p].name() + "]";
      try {
        const SpinPair sp = run.spin_pairs[p];
        const SliceSource source = [&](double t) {
          return extract_slice_cores(evolve_ensemble_g1(ens, axis, axis, t, {sp}), sp,
                                     run.detection.amplitude_floor);
        };
        const auto slices = refine_slices(cores[p], source, axis, axis, params);
        const auto set = link_cores(slices, axis, axis, run.time.step, sp, params);
        const auto report = conservation_report(set, slices);
        rep.add({name, report.ok(), static_cast<double>(report.violations.size()), 0.0,
                 report.violations.empty() ? "" : report.violations.front()});
      } catch (const UnderResolvedError& e) {
        rep.add({name, false, 1.0, 0.0, e.what()});
      }
    }
  }
  return rep;
}

}  // namespace csx
