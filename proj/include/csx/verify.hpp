#pragma once

#include <string>
#include <vector>

#include "csx/coherence.hpp"
#include "csx/config.hpp"

namespace csx {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool ok() const;
  void add(CheckResult r) { checks.push_back(std::move(r)); }
  void merge(const VerifyReport& other);
  std::string text() const;  // one PASS/FAIL line per check
};

// Largest deviations of one g1 field from its structural invariants.
struct G1Deviations {
  double hermiticity = 0.0;     // needs equal times and identical axes
  double cauchy_schwarz = 0.0;  // positive part of |g|^2 - g_ss g_s's'
  double diagonal_negativity = 0.0;
  long periodic_net = 0;        // summed |net| over pairs on a fully periodic slice
  bool hermiticity_checked = false;
  bool cauchy_schwarz_checked = false;
  bool periodic_checked = false;
};

G1Deviations g1_deviations(const CoherenceField& g1);

// Folds deviations into named checks; `label` prefixes each name.
VerifyReport g1_invariant_report(const std::vector<G1Deviations>& devs, const std::string& label);

VerifyReport verify_field(const CoherenceField& g1, const std::string& label = "dump");

// Evaluates every time slice of the run and checks the structural
// invariants, plus circulation conservation and tracking parity when the
// run has at least three slices, and the null result for a single packet.
VerifyReport verify_run(const RunConfig& run, const std::string& label = "run");

}  // namespace csx
