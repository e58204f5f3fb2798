#pragma once

#include <string>
#include <vector>

namespace qslkit {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Deterministic self-checks over the whole library (fixed seeds). filter
// keeps properties whose name contains the substring; empty keeps all.
// inject simulates a known defect so the suite can demonstrate it would
// catch one: "pt-sign" flips the sign of the decoherence function on the
// production side of the consistency check. "" or "none" runs clean.
std::vector<PropertyResult> run_validation(const std::string& filter, const std::string& inject);

}  // namespace qslkit
