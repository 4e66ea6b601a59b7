#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace twsm {

enum class CheckKind {
  identity,   ///< passes when every trial residual is <= tol
  violation,  ///< passes when every trial residual is >= floor
  demo        ///< reported only; never affects the exit status
};

struct CheckResult {
  std::string id;
  std::string anchor;
  CheckKind kind = CheckKind::identity;
  int trials = 0;
  double max_residual = 0;
  double min_residual = std::numeric_limits<double>::infinity();
  double threshold = 0;
  bool pass = false;
  std::string note;
};

/// Accumulates per-trial residuals for one check.
class CheckAccumulator {
 public:
  CheckAccumulator(std::string id, std::string anchor, CheckKind kind, double threshold)
      : r_{std::move(id), std::move(anchor), kind, 0, 0, std::numeric_limits<double>::infinity(),
           threshold, false, {}} {}

  void add(double residual) {
    ++r_.trials;
    r_.max_residual = std::max(r_.max_residual, residual);
    r_.min_residual = std::min(r_.min_residual, residual);
  }

  void note(std::string n) { r_.note = std::move(n); }

  CheckResult finish() const {
    CheckResult out = r_;
    if (out.trials == 0) out.min_residual = 0;
    if (out.kind == CheckKind::violation)
      out.pass = out.trials > 0 && out.min_residual >= out.threshold;
    else
      out.pass = out.trials > 0 && out.max_residual <= out.threshold;
    return out;
  }

 private:
  CheckResult r_;
};

inline const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::identity: return "identity";
    case CheckKind::violation: return "violation";
    case CheckKind::demo: return "demo";
  }
  return "identity";
}

}  // namespace twsm
