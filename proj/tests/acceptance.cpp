// Acceptance run: one PASS/FAIL line per criterion at 100 seeded trials and tol 1e-10.
// Exit status is nonzero when any criterion fails.

#include "twsm/twsm.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>

using namespace twsm;

namespace {

struct Criterion {
  int number;
  const char* title;
  std::vector<std::string> checks;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {1, "axioms: order zero, twisted first order for D_Y and D_M, lower block",
       {"axioms.order_zero", "axioms.first_order_yukawa", "axioms.first_order_majorana", "axioms.yukawa_lower_block"}},
      {2, "naive twist counterexample", {"naive.generic_violation", "naive.twist_invariant_zero"}},
      {3, "Higgs and sigma structure, rebuilds",
       {"fluct.yukawa.analytic", "fluct.majorana.analytic", "fluct.yukawa.rebuild", "fluct.majorana.rebuild",
        "fluct.free.rebuild"}},
      {4, "twist-invariant reduction and untwisted gauge matrices",
       {"fluct.reduction.twist_invariant", "fluct.reduction.standard_model"}},
      {5, "unimodularity trace identity, both directions",
       {"fluct.unimodular.trace_identity", "fluct.unimodular.enforced", "fluct.unimodular.perturbed"}},
      {6, "Z table entrywise, X and Y Hermitian", {"fluct.z.table", "fluct.z.hermitian", "fluct.z.structure"}},
      {7, "gauge laws, Higgs law, sigma invariance, selfadjointness biconditional",
       {"gauge.field_law.B", "gauge.field_law.W", "gauge.field_law.V", "gauge.field_law.g",
        "gauge.field_law.a_w_invariant", "gauge.higgs_law.right", "gauge.higgs_law.left", "gauge.higgs_law.doublet",
        "gauge.sigma.fields_invariant", "gauge.sigma.xi_identity", "gauge.selfadjoint.preserved",
        "gauge.selfadjoint.generic_counterexample"}},
      {8, "D_{A_M} selfadjoint for any A_M", {"fluct.majorana.covariant_selfadjoint"}},
  };
  return c;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg;
  cfg.trials = 100;
  cfg.tol = 1e-10;
  const auto rep = run_suite(cfg);

  std::map<std::string, const CheckResult*> by_id;
  for (const auto& c : rep.checks) by_id[c.id] = &c;

  bool all = true;
  for (const auto& cr : criteria()) {
    bool ok = true;
    std::string detail;
    for (const auto& id : cr.checks) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        ok = false;
        detail += "  missing " + id + "\n";
        continue;
      }
      const auto& c = *it->second;
      ok = ok && c.pass && c.trials >= cfg.trials;
      char line[256];
      std::snprintf(line, sizeof line, "  %s %-44s max %.3e min %.3e thr %.1e n=%d\n", c.pass ? "ok  " : "FAIL",
                    c.id.c_str(), c.max_residual, c.min_residual, c.threshold, c.trials);
      detail += line;
    }
    // the reduction checks are held to 1e-12
    if (cr.number == 4) {
      const auto it = by_id.find("fluct.reduction.twist_invariant");
      if (it != by_id.end() && it->second->threshold > 1e-12) ok = false;
    }
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << cr.number << ": " << cr.title << "\n" << detail;
  }

  // 9: determinism of the serialized report
  {
    ScenarioConfig d;
    d.trials = 1;
    const auto a = to_json(run_suite(d)).dump(2);
    const auto b = to_json(run_suite(d)).dump(2);
    d.trials = 5;
    d.seed = 7;
    const auto c = to_json(run_suite(d)).dump(2);
    const auto e = to_json(run_suite(d)).dump(2);
    const bool ok = a == b && c == e;
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion 9: byte-identical reports for a repeated seed\n"
              << "  trials=1 " << (a == b ? "identical" : "differ") << ", trials=5 seed=7 "
              << (c == e ? "identical" : "differ") << " (" << c.size() << " bytes)\n";
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "suite at " << cfg.trials << " trials, wall " << secs << " s\n";
  std::cout << (all ? "ACCEPTANCE: ALL PASS" : "ACCEPTANCE: FAILED") << "\n";
  return all ? 0 : 1;
}
