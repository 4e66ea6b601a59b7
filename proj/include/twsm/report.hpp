#pragma once

#include "gauge.hpp"

#include <json.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace twsm {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Invalid scenario input; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// JSON encoding: complex = [re, im], matrices row-major, jets = {value, d: [4]}.

inline Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const Jet& j) {
  Json d = Json::array();
  for (const auto& x : j.d) d.push_back(to_json(x));
  return {{"value", to_json(j.value)}, {"d", std::move(d)}};
}

inline cplx complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError(path + ": expected a number or [re, im]");
}

inline double real_from_json(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": must be finite");
  return x;
}

/// A matrix (array of rows), or a bare scalar for 1x1.
inline ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  if (j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number()))
    return ComplexMatrix::scalar(complex_from_json(j, path));
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ConfigError(path + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Dense m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError(path + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)],
                                  path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  if (!m.allFinite()) throw ConfigError(path + ": non-finite entry");
  return ComplexMatrix(std::move(m));
}

/// {value, d: [4]} or a bare matrix (constant jet).
inline Jet jet_from_json(const Json& j, const std::string& path) {
  if (j.is_object()) {
    for (const auto& [key, _] : j.items())
      if (key != "value" && key != "d") throw ConfigError(path + ": unknown field '" + key + "'");
    if (!j.contains("value")) throw ConfigError(path + ".value: missing");
    const auto v = matrix_from_json(j["value"], path + ".value");
    if (!j.contains("d")) return Jet::constant(v);
    const auto& d = j["d"];
    if (!d.is_array() || d.size() != 4) throw ConfigError(path + ".d: expected 4 derivatives");
    std::array<ComplexMatrix, 4> dv;
    for (int mu = 0; mu < 4; ++mu) {
      dv[mu] = matrix_from_json(d[static_cast<std::size_t>(mu)], path + ".d[" + std::to_string(mu) + "]");
      if (dv[mu].rows() != v.rows() || dv[mu].cols() != v.cols())
        throw ConfigError(path + ".d[" + std::to_string(mu) + "]: shape differs from value");
    }
    return Jet(v, std::move(dv));
  }
  return Jet::constant(matrix_from_json(j, path));
}

inline void require_shape(const Jet& j, Eigen::Index n, const std::string& path) {
  if (j.rows() != n || j.cols() != n)
    throw ConfigError(path + ": expected " + std::to_string(n) + "x" + std::to_string(n));
}

/// Slots c, cp (scalar), q, qp (quaternion), m, mp (3x3); missing slots are the unit.
/// The strings "identity" and "zero" are accepted for the whole element.
inline AlgebraElement element_from_json(const Json& j, const std::string& path) {
  if (j.is_string()) {
    if (j == "identity") return identity_element();
    if (j == "zero") return zero_element();
    throw ConfigError(path + ": unknown element shorthand '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) throw ConfigError(path + ": expected an object or \"identity\"/\"zero\"");
  auto e = identity_element();
  const std::map<std::string, std::pair<Jet*, Eigen::Index>> slots = {{"c", {&e.c, 1}},   {"cp", {&e.cp, 1}},
                                                                      {"q", {&e.q, 2}},   {"qp", {&e.qp, 2}},
                                                                      {"m", {&e.m, 3}},   {"mp", {&e.mp, 3}}};
  for (const auto& [key, val] : j.items()) {
    const auto it = slots.find(key);
    if (it == slots.end()) throw ConfigError(path + ": unknown slot '" + key + "'");
    *it->second.first = jet_from_json(val, path + "." + key);
    require_shape(*it->second.first, it->second.second, path + "." + key);
  }
  for (const char* k : {"q", "qp"})
    if (quaternion_residual(*slots.at(k).first) > 1e-10) throw ConfigError(path + "." + k + ": not a quaternion");
  return e;
}

/// alpha, alpha_p real scalar jets; q, qp in SU(2); m, mp in U(3); K. Missing slots are the unit.
inline GaugeUnitary gauge_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto u = GaugeUnitary::identity();
  for (const auto& [key, val] : j.items()) {
    const std::string p = path + "." + key;
    if (key == "alpha" || key == "alpha_p") {
      auto a = jet_from_json(val, p);
      require_shape(a, 1, p);
      (key == "alpha" ? u.alpha : u.alpha_p) = std::move(a);
    } else if (key == "q" || key == "qp" || key == "m" || key == "mp") {
      auto x = jet_from_json(val, p);
      require_shape(x, key[0] == 'q' ? 2 : 3, p);
      try {
        auto uj = UnitaryJet::checked(std::move(x));
        if (key == "q") u.q = uj;
        else if (key == "qp") u.qp = uj;
        else if (key == "m") u.m = uj;
        else u.mp = uj;
      } catch (const StructureError&) {
        throw ConfigError(p + ": not unitary");
      }
    } else if (key == "K") {
      u.K_const = real_from_json(val, p);
    } else {
      throw ConfigError(path + ": unknown field '" + key + "'");
    }
  }
  try {
    u.validate();
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return u;
}

// ---------------------------------------------------------------------------
// Scenario configuration.

struct ScenarioConfig {
  std::uint64_t seed = 20240601;
  int trials = 100;
  double tol = kDefaultTol;
  Couplings couplings;
  FiniteDiracParams yukawa;
  Vierbein vierbein = Vierbein::Identity();
  bool flat = true;
  std::vector<ElementPair> pairs;       ///< explicit sources for `fields`
  bool symmetrize = true;               ///< `fields` replaces explicit pairs by their selfadjoint span
  std::optional<GaugeUnitary> gauge;    ///< explicit transformation for `fields`

  void validate() const {
    if (trials < 1) throw ConfigError("trials: must be >= 1");
    if (!(tol > 0) || !std::isfinite(tol)) throw ConfigError("tol: must be a positive finite number");
    for (const auto& [name, g] : {std::pair{"couplings.g1", couplings.g1}, std::pair{"couplings.g2", couplings.g2},
                                  std::pair{"couplings.g3", couplings.g3}})
      if (!(g > 0) || !std::isfinite(g)) throw ConfigError(std::string(name) + ": must be positive");
    if (std::abs(vierbein.determinant()) < 1e-12) throw ConfigError("vierbein: singular");
  }
};

inline ScenarioConfig parse_scenario(const Json& j) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  ScenarioConfig c;
  for (const auto& [key, val] : j.items()) {
    if (key == "schema_version") {
      if (!val.is_number_integer() || val.get<int>() != kSchemaVersion)
        throw ConfigError("schema_version: expected " + std::to_string(kSchemaVersion));
    } else if (key == "seed") {
      if (!val.is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
      c.seed = val.get<std::uint64_t>();
    } else if (key == "trials") {
      if (!val.is_number_integer()) throw ConfigError("trials: expected an integer");
      const auto t = val.get<long long>();
      if (t < 1 || t > 1000000) throw ConfigError("trials: must be in [1, 1000000]");
      c.trials = static_cast<int>(t);
    } else if (key == "tol") {
      c.tol = real_from_json(val, "tol");
    } else if (key == "couplings") {
      if (!val.is_object()) throw ConfigError("couplings: expected an object");
      for (const auto& [ck, cv] : val.items()) {
        if (ck == "g1") c.couplings.g1 = real_from_json(cv, "couplings.g1");
        else if (ck == "g2") c.couplings.g2 = real_from_json(cv, "couplings.g2");
        else if (ck == "g3") c.couplings.g3 = real_from_json(cv, "couplings.g3");
        else throw ConfigError("couplings: unknown field '" + ck + "'");
      }
    } else if (key == "yukawa") {
      if (!val.is_object()) throw ConfigError("yukawa: expected an object");
      for (const auto& [yk, yv] : val.items()) {
        const std::string p = "yukawa." + yk;
        if (yk == "k_nu") c.yukawa.k_nu = real_from_json(yv, p);
        else if (yk == "k_e") c.yukawa.k_e = real_from_json(yv, p);
        else if (yk == "k_u") c.yukawa.k_u = real_from_json(yv, p);
        else if (yk == "k_d") c.yukawa.k_d = real_from_json(yv, p);
        else if (yk == "k_R") c.yukawa.k_R = real_from_json(yv, p);
        else throw ConfigError("yukawa: unknown field '" + yk + "'");
      }
    } else if (key == "vierbein") {
      if (val.is_string()) {
        if (val != "flat") throw ConfigError("vierbein: expected \"flat\" or a 4x4 real array");
      } else {
        if (!val.is_array() || val.size() != 4) throw ConfigError("vierbein: expected 4 rows");
        for (int r = 0; r < 4; ++r) {
          const auto& row = val[static_cast<std::size_t>(r)];
          if (!row.is_array() || row.size() != 4) throw ConfigError("vierbein[" + std::to_string(r) + "]: expected 4 entries");
          for (int k = 0; k < 4; ++k)
            c.vierbein(r, k) = real_from_json(row[static_cast<std::size_t>(k)],
                                              "vierbein[" + std::to_string(r) + "][" + std::to_string(k) + "]");
        }
        c.flat = false;
      }
    } else if (key == "pairs") {
      if (!val.is_array() || val.empty()) throw ConfigError("pairs: expected a non-empty array");
      for (std::size_t i = 0; i < val.size(); ++i) {
        const std::string p = "pairs[" + std::to_string(i) + "]";
        const auto& e = val[i];
        if (!e.is_object() || !e.contains("a") || !e.contains("b") || e.size() != 2)
          throw ConfigError(p + ": expected {\"a\": element, \"b\": element}");
        c.pairs.emplace_back(element_from_json(e["a"], p + ".a"), element_from_json(e["b"], p + ".b"));
      }
    } else if (key == "symmetrize") {
      if (!val.is_boolean()) throw ConfigError("symmetrize: expected true or false");
      c.symmetrize = val.get<bool>();
    } else if (key == "gauge") {
      c.gauge = gauge_from_json(val, "gauge");
    } else {
      throw ConfigError("scenario: unknown field '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

inline SpectralData spectral_data(const ScenarioConfig& c) { return build_spectral_data(c.vierbein, c.yukawa); }

// ---------------------------------------------------------------------------
// Field content.

inline Json higgs_json(const HiggsFields& h) {
  return {{"H1", to_json(h.H1)},   {"H2", to_json(h.H2)},   {"H1p", to_json(h.H1p)},
          {"H2p", to_json(h.H2p)}, {"H_r", to_json(h.H_r())}, {"H_l", to_json(h.H_l())},
          {"h", to_json(h.h())},   {"rebuild_residual", h.residual}};
}

inline Json gauge_fields_json(const FreeComponents& c, const GaugeFields& f) {
  return {{"c_r", to_json(c.c_r)}, {"c_l", to_json(c.c_l)}, {"q_r", to_json(c.q_r)}, {"q_l", to_json(c.q_l)},
          {"m_r", to_json(c.m_r)}, {"m_l", to_json(c.m_l)}, {"a", f.a},  {"w", f.w},
          {"B", f.B},              {"W", f.W},              {"g", to_json(f.g)}, {"V0", f.V0},
          {"V", f.V}};
}

inline Json field_content_json(const FieldContent& fc) {
  Json j = {{"schema_version", kSchemaVersion},
            {"couplings", {{"g1", fc.couplings.g1}, {"g2", fc.couplings.g2}, {"g3", fc.couplings.g3}}}};
  if (fc.higgs) j["higgs"] = higgs_json(*fc.higgs);
  if (fc.sigma)
    j["sigma"] = {{"sigma", to_json(fc.sigma->sigma)},
                  {"sigma_p", to_json(fc.sigma->sigma_p)},
                  {"sigma_r", fc.sigma_r},
                  {"sigma_l", fc.sigma_l},
                  {"rebuild_residual", fc.sigma->residual}};
  if (fc.gauge) {
    Json per = Json::array();
    for (int mu = 0; mu < 4; ++mu) per.push_back(gauge_fields_json(fc.gauge->comp[mu], fc.gauge->phys[mu]));
    Json X = Json::array(), Y = Json::array();
    for (int mu = 0; mu < 4; ++mu) {
      X.push_back(to_json(fc.X[mu]));
      Y.push_back(to_json(fc.Y[mu]));
    }
    j["gauge"] = {{"per_mu", std::move(per)}, {"rebuild_residual", fc.gauge->residual}, {"X", std::move(X)},
                  {"Y", std::move(Y)}};
  }
  return j;
}

inline FieldContent field_content_from_json(const Json& j) {
  FieldContent fc;
  try {
    const auto& c = j.at("couplings");
    fc.couplings = {c.at("g1").get<double>(), c.at("g2").get<double>(), c.at("g3").get<double>()};
    auto mat = [](const Json& x, const std::string& p) { return matrix_from_json(x, p); };
    if (j.contains("higgs")) {
      const auto& h = j["higgs"];
      fc.higgs = HiggsFields{mat(h.at("H1"), "higgs.H1"), mat(h.at("H2"), "higgs.H2"), mat(h.at("H1p"), "higgs.H1p"),
                             mat(h.at("H2p"), "higgs.H2p"), h.at("rebuild_residual").get<double>()};
    }
    if (j.contains("sigma")) {
      const auto& s = j["sigma"];
      fc.sigma = SigmaFields{complex_from_json(s.at("sigma"), "sigma.sigma"),
                             complex_from_json(s.at("sigma_p"), "sigma.sigma_p"),
                             s.at("rebuild_residual").get<double>()};
      fc.sigma_r = s.at("sigma_r").get<double>();
      fc.sigma_l = s.at("sigma_l").get<double>();
    }
    if (j.contains("gauge")) {
      const auto& g = j["gauge"];
      FreeFields ff;
      ff.residual = g.at("rebuild_residual").get<double>();
      for (int mu = 0; mu < 4; ++mu) {
        const auto& e = g.at("per_mu").at(static_cast<std::size_t>(mu));
        auto& c2 = ff.comp[mu];
        c2.c_r = complex_from_json(e.at("c_r"), "c_r");
        c2.c_l = complex_from_json(e.at("c_l"), "c_l");
        c2.q_r = mat(e.at("q_r"), "q_r");
        c2.q_l = mat(e.at("q_l"), "q_l");
        c2.m_r = mat(e.at("m_r"), "m_r");
        c2.m_l = mat(e.at("m_l"), "m_l");
        auto& p = ff.phys[mu];
        p.a = e.at("a").get<double>();
        p.w = e.at("w").get<double>();
        p.B = e.at("B").get<double>();
        p.V0 = e.at("V0").get<double>();
        p.W = e.at("W").get<std::array<double, 3>>();
        p.V = e.at("V").get<std::array<double, 8>>();
        p.g = mat(e.at("g"), "g");
        fc.X[mu] = mat(g.at("X").at(static_cast<std::size_t>(mu)), "X");
        fc.Y[mu] = mat(g.at("Y").at(static_cast<std::size_t>(mu)), "Y");
      }
      fc.gauge = std::move(ff);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field content: ") + e.what());
  }
  return fc;
}

/// Extraction failure tagged with the id of the step that raised.
class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extracts every field from the three parts built on the same pair list.
inline FieldContent compute_field_content(const std::vector<ElementPair>& pairs, const SpectralData& s,
                                          const Couplings& k, const std::optional<GaugeUnitary>& u = std::nullopt) {
  auto step = [](const char* id, auto&& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      throw ExtractionError(std::string(id) + ": " + e.what());
    }
  };
  auto make = [&](OneFormKind kind) {
    auto f = one_form(kind, pairs, s);
    return u ? gauge_one_form(f, *u, s) : f;
  };
  FieldContent fc;
  fc.couplings = k;
  fc.higgs = step("fields.higgs", [&] { return extract_higgs(make(OneFormKind::yukawa), s.params); });
  step("fields.sigma", [&] {
    const auto M = make(OneFormKind::majorana);
    fc.sigma = extract_sigma(M, s.params);
    const auto dm = covariant_dirac(M, s);
    fc.sigma_r = dm.sigma_r;
    fc.sigma_l = dm.sigma_l;
    return 0;
  });
  step("fields.gauge", [&] {
    const auto F = make(OneFormKind::free_dirac);
    fc.gauge = extract_gauge(F, k);
    const auto z = covariant_dirac(F, s);
    for (int mu = 0; mu < 4; ++mu) {
      const auto d = decompose_Z(z.Z_mu[mu], fc.gauge->phys[mu], k);
      fc.X[mu] = d.X;
      fc.Y[mu] = d.Y;
    }
    return 0;
  });
  return fc;
}

/// Seeded symmetrized pair list with the unimodular correction, as used for the sample dump.
inline std::vector<ElementPair> sample_pairs(const ScenarioConfig& c, const SpectralData& s) {
  Rng rng(derive_seed(c.seed, 100));
  return random_selfadjoint_free_form(rng, s, c.couplings, 1, true).pairs;
}

/// `fields`: explicit pairs and gauge from the scenario when given, else the seeded sample.
/// Explicit pairs are symmetrized unless the scenario says otherwise, so the dump
/// describes a selfadjoint fluctuation.
inline Json fields_command(const ScenarioConfig& c) {
  const auto s = spectral_data(c);
  const bool explicit_pairs = !c.pairs.empty();
  const auto pairs = !explicit_pairs ? sample_pairs(c, s) : c.symmetrize ? symmetrize(c.pairs) : c.pairs;
  Json j = field_content_json(compute_field_content(pairs, s, c.couplings, c.gauge));
  j["source"] = explicit_pairs ? "explicit" : "seeded";
  if (explicit_pairs) j["symmetrized"] = c.symmetrize;
  if (c.gauge) {
    j["gauge_applied"] = true;
    j["gauge_twist_invariant"] = c.gauge->twist_invariant();
    // left and right components may decouple for a non-twist-invariant u; reported without a claim
    const auto F = gauge_one_form(one_form(OneFormKind::free_dirac, pairs, s), *c.gauge, s);
    j["free_selfadjoint_residual"] = free_selfadjoint_residual(F.A_mu);
  }
  return j;
}

inline std::string format_complex(const Json& z) {
  std::ostringstream o;
  o << std::setprecision(6) << z[0].get<double>();
  const double im = z[1].get<double>();
  o << (im < 0 ? " - " : " + ") << std::abs(im) << "i";
  return o.str();
}

inline std::string format_matrix(const Json& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += "; ";
    for (std::size_t j = 0; j < m[i].size(); ++j) out += (j ? ", " : "") + format_complex(m[i][j]);
  }
  return out + "]";
}

/// Human-readable summary of a field dump; X and Y are left to the JSON form.
inline std::string fields_text(const Json& j) {
  std::ostringstream o;
  o << std::setprecision(6);
  if (j.contains("higgs"))
    for (const char* k : {"H_r", "H_l", "h"}) o << k << " = " << format_matrix(j["higgs"][k]) << "\n";
  if (j.contains("sigma"))
    o << "sigma_r = " << j["sigma"]["sigma_r"].get<double>() << "  sigma_l = " << j["sigma"]["sigma_l"].get<double>()
      << "\n";
  if (j.contains("gauge"))
    for (std::size_t mu = 0; mu < 4; ++mu) {
      const auto& e = j["gauge"]["per_mu"][mu];
      o << "mu=" << mu << "  a " << e["a"].get<double>() << "  w " << e["w"].get<double>() << "  B "
        << e["B"].get<double>() << "  V0 " << e["V0"].get<double>() << "  W " << e["W"].dump() << "\n";
      o << "      g " << format_matrix(e["g"]) << "\n      V " << e["V"].dump() << "\n";
    }
  if (j.contains("free_selfadjoint_residual"))
    o << "after gauge: free selfadjointness residual " << j["free_selfadjoint_residual"].get<double>() << "\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Suite.

struct VerificationReport {
  std::vector<CheckResult> checks;  ///< sorted by id
  int jm_square = 0, jf_square = 0, opposite_sign = 0;
  Json fields;
  ScenarioConfig config;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.kind == CheckKind::demo || c.pass; });
  }
};

inline std::vector<CheckResult> naive_checks(const SpectralData& s, int trials, std::uint64_t seed) {
  const auto rep = naive_twist_violation(s, trials, seed);
  CheckResult gen;
  gen.id = "naive.generic_violation";
  gen.anchor = "naive twist: twisted first-order residual >= 1e-3 for >= 99% of draws";
  gen.kind = CheckKind::violation;
  gen.trials = trials;
  gen.threshold = rep.floor;
  gen.max_residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
  gen.min_residual = *std::min_element(rep.residuals.begin(), rep.residuals.end());
  gen.pass = rep.fraction_above_floor >= 0.99;
  std::ostringstream n;
  n << "fraction above floor " << rep.fraction_above_floor << ", scaling ratio r(2b)/r(b) " << rep.scaling_ratio;
  gen.note = n.str();
  CheckAccumulator inv("naive.twist_invariant_zero", "naive twist: residual exactly 0 for primed = unprimed",
                       CheckKind::identity, 0.0);
  inv.add(rep.twist_invariant_max);
  auto invr = inv.finish();
  invr.trials = trials;
  return {gen, invr};
}

inline CheckResult opposite_sign_check(const SpectralData& s, int trials, std::uint64_t seed, double tol, int* sign) {
  Rng rng(seed);
  CheckAccumulator acc("algebra.opposite_block_form",
                       "J pi(a) J^{-1} = s diag(conj M, conj Q) with one sign s for every a", CheckKind::identity, tol);
  int observed = 0;
  for (int t = 0; t < trials; ++t) {
    double r = 0;
    const int sg = prop_opposite_sign(random_element(rng), s.K, tol, &r);
    if (t == 0) observed = sg;
    acc.add(sg != 0 && sg == observed ? r : std::max(r, 1.0));
  }
  *sign = observed;
  acc.note("observed sign " + std::to_string(observed));
  return acc.finish();
}

/// Runs every group; an exception inside a group becomes a failed check carrying the message.
inline VerificationReport run_suite(const ScenarioConfig& c) {
  c.validate();
  VerificationReport rep;
  rep.config = c;
  const auto s = spectral_data(c);
  rep.jm_square = s.jm_square;
  rep.jf_square = s.jf_square;
  const int T = c.trials;
  auto guarded = [&](const std::string& group, const std::function<std::vector<CheckResult>()>& f) {
    try {
      auto v = f();
      rep.checks.insert(rep.checks.end(), v.begin(), v.end());
    } catch (const std::exception& e) {
      CheckResult r;
      r.id = group + ".error";
      r.anchor = "check group raised";
      r.note = e.what();
      r.threshold = c.tol;
      r.max_residual = std::numeric_limits<double>::infinity();
      r.min_residual = r.max_residual;
      rep.checks.push_back(r);
    }
  };
  guarded("structure", [&] { return check_structure(s, c.tol); });
  guarded("axioms", [&] { return check_axioms(s, T, derive_seed(c.seed, 10), c.tol); });
  guarded("naive", [&] { return naive_checks(s, T, derive_seed(c.seed, 11)); });
  guarded("algebra", [&] {
    return std::vector<CheckResult>{opposite_sign_check(s, T, derive_seed(c.seed, 12), c.tol, &rep.opposite_sign)};
  });
  guarded("fluct", [&] { return check_fluctuations(s, c.couplings, T, derive_seed(c.seed, 13), c.tol); });
  guarded("gauge", [&] { return check_gauge(s, c.couplings, T, derive_seed(c.seed, 14), c.tol); });
  std::sort(rep.checks.begin(), rep.checks.end(), [](const CheckResult& a, const CheckResult& b) { return a.id < b.id; });
  try {
    rep.fields = field_content_json(compute_field_content(sample_pairs(c, s), s, c.couplings));
  } catch (const std::exception& e) {
    rep.fields = {{"error", e.what()}};
  }
  return rep;
}

inline Json residual_json(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? Json("nan") : Json(x > 0 ? "inf" : "-inf");
}

inline Json to_json(const CheckResult& r) {
  return {{"check_id", r.id},
          {"anchor", r.anchor},
          {"kind", to_string(r.kind)},
          {"trials", r.trials},
          {"max_residual", residual_json(r.max_residual)},
          {"min_residual", residual_json(r.min_residual)},
          {"threshold", r.threshold},
          {"pass", r.pass},
          {"note", r.note}};
}

inline Json to_json(const VerificationReport& r) {
  Json checks = Json::array();
  int passed = 0, failed = 0;
  for (const auto& c : r.checks) {
    checks.push_back(to_json(c));
    (c.pass ? passed : failed) += 1;
  }
  return {{"schema_version", kSchemaVersion},
          {"environment",
           {{"version", kVersion}, {"seed", r.config.seed}, {"trials", r.config.trials}, {"tol", r.config.tol}}},
          {"observed",
           {{"J_M_square", r.jm_square}, {"J_F_square", r.jf_square}, {"opposite_sign", r.opposite_sign}}},
          {"checks", std::move(checks)},
          {"summary", {{"passed", passed}, {"failed", failed}, {"all_pass", r.all_pass()}}},
          {"fields", r.fields}};
}

inline std::string to_text(const VerificationReport& r) {
  std::ostringstream o;
  o << "twsm " << kVersion << "  seed " << r.config.seed << "  trials " << r.config.trials << "  tol " << r.config.tol
    << "\n";
  o << "J_M^2 = " << r.jm_square << "  J_F^2 = " << r.jf_square << "  opposite sign = " << r.opposite_sign << "\n";
  int failed = 0;
  for (const auto& c : r.checks) {
    if (!c.pass) ++failed;
    o << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(46) << c.id << " max " << std::scientific
      << std::setprecision(3) << c.max_residual << "  min " << c.min_residual << "  thr " << c.threshold
      << std::defaultfloat << "  [" << to_string(c.kind) << ", " << c.trials << "]";
    if (!c.note.empty()) o << "  " << c.note;
    o << "\n";
  }
  o << (r.all_pass() ? "ALL PASS" : "FAILURES: " + std::to_string(failed)) << "\n";
  return o.str();
}

}  // namespace twsm
