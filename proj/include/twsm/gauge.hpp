#pragma once

#include "fluctuations.hpp"

namespace twsm {

/// e^{i alpha} for a real scalar jet alpha.
inline Jet phase_jet(const Jet& alpha) {
  const cplx e = std::exp(kI * alpha.s());
  std::array<cplx, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = kI * alpha.ds(mu) * e;
  return Jet::scalar(e, d);
}

inline Jet real_scalar_jet(double v, const std::array<double, 4>& d = {}) {
  return Jet::scalar(v, {d[0], d[1], d[2], d[3]});
}

/// u = (e^{i alpha}, e^{i alpha'}, q, q', m, m') with q, q' in SU(2) and m, m' in U(3).
struct GaugeUnitary {
  Jet alpha = Jet::zero(1, 1), alpha_p = Jet::zero(1, 1);
  UnitaryJet q, qp, m, mp;
  double K_const = 0;  ///< alpha' - alpha for the twist-invariant family

  static GaugeUnitary identity() {
    GaugeUnitary u;
    u.q = UnitaryJet::checked(Jet::identity(2));
    u.qp = u.q;
    u.m = UnitaryJet::checked(Jet::identity(3));
    u.mp = u.m;
    return u;
  }

  void validate(double tol = 1e-10) const {
    auto real = [&](const Jet& a, const char* name) {
      if (a.rows() != 1 || a.cols() != 1) throw ShapeError(std::string("GaugeUnitary: ") + name + " must be scalar");
      double im = std::abs(a.s().imag());
      for (int mu = 0; mu < 4; ++mu) im = std::max(im, std::abs(a.ds(mu).imag()));
      if (im > tol) throw StructureError(std::string("GaugeUnitary: ") + name + " must be real");
    };
    real(alpha, "alpha");
    real(alpha_p, "alpha'");
    for (const auto* x : {&q, &qp}) {
      if (x->n() != 2) throw ShapeError("GaugeUnitary: q slots must be 2x2");
      if (quaternion_residual(x->jet()) > tol || std::abs(x->value().dense().determinant() - 1.0) > tol)
        throw StructureError("GaugeUnitary: q slot is not in SU(2)");
    }
    for (const auto* x : {&m, &mp})
      if (x->n() != 3) throw ShapeError("GaugeUnitary: m slots must be 3x3");
    for (const auto* x : {&q, &qp, &m, &mp})
      if (x->unitarity_residual() > tol) throw StructureError("GaugeUnitary: slot is not unitary");
  }

  bool twist_invariant(double tol = 1e-12) const {
    return jet_residual(q.jet(), qp.jet()) <= tol && jet_residual(m.jet(), mp.jet()) <= tol &&
           jet_residual(alpha_p, jet_add(alpha, Jet::scalar(K_const))) <= tol;
  }

  AlgebraElement element() const {
    return {phase_jet(alpha), phase_jet(alpha_p), q.jet(), qp.jet(), m.jet(), mp.jet()};
  }
};

/// Slotwise product v u.
inline GaugeUnitary compose(const GaugeUnitary& v, const GaugeUnitary& u) {
  GaugeUnitary w;
  w.alpha = jet_add(v.alpha, u.alpha);
  w.alpha_p = jet_add(v.alpha_p, u.alpha_p);
  w.q = UnitaryJet::checked(jet_mul(v.q.jet(), u.q.jet()));
  w.qp = UnitaryJet::checked(jet_mul(v.qp.jet(), u.qp.jet()));
  w.m = UnitaryJet::checked(jet_mul(v.m.jet(), u.m.jet()));
  w.mp = UnitaryJet::checked(jet_mul(v.mp.jet(), u.mp.jet()));
  w.K_const = v.K_const + u.K_const;
  return w;
}

// ---------------------------------------------------------------------------
// Random unitaries.

inline Jet random_real_scalar_jet(Rng& rng) {
  std::array<double, 4> d{};
  const double v = gauss(rng);
  for (auto& x : d) x = gauss(rng);
  return real_scalar_jet(v, d);
}

/// Unit quaternion with tangents i h u, h traceless Hermitian.
inline UnitaryJet random_su2_jet(Rng& rng) {
  double x[4], n = 0;
  for (auto& v : x) {
    v = gauss(rng);
    n += v * v;
  }
  n = std::sqrt(n);
  const auto u = quaternion(x[0] / n, x[1] / n, x[2] / n, x[3] / n);
  std::array<ComplexMatrix, 4> h;
  for (auto& t : h) {
    t = ComplexMatrix::zero(2, 2);
    for (int k = 1; k <= 3; ++k) t = t + cplx(gauss(rng)) * mat::pauli(k);
  }
  return UnitaryJet::from_tangents(u, h);
}

/// Element of SU(3) with traceless tangents.
inline UnitaryJet random_su3_jet(Rng& rng) {
  auto u = haar_unitary(3, rng);
  const cplx ph = std::exp(-kI * std::arg(u.dense().determinant()) / 3.0);
  u = ph * u;
  std::array<ComplexMatrix, 4> h;
  for (auto& t : h) {
    t = random_hermitian(3, rng);
    t = t - (t.trace() / 3.0) * ComplexMatrix::identity(3);
  }
  return UnitaryJet::from_tangents(u, h);
}

inline UnitaryJet scale_by_phase(const Jet& phase, const UnitaryJet& n) {
  const Jet big = jet_mul(Jet::constant(phase.s() * ComplexMatrix::identity(n.n())), n.jet());
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = big.d[mu] + phase.ds(mu) * n.value();
  return UnitaryJet::checked(Jet(big.value, std::move(d)));
}

enum class GaugeMode {
  identity,
  twist_invariant,  ///< alpha' = alpha + K, q = q', m = m'
  generic,          ///< every slot independent
  locked,           ///< twist-invariant with m = e^{-i alpha / 3} n, n in SU(3)
  free_phase,       ///< twist-invariant with m = e^{i phi} n, phi independent of alpha
  pure_alpha,
  pure_q,
  pure_m
};

inline GaugeUnitary random_gauge_unitary(GaugeMode mode, Rng& rng, double K = 0.0) {
  GaugeUnitary u = GaugeUnitary::identity();
  switch (mode) {
    case GaugeMode::identity: return u;
    case GaugeMode::pure_alpha:
      u.alpha = random_real_scalar_jet(rng);
      u.alpha_p = u.alpha;
      return u;
    case GaugeMode::pure_q:
      u.q = random_su2_jet(rng);
      u.qp = u.q;
      return u;
    case GaugeMode::pure_m:
      u.m = random_unitary_jet(3, rng);
      u.mp = u.m;
      return u;
    case GaugeMode::twist_invariant:
      u.alpha = random_real_scalar_jet(rng);
      u.K_const = K;
      u.alpha_p = jet_add(u.alpha, Jet::scalar(K));
      u.q = random_su2_jet(rng);
      u.qp = u.q;
      u.m = random_unitary_jet(3, rng);
      u.mp = u.m;
      return u;
    case GaugeMode::generic:
      u.alpha = random_real_scalar_jet(rng);
      u.alpha_p = random_real_scalar_jet(rng);
      u.q = random_su2_jet(rng);
      u.qp = random_su2_jet(rng);
      u.m = random_unitary_jet(3, rng);
      u.mp = random_unitary_jet(3, rng);
      return u;
    case GaugeMode::locked:
    case GaugeMode::free_phase: {
      u.alpha = random_real_scalar_jet(rng);
      u.alpha_p = u.alpha;
      u.q = random_su2_jet(rng);
      u.qp = u.q;
      const auto n = random_su3_jet(rng);
      const Jet phi = mode == GaugeMode::locked ? jet_scale(-1.0 / 3.0, u.alpha) : random_real_scalar_jet(rng);
      u.m = scale_by_phase(phase_jet(phi), n);
      u.mp = u.m;
      return u;
    }
  }
  return u;
}

/// n = det(m)^{-1/3} m together with d theta, theta = arg det(m) / 3.
struct SpecialPart {
  Jet n;
  std::array<double, 4> dtheta{};
};

inline SpecialPart special_part(const UnitaryJet& m) {
  const auto& v = m.value();
  const double theta = std::arg(v.dense().determinant()) / 3.0;
  const cplx e = std::exp(-kI * theta);
  SpecialPart out;
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) {
    out.dtheta[mu] = (v.adjoint() * m.jet().d[mu]).trace().imag() / 3.0;
    d[mu] = e * (m.jet().d[mu] - (kI * out.dtheta[mu]) * v);
  }
  out.n = Jet(e * v, std::move(d));
  return out;
}

// ---------------------------------------------------------------------------
// Gauge action on one-forms: A -> rho(u) ([D, u^*]_rho + A u^*).

inline TwistedOneForm gauge_one_form(OneFormKind part, const TwistedOneForm& A, const GaugeUnitary& u,
                                     const SpectralData& s, double tol = kDefaultTol) {
  if (part != A.kind) throw std::invalid_argument("gauge_one_form: Dirac part does not match the form kind");
  u.validate();
  const auto U = u.element();
  const auto Us = star(U);
  const auto rU = twist_rho(U);

  TwistedOneForm out;
  out.kind = A.kind;
  // rho(u) a [D, b]_rho u^* = (rho(u) a)[D, b u^*]_rho - (rho(u) a rho(b)) [D, u^*]_rho
  out.pairs.emplace_back(rU, Us);
  for (const auto& [a, b] : A.pairs) {
    out.pairs.emplace_back(rU * a, b * Us);
    out.pairs.emplace_back(scale(-1.0, rU * a * twist_rho(b)), Us);
  }

  const auto pus = represent(Us).op;
  const auto pru = represent(rU).op;
  if (A.kind != OneFormKind::free_dirac) {
    const ComplexMatrix& D = A.kind == OneFormKind::yukawa ? s.DY : s.DM;
    const Jet comm = detail::twisted_commutator_jet(D, Us);
    out.raw = jet_mul(pru, jet_add(comm, jet_mul(A.raw, pus)));
    const bool diag = A.kind == OneFormKind::yukawa;
    if (detail::c_pattern_residual(out.raw, diag) > tol)
      throw StructureError("gauge_one_form: transformed form left its block pattern");
  } else {
    // A_mu -> u d_mu u^* + u A_mu u^*, and independently on the operator level
    const auto pu = represent_value(U);
    for (int mu = 0; mu < 4; ++mu) out.A_mu[mu] = pu * pus.d[mu] + pu * A.A_mu[mu] * pus.value;
    const auto raw = pru.value * (free_commutator(s, pus) + A.raw.value * pus.value);
    out.raw = Jet::constant(raw);
    out.raw_has_derivatives = false;
    if (rel_residual(raw, slash(s, out.A_mu)) > tol)
      throw StructureError("gauge_one_form: operator and component routes disagree");
  }
  return out;
}

inline TwistedOneForm gauge_one_form(const TwistedOneForm& A, const GaugeUnitary& u, const SpectralData& s,
                                     double tol = kDefaultTol) {
  return gauge_one_form(A.kind, A, u, s, tol);
}

/// Ad x = pi(x) J pi(x) J^{-1}, implementing psi -> x psi x^*.
inline ComplexMatrix adjoint_operator(const AlgebraElement& x, const ComplexMatrix& K) {
  const auto p = represent_value(x);
  return p * j_conjugate(p, K);
}

/// Ad rho(u) D_A Ad u^* against D + A^u + J A^u J^{-1}.
inline double adjoint_action_finite(const GaugeUnitary& u, const TwistedOneForm& A, const SpectralData& s) {
  if (A.kind == OneFormKind::free_dirac) throw std::invalid_argument("adjoint_action_finite: finite kinds only");
  const auto U = u.element();
  const auto lhs = adjoint_operator(twist_rho(U), s.K) * covariant_dirac(A, s).op.value * adjoint_operator(star(U), s.K);
  const auto rhs = covariant_dirac(gauge_one_form(A, u, s), s).op.value;
  return rel_residual(lhs, rhs);
}

// ---------------------------------------------------------------------------
// Field laws.

inline double scalar_residual(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

struct FieldLawResiduals {
  double B = 0, W = 0, V = 0, V0 = 0, g = 0, a = 0, w = 0;
};

/// Residuals of the transformation laws for twist-invariant u between fields before and after.
inline FieldLawResiduals field_law_residuals(const FreeFields& before, const FreeFields& after, const GaugeUnitary& u,
                                             const Couplings& k) {
  FieldLawResiduals r;
  const auto sp = special_part(u.m);
  const auto& q = u.q.jet();
  const auto& n = sp.n;
  for (int mu = 0; mu < 4; ++mu) {
    const auto& f = before.phys[mu];
    const auto& h = after.phys[mu];
    r.B = std::max(r.B, scalar_residual(h.B, f.B + 2.0 / k.g1 * u.alpha.ds(mu).real()));
    const auto W = q.value * f.W_matrix() * q.value.adjoint() + (2.0 * kI / k.g2) * (q.value * q.d[mu].adjoint());
    r.W = std::max(r.W, rel_residual(h.W_matrix(), W));
    const auto V = n.value * f.V_matrix() * n.value.adjoint() - (2.0 * kI / k.g3) * (n.value * n.d[mu].adjoint());
    r.V = std::max(r.V, rel_residual(h.V_matrix(), V));
    r.V0 = std::max(r.V0, scalar_residual(h.V0, f.V0 - sp.dtheta[mu]));
    r.g = std::max(r.g, rel_residual(h.g, n.value * f.g * n.value.adjoint()));
    r.a = std::max(r.a, scalar_residual(h.a, f.a));
    r.w = std::max(r.w, scalar_residual(h.w, f.w));
  }
  return r;
}

inline std::vector<CheckResult> verify_field_laws(const SpectralData& s, const Couplings& k, GaugeMode mode,
                                                  int trials, std::uint64_t seed, double tol = kDefaultTol,
                                                  const std::string& p = "gauge.field_law.") {
  Rng rng(seed);
  CheckAccumulator cb(p + "B", "B -> B + (2/g1) d alpha", CheckKind::identity, tol);
  CheckAccumulator cw(p + "W", "W -> q W q^dag + (2i/g2) q d q^dag", CheckKind::identity, tol);
  CheckAccumulator cv(p + "V", "V -> n V n^dag - (2i/g3) n d n^dag, n = det(m)^{-1/3} m", CheckKind::identity, tol);
  CheckAccumulator cg(p + "g", "g -> n g n^dag", CheckKind::identity, tol);
  CheckAccumulator ca(p + "a_w_invariant", "a and w are gauge invariant", CheckKind::identity, tol);
  for (int t = 0; t < trials; ++t) {
    const auto A = random_selfadjoint_free_form(rng, s, k, 1, true);
    const auto u = random_gauge_unitary(mode, rng);
    const auto before = extract_gauge(A, k);
    const auto after = extract_gauge(gauge_one_form(A, u, s), k);
    const auto r = field_law_residuals(before, after, u, k);
    cb.add(r.B);
    cw.add(r.W);
    cv.add(std::max(r.V, r.V0));
    cg.add(r.g);
    ca.add(std::max(r.a, r.w));
  }
  return {cb.finish(), cw.finish(), cv.finish(), cg.finish(), ca.finish()};
}

/// H2 -> q (H2 + 1) alpha^dag - 1 and H1 -> alpha' (H1 + 1) q'^dag - 1, alpha = diag(e^{i a}, e^{-i a}).
struct HiggsLawResiduals {
  double right = 0, left = 0, doublet = 0;
};

inline HiggsLawResiduals higgs_law_residuals(const HiggsFields& before, const HiggsFields& after,
                                             const GaugeUnitary& u) {
  const auto id = ComplexMatrix::identity(2);
  const cplx e = std::exp(kI * u.alpha.s().real());
  const cplx ep = std::exp(kI * u.alpha_p.s().real());
  const auto al = ComplexMatrix::diag({e, std::conj(e)});
  const auto alp = ComplexMatrix::diag({ep, std::conj(ep)});
  const auto& q = u.q.value();
  const auto& qp = u.qp.value();
  auto law2 = [&](const ComplexMatrix& H) { return q * (H + id) * al.adjoint() - id; };
  auto law1 = [&](const ComplexMatrix& H) { return alp * (H + id) * qp.adjoint() - id; };
  HiggsLawResiduals r;
  r.right = std::max(rel_residual(after.H2, law2(before.H2)), rel_residual(after.H1, law1(before.H1)));
  r.left = std::max(rel_residual(after.H2p, law2(before.H2p)), rel_residual(after.H1p, law1(before.H1p)));
  // (phi1 + 1, phi2) -> q (phi1 + 1, phi2) e^{-i alpha}, the first column of H + 1
  for (const auto* pr : {&before.H2, &before.H2p}) {
    const auto& a = *pr;
    const auto& b = pr == &before.H2 ? after.H2 : after.H2p;
    const auto phi = ComplexMatrix::from_rows(2, 1, {a(0, 0) + 1.0, a(1, 0)});
    const auto phi_after = ComplexMatrix::from_rows(2, 1, {b(0, 0) + 1.0, b(1, 0)});
    r.doublet = std::max(r.doublet, rel_residual(phi_after, std::conj(e) * (q * phi)));
  }
  return r;
}

inline std::vector<CheckResult> verify_higgs_law(const SpectralData& s, GaugeMode mode, int trials,
                                                 std::uint64_t seed, double tol = kDefaultTol) {
  Rng rng(seed);
  CheckAccumulator cr("gauge.higgs_law.right", "H_r doublet -> q (H_r + 1) e^{-i alpha}", CheckKind::identity, tol);
  CheckAccumulator cl("gauge.higgs_law.left", "H_l doublet -> q (H_l + 1) e^{-i alpha}", CheckKind::identity, tol);
  CheckAccumulator cd("gauge.higgs_law.doublet", "(phi1 + 1, phi2) -> q (phi1 + 1, phi2) e^{-i alpha}",
                      CheckKind::identity, tol);
  for (int t = 0; t < trials; ++t) {
    const auto A = random_selfadjoint_form(OneFormKind::yukawa, rng, s, 1);
    const auto u = random_gauge_unitary(mode, rng);
    const auto before = extract_higgs(A, s.params);
    const auto after = extract_higgs(gauge_one_form(A, u, s), s.params);
    const auto r = higgs_law_residuals(before, after, u);
    cr.add(r.right);
    cl.add(r.left);
    cd.add(r.doublet);
  }
  return {cr.finish(), cl.finish(), cd.finish()};
}

/// Q-block on alpha and M-block on (I, alpha) of pi(u) at s = r, sd = 0: A_r Xi B_r^dag = Xi.
inline double xi_identity_residual(const GaugeUnitary& u) {
  const auto pu = represent_value(u.element());
  Dense a(4, 4), b(16, 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = pu(BasisLayout::flat(0, kRight, 0, 0, i), BasisLayout::flat(0, kRight, 0, 0, j));
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) b(i, j) = pu(BasisLayout::flat(1, kRight, 0, i / 4, i % 4), BasisLayout::flat(1, kRight, 0, j / 4, j % 4));
  const auto xi = xi_pattern();
  const auto A = kron(ComplexMatrix::identity(4), ComplexMatrix(std::move(a)));
  return rel_residual(A * xi * ComplexMatrix(std::move(b)).adjoint(), xi);
}

inline std::vector<CheckResult> verify_sigma_invariance(const SpectralData& s, GaugeMode mode, int trials,
                                                        std::uint64_t seed, double tol = kDefaultTol) {
  Rng rng(seed);
  CheckAccumulator cf("gauge.sigma.form_invariant", "u A_M u^dag = A_M", CheckKind::identity, tol);
  CheckAccumulator cs("gauge.sigma.fields_invariant", "sigma_r, sigma_l unchanged", CheckKind::identity, tol);
  CheckAccumulator cx("gauge.sigma.xi_identity", "A_r Xi B_r^dag = Xi", CheckKind::identity, tol);
  for (int t = 0; t < trials; ++t) {
    const auto A = random_selfadjoint_form(OneFormKind::majorana, rng, s, 1);
    const auto u = random_gauge_unitary(mode, rng);
    const auto Au = gauge_one_form(A, u, s);
    cf.add(rel_residual(Au.raw.value, A.raw.value));
    const auto b = covariant_dirac(A, s);
    const auto a = covariant_dirac(Au, s);
    cs.add(std::max(scalar_residual(a.sigma_r, b.sigma_r), scalar_residual(a.sigma_l, b.sigma_l)));
    cx.add(xi_identity_residual(u));
  }
  return {cf.finish(), cs.finish(), cx.finish()};
}

/// Preservation for twist-invariant u (K = 0 and K != 0); a counterexample residual for generic u.
inline std::vector<CheckResult> check_selfadjoint_preservation(const SpectralData& s, const Couplings& k, int trials,
                                                               std::uint64_t seed, double tol = kDefaultTol,
                                                               double floor = 1e-4) {
  Rng rng(seed);
  CheckAccumulator keep("gauge.selfadjoint.preserved", "twist-invariant u preserves rho(A_mu) = -A_mu^dag",
                        CheckKind::identity, tol);
  CheckAccumulator broken("gauge.selfadjoint.generic_counterexample",
                          "generic u with q != q' breaks rho(A_mu) = -A_mu^dag", CheckKind::violation, floor);
  for (int t = 0; t < trials; ++t) {
    const auto A = random_selfadjoint_free_form(rng, s, k, 1, true);
    const double K = (t % 2 == 0) ? 0.0 : gauss(rng);
    const auto u = random_gauge_unitary(GaugeMode::twist_invariant, rng, K);
    keep.add(free_selfadjoint_residual(gauge_one_form(A, u, s).A_mu));
    const auto v = random_gauge_unitary(GaugeMode::generic, rng);
    broken.add(free_selfadjoint_residual(gauge_one_form(A, v, s).A_mu));
  }
  keep.note("odd trials use a nonzero constant K in alpha' = alpha + K");
  return {keep.finish(), broken.finish()};
}

inline std::vector<CheckResult> check_adjoint_action(const SpectralData& s, int trials, std::uint64_t seed,
                                                     double tol = kDefaultTol) {
  Rng rng(seed);
  CheckAccumulator cy("gauge.adjoint_action.yukawa", "Ad rho(u) D_A Ad u^* = D + A^u + J A^u J^{-1}, Yukawa part",
                      CheckKind::identity, tol);
  CheckAccumulator cm("gauge.adjoint_action.majorana",
                      "Ad rho(u) D_A Ad u^* = D + A^u + J A^u J^{-1}, Majorana part", CheckKind::identity, tol);
  for (int t = 0; t < trials; ++t) {
    const auto u = random_gauge_unitary(GaugeMode::twist_invariant, rng);
    cy.add(adjoint_action_finite(u, random_selfadjoint_form(OneFormKind::yukawa, rng, s, 1), s));
    cm.add(adjoint_action_finite(u, random_selfadjoint_form(OneFormKind::majorana, rng, s, 1), s));
  }
  return {cy.finish(), cm.finish()};
}

inline double form_residual(const TwistedOneForm& a, const TwistedOneForm& b) {
  if (a.kind != OneFormKind::free_dirac) return rel_residual(a.raw.value, b.raw.value);
  double r = 0;
  for (int mu = 0; mu < 4; ++mu) r = std::max(r, rel_residual(a.A_mu[mu], b.A_mu[mu]));
  return r;
}

inline std::vector<CheckResult> check_group_law(const SpectralData& s, const Couplings& k, int trials,
                                                std::uint64_t seed, double tol = kDefaultTol) {
  Rng rng(seed);
  CheckAccumulator acc("gauge.group_law", "(A^u)^v = A^{vu}", CheckKind::identity, tol);
  for (int t = 0; t < trials; ++t) {
    const auto u = random_gauge_unitary(GaugeMode::twist_invariant, rng);
    const auto v = random_gauge_unitary(GaugeMode::twist_invariant, rng);
    const auto vu = compose(v, u);
    const auto kind = static_cast<OneFormKind>(t % 3);
    const auto A = kind == OneFormKind::free_dirac ? random_selfadjoint_free_form(rng, s, k, 1, true)
                                                   : random_selfadjoint_form(kind, rng, s, 1);
    acc.add(form_residual(gauge_one_form(gauge_one_form(A, u, s), v, s), gauge_one_form(A, vu, s)));
  }
  acc.note("cycles through the Yukawa, Majorana and free parts");
  return {acc.finish()};
}

/// Defect stays 0 when the U(1) phase of m is locked to -alpha/3, and moves for a free phase.
inline std::vector<CheckResult> check_unimodular_locking(const SpectralData& s, const Couplings& k, int trials,
                                                         std::uint64_t seed, double tol = kDefaultTol,
                                                         double floor = 1e-4) {
  Rng rng(seed);
  CheckAccumulator lock("gauge.unimodular.locked_phase", "Tr A_mu = 0 kept for m = e^{-i alpha/3} n",
                        CheckKind::identity, tol);
  CheckAccumulator free("gauge.unimodular.free_phase", "Tr A_mu = 0 lost for an unlocked phase of m",
                        CheckKind::violation, floor);
  auto defect = [&](const TwistedOneForm& A) {
    const auto f = extract_gauge(A, k);
    double d = 0;
    for (const auto& e : unimodularity_defect(A, f, k)) d = std::max(d, e.defect);
    return d;
  };
  for (int t = 0; t < trials; ++t) {
    const auto A = random_selfadjoint_free_form(rng, s, k, 1, true);
    lock.add(defect(gauge_one_form(A, random_gauge_unitary(GaugeMode::locked, rng), s)));
    free.add(defect(gauge_one_form(A, random_gauge_unitary(GaugeMode::free_phase, rng), s)));
  }
  return {lock.finish(), free.finish()};
}

/// Exploratory: fields and the selfadjointness residual after a generic transformation. No claim attached.
struct GenericTransformView {
  FreeFields fields;
  double selfadjoint_residual = 0;
};

inline GenericTransformView explore_generic_transform(const TwistedOneForm& A, const GaugeUnitary& u,
                                                      const SpectralData& s, const Couplings& k) {
  const auto Au = gauge_one_form(A, u, s);
  return {extract_gauge(Au, k), free_selfadjoint_residual(Au.A_mu)};
}

inline std::vector<CheckResult> check_gauge_identity(const SpectralData& s, const Couplings& k, int trials,
                                                     std::uint64_t seed, double tol = kDefaultTol) {
  Rng rng(seed);
  CheckAccumulator acc("gauge.identity", "u = 1 leaves every form unchanged", CheckKind::identity, tol);
  const auto one = GaugeUnitary::identity();
  for (int t = 0; t < trials; ++t) {
    const auto kind = static_cast<OneFormKind>(t % 3);
    const auto A = kind == OneFormKind::free_dirac ? random_selfadjoint_free_form(rng, s, k, 1, true)
                                                   : random_selfadjoint_form(kind, rng, s, 1);
    acc.add(form_residual(gauge_one_form(A, one, s), A));
  }
  return {acc.finish()};
}

/// SplitMix64 step, used to give each check group its own stream.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t group) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (group + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::vector<CheckResult> check_gauge(const SpectralData& s, const Couplings& k, int trials, std::uint64_t seed,
                                            double tol = kDefaultTol) {
  std::vector<CheckResult> out;
  auto add = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  add(verify_field_laws(s, k, GaugeMode::twist_invariant, trials, derive_seed(seed, 0), tol));
  add(verify_field_laws(s, k, GaugeMode::pure_alpha, trials, derive_seed(seed, 1), tol, "gauge.field_law_pure_alpha."));
  add(verify_higgs_law(s, GaugeMode::twist_invariant, trials, derive_seed(seed, 2), tol));
  add(verify_sigma_invariance(s, GaugeMode::twist_invariant, trials, derive_seed(seed, 3), tol));
  add(check_selfadjoint_preservation(s, k, trials, derive_seed(seed, 4), tol));
  add(check_adjoint_action(s, trials, derive_seed(seed, 5), tol));
  add(check_group_law(s, k, trials, derive_seed(seed, 6), tol));
  add(check_unimodular_locking(s, k, trials, derive_seed(seed, 7), tol));
  add(check_gauge_identity(s, k, std::min(trials, 9), derive_seed(seed, 8), tol));
  return out;
}

}  // namespace twsm
