#pragma once

#include "algebra.hpp"
#include "check.hpp"

namespace twsm {

using Vierbein = Eigen::Matrix4d;  ///< e(mu, a): gamma^mu = e(mu, a) gamma_E^a

// ---------------------------------------------------------------------------
// Dirac matrices on the (s, sd) factor.

/// sigma^mu = {1, -i sigma_j}
inline ComplexMatrix sigma_mu(int mu) {
  return mu == 0 ? ComplexMatrix::identity(2) : -kI * mat::pauli(mu);
}

/// tilde sigma^mu = {1, i sigma_j}
inline ComplexMatrix sigma_tilde_mu(int mu) {
  return mu == 0 ? ComplexMatrix::identity(2) : kI * mat::pauli(mu);
}

/// 4x4 Euclidean chiral gamma on (s, sd): [[0, sigma], [tilde sigma, 0]] in s.
inline ComplexMatrix gamma_euclid(int mu) {
  Dense g = Dense::Zero(4, 4);
  g.block(0, 2, 2, 2) = sigma_mu(mu).dense();
  g.block(2, 0, 2, 2) = sigma_tilde_mu(mu).dense();
  return ComplexMatrix(std::move(g));
}

struct GammaSet {
  std::array<ComplexMatrix, 4> gamma4;  ///< curved, on (s, sd)
  std::array<ComplexMatrix, 4> gamma;   ///< curved, embedded in 128 dims
  ComplexMatrix gamma5_4;
  ComplexMatrix gamma5;
  Eigen::Matrix4d metric;  ///< g^{mu nu} = e e^T
  Vierbein vierbein;
};

inline GammaSet build_gamma(const Vierbein& e) {
  if (std::abs(e.determinant()) < 1e-12) throw std::invalid_argument("build_gamma: singular vierbein");
  GammaSet g;
  g.vierbein = e;
  g.metric = e * e.transpose();
  for (int mu = 0; mu < 4; ++mu) {
    Dense acc = Dense::Zero(4, 4);
    for (int a = 0; a < 4; ++a) acc += e(mu, a) * gamma_euclid(a).dense();
    g.gamma4[mu] = ComplexMatrix(std::move(acc));
    g.gamma[mu] = embed(g.gamma4[mu], {Factor::s, Factor::sd});
  }
  g.gamma5_4 = gamma_euclid(1) * gamma_euclid(2) * gamma_euclid(3) * gamma_euclid(0);
  g.gamma5 = embed(g.gamma5_4, {Factor::s, Factor::sd});
  return g;
}

// ---------------------------------------------------------------------------
// Finite Dirac operator on (C, I, alpha).

struct FiniteDiracParams {
  double k_nu = 0.1;
  double k_e = 0.2;
  double k_u = 0.3;
  double k_d = 0.4;
  double k_R = 1.0;

  void validate() const {
    for (double x : {k_nu, k_e, k_u, k_d, k_R})
      if (!std::isfinite(x)) throw std::invalid_argument("FiniteDiracParams: non-finite coupling");
  }

  /// (k_up, k_down) for lepto-colour index I
  std::pair<double, double> k(int I) const { return I == 0 ? std::pair{k_nu, k_e} : std::pair{k_u, k_d}; }
};

struct FiniteDirac {
  ComplexMatrix D0;  ///< 16x16 on (I, alpha)
  ComplexMatrix DR;  ///< 16x16 on (I, alpha)
  ComplexMatrix DY;  ///< 32x32 on (C, I, alpha)
  ComplexMatrix DM;
  ComplexMatrix DF;
};

/// Xi: the single (I = 0, alpha = dotted 1) slot
inline ComplexMatrix xi_pattern() { return kron(mat::unit(4, 0, 0), mat::unit(4, 0, 0)); }

inline FiniteDirac build_DF(const FiniteDiracParams& p) {
  p.validate();
  Dense d0 = Dense::Zero(16, 16);
  for (int I = 0; I < 4; ++I) {
    const auto [ku, kd] = p.k(I);
    // [[0, conj k], [k, 0]] between dotted and undotted slots, k = diag(k_up, k_down)
    d0(4 * I + kDot1, 4 * I + kUndot1) = std::conj(cplx(ku));
    d0(4 * I + kDot2, 4 * I + kUndot2) = std::conj(cplx(kd));
    d0(4 * I + kUndot1, 4 * I + kDot1) = ku;
    d0(4 * I + kUndot2, 4 * I + kDot2) = kd;
  }
  FiniteDirac f;
  f.D0 = ComplexMatrix(std::move(d0));
  f.DR = cplx(p.k_R) * xi_pattern();
  f.DY = kron(mat::unit(2, 0, 0), f.D0) + kron(mat::unit(2, 1, 1), f.D0.adjoint());
  f.DM = kron(mat::unit(2, 0, 1), f.DR) + kron(mat::unit(2, 1, 0), f.DR.adjoint());
  f.DF = f.DY + f.DM;
  return f;
}

/// gamma5 (on s, sd) tensor a 32x32 operator on (C, I, alpha)
inline ComplexMatrix gamma5_tensor(const ComplexMatrix& gamma5, const ComplexMatrix& d32) {
  return gamma5 * embed(d32, {Factor::C, Factor::I, Factor::alpha});
}

// ---------------------------------------------------------------------------
// Grading and real structure.

inline ComplexMatrix eta_alpha() { return ComplexMatrix::diag({1, 1, -1, -1}); }

/// Gamma = gamma5 (eta on s) x eta_C x eta_alpha
inline ComplexMatrix build_grading() {
  return embed(mat::eta(), {Factor::s}) * embed(mat::eta(), {Factor::C}) *
         embed(eta_alpha(), {Factor::alpha});
}

inline ComplexMatrix tau() { return ComplexMatrix::from_rows(2, 2, {0, -1, 1, 0}); }

/// Linear part on (s, sd) of the manifold real structure.
inline ComplexMatrix real_structure_spin() { return kron(mat::eta(), -kI * tau()); }

/// K with J v = K conj(v): xi on C, eta on s, -i tau on sd.
inline ComplexMatrix build_real_structure() {
  return embed(mat::pauli(1), {Factor::C}) * embed(real_structure_spin(), {Factor::s, Factor::sd});
}

/// J^2 = sign for an antilinear J = K o cc.
inline int antilinear_square_sign(const ComplexMatrix& K, double tol = 1e-12) {
  const auto sq = K * K.conjugate();
  const auto id = ComplexMatrix::identity(K.rows());
  if (rel_residual(sq, id) <= tol) return +1;
  if (rel_residual(sq, -id) <= tol) return -1;
  return 0;
}

struct SpectralData {
  GammaSet gammas;
  FiniteDiracParams params;
  FiniteDirac finite;
  ComplexMatrix Gamma;
  ComplexMatrix K;
  ComplexMatrix DY;  ///< gamma5 x D_Y in 128 dims
  ComplexMatrix DM;  ///< gamma5 x D_M in 128 dims
  int jm_square = 0;
  int jf_square = 0;
};

inline SpectralData build_spectral_data(const Vierbein& e = Vierbein::Identity(),
                                        const FiniteDiracParams& p = {}) {
  SpectralData s;
  s.gammas = build_gamma(e);
  s.params = p;
  s.finite = build_DF(p);
  s.Gamma = build_grading();
  s.K = build_real_structure();
  s.DY = gamma5_tensor(s.gammas.gamma5, s.finite.DY);
  s.DM = gamma5_tensor(s.gammas.gamma5, s.finite.DM);
  s.jm_square = antilinear_square_sign(real_structure_spin());
  s.jf_square = antilinear_square_sign(mat::pauli(1));
  return s;
}

inline Vierbein random_vierbein(Rng& rng) {
  Vierbein e;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) e(i, j) = (i == j ? 1.5 : 0.0) + 0.4 * gauss(rng);
  return e;
}

// ---------------------------------------------------------------------------
// Residuals of individual axioms.

/// [[D, b]_rho, a°]_{rho°} with rho°(a°) = (rho(a))°
inline double first_order_residual(const ComplexMatrix& D, const AlgebraElement& a,
                                   const AlgebraElement& b, const ComplexMatrix& K,
                                   MLayout layout = MLayout::twisted) {
  const auto x = twisted_commutator(D, represent_value(b, layout), represent_value(twist_rho(b), layout));
  const auto ao = opposite_value(a, K, layout);
  const auto rao = opposite_value(twist_rho(a), K, layout);
  return rel_residual(x * ao, rao * x);
}

inline double order_zero_residual(const AlgebraElement& a, const AlgebraElement& b, const ComplexMatrix& K) {
  const auto pa = represent_value(a);
  const auto bo = opposite_value(b, K);
  return rel_residual(pa * bo, bo * pa);
}

/// Lower C-block of [gamma5 x D_Y, b]_rho, i.e. [gamma5 x D_0^dag, N]_rho.
inline double yukawa_lower_block_residual(const SpectralData& s, const AlgebraElement& b,
                                          MLayout layout = MLayout::twisted) {
  const auto t1 = c_block_mask(s.DY * represent_value(b, layout), 1, 1);
  const auto t2 = c_block_mask(represent_value(twist_rho(b), layout) * s.DY, 1, 1);
  return rel_residual(t1, t2);
}

inline ComplexMatrix random_spin_connection(const GammaSet& g, Rng& rng) {
  // omega_mu = Gamma_mu^{rho nu} gamma_rho gamma_nu, assembled on (s, sd)
  ComplexMatrix w = ComplexMatrix::zero(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int n = 0; n < 4; ++n) w = w + cplx(gauss(rng)) * (g.gamma4[r] * g.gamma4[n]);
  return embed(w, {Factor::s, Factor::sd});
}

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> check_structure(const SpectralData& s, double tol = kDefaultTol) {
  std::vector<CheckResult> out;
  const auto id = ComplexMatrix::identity(BasisLayout::dim);
  const auto& g = s.gammas;

  auto single = [&](const char* cid, const char* anchor, double r) {
    CheckAccumulator acc(cid, anchor, CheckKind::identity, tol);
    acc.add(r);
    out.push_back(acc.finish());
  };

  double cl = 0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      cl = std::max(cl, rel_residual(g.gamma[mu] * g.gamma[nu] + g.gamma[nu] * g.gamma[mu],
                                     cplx(2 * g.metric(mu, nu)) * id));
  single("structure.clifford", "anticommutator of curved gammas equals 2 g^{mu nu}", cl);

  single("structure.gamma5", "gamma5 = gamma1 gamma2 gamma3 gamma0 = diag(1, 1, -1, -1)",
         rel_residual(gamma_euclid(1) * gamma_euclid(2) * gamma_euclid(3) * gamma_euclid(0),
                      ComplexMatrix::diag({1, 1, -1, -1})));

  single("structure.grading_involution", "Gamma selfadjoint with Gamma^2 = 1",
         std::max(rel_residual(s.Gamma, s.Gamma.adjoint()), rel_residual(s.Gamma * s.Gamma, id)));

  double ga = 0;
  for (int mu = 0; mu < 4; ++mu) ga = std::max(ga, rel_residual(s.Gamma * g.gamma[mu], -(g.gamma[mu] * s.Gamma)));
  single("structure.grading_anticommutes_dirac", "Gamma anticommutes with the gamma matrices", ga);

  {
    const auto dfull = s.DY + s.DM;
    single("structure.grading_anticommutes_finite", "Gamma anticommutes with gamma5 x D_F",
           rel_residual(s.Gamma * dfull, -(dfull * s.Gamma)));
  }

  single("structure.J_square", "K conj(K) = -1 (J^2 = -1)", rel_residual(s.K * s.K.conjugate(), -id));
  single("structure.K_unitary", "K K^dag = 1", rel_residual(s.K * s.K.adjoint(), id));

  double kg = 0;
  for (int mu = 0; mu < 4; ++mu) kg = std::max(kg, rel_residual(s.K * g.gamma[mu].conjugate(), -(g.gamma[mu] * s.K)));
  single("structure.J_gamma", "J anticommutes with every gamma^mu", kg);

  single("structure.J_grading", "J Gamma = -Gamma J", rel_residual(s.K * s.Gamma.conjugate(), -(s.Gamma * s.K)));

  single("structure.DF_selfadjoint", "D_F selfadjoint for real couplings",
         rel_residual(s.finite.DF, s.finite.DF.adjoint()));
  return out;
}

inline std::vector<CheckResult> check_axioms(const SpectralData& s, int trials, std::uint64_t seed,
                                             double tol = kDefaultTol) {
  Rng rng(seed);
  CheckAccumulator oz("axioms.order_zero", "order-zero condition [a, b°] = 0", CheckKind::identity, tol);
  CheckAccumulator foy("axioms.first_order_yukawa", "twisted first-order condition for gamma5 x D_Y",
                       CheckKind::identity, tol);
  CheckAccumulator fom("axioms.first_order_majorana", "twisted first-order condition for gamma5 x D_M",
                       CheckKind::identity, tol);
  CheckAccumulator low("axioms.yukawa_lower_block", "[gamma5 x D_0^dag, N]_rho = 0", CheckKind::identity, tol);
  CheckAccumulator jd("axioms.real_structure_DF", "J D_F = D_F J", CheckKind::identity, tol);
  CheckAccumulator reg("axioms.regularity", "gamma^mu pi(a) = pi(rho(a)) gamma^mu", CheckKind::identity, tol);
  CheckAccumulator spin("axioms.spin_connection", "[omega_mu, pi(a)] = 0", CheckKind::identity, tol);

  jd.add(std::max(rel_residual(s.K * s.DY.conjugate(), s.DY * s.K),
                  rel_residual(s.K * s.DM.conjugate(), s.DM * s.K)));

  for (int t = 0; t < trials; ++t) {
    const auto a = random_element(rng);
    const auto b = random_element(rng);
    oz.add(order_zero_residual(a, b, s.K));
    foy.add(first_order_residual(s.DY, a, b, s.K));
    fom.add(first_order_residual(s.DM, a, b, s.K));
    low.add(yukawa_lower_block_residual(s, b));
    const auto pa = represent_value(a);
    const auto pra = represent_value(twist_rho(a));
    double r = 0;
    for (int mu = 0; mu < 4; ++mu)
      r = std::max(r, rel_residual(s.gammas.gamma[mu] * pa, pra * s.gammas.gamma[mu]));
    reg.add(r);
    const auto w = random_spin_connection(s.gammas, rng);
    spin.add(rel_residual(w * pa, pa * w));
  }
  return {oz.finish(), foy.finish(), fom.finish(), low.finish(), jd.finish(), reg.finish(), spin.finish()};
}

// ---------------------------------------------------------------------------
// Counterexample: M acting as m x 1_4 on s = r and m' x 1_4 on s = l.

inline RepresentedElement represent_naive(const AlgebraElement& a) { return represent(a, MLayout::naive); }

struct NaiveViolationReport {
  std::vector<double> residuals;      ///< generic draws
  double twist_invariant_max = 0;     ///< primed = unprimed draws
  double fraction_above_floor = 0;
  double floor = 1e-3;
  double scaling_ratio = 0;           ///< r(2b) / r(b) on unnormalized double commutators
};

/// Unnormalized Frobenius norm of the double commutator, used for the scaling check.
inline double naive_double_commutator_norm(const SpectralData& s, const AlgebraElement& a,
                                           const AlgebraElement& b) {
  const auto x = twisted_commutator(s.DY, represent_value(b, MLayout::naive),
                                    represent_value(twist_rho(b), MLayout::naive));
  const auto ao = opposite_value(a, s.K, MLayout::naive);
  const auto rao = opposite_value(twist_rho(a), s.K, MLayout::naive);
  return (x * ao - rao * x).norm();
}

inline NaiveViolationReport naive_twist_violation(const SpectralData& s, int trials, std::uint64_t seed,
                                                  double floor = 1e-3) {
  Rng rng(seed);
  NaiveViolationReport rep;
  rep.floor = floor;
  int above = 0;
  for (int t = 0; t < trials; ++t) {
    const auto a = random_element(rng);
    const auto b = random_element(rng);
    const double r = first_order_residual(s.DY, a, b, s.K, MLayout::naive);
    rep.residuals.push_back(r);
    if (r >= floor) ++above;
    const auto ai = random_twist_invariant(rng);
    const auto bi = random_twist_invariant(rng);
    rep.twist_invariant_max =
        std::max(rep.twist_invariant_max, first_order_residual(s.DY, ai, bi, s.K, MLayout::naive));
  }
  rep.fraction_above_floor = trials > 0 ? static_cast<double>(above) / trials : 0.0;
  {
    const auto a = random_element(rng);
    const auto b = random_element(rng);
    const double n1 = naive_double_commutator_norm(s, a, b);
    const double n2 = naive_double_commutator_norm(s, a, scale(2.0, b));
    rep.scaling_ratio = n1 > 0 ? n2 / n1 : 0.0;
  }
  return rep;
}

}  // namespace twsm
