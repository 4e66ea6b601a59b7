#pragma once

#include "geometry.hpp"

#include <optional>

namespace twsm {

enum class OneFormKind { yukawa, majorana, free_dirac };

inline const char* to_string(OneFormKind k) {
  switch (k) {
    case OneFormKind::yukawa: return "yukawa";
    case OneFormKind::majorana: return "majorana";
    case OneFormKind::free_dirac: return "free";
  }
  return "yukawa";
}

using ElementPair = std::pair<AlgebraElement, AlgebraElement>;

struct Couplings {
  double g1 = 1.0;
  double g2 = 1.0;
  double g3 = 1.0;

  void validate() const {
    if (!(g1 > 0 && g2 > 0 && g3 > 0)) throw std::invalid_argument("Couplings: g1, g2, g3 must be positive");
  }
};

/// Sum_i pi(a_i) [D, pi(b_i)]_rho for one part D of the Dirac operator.
struct TwistedOneForm {
  OneFormKind kind = OneFormKind::yukawa;
  Jet raw;
  bool raw_has_derivatives = true;  ///< false for the free kind (would need second derivatives)
  std::array<ComplexMatrix, 4> A_mu;  ///< free kind: raw = -i gamma^mu A_mu
  std::vector<ElementPair> pairs;
};

/// (a, b) -> (a/2, b), (b^*/2, a^*), (-1/2, rho(b^*) a^*): a selfadjoint form with the same span.
inline std::vector<ElementPair> symmetrize(const std::vector<ElementPair>& pairs) {
  std::vector<ElementPair> out;
  out.reserve(pairs.size() * 3);
  const auto one = identity_element();
  for (const auto& [a, b] : pairs) {
    out.emplace_back(scale(0.5, a), b);
    out.emplace_back(scale(0.5, star(b)), star(a));
    out.emplace_back(scale(-0.5, one), twist_rho(star(b)) * star(a));
  }
  return out;
}

namespace detail {

inline Jet left_mul(const ComplexMatrix& l, const Jet& a) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = l * a.d[mu];
  return Jet(l * a.value, std::move(d));
}

inline Jet right_mul(const Jet& a, const ComplexMatrix& r) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = a.d[mu] * r;
  return Jet(a.value * r, std::move(d));
}

/// [D, b]_rho at jet level for a constant operator D
inline Jet twisted_commutator_jet(const ComplexMatrix& D, const AlgebraElement& b) {
  return jet_sub(left_mul(D, represent(b).op), right_mul(represent(twist_rho(b)).op, D));
}

inline double c_pattern_residual(const Jet& j, bool diagonal) {
  double r = 0;
  auto one = [&](const ComplexMatrix& x) {
    const auto keep = diagonal ? c_block_mask(x, 0, 0) + c_block_mask(x, 1, 1)
                               : c_block_mask(x, 0, 1) + c_block_mask(x, 1, 0);
    r = std::max(r, rel_residual(x, keep));
  };
  one(j.value);
  for (const auto& x : j.d) one(x);
  return r;
}

}  // namespace detail

/// -i gamma^mu d_mu pi(b): the twisted commutator of the free Dirac operator with b.
inline ComplexMatrix free_commutator(const SpectralData& s, const Jet& pb) {
  ComplexMatrix out = ComplexMatrix::zero(BasisLayout::dim, BasisLayout::dim);
  for (int mu = 0; mu < 4; ++mu) out = out + (-kI) * (s.gammas.gamma[mu] * pb.d[mu]);
  return out;
}

inline ComplexMatrix slash(const SpectralData& s, const std::array<ComplexMatrix, 4>& a_mu) {
  ComplexMatrix out = ComplexMatrix::zero(BasisLayout::dim, BasisLayout::dim);
  for (int mu = 0; mu < 4; ++mu) out = out + (-kI) * (s.gammas.gamma[mu] * a_mu[mu]);
  return out;
}

namespace detail {

/// Adds the contribution of `pairs` to f (the form is linear in its pair list).
inline void accumulate_pairs(TwistedOneForm& f, const std::vector<ElementPair>& pairs, const SpectralData& s) {
  if (f.kind != OneFormKind::free_dirac) {
    const ComplexMatrix& D = f.kind == OneFormKind::yukawa ? s.DY : s.DM;
    for (const auto& [a, b] : pairs) f.raw = jet_add(f.raw, jet_mul(represent(a).op, twisted_commutator_jet(D, b)));
    return;
  }
  ComplexMatrix raw = f.raw.value;
  for (const auto& [a, b] : pairs) {
    const auto pb = represent(b).op;
    const auto pra = represent_value(twist_rho(a));
    for (int mu = 0; mu < 4; ++mu) f.A_mu[mu] = f.A_mu[mu] + pra * pb.d[mu];
    raw = raw + represent_value(a) * free_commutator(s, pb);
  }
  f.raw = Jet::constant(raw);
}

inline void assert_kind(const TwistedOneForm& f, const SpectralData& s, double tol) {
  constexpr int N = BasisLayout::dim;
  if (f.kind != OneFormKind::free_dirac) {
    const bool diag = f.kind == OneFormKind::yukawa;
    double r = c_pattern_residual(f.raw, diag);
    if (diag) {
      const auto lower = [&](const ComplexMatrix& x) { return rel_residual(c_block_mask(x, 1, 1), ComplexMatrix::zero(N, N)); };
      r = std::max(r, lower(f.raw.value));
      for (const auto& x : f.raw.d) r = std::max(r, lower(x));
    }
    if (r > tol) throw StructureError(std::string("one_form: ") + to_string(f.kind) + " block pattern violated");
    return;
  }
  double r = rel_residual(f.raw.value, slash(s, f.A_mu));
  for (const auto& x : f.A_mu) r = std::max(r, c_pattern_residual(Jet::constant(x), true));
  if (r > tol) throw StructureError("one_form: free form is not -i gamma^mu A_mu with C-diagonal A_mu");
}

}  // namespace detail

inline TwistedOneForm one_form(OneFormKind kind, std::vector<ElementPair> pairs, const SpectralData& s,
                               double tol = kDefaultTol) {
  if (pairs.empty()) throw std::invalid_argument("one_form: empty pair list");
  constexpr int N = BasisLayout::dim;
  TwistedOneForm f;
  f.kind = kind;
  f.raw = Jet::zero(N, N);
  f.raw_has_derivatives = kind != OneFormKind::free_dirac;
  for (auto& x : f.A_mu) x = ComplexMatrix::zero(N, N);
  detail::accumulate_pairs(f, pairs, s);
  detail::assert_kind(f, s, tol);
  f.pairs = std::move(pairs);
  return f;
}

/// f with further pairs appended.
inline TwistedOneForm extend_one_form(TwistedOneForm f, const std::vector<ElementPair>& more, const SpectralData& s,
                                      double tol = kDefaultTol) {
  detail::accumulate_pairs(f, more, s);
  detail::assert_kind(f, s, tol);
  f.pairs.insert(f.pairs.end(), more.begin(), more.end());
  return f;
}

// ---------------------------------------------------------------------------
// Yukawa part: Higgs components.

struct HiggsFields {
  ComplexMatrix H1, H2, H1p, H2p;
  double residual = 0;  ///< rebuild residual over every lepto-colour block

  ComplexMatrix H_r() const { return H2; }
  ComplexMatrix H_l() const { return H2p; }
  ComplexMatrix h() const { return 0.5 * (H2 + H2p); }
  /// H2 = H1^dag and H2' = H1'^dag
  double selfadjoint_residual() const {
    return std::max(rel_residual(H2, H1.adjoint()), rel_residual(H2p, H1p.adjoint()));
  }
};

/// A_r = [[0, conj(k) H1], [H2 k, 0]], A_l = -[[0, conj(k) H1'], [H2' k, 0]] on alpha, for every I and sd.
inline ComplexMatrix rebuild_yukawa(const ComplexMatrix& H1, const ComplexMatrix& H2, const ComplexMatrix& H1p,
                                   const ComplexMatrix& H2p, const FiniteDiracParams& p) {
  constexpr int N = BasisLayout::dim;
  Dense out = Dense::Zero(N, N);
  for (int I = 0; I < 4; ++I) {
    const auto [ku, kd] = p.k(I);
    const cplx k[2] = {ku, kd};
    for (int s = 0; s < 2; ++s) {
      const ComplexMatrix& A = s == kRight ? H1 : H1p;
      const ComplexMatrix& B = s == kRight ? H2 : H2p;
      const double sg = s == kRight ? 1.0 : -1.0;
      for (int sd = 0; sd < 2; ++sd)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            out(BasisLayout::flat(0, s, sd, I, i), BasisLayout::flat(0, s, sd, I, 2 + j)) = sg * std::conj(k[i]) * A(i, j);
            out(BasisLayout::flat(0, s, sd, I, 2 + i), BasisLayout::flat(0, s, sd, I, j)) = sg * B(i, j) * k[j];
          }
    }
  }
  return ComplexMatrix(std::move(out));
}

inline HiggsFields extract_higgs(const TwistedOneForm& A, const FiniteDiracParams& p) {
  if (A.kind != OneFormKind::yukawa) throw std::invalid_argument("extract_higgs: expected a Yukawa form");
  const auto& x = A.raw.value;
  // lepto-colour block used for flavour slot i: leptons when the coupling is nonzero, else quarks
  auto pick = [&](int i) {
    for (int I : {0, 1}) {
      const auto [ku, kd] = p.k(I);
      if ((i == 0 ? ku : kd) != 0.0) return I;
    }
    throw std::invalid_argument("extract_higgs: all Yukawa couplings of a flavour vanish");
  };
  const int Ib[2] = {pick(0), pick(1)};
  auto kk = [&](int i) {
    const auto [ku, kd] = p.k(Ib[i]);
    return cplx(i == 0 ? ku : kd);
  };
  Dense H[4];
  for (auto& h : H) h = Dense::Zero(2, 2);
  for (int s = 0; s < 2; ++s) {
    const double sg = s == kRight ? 1.0 : -1.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        // row i divided by conj(k_i); column j divided by k_j
        H[2 * s](i, j) = sg * x(BasisLayout::flat(0, s, 0, Ib[i], i), BasisLayout::flat(0, s, 0, Ib[i], 2 + j)) / std::conj(kk(i));
        H[2 * s + 1](i, j) = sg * x(BasisLayout::flat(0, s, 0, Ib[j], 2 + i), BasisLayout::flat(0, s, 0, Ib[j], j)) / kk(j);
      }
  }
  HiggsFields f{ComplexMatrix(H[0]), ComplexMatrix(H[1]), ComplexMatrix(H[2]), ComplexMatrix(H[3]), 0};
  f.residual = rel_residual(rebuild_yukawa(f.H1, f.H2, f.H1p, f.H2p, p), x);
  return f;
}

// ---------------------------------------------------------------------------
// Majorana part: sigma fields.

struct SigmaFields {
  cplx sigma, sigma_p;
  double residual = 0;
};

/// Upper-right k_R Xi diag_s(sigma, -sigma'), lower-left conj(k_R) Xi diag_s(sigma, -sigma'), trivial in sd.
inline ComplexMatrix rebuild_majorana(cplx sigma, cplx sigma_p, const FiniteDiracParams& p) {
  constexpr int N = BasisLayout::dim;
  Dense out = Dense::Zero(N, N);
  const cplx v[2] = {sigma, -sigma_p};
  for (int s = 0; s < 2; ++s)
    for (int sd = 0; sd < 2; ++sd) {
      const int i0 = BasisLayout::flat(0, s, sd, 0, kDot1), i1 = BasisLayout::flat(1, s, sd, 0, kDot1);
      out(i0, i1) = p.k_R * v[s];
      out(i1, i0) = std::conj(cplx(p.k_R)) * v[s];
    }
  return ComplexMatrix(std::move(out));
}

inline SigmaFields extract_sigma(const TwistedOneForm& A, const FiniteDiracParams& p) {
  if (A.kind != OneFormKind::majorana) throw std::invalid_argument("extract_sigma: expected a Majorana form");
  if (p.k_R == 0.0) throw std::invalid_argument("extract_sigma: k_R = 0");
  const auto& x = A.raw.value;
  auto ur = [&](int s) { return x(BasisLayout::flat(0, s, 0, 0, kDot1), BasisLayout::flat(1, s, 0, 0, kDot1)); };
  SigmaFields f{ur(kRight) / p.k_R, -ur(kLeft) / p.k_R, 0};
  f.residual = rel_residual(rebuild_majorana(f.sigma, f.sigma_p, p), x);
  return f;
}

// ---------------------------------------------------------------------------
// Free part: gauge components.

struct FreeComponents {
  cplx c_r, c_l;
  ComplexMatrix q_r, q_l;  ///< 2x2
  ComplexMatrix m_r, m_l;  ///< 3x3
};

struct GaugeFields {
  double a = 0, w = 0, B = 0, V0 = 0;
  std::array<double, 3> W{};
  std::array<double, 8> V{};
  ComplexMatrix g;  ///< 3x3 Hermitian

  ComplexMatrix W_matrix() const {
    ComplexMatrix out = ComplexMatrix::zero(2, 2);
    for (int k = 0; k < 3; ++k) out = out + cplx(W[k]) * mat::pauli(k + 1);
    return out;
  }
  ComplexMatrix V_matrix() const {
    ComplexMatrix out = ComplexMatrix::zero(3, 3);
    for (int m = 0; m < 8; ++m) out = out + cplx(V[m]) * mat::gell_mann(m + 1);
    return out;
  }
};

struct FreeFields {
  std::array<FreeComponents, 4> comp;
  std::array<GaugeFields, 4> phys;
  double residual = 0;  ///< rebuild residual of A_mu from components
};

/// The algebra element whose representation carries the free components.
inline AlgebraElement components_element(const FreeComponents& c) {
  return {Jet::scalar(c.c_r), Jet::scalar(c.c_l), Jet::constant(c.q_l),
          Jet::constant(c.q_r), Jet::constant(c.m_r), Jet::constant(c.m_l)};
}

inline ComplexMatrix rebuild_free_mu(const FreeComponents& c) {
  return represent_value(components_element(c));
}

inline FreeComponents read_components(const ComplexMatrix& a) {
  using L = BasisLayout;
  FreeComponents c;
  c.c_r = a(L::flat(0, kRight, 0, 0, kDot1), L::flat(0, kRight, 0, 0, kDot1));
  c.c_l = a(L::flat(0, kLeft, 0, 0, kDot1), L::flat(0, kLeft, 0, 0, kDot1));
  Dense qr(2, 2), ql(2, 2), mr(3, 3), ml(3, 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      qr(i, j) = a(L::flat(0, kRight, 0, 0, 2 + i), L::flat(0, kRight, 0, 0, 2 + j));
      ql(i, j) = a(L::flat(0, kLeft, 0, 0, 2 + i), L::flat(0, kLeft, 0, 0, 2 + j));
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      mr(i, j) = a(L::flat(1, kRight, 0, 1 + i, kDot1), L::flat(1, kRight, 0, 1 + j, kDot1));
      ml(i, j) = a(L::flat(1, kRight, 0, 1 + i, kUndot1), L::flat(1, kRight, 0, 1 + j, kUndot1));
    }
  c.q_r = ComplexMatrix(std::move(qr));
  c.q_l = ComplexMatrix(std::move(ql));
  c.m_r = ComplexMatrix(std::move(mr));
  c.m_l = ComplexMatrix(std::move(ml));
  return c;
}

/// c_r = a - i g1/2 B, q_r = w - i g2/2 W^k sigma_k, m_r = g + i V0 + i g3/2 V^m lambda_m
inline GaugeFields physical_fields(const FreeComponents& c, const Couplings& k) {
  GaugeFields f;
  f.a = c.c_r.real();
  f.B = -2.0 / k.g1 * c.c_r.imag();
  f.w = 0.5 * c.q_r.trace().real();
  for (int j = 0; j < 3; ++j) f.W[j] = (kI * (mat::pauli(j + 1) * c.q_r).trace()).real() / k.g2;
  f.g = 0.5 * (c.m_r + c.m_r.adjoint());
  const auto h = (-0.5 * kI) * (c.m_r - c.m_r.adjoint());
  f.V0 = h.trace().real() / 3.0;
  for (int m = 0; m < 8; ++m) f.V[m] = (h * mat::gell_mann(m + 1)).trace().real() / k.g3;
  return f;
}

/// Components of a selfadjoint free form with the given physical fields.
inline FreeComponents components_from_fields(const GaugeFields& f, const Couplings& k) {
  FreeComponents c;
  c.c_r = cplx(f.a, -0.5 * k.g1 * f.B);
  c.c_l = -std::conj(c.c_r);
  c.q_r = cplx(f.w) * ComplexMatrix::identity(2) + (-0.5 * kI * k.g2) * f.W_matrix();
  c.q_l = -c.q_r.adjoint();
  c.m_r = f.g + (kI * f.V0) * ComplexMatrix::identity(3) + (0.5 * kI * k.g3) * f.V_matrix();
  c.m_l = -c.m_r.adjoint();
  return c;
}

inline FreeFields extract_gauge(const TwistedOneForm& A, const Couplings& k) {
  if (A.kind != OneFormKind::free_dirac) throw std::invalid_argument("extract_gauge: expected a free form");
  k.validate();
  FreeFields out;
  for (int mu = 0; mu < 4; ++mu) {
    out.comp[mu] = read_components(A.A_mu[mu]);
    out.phys[mu] = physical_fields(out.comp[mu], k);
    out.residual = std::max(out.residual, rel_residual(rebuild_free_mu(out.comp[mu]), A.A_mu[mu]));
  }
  return out;
}

/// rho(A_mu) = -A_mu^dag for every mu
inline double free_selfadjoint_residual(const std::array<ComplexMatrix, 4>& a_mu) {
  double r = 0;
  for (const auto& a : a_mu) r = std::max(r, rel_residual(swap_s(a), -a.adjoint()));
  return r;
}

/// c_l = -conj(c_r), q_l = -q_r^dag, m_l = -m_r^dag
inline double component_selfadjoint_residual(const FreeComponents& c) {
  double r = std::abs(c.c_l + std::conj(c.c_r)) / std::max({1.0, std::abs(c.c_l), std::abs(c.c_r)});
  r = std::max(r, rel_residual(c.q_l, -c.q_r.adjoint()));
  r = std::max(r, rel_residual(c.m_l, -c.m_r.adjoint()));
  return r;
}

// ---------------------------------------------------------------------------
// Unimodularity.

struct UnimodularityEntry {
  cplx trace;      ///< Tr A_mu over (C, s, I, alpha)
  cplx predicted;  ///< 4 (-i g1 B + 6 i V0)
  double defect = 0;
};

/// Trace over (C, s, I, alpha): the 128-dimensional trace with the sd multiplicity removed.
inline cplx reduced_trace(const ComplexMatrix& a_mu) { return 0.5 * a_mu.trace(); }

inline std::array<UnimodularityEntry, 4> unimodularity_defect(const TwistedOneForm& A, const FreeFields& f,
                                                               const Couplings& k) {
  std::array<UnimodularityEntry, 4> out;
  for (int mu = 0; mu < 4; ++mu) {
    out[mu].trace = reduced_trace(A.A_mu[mu]);
    out[mu].predicted = 4.0 * (-kI * k.g1 * f.phys[mu].B + 6.0 * kI * f.phys[mu].V0);
    out[mu].defect = std::abs(out[mu].trace);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Covariant operators D + A + J A J^{-1}.

struct CovariantDirac {
  Jet op;                  ///< finite kinds: D + A + JAJ^{-1}; free kind: the fluctuation Z only
  Jet fluctuation;         ///< A + JAJ^{-1}
  double block_residual = 0;
  double sigma_r = 0, sigma_l = 0;          ///< Majorana kind
  double sigma_imag = 0;                     ///< largest |Im| of the extracted sigma_r, sigma_l
  std::array<ComplexMatrix, 4> Z_mu;        ///< free kind, 64x64 on (s, sd, I, alpha)
};

/// Z_mu = Q_mu + conj(M_mu) from the C blocks of A_mu.
inline ComplexMatrix z_component(const ComplexMatrix& a_mu) {
  const int h = BasisLayout::dim / 2;
  return ComplexMatrix(Dense(a_mu.dense().block(0, 0, h, h) + a_mu.dense().block(h, h, h, h).conjugate()));
}

inline CovariantDirac covariant_dirac(const TwistedOneForm& A, const SpectralData& s) {
  constexpr int N = BasisLayout::dim;
  const int h = N / 2;
  CovariantDirac out;
  const Jet ja = j_conjugate(A.raw, s.K);
  out.fluctuation = jet_add(A.raw, ja);
  switch (A.kind) {
    case OneFormKind::yukawa: {
      out.op = jet_add(Jet::constant(s.DY), out.fluctuation);
      // J A_Y J^{-1} = diag_C(0, conj(A)) with A the upper C block of A_Y
      const auto expect = c_diag(Dense::Zero(h, h), A.raw.value.dense().block(0, 0, h, h).conjugate());
      out.block_residual = rel_residual(ja.value, expect);
      break;
    }
    case OneFormKind::majorana: {
      out.op = jet_add(Jet::constant(s.DM), out.fluctuation);
      const auto& x = out.op.value;
      auto ur = [&](int sgn) {
        return x(BasisLayout::flat(0, sgn, 0, 0, kDot1), BasisLayout::flat(1, sgn, 0, 0, kDot1)) / s.params.k_R;
      };
      if (s.params.k_R == 0.0) throw std::invalid_argument("covariant_dirac: k_R = 0");
      const cplx sr = ur(kRight) - 1.0, sl = ur(kLeft) + 1.0;
      out.sigma_r = sr.real();
      out.sigma_l = sl.real();
      out.sigma_imag = std::max(std::abs(sr.imag()), std::abs(sl.imag()));
      // k_R Xi x 1_sd x (eta_s + diag(sigma_r, sigma_l)) and its adjoint
      Dense e = Dense::Zero(N, N);
      const double v[2] = {1.0 + out.sigma_r, -1.0 + out.sigma_l};
      for (int sg = 0; sg < 2; ++sg)
        for (int sd = 0; sd < 2; ++sd) {
          const int i0 = BasisLayout::flat(0, sg, sd, 0, kDot1), i1 = BasisLayout::flat(1, sg, sd, 0, kDot1);
          e(i0, i1) = s.params.k_R * v[sg];
          e(i1, i0) = std::conj(cplx(s.params.k_R)) * v[sg];
        }
      out.block_residual = rel_residual(x, ComplexMatrix(std::move(e)));
      break;
    }
    case OneFormKind::free_dirac: {
      out.op = out.fluctuation;
      std::array<ComplexMatrix, 4> zc;
      for (int mu = 0; mu < 4; ++mu) {
        out.Z_mu[mu] = z_component(A.A_mu[mu]);
        zc[mu] = c_diag(out.Z_mu[mu].dense(), out.Z_mu[mu].dense().conjugate());
      }
      out.block_residual = rel_residual(out.fluctuation.value, slash(s, zc));
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Z_mu = gamma5 x X_mu + 1 x i Y_mu.

struct ZDecomposition {
  ComplexMatrix X, Y;           ///< 32x32 on (sd, I, alpha)
  double structure_residual = 0;  ///< no s-mixing, and Z = gamma5 x X + i Y
  double hermitian_residual = 0;
  double table_residual = 0;      ///< largest entrywise deviation from the component table
};

/// Component table of Z^r on (I, alpha) from the physical fields. The quark
/// entries assume the unimodularity condition V0 = g1 B / 6.
inline ComplexMatrix z_table(const GaugeFields& f, const Couplings& k) {
  Dense z = Dense::Zero(16, 16);
  const Dense gb = f.g.dense().conjugate();
  const Dense vb = f.V_matrix().dense().conjugate();
  const Dense W = f.W_matrix().dense();
  auto at = [](int I, int al) { return 4 * I + al; };
  z(at(0, kDot1), at(0, kDot1)) = 2 * f.a;
  z(at(0, kDot2), at(0, kDot2)) = cplx(2 * f.a, k.g1 * f.B);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      z(at(0, 2 + a), at(0, 2 + b)) = (a == b ? cplx(f.w - f.a, 0.5 * k.g1 * f.B) : cplx(0)) - 0.5 * kI * k.g2 * W(a, b);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double d = i == j ? 1.0 : 0.0;
      z(at(1 + i, kDot1), at(1 + j, kDot1)) = (f.a * d + gb(i, j)) - kI * (2 * k.g1 * f.B / 3 * d + 0.5 * k.g3 * vb(i, j));
      z(at(1 + i, kDot2), at(1 + j, kDot2)) = (f.a * d + gb(i, j)) + kI * (k.g1 * f.B / 3 * d - 0.5 * k.g3 * vb(i, j));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double dab = a == b ? 1.0 : 0.0;
          z(at(1 + i, 2 + a), at(1 + j, 2 + b)) =
              dab * (f.w * d - gb(i, j)) - kI * (dab * (k.g1 * f.B / 6 * d + 0.5 * k.g3 * vb(i, j)) + 0.5 * k.g2 * W(a, b) * d);
        }
    }
  return ComplexMatrix(std::move(z));
}

/// Gauge matrices of the untwisted model on (I, alpha): lepton and quark blocks of i Y_mu.
inline ComplexMatrix standard_model_gauge_matrix(const GaugeFields& f, const Couplings& k) {
  Dense y = Dense::Zero(16, 16);
  const Dense vb = f.V_matrix().dense().conjugate();
  const Dense W = f.W_matrix().dense();
  auto at = [](int I, int al) { return 4 * I + al; };
  // leptons: diag(0, i g1 B, i (g1 B / 2 - g2 W / 2))
  y(at(0, kDot2), at(0, kDot2)) = kI * k.g1 * f.B;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      y(at(0, 2 + a), at(0, 2 + b)) = kI * ((a == b ? 0.5 * k.g1 * f.B : 0.0) - 0.5 * k.g2 * W(a, b));
  // quarks
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double d = i == j ? 1.0 : 0.0;
      y(at(1 + i, kDot1), at(1 + j, kDot1)) = -kI * (2 * k.g1 * f.B / 3 * d + 0.5 * k.g3 * vb(i, j));
      y(at(1 + i, kDot2), at(1 + j, kDot2)) = kI * (k.g1 * f.B / 3 * d - 0.5 * k.g3 * vb(i, j));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          y(at(1 + i, 2 + a), at(1 + j, 2 + b)) =
              -kI * ((a == b ? 1.0 : 0.0) * (k.g1 * f.B / 6 * d + 0.5 * k.g3 * vb(i, j)) + 0.5 * k.g2 * W(a, b) * d);
    }
  return ComplexMatrix(std::move(y));
}

inline ZDecomposition decompose_Z(const ComplexMatrix& z_mu, const GaugeFields& f, const Couplings& k) {
  if (z_mu.rows() != 64 || z_mu.cols() != 64) throw ShapeError("decompose_Z: expected 64x64 on (s, sd, I, alpha)");
  const Dense& z = z_mu.dense();
  const Dense zr = z.block(0, 0, 32, 32), zl = z.block(32, 32, 32, 32);
  ZDecomposition out;
  out.X = ComplexMatrix(Dense(0.5 * (zr - zl)));
  out.Y = ComplexMatrix(Dense((zr + zl) / (2.0 * kI)));
  // Z = gamma5 x X + 1 x iY with gamma5 = diag(1, -1) in s
  const auto rebuilt = kron(mat::eta(), out.X) + kron(ComplexMatrix::identity(2), kI * out.Y);
  out.structure_residual = rel_residual(z_mu, rebuilt);
  out.hermitian_residual = std::max(rel_residual(out.X, out.X.adjoint()), rel_residual(out.Y, out.Y.adjoint()));
  const auto tab = kron(ComplexMatrix::identity(2), z_table(f, k));
  out.table_residual = (zr - tab.dense()).cwiseAbs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Random selfadjoint forms.

inline std::vector<ElementPair> random_pairs(Rng& rng, int n, bool twist_invariant = false) {
  std::vector<ElementPair> p;
  for (int i = 0; i < n; ++i) {
    if (twist_invariant) {
      auto a = random_twist_invariant(rng);
      auto b = random_twist_invariant(rng);
      p.emplace_back(std::move(a), std::move(b));
    } else {
      auto a = random_element(rng);
      auto b = random_element(rng);
      p.emplace_back(std::move(a), std::move(b));
    }
  }
  return p;
}

/// Pair (1, b) adding i t_mu 1_3 to m_r and m_l, i.e. shifting V0_mu by t_mu.
inline ElementPair v0_shift_pair(const std::array<double, 4>& t) {
  auto b = zero_element();
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = (kI * t[mu]) * ComplexMatrix::identity(3);
  b.m = Jet(ComplexMatrix::zero(3, 3), d);
  b.mp = b.m;
  return {identity_element(), b};
}

/// Symmetrized random free form; when `unimodular`, a V0 shift enforces V0 = g1 B / 6.
inline TwistedOneForm random_selfadjoint_free_form(Rng& rng, const SpectralData& s, const Couplings& k,
                                                   int npairs = 1, bool unimodular = true,
                                                   bool twist_invariant_sources = false) {
  auto f = one_form(OneFormKind::free_dirac, symmetrize(random_pairs(rng, npairs, twist_invariant_sources)), s);
  if (!unimodular) return f;
  const auto fields = extract_gauge(f, k);
  std::array<double, 4> t{};
  for (int mu = 0; mu < 4; ++mu) t[mu] = k.g1 * fields.phys[mu].B / 6.0 - fields.phys[mu].V0;
  return extend_one_form(std::move(f), {v0_shift_pair(t)}, s);
}

inline TwistedOneForm random_selfadjoint_form(OneFormKind kind, Rng& rng, const SpectralData& s, int npairs = 1,
                                              bool twist_invariant_sources = false) {
  return one_form(kind, symmetrize(random_pairs(rng, npairs, twist_invariant_sources)), s);
}

// ---------------------------------------------------------------------------
// Aggregate field content.

struct FieldContent {
  std::optional<HiggsFields> higgs;
  std::optional<SigmaFields> sigma;
  double sigma_r = 0, sigma_l = 0;
  std::optional<FreeFields> gauge;
  std::array<ComplexMatrix, 4> X, Y;
  Couplings couplings;
};

// ---------------------------------------------------------------------------
// Check battery.

namespace detail {

inline ComplexMatrix unit_perturbation(Eigen::Index r, Eigen::Index c, Rng& rng, double size) {
  const auto e = gaussian_matrix(r, c, rng);
  return (size / e.norm()) * e;
}

inline ComplexMatrix unit_quaternion_field(Rng& rng) {
  const auto q = random_quaternion(rng);
  return (1.0 / q.norm()) * q;
}

inline GaugeFields random_gauge_fields(Rng& rng, double scale = 0.5) {
  GaugeFields f;
  f.a = scale * gauss(rng);
  f.w = scale * gauss(rng);
  f.B = scale * gauss(rng);
  f.V0 = scale * gauss(rng);
  for (auto& x : f.W) x = scale * gauss(rng);
  for (auto& x : f.V) x = scale * gauss(rng);
  f.g = scale * random_hermitian(3, rng);
  return f;
}

inline double free_fields_max(const GaugeFields& f) {
  return std::max({std::abs(f.a), std::abs(f.w), f.g.dense().cwiseAbs().maxCoeff()});
}

}  // namespace detail

inline std::vector<CheckResult> check_fluctuations(const SpectralData& s, const Couplings& k, int trials,
                                                   std::uint64_t seed, double tol = kDefaultTol,
                                                   double perturbation = 1e-3, double floor = 1e-4) {
  Rng rng(seed);
  using CA = CheckAccumulator;
  constexpr auto I = CheckKind::identity;
  constexpr auto V = CheckKind::violation;
  CA y_rebuild("fluct.yukawa.rebuild", "A_Y rebuilt from H1, H2, H1', H2' on every lepto-colour block", I, tol);
  CA y_analytic("fluct.yukawa.analytic", "H1 = c(p' - d'), H2 = q'(d - p), H1' = c'(p - d), H2' = q(d' - p')", I, tol);
  CA y_sa("fluct.yukawa.selfadjoint_fields", "selfadjoint A_Y: H2 = H1^dag, H2' = H1'^dag, quaternion valued", I, tol);
  CA y_block("fluct.yukawa.covariant_block", "J A_Y J^{-1} = diag(0, conj A)", I, tol);
  CA y_iff("fluct.yukawa.selfadjoint_if", "H2 = H1^dag and H2' = H1'^dag give A_Y^dag = A_Y", I, tol);
  CA y_only("fluct.yukawa.selfadjoint_only_if", "perturbed H2 breaks A_Y^dag = A_Y", V, floor);
  CA m_rebuild("fluct.majorana.rebuild", "A_M rebuilt from sigma, sigma' on the Xi pattern", I, tol);
  CA m_analytic("fluct.majorana.analytic", "sigma = c(d - d'), sigma' = c'(d' - d)", I, tol);
  CA m_block("fluct.majorana.covariant_block", "D_{A_M} = k_R Xi x (eta_s + diag(sigma_r, sigma_l)) + h.c.", I, tol);
  CA m_real("fluct.majorana.sigma_real", "sigma_r, sigma_l real; sigma, sigma' real for selfadjoint A_M", I, tol);
  CA m_cov("fluct.majorana.covariant_selfadjoint", "D_{A_M} selfadjoint for non-selfadjoint A_M", I, tol);
  CA m_iff("fluct.majorana.selfadjoint_if", "real sigma, sigma' give A_M^dag = A_M", I, tol);
  CA m_only("fluct.majorana.selfadjoint_only_if", "imaginary part in sigma breaks A_M^dag = A_M", V, floor);
  CA f_rebuild("fluct.free.rebuild", "A_mu rebuilt from c, q, m components", I, tol);
  CA f_analytic("fluct.free.analytic", "c_r = c' d d, c_l = c d d', q_r = q d p', q_l = q' d p, m_r = m' d n, m_l = m d n'", I, tol);
  CA f_sa("fluct.free.selfadjoint_components", "selfadjoint form: c_l = -conj c_r, q_l = -q_r^dag, m_l = -m_r^dag", I, tol);
  CA f_iff("fluct.free.selfadjoint_if", "component relations give rho(A_mu) = -A_mu^dag", I, tol);
  CA f_only("fluct.free.selfadjoint_only_if", "perturbed c_l breaks rho(A_mu) = -A_mu^dag", V, floor);
  CA f_block("fluct.free.covariant_block", "A + J A J^{-1} = -i gamma^mu diag(Z_mu, conj Z_mu)", I, tol);
  CA u_trace("fluct.unimodular.trace_identity", "Tr A_mu = 4(-i g1 B + 6 i V0)", I, tol);
  CA u_zero("fluct.unimodular.enforced", "V0 = g1 B / 6 gives Tr A_mu = 0", I, tol);
  CA u_pert("fluct.unimodular.perturbed", "V0 = g1 B / 6 + 1e-3 gives Tr A_mu != 0", V, floor);
  CA z_tab("fluct.z.table", "component table of Z_mu, entrywise", I, tol);
  CA z_herm("fluct.z.hermitian", "X_mu and Y_mu selfadjoint", I, tol);
  CA z_str("fluct.z.structure", "Z_mu = gamma5 x X_mu + 1 x i Y_mu", I, tol);
  CA r_inv("fluct.reduction.twist_invariant", "primed = unprimed inputs give a = w = g = 0", I, 1e-12);
  CA r_sm("fluct.reduction.standard_model", "i Y_mu equals the untwisted gauge matrices; X_mu = 0 when a = w = g = 0", I, tol);

  auto cq = [](cplx z) { return ComplexMatrix::diag({z, std::conj(z)}); };
  for (int t = 0; t < trials; ++t) {
    // single generic pair, analytic formulas
    const auto a = random_element(rng);
    const auto b = random_element(rng);
    {
      const auto A = one_form(OneFormKind::yukawa, {{a, b}}, s);
      const auto h = extract_higgs(A, s.params);
      y_rebuild.add(h.residual);
      y_analytic.add(std::max({rel_residual(h.H1, cq(a.c.s()) * (b.qp.value - cq(b.cp.s()))),
                               rel_residual(h.H2, a.qp.value * (cq(b.c.s()) - b.q.value)),
                               rel_residual(h.H1p, cq(a.cp.s()) * (b.q.value - cq(b.c.s()))),
                               rel_residual(h.H2p, a.q.value * (cq(b.cp.s()) - b.qp.value))}));
    }
    {
      const auto A = one_form(OneFormKind::majorana, {{a, b}}, s);
      const auto g = extract_sigma(A, s.params);
      m_rebuild.add(g.residual);
      const cplx e1 = a.c.s() * (b.c.s() - b.cp.s()), e2 = a.cp.s() * (b.cp.s() - b.c.s());
      m_analytic.add(std::max(std::abs(g.sigma - e1) / std::max(1.0, std::abs(e1)),
                              std::abs(g.sigma_p - e2) / std::max(1.0, std::abs(e2))));
      const auto D = covariant_dirac(A, s);
      m_block.add(D.block_residual);
      m_real.add(D.sigma_imag);
      m_cov.add(rel_residual(D.op.value, D.op.value.adjoint()));
    }
    {
      const auto A = one_form(OneFormKind::free_dirac, {{a, b}}, s);
      const auto f = extract_gauge(A, k);
      f_rebuild.add(f.residual);
      double r = 0;
      for (int mu = 0; mu < 4; ++mu) {
        const auto& c = f.comp[mu];
        const cplx cr = a.cp.s() * b.c.ds(mu), cl = a.c.s() * b.cp.ds(mu);
        r = std::max({r, std::abs(c.c_r - cr) / std::max(1.0, std::abs(cr)), std::abs(c.c_l - cl) / std::max(1.0, std::abs(cl)),
                      rel_residual(c.q_r, a.q.value * b.qp.d[mu]), rel_residual(c.q_l, a.qp.value * b.q.d[mu]),
                      rel_residual(c.m_r, a.mp.value * b.m.d[mu]), rel_residual(c.m_l, a.m.value * b.mp.d[mu])});
      }
      f_analytic.add(r);
    }

    // selfadjoint forms from symmetrized pairs
    {
      const auto A = random_selfadjoint_form(OneFormKind::yukawa, rng, s, 1);
      const auto h = extract_higgs(A, s.params);
      y_rebuild.add(h.residual);
      y_sa.add(std::max({h.selfadjoint_residual(), quaternion_residual(h.H_r()), quaternion_residual(h.H_l())}));
      y_block.add(covariant_dirac(A, s).block_residual);
    }
    {
      const auto A = random_selfadjoint_form(OneFormKind::majorana, rng, s, 1);
      const auto g = extract_sigma(A, s.params);
      m_rebuild.add(g.residual);
      const auto D = covariant_dirac(A, s);
      m_block.add(D.block_residual);
      m_real.add(std::max({D.sigma_imag, std::abs(g.sigma.imag()), std::abs(g.sigma_p.imag())}));
    }
    {
      const auto A = random_selfadjoint_free_form(rng, s, k, 1, false);
      const auto f = extract_gauge(A, k);
      f_rebuild.add(f.residual);
      double r = free_selfadjoint_residual(A.A_mu);
      for (const auto& c : f.comp) r = std::max(r, component_selfadjoint_residual(c));
      f_sa.add(r);
      f_block.add(covariant_dirac(A, s).block_residual);
      double tr = 0;
      for (const auto& e : unimodularity_defect(A, f, k))
        tr = std::max(tr, std::abs(e.trace - e.predicted) / std::max({1.0, std::abs(e.trace), std::abs(e.predicted)}));
      u_trace.add(tr);
    }
    {
      // unimodular selfadjoint form: defect, Z table, perturbation
      const auto A = random_selfadjoint_free_form(rng, s, k, 1, true);
      const auto f = extract_gauge(A, k);
      auto defect = [&](const TwistedOneForm& F, const FreeFields& ff) {
        double d = 0;
        int mu = 0;
        for (const auto& e : unimodularity_defect(F, ff, k)) {
          const auto& p = ff.phys[mu++];
          d = std::max(d, e.defect / std::max(1.0, 4.0 * (k.g1 * std::abs(p.B) + 6.0 * std::abs(p.V0))));
        }
        return d;
      };
      u_zero.add(defect(A, f));
      const auto Ap = extend_one_form(A, {v0_shift_pair({perturbation, perturbation, perturbation, perturbation})}, s);
      u_pert.add(defect(Ap, extract_gauge(Ap, k)));
      const auto D = covariant_dirac(A, s);
      double tab = 0, herm = 0, str = 0, sm = 0;
      for (int mu = 0; mu < 4; ++mu) {
        const auto z = decompose_Z(D.Z_mu[mu], f.phys[mu], k);
        tab = std::max(tab, z.table_residual);
        herm = std::max(herm, z.hermitian_residual);
        str = std::max(str, z.structure_residual);
        const auto smm = kron(ComplexMatrix::identity(2), standard_model_gauge_matrix(f.phys[mu], k));
        sm = std::max(sm, rel_residual(kI * z.Y, smm));
      }
      z_tab.add(tab);
      z_herm.add(herm);
      z_str.add(str);
      r_sm.add(sm);
    }
    {
      // primed = unprimed sources: the untwisted reduction
      const auto A = random_selfadjoint_free_form(rng, s, k, 1, true, true);
      const auto f = extract_gauge(A, k);
      double r = 0;
      for (const auto& p : f.phys) r = std::max(r, detail::free_fields_max(p));
      r_inv.add(r);
      const auto D = covariant_dirac(A, s);
      double x = 0;
      for (int mu = 0; mu < 4; ++mu) x = std::max(x, decompose_Z(D.Z_mu[mu], f.phys[mu], k).X.norm());
      r_sm.add(x);
    }

    // biconditionals on field-level inputs
    {
      const auto H1 = detail::unit_quaternion_field(rng), H1p = detail::unit_quaternion_field(rng);
      const auto A = rebuild_yukawa(H1, H1.adjoint(), H1p, H1p.adjoint(), s.params);
      y_iff.add(rel_residual(A, A.adjoint()));
      const auto Ab = rebuild_yukawa(H1, H1.adjoint() + detail::unit_perturbation(2, 2, rng, perturbation), H1p,
                                     H1p.adjoint(), s.params);
      y_only.add(rel_residual(Ab, Ab.adjoint()));
    }
    {
      const double sg = gauss(rng), sp = gauss(rng);
      const auto A = rebuild_majorana(sg, sp, s.params);
      m_iff.add(rel_residual(A, A.adjoint()));
      const auto Ab = rebuild_majorana(cplx(sg, perturbation), sp, s.params);
      m_only.add(rel_residual(Ab, Ab.adjoint()));
    }
    {
      std::array<ComplexMatrix, 4> am, ab;
      for (int mu = 0; mu < 4; ++mu) {
        auto c = components_from_fields(detail::random_gauge_fields(rng), k);
        am[mu] = rebuild_free_mu(c);
        c.c_l += perturbation * std::exp(kI * 2.0 * M_PI * std::uniform_real_distribution<double>(0, 1)(rng));
        ab[mu] = rebuild_free_mu(c);
      }
      f_iff.add(free_selfadjoint_residual(am));
      f_only.add(free_selfadjoint_residual(ab));
    }
  }
  return {y_rebuild.finish(), y_analytic.finish(), y_sa.finish(), y_block.finish(), y_iff.finish(), y_only.finish(),
          m_rebuild.finish(), m_analytic.finish(), m_block.finish(), m_real.finish(), m_cov.finish(), m_iff.finish(),
          m_only.finish(), f_rebuild.finish(), f_analytic.finish(), f_sa.finish(), f_iff.finish(), f_only.finish(),
          f_block.finish(), u_trace.finish(), u_zero.finish(), u_pert.finish(), z_tab.finish(), z_herm.finish(),
          z_str.finish(), r_inv.finish(), r_sm.finish()};
}

}  // namespace twsm
