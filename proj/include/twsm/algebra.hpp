#pragma once

#include "jet.hpp"

namespace twsm {

/// (c, c', q, q', m, m') with c scalar, q quaternion, m 3x3; every slot a jet.
struct AlgebraElement {
  Jet c, cp, q, qp, m, mp;

  void validate(double tol = 1e-10) const {
    auto shape = [](const Jet& j, Eigen::Index n, const char* name) {
      if (j.rows() != n || j.cols() != n)
        throw ShapeError(std::string("AlgebraElement: slot ") + name + " has wrong shape");
    };
    shape(c, 1, "c");
    shape(cp, 1, "c'");
    shape(q, 2, "q");
    shape(qp, 2, "q'");
    shape(m, 3, "m");
    shape(mp, 3, "m'");
    if (quaternion_residual(q) > tol || quaternion_residual(qp) > tol)
      throw StructureError("AlgebraElement: quaternion slot leaves the quaternion span");
  }

  bool twist_invariant(double tol = 1e-12) const {
    return jet_residual(c, cp) <= tol && jet_residual(q, qp) <= tol && jet_residual(m, mp) <= tol;
  }
};

inline AlgebraElement identity_element() {
  return {Jet::scalar(1), Jet::scalar(1), Jet::identity(2), Jet::identity(2), Jet::identity(3),
          Jet::identity(3)};
}

inline AlgebraElement zero_element() {
  return {Jet::zero(1, 1), Jet::zero(1, 1), Jet::zero(2, 2), Jet::zero(2, 2), Jet::zero(3, 3),
          Jet::zero(3, 3)};
}

/// Slotwise product.
inline AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  return {jet_mul(a.c, b.c),   jet_mul(a.cp, b.cp), jet_mul(a.q, b.q),
          jet_mul(a.qp, b.qp), jet_mul(a.m, b.m),   jet_mul(a.mp, b.mp)};
}

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  return {jet_add(a.c, b.c),   jet_add(a.cp, b.cp), jet_add(a.q, b.q),
          jet_add(a.qp, b.qp), jet_add(a.m, b.m),   jet_add(a.mp, b.mp)};
}

inline AlgebraElement scale(double s, const AlgebraElement& a) {
  return {jet_scale(s, a.c),  jet_scale(s, a.cp), jet_scale(s, a.q),
          jet_scale(s, a.qp), jet_scale(s, a.m),  jet_scale(s, a.mp)};
}

/// Slotwise adjoint.
inline AlgebraElement star(const AlgebraElement& a) {
  return {jet_dagger(a.c),  jet_dagger(a.cp), jet_dagger(a.q),
          jet_dagger(a.qp), jet_dagger(a.m),  jet_dagger(a.mp)};
}

/// The twist: exchange of primed and unprimed slots.
inline AlgebraElement twist_rho(const AlgebraElement& a) { return {a.cp, a.c, a.qp, a.q, a.mp, a.m}; }

inline AlgebraElement random_element(Rng& rng) {
  AlgebraElement a;
  a.c = random_jet(1, 1, rng);
  a.cp = random_jet(1, 1, rng);
  a.q = random_quaternion_jet(rng);
  a.qp = random_quaternion_jet(rng);
  a.m = random_jet(3, 3, rng);
  a.mp = random_jet(3, 3, rng);
  return a;
}

inline AlgebraElement random_element(std::uint64_t seed) {
  Rng rng(seed);
  return random_element(rng);
}

inline AlgebraElement random_twist_invariant(Rng& rng) {
  AlgebraElement a;
  a.c = random_jet(1, 1, rng);
  a.q = random_quaternion_jet(rng);
  a.m = random_jet(3, 3, rng);
  a.cp = a.c;
  a.qp = a.q;
  a.mp = a.m;
  return a;
}

inline AlgebraElement random_twist_invariant(std::uint64_t seed) {
  Rng rng(seed);
  return random_twist_invariant(rng);
}

// ---------------------------------------------------------------------------
// Representation on the 128-dimensional space.

enum class MLayout {
  twisted,  ///< m on dotted / m' on undotted for s = r, swapped for s = l
  naive     ///< m on every alpha for s = r, m' on every alpha for s = l
};

namespace detail {

/// slot = -1 for the value, mu for d_mu
inline const ComplexMatrix& slot(const Jet& j, int k) { return k < 0 ? j.value : j.d[k]; }

inline ComplexMatrix represent_slot(const AlgebraElement& a, int k, MLayout layout) {
  const cplx c = slot(a.c, k)(0, 0);
  const cplx cp = slot(a.cp, k)(0, 0);
  const Dense& q = slot(a.q, k).dense();
  const Dense& qp = slot(a.qp, k).dense();
  const Dense& m = slot(a.m, k).dense();
  const Dense& mp = slot(a.mp, k).dense();

  // Q_r = diag(c, conj c, q'), Q_l = diag(c', conj c', q)
  using B4 = Eigen::Matrix4cd;
  auto qblock = [](cplx z, const Dense& quat) {
    B4 b = B4::Zero();
    b(kDot1, kDot1) = z;
    b(kDot2, kDot2) = std::conj(z);
    b.block<2, 2>(2, 2) = quat;
    return b;
  };
  // diag(c, m) on the lepto-colour index
  auto mblock = [](cplx z, const Dense& mm) {
    B4 b = B4::Zero();
    b(0, 0) = z;
    b.block<3, 3>(1, 1) = mm;
    return b;
  };
  const B4 Q[2] = {qblock(c, qp), qblock(cp, q)};
  const B4 Mu = mblock(c, m), Mp = mblock(cp, mp);

  Dense out = Dense::Zero(BasisLayout::dim, BasisLayout::dim);
  for (int s = 0; s < 2; ++s)
    for (int sd = 0; sd < 2; ++sd) {
      for (int i = 0; i < 4; ++i) {
        const int base = BasisLayout::flat(0, s, sd, i, 0);
        out.block<4, 4>(base, base) = Q[s];
      }
      for (int al = 0; al < 4; ++al) {
        const bool dotted = al < 2;
        const B4* mm = nullptr;
        if (layout == MLayout::twisted)
          mm = ((s == kRight) == dotted) ? &Mu : &Mp;
        else
          mm = (s == kRight) ? &Mu : &Mp;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            out(BasisLayout::flat(1, s, sd, i, al), BasisLayout::flat(1, s, sd, j, al)) = (*mm)(i, j);
      }
    }
  // entries are copied from finite slots
  return ComplexMatrix(std::move(out), ComplexMatrix::Unchecked{});
}

}  // namespace detail

/// pi(a) as a 128x128 jet.
struct RepresentedElement {
  Jet op;

  /// zero C-off-diagonal blocks, Q trivial in (sd, I), M trivial in sd
  double structure_residual() const {
    double r = 0;
    auto one = [&](const ComplexMatrix& x) {
      const auto q = c_block_mask(x, 0, 0);
      const auto m = c_block_mask(x, 1, 1);
      r = std::max(r, rel_residual(x, q + m));
      r = std::max(r, rel_residual(q, trivialize(q, {Factor::sd, Factor::I})));
      r = std::max(r, rel_residual(m, trivialize(m, {Factor::sd})));
    };
    one(op.value);
    for (const auto& x : op.d) one(x);
    return r;
  }
};

inline ComplexMatrix represent_value(const AlgebraElement& a, MLayout layout = MLayout::twisted) {
  return detail::represent_slot(a, -1, layout);
}

inline RepresentedElement represent(const AlgebraElement& a, MLayout layout = MLayout::twisted) {
  a.validate();
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = detail::represent_slot(a, mu, layout);
  return {Jet(detail::represent_slot(a, -1, layout), std::move(d))};
}

/// J X J^{-1} for a linear operator X. Monomial K (one nonzero per row) is
/// handled as a phased permutation.
inline ComplexMatrix j_conjugate(const ComplexMatrix& x, const ComplexMatrix& K) {
  const auto n = K.rows();
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n), -1);
  std::vector<cplx> k(static_cast<std::size_t>(n));
  bool monomial = x.rows() == n && x.cols() == n;
  for (Eigen::Index i = 0; i < n && monomial; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (K(i, j) != cplx(0)) {
        if (p[i] >= 0 || std::abs(std::abs(K(i, j)) - 1.0) > 1e-15) {
          monomial = false;
          break;
        }
        p[i] = j;
        k[i] = K(i, j);
      }
  if (!monomial) return K * x.conjugate() * K.adjoint();
  Dense out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = k[i] * std::conj(x(p[i], p[j])) * std::conj(k[j]);
  return ComplexMatrix(std::move(out));
}

inline Jet j_conjugate(const Jet& x, const ComplexMatrix& K) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = j_conjugate(x.d[mu], K);
  return Jet(j_conjugate(x.value, K), std::move(d));
}

/// b -> K conj(pi(b^*)) K^{-1}, the right action through the real structure J = K o cc.
inline Jet opposite(const AlgebraElement& a, const ComplexMatrix& K, MLayout layout = MLayout::twisted) {
  return j_conjugate(represent(star(a), layout).op, K);
}

inline ComplexMatrix opposite_value(const AlgebraElement& a, const ComplexMatrix& K,
                                    MLayout layout = MLayout::twisted) {
  return j_conjugate(represent_value(star(a), layout), K);
}

/// diag_C(A, B) from two 64x64 blocks.
inline ComplexMatrix c_diag(const Dense& upper, const Dense& lower) {
  const int h = BasisLayout::dim / 2;
  Dense out = Dense::Zero(BasisLayout::dim, BasisLayout::dim);
  out.block(0, 0, h, h) = upper;
  out.block(h, h, h, h) = lower;
  return ComplexMatrix(std::move(out));
}

/// Observed sign s in J pi(a) J^{-1} = s diag_C(conj M, conj Q); 0 if neither sign fits.
inline int prop_opposite_sign(const AlgebraElement& a, const ComplexMatrix& K, double tol = 1e-10,
                              double* residual = nullptr) {
  const auto pa = represent_value(a);
  const auto ja = j_conjugate(pa, K);
  const int h = BasisLayout::dim / 2;
  const Dense qbar = pa.dense().block(0, 0, h, h).conjugate();
  const Dense mbar = pa.dense().block(h, h, h, h).conjugate();
  const auto plus = c_diag(mbar, qbar);
  const double rp = rel_residual(ja, plus);
  const double rm = rel_residual(ja, -plus);
  if (residual) *residual = std::min(rp, rm);
  if (rp <= tol) return +1;
  if (rm <= tol) return -1;
  return 0;
}

}  // namespace twsm
