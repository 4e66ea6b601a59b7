#pragma once

#include "linalg.hpp"

namespace twsm {

/// First-order jet of a matrix field at a point: value and the four d_mu.
struct Jet {
  ComplexMatrix value;
  std::array<ComplexMatrix, 4> d;

  Jet() = default;

  Jet(ComplexMatrix v, std::array<ComplexMatrix, 4> dv) : value(std::move(v)), d(std::move(dv)) {
    for (const auto& x : d)
      if (x.rows() != value.rows() || x.cols() != value.cols())
        throw ShapeError("Jet: derivative shape differs from value shape");
  }

  static Jet constant(const ComplexMatrix& v) {
    const auto z = ComplexMatrix::zero(v.rows(), v.cols());
    return Jet(v, {z, z, z, z});
  }

  static Jet scalar(cplx v, const std::array<cplx, 4>& dv = {}) {
    return Jet(ComplexMatrix::scalar(v),
               {ComplexMatrix::scalar(dv[0]), ComplexMatrix::scalar(dv[1]),
                ComplexMatrix::scalar(dv[2]), ComplexMatrix::scalar(dv[3])});
  }

  static Jet zero(Eigen::Index r, Eigen::Index c) { return constant(ComplexMatrix::zero(r, c)); }
  static Jet identity(Eigen::Index n) { return constant(ComplexMatrix::identity(n)); }

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }

  /// Entry (0,0) convenience for scalar jets.
  cplx s() const { return value(0, 0); }
  cplx ds(int mu) const { return d[mu](0, 0); }
};

inline Jet jet_mul(const Jet& a, const Jet& b) {
  if (a.cols() != b.rows()) throw ShapeError("jet_mul: incompatible shapes");
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = a.d[mu] * b.value + a.value * b.d[mu];
  return Jet(a.value * b.value, std::move(d));
}

inline Jet jet_add(const Jet& a, const Jet& b) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = a.d[mu] + b.d[mu];
  return Jet(a.value + b.value, std::move(d));
}

inline Jet jet_sub(const Jet& a, const Jet& b) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = a.d[mu] - b.d[mu];
  return Jet(a.value - b.value, std::move(d));
}

inline Jet jet_scale(cplx s, const Jet& a) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = s * a.d[mu];
  return Jet(s * a.value, std::move(d));
}

inline Jet jet_dagger(const Jet& a) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = a.d[mu].adjoint();
  return Jet(a.value.adjoint(), std::move(d));
}

inline Jet jet_conj(const Jet& a) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = a.d[mu].conjugate();
  return Jet(a.value.conjugate(), std::move(d));
}

/// Applies a slotwise linear map X -> L X R to value and derivatives.
inline Jet jet_sandwich(const ComplexMatrix& l, const Jet& a, const ComplexMatrix& r) {
  std::array<ComplexMatrix, 4> d;
  for (int mu = 0; mu < 4; ++mu) d[mu] = l * a.d[mu] * r;
  return Jet(l * a.value * r, std::move(d));
}

/// Largest rel_residual over the value and derivative slots.
inline double jet_residual(const Jet& a, const Jet& b) {
  double r = rel_residual(a.value, b.value);
  for (int mu = 0; mu < 4; ++mu) r = std::max(r, rel_residual(a.d[mu], b.d[mu]));
  return r;
}

inline Jet random_jet(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  auto v = gaussian_matrix(rows, cols, rng);
  std::array<ComplexMatrix, 4> d;
  for (auto& x : d) x = gaussian_matrix(rows, cols, rng);
  return Jet(std::move(v), std::move(d));
}

inline Jet random_jet(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return random_jet(rows, cols, rng);
}

// ---------------------------------------------------------------------------

/// Jet with unitary value and derivatives tangent to the unitary group.
class UnitaryJet {
 public:
  UnitaryJet() = default;

  /// value u and derivatives i h_mu u, h_mu Hermitian
  static UnitaryJet from_tangents(const ComplexMatrix& u, const std::array<ComplexMatrix, 4>& h) {
    std::array<ComplexMatrix, 4> d;
    for (int mu = 0; mu < 4; ++mu) d[mu] = kI * h[mu] * u;
    return UnitaryJet(Jet(u, std::move(d)));
  }

  /// Wraps an arbitrary jet, validating both unitarity conditions.
  static UnitaryJet checked(Jet j, double tol = 1e-10) {
    UnitaryJet u(std::move(j));
    if (u.unitarity_residual() > tol) throw StructureError("UnitaryJet: not unitary within tolerance");
    return u;
  }

  const Jet& jet() const { return j_; }
  const ComplexMatrix& value() const { return j_.value; }
  Eigen::Index n() const { return j_.rows(); }

  /// max of u u^dag = 1 and u du^dag + du u^dag = 0 residuals
  double unitarity_residual() const {
    const auto& u = j_.value;
    const auto id = ComplexMatrix::identity(u.rows());
    double r = rel_residual(u * u.adjoint(), id);
    const auto z = ComplexMatrix::zero(u.rows(), u.cols());
    for (int mu = 0; mu < 4; ++mu)
      r = std::max(r, rel_residual(u * j_.d[mu].adjoint() + j_.d[mu] * u.adjoint(), z));
    return r;
  }

 private:
  explicit UnitaryJet(Jet j) : j_(std::move(j)) {}
  Jet j_;
};

inline UnitaryJet random_unitary_jet(Eigen::Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("random_unitary_jet: n must be >= 1");
  auto u = haar_unitary(n, rng);
  std::array<ComplexMatrix, 4> h;
  for (auto& x : h) x = random_hermitian(n, rng);
  return UnitaryJet::from_tangents(u, h);
}

inline UnitaryJet random_unitary_jet(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary_jet(n, rng);
}

// ---------------------------------------------------------------------------
// Quaternions as 2x2 complex matrices in the real span of {1, i sigma_k}.

inline ComplexMatrix quaternion(double x0, double x1, double x2, double x3) {
  return ComplexMatrix::from_rows(2, 2, {cplx(x0, x3), cplx(x2, x1), cplx(-x2, x1), cplx(x0, -x3)});
}

/// Distance to the quaternion span: a quaternion has the form [[z, w], [-conj w, conj z]].
inline double quaternion_residual(const ComplexMatrix& q) {
  if (q.rows() != 2 || q.cols() != 2) throw ShapeError("quaternion_residual: expected 2x2");
  const cplx z = 0.5 * (q(0, 0) + std::conj(q(1, 1)));
  const cplx w = 0.5 * (q(0, 1) - std::conj(q(1, 0)));
  const auto p = ComplexMatrix::from_rows(2, 2, {z, w, -std::conj(w), std::conj(z)});
  return rel_residual(q, p);
}

inline double quaternion_residual(const Jet& q) {
  double r = quaternion_residual(q.value);
  for (const auto& x : q.d) r = std::max(r, quaternion_residual(x));
  return r;
}

inline ComplexMatrix random_quaternion(Rng& rng) {
  const double a = gauss(rng), b = gauss(rng), c = gauss(rng), e = gauss(rng);
  return quaternion(a, b, c, e);
}

inline Jet random_quaternion_jet(Rng& rng) {
  auto v = random_quaternion(rng);
  std::array<ComplexMatrix, 4> d;
  for (auto& x : d) x = random_quaternion(rng);
  return Jet(std::move(v), std::move(d));
}

}  // namespace twsm
