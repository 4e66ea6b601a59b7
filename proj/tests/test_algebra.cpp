#include "catch_amalgamated.hpp"

#include "twsm/geometry.hpp"

using namespace twsm;

namespace {

const ComplexMatrix& K() {
  static const ComplexMatrix k = build_real_structure();
  return k;
}

}  // namespace

TEST_CASE("pi(1) is the identity and pi(0) vanishes") {
  const auto p = represent(identity_element());
  CHECK(rel_residual(p.op.value, ComplexMatrix::identity(128)) == 0.0);
  for (const auto& d : p.op.d) CHECK(d.norm() == 0.0);
  CHECK(represent_value(zero_element()).norm() == 0.0);
}

TEST_CASE("pi is a *-homomorphism on values and derivatives") {
  Rng rng(21);
  for (int t = 0; t < 15; ++t) {
    const auto a = random_element(rng), b = random_element(rng);
    CHECK(jet_residual(represent(a * b).op, jet_mul(represent(a).op, represent(b).op)) <= 1e-12);
    CHECK(jet_residual(represent(star(a)).op, jet_dagger(represent(a).op)) <= 1e-12);
    CHECK(jet_residual(represent(a + b).op, jet_add(represent(a).op, represent(b).op)) <= 1e-12);
  }
}

TEST_CASE("the twist exchanges the chiral blocks: pi(rho(a)) = swap_s(pi(a))") {
  Rng rng(22);
  for (int t = 0; t < 15; ++t) {
    const auto a = random_element(rng);
    CHECK(rel_residual(represent_value(twist_rho(a)), swap_s(represent_value(a))) <= 1e-14);
  }
}

TEST_CASE("pi(a) has the expected block structure") {
  Rng rng(23);
  for (int t = 0; t < 10; ++t) CHECK(represent(random_element(rng)).structure_residual() <= 1e-14);
}

TEST_CASE("Q block holds diag(c, conj c, q') on s = r and diag(c', conj c', q) on s = l") {
  Rng rng(24);
  const auto a = random_element(rng);
  const auto p = represent_value(a);
  using L = BasisLayout;
  const cplx c = a.c.s(), cp = a.cp.s();
  CHECK(std::abs(p(L::flat(0, kRight, 0, 0, kDot1), L::flat(0, kRight, 0, 0, kDot1)) - c) == 0.0);
  CHECK(std::abs(p(L::flat(0, kRight, 1, 2, kDot2), L::flat(0, kRight, 1, 2, kDot2)) - std::conj(c)) == 0.0);
  CHECK(std::abs(p(L::flat(0, kLeft, 0, 3, kDot1), L::flat(0, kLeft, 0, 3, kDot1)) - cp) == 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(p(L::flat(0, kRight, 0, 1, 2 + i), L::flat(0, kRight, 0, 1, 2 + j)) == a.qp.value(i, j));
      CHECK(p(L::flat(0, kLeft, 1, 0, 2 + i), L::flat(0, kLeft, 1, 0, 2 + j)) == a.q.value(i, j));
    }
}

TEST_CASE("twisted M layout: m on dotted for s = r, m' on dotted for s = l") {
  Rng rng(25);
  const auto a = random_element(rng);
  const auto p = represent_value(a);
  using L = BasisLayout;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(p(L::flat(1, kRight, 0, 1 + i, kDot1), L::flat(1, kRight, 0, 1 + j, kDot1)) == a.m.value(i, j));
      CHECK(p(L::flat(1, kRight, 0, 1 + i, kUndot2), L::flat(1, kRight, 0, 1 + j, kUndot2)) == a.mp.value(i, j));
      CHECK(p(L::flat(1, kLeft, 1, 1 + i, kDot2), L::flat(1, kLeft, 1, 1 + j, kDot2)) == a.mp.value(i, j));
      CHECK(p(L::flat(1, kLeft, 1, 1 + i, kUndot1), L::flat(1, kLeft, 1, 1 + j, kUndot1)) == a.m.value(i, j));
    }
  // lepton row of M carries c on dotted
  CHECK(p(L::flat(1, kRight, 0, 0, kDot1), L::flat(1, kRight, 0, 0, kDot1)) == a.c.s());
}

TEST_CASE("naive and twisted layouts agree exactly for twist-invariant elements") {
  Rng rng(26);
  for (int t = 0; t < 5; ++t) {
    const auto a = random_twist_invariant(rng);
    CHECK(rel_residual(represent_value(a, MLayout::naive), represent_value(a)) == 0.0);
    const auto b = random_element(rng);
    CHECK(rel_residual(represent_value(b, MLayout::naive), represent_value(b)) > 1e-3);
  }
}

TEST_CASE("validate rejects a non-quaternion slot and wrong shapes") {
  auto a = identity_element();
  a.q = Jet::constant(ComplexMatrix::diag({1, 2}));
  CHECK_THROWS_AS(a.validate(), StructureError);
  CHECK_THROWS_AS(represent(a), StructureError);
  auto b = identity_element();
  b.m = Jet::identity(2);
  CHECK_THROWS_AS(b.validate(), ShapeError);
}

TEST_CASE("opposite action commutes with the left action and reverses products") {
  Rng rng(27);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_element(rng), b = random_element(rng);
    const auto pa = represent_value(a);
    const auto bo = opposite_value(b, K());
    CHECK(rel_residual(pa * bo, bo * pa) <= 1e-12);
    // (ab)° = b° a°
    CHECK(rel_residual(opposite_value(a * b, K()), opposite_value(b, K()) * opposite_value(a, K())) <= 1e-12);
  }
  CHECK(rel_residual(opposite_value(identity_element(), K()), ComplexMatrix::identity(128)) <= 1e-15);
}

TEST_CASE("monomial J conjugation matches the dense formula") {
  Rng rng(28);
  const auto x = gaussian_matrix(128, 128, rng);
  CHECK(rel_residual(j_conjugate(x, K()), K() * x.conjugate() * K().adjoint()) <= 1e-13);
}

TEST_CASE("J pi(a) J^{-1} block form has one sign for every a") {
  Rng rng(29);
  int first = 0;
  for (int t = 0; t < 10; ++t) {
    double r = 1;
    const int sg = prop_opposite_sign(random_element(rng), K(), 1e-10, &r);
    CHECK(r <= 1e-12);
    CHECK(sg != 0);
    if (t == 0) first = sg;
    CHECK(sg == first);
  }
}

TEST_CASE("slotwise algebra operations") {
  Rng rng(30);
  const auto a = random_element(rng);
  CHECK(jet_residual((a * identity_element()).m, a.m) == 0.0);
  CHECK(jet_residual(twist_rho(twist_rho(a)).q, a.q) == 0.0);
  CHECK(jet_residual(star(star(a)).mp, a.mp) == 0.0);
  CHECK(random_twist_invariant(rng).twist_invariant());
  CHECK_FALSE(a.twist_invariant());
}
