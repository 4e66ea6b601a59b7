#include "catch_amalgamated.hpp"

#include "twsm/gauge.hpp"

using namespace twsm;

namespace {

const SpectralData& flat() {
  static const SpectralData s = build_spectral_data();
  return s;
}

const Couplings kK{0.5, 0.8, 1.1};

void require_all_pass(const std::vector<CheckResult>& v) {
  for (const auto& c : v) {
    INFO(c.id << " max " << c.max_residual << " min " << c.min_residual << " thr " << c.threshold);
    CHECK(c.pass);
  }
}

TwistedOneForm random_form(OneFormKind kind, Rng& rng) {
  return kind == OneFormKind::free_dirac ? random_selfadjoint_free_form(rng, flat(), kK, 1, true)
                                         : random_selfadjoint_form(kind, rng, flat(), 1);
}

}  // namespace

TEST_CASE("u = identity leaves every kind of form unchanged") {
  Rng rng(61);
  const auto one = GaugeUnitary::identity();
  for (auto kind : {OneFormKind::yukawa, OneFormKind::majorana, OneFormKind::free_dirac}) {
    const auto A = random_form(kind, rng);
    CHECK(form_residual(gauge_one_form(A, one, flat()), A) <= 1e-12);
  }
}

TEST_CASE("A = 0 with twist-invariant u stays 0 on the Majorana part") {
  Rng rng(62);
  const auto A = one_form(OneFormKind::majorana, {{identity_element(), identity_element()}}, flat());
  for (int t = 0; t < 5; ++t) {
    const auto u = random_gauge_unitary(GaugeMode::twist_invariant, rng);
    CHECK(gauge_one_form(A, u, flat()).raw.value.norm() <= 1e-12);
  }
}

TEST_CASE("a constant phase offset K leaves a constant Majorana term") {
  // [gamma5 x D_M, u^*]_rho = (e^{-i alpha} - e^{-i alpha'}) 1 x D_M
  Rng rng(82);
  const auto& s = flat();
  const auto A = one_form(OneFormKind::majorana, {{identity_element(), identity_element()}}, s);
  const auto id_dm = embed(s.finite.DM, {Factor::C, Factor::I, Factor::alpha});
  for (double K : {0.7, -1.3}) {
    const auto u = random_gauge_unitary(GaugeMode::twist_invariant, rng, K);
    const auto U = u.element();
    const cplx shift = std::exp(-kI * u.alpha.s()) - std::exp(-kI * u.alpha_p.s());
    const auto expect = shift * (represent_value(twist_rho(U)) * id_dm);
    CHECK(rel_residual(gauge_one_form(A, u, s).raw.value, expect) <= 1e-12);
    CHECK(expect.norm() > 1e-3);
  }
}

TEST_CASE("pure-alpha u shifts c_r by -i d alpha") {
  Rng rng(63);
  for (int t = 0; t < 5; ++t) {
    const auto A = random_form(OneFormKind::free_dirac, rng);
    const auto u = random_gauge_unitary(GaugeMode::pure_alpha, rng);
    const auto before = extract_gauge(A, kK);
    const auto after = extract_gauge(gauge_one_form(A, u, flat()), kK);
    for (int mu = 0; mu < 4; ++mu) {
      CHECK(std::abs(after.comp[mu].c_r - (before.comp[mu].c_r - kI * u.alpha.ds(mu))) <= 1e-12);
      CHECK(std::abs(after.phys[mu].B - (before.phys[mu].B + 2.0 / kK.g1 * u.alpha.ds(mu).real())) <= 1e-12);
      CHECK(std::abs(after.phys[mu].a - before.phys[mu].a) <= 1e-12);
    }
  }
}

TEST_CASE("field laws for twist-invariant, pure-alpha, pure-q and pure-m u") {
  for (auto mode : {GaugeMode::twist_invariant, GaugeMode::pure_alpha, GaugeMode::pure_q, GaugeMode::pure_m,
                    GaugeMode::identity})
    require_all_pass(verify_field_laws(flat(), kK, mode, 4, 64));
}

TEST_CASE("Higgs doublets transform with the same (q, alpha)") {
  for (auto mode : {GaugeMode::twist_invariant, GaugeMode::pure_alpha, GaugeMode::identity})
    require_all_pass(verify_higgs_law(flat(), mode, 4, 65));
}

TEST_CASE("alpha-only u multiplies the doublet by e^{-i alpha}") {
  Rng rng(66);
  const auto A = random_form(OneFormKind::yukawa, rng);
  const auto u = random_gauge_unitary(GaugeMode::pure_alpha, rng);
  const auto b = extract_higgs(A, flat().params);
  const auto a = extract_higgs(gauge_one_form(A, u, flat()), flat().params);
  const cplx e = std::exp(-kI * u.alpha.s());
  CHECK(std::abs(a.H2(0, 0) + 1.0 - e * (b.H2(0, 0) + 1.0)) <= 1e-12);
  CHECK(std::abs(a.H2(1, 0) - e * b.H2(1, 0)) <= 1e-12);
  CHECK(std::abs(a.H2p(1, 0) - e * b.H2p(1, 0)) <= 1e-12);
}

TEST_CASE("identity u leaves the doublets unchanged") {
  Rng rng(67);
  const auto A = random_form(OneFormKind::yukawa, rng);
  const auto b = extract_higgs(A, flat().params);
  const auto a = extract_higgs(gauge_one_form(A, GaugeUnitary::identity(), flat()), flat().params);
  CHECK(rel_residual(a.H2, b.H2) <= 1e-12);
  CHECK(rel_residual(a.H2p, b.H2p) <= 1e-12);
}

TEST_CASE("sigma fields are gauge invariant and the Xi identity holds") {
  require_all_pass(verify_sigma_invariance(flat(), GaugeMode::twist_invariant, 4, 68));
  require_all_pass(verify_sigma_invariance(flat(), GaugeMode::identity, 2, 69));
  Rng rng(70);
  for (int t = 0; t < 5; ++t)
    CHECK(xi_identity_residual(random_gauge_unitary(GaugeMode::twist_invariant, rng, 0.3)) <= 1e-12);
}

TEST_CASE("selfadjointness preserved for twist-invariant u, broken for generic u") {
  require_all_pass(check_selfadjoint_preservation(flat(), kK, 6, 71));
  Rng rng(72);
  const auto A = random_form(OneFormKind::free_dirac, rng);
  CHECK(free_selfadjoint_residual(gauge_one_form(A, GaugeUnitary::identity(), flat()).A_mu) <= 1e-12);
}

TEST_CASE("adjoint action matches the transformed covariant operator") {
  require_all_pass(check_adjoint_action(flat(), 3, 73));
  Rng rng(74);
  const auto A = random_form(OneFormKind::yukawa, rng);
  CHECK(adjoint_action_finite(GaugeUnitary::identity(), A, flat()) <= 1e-12);
  const auto F = random_form(OneFormKind::free_dirac, rng);
  CHECK_THROWS_AS(adjoint_action_finite(GaugeUnitary::identity(), F, flat()), std::invalid_argument);
}

TEST_CASE("group law and unimodular locking") {
  require_all_pass(check_group_law(flat(), kK, 3, 75));
  require_all_pass(check_unimodular_locking(flat(), kK, 4, 76));
}

TEST_CASE("gauge action rejects a kind mismatch") {
  Rng rng(77);
  const auto A = random_form(OneFormKind::yukawa, rng);
  CHECK_THROWS_AS(gauge_one_form(OneFormKind::majorana, A, GaugeUnitary::identity(), flat()), std::invalid_argument);
}

TEST_CASE("gauge unitaries: validation, composition and twist invariance") {
  Rng rng(78);
  auto u = GaugeUnitary::identity();
  u.q = UnitaryJet::checked(Jet::constant(ComplexMatrix::diag({kI, kI})));  // unitary, det -1
  CHECK_THROWS_AS(u.validate(), StructureError);
  auto v = GaugeUnitary::identity();
  v.alpha = Jet::scalar(kI);
  CHECK_THROWS_AS(v.validate(), StructureError);

  const auto a = random_gauge_unitary(GaugeMode::twist_invariant, rng, 0.4);
  const auto b = random_gauge_unitary(GaugeMode::twist_invariant, rng, -1.1);
  CHECK(a.twist_invariant());
  const auto ab = compose(a, b);
  CHECK_NOTHROW(ab.validate());
  CHECK(ab.twist_invariant());
  CHECK(jet_residual(represent(ab.element()).op, jet_mul(represent(a.element()).op, represent(b.element()).op)) <= 1e-12);
  CHECK_FALSE(random_gauge_unitary(GaugeMode::generic, rng).twist_invariant());
  for (auto mode : {GaugeMode::locked, GaugeMode::free_phase, GaugeMode::pure_q, GaugeMode::pure_m})
    CHECK_NOTHROW(random_gauge_unitary(mode, rng).validate());
}

TEST_CASE("locked phase makes det m equal e^{-i alpha}") {
  Rng rng(79);
  const auto u = random_gauge_unitary(GaugeMode::locked, rng);
  const cplx det = u.m.value().dense().determinant();
  CHECK(std::abs(det - std::exp(-kI * u.alpha.s())) <= 1e-12);
  const auto sp = special_part(u.m);
  CHECK(std::abs(sp.n.value.dense().determinant() - 1.0) <= 1e-12);
}

TEST_CASE("generic transformation can be explored without a claim") {
  Rng rng(80);
  const auto A = random_form(OneFormKind::free_dirac, rng);
  const auto view = explore_generic_transform(A, random_gauge_unitary(GaugeMode::generic, rng), flat(), kK);
  CHECK(std::isfinite(view.selfadjoint_residual));
  CHECK(view.selfadjoint_residual > 1e-4);
}

TEST_CASE("gauge battery passes and seeds are derived deterministically") {
  const auto v = check_gauge(flat(), kK, 3, 81);
  require_all_pass(v);
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
}
