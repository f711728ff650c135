#include <random>

#include "doctest.h"
#include "steerdi/self_test.hpp"

using namespace steerdi;

TEST_CASE("word algebra") {
  const auto b1 = MonomialWord::bob_letter(1);
  const auto b2 = MonomialWord::bob_letter(2);
  const auto c1 = MonomialWord::charlie_letter(1);

  CHECK((b1 * b1) == b1);                      // idempotence
  CHECK((b1 * b2).length() == 2);
  CHECK((b1 * c1) == (c1 * b1));               // parties commute
  CHECK(MonomialWord::identity().is_identity());
  CHECK((b1 * b2).adjoint() == (b2 * b1));
  CHECK((b1 * b2).hermitian_rep() == (b1 * b2).adjoint().hermitian_rep());
  CHECK((b1 * b2 * c1).str() == "B1 B2 C1");

  // observable squares to the identity through the projector rewriting
  const NcPolynomial sq = bob_observable_poly(3) * bob_observable_poly(3);
  CHECK(sq.terms().size() == 1);
  CHECK(sq.terms().begin()->first.is_identity());
  CHECK(sq.terms().begin()->second.real() == doctest::Approx(1.0));
}

TEST_CASE("objective polynomials are hermitian and sign-stable") {
  for (int j = 0; j <= 3; ++j) CHECK(swap_fidelity_poly(j).is_hermitian(1e-12));
  const NcPolynomial diff = swap_fidelity_poly(2, false) - swap_fidelity_poly(2, true);
  double md = 0;
  for (const auto& [w, c] : diff.terms()) md = std::max(md, std::abs(c));
  CHECK(md < 1e-12);
}

TEST_CASE("relaxation structure is pinned") {
  const std::array<double, 3> chsh{2.8, 2.8, 2.8};
  const auto avg = build_relaxation(chsh, SwapObjective::average);
  CHECK(avg.n() == 96);
  CHECK(avg.num_classes() == 2089);
  CHECK(avg.constraints.size() == 4);
  CHECK(avg.classes[0].is_identity());

  CHECK(build_relaxation(chsh, SwapObjective::f0).n() == 72);
  CHECK(build_relaxation(chsh, SwapObjective::f1).n() == 81);
  CHECK(build_relaxation(chsh, SwapObjective::f2).n() == 91);
  CHECK(build_relaxation(chsh, SwapObjective::f3).n() == 72);

  CHECK_THROWS_AS(build_relaxation({2.9, 2.8, 2.8}, SwapObjective::average), std::invalid_argument);
}

TEST_CASE("realization moments are feasible and reproduce the swap fidelity") {
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> wdist(0.9, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    const double w = wdist(rng);
    const Realization r = ideal_realization(w);
    const auto chsh = realization_chsh(r);
    for (auto which : {SwapObjective::f2, SwapObjective::average}) {
      const auto rel = build_relaxation(chsh, which);
      const auto y = realization_moments(rel, r);
      // constraints hold at the realization's own line values
      for (const auto& aff : rel.constraints)
        CHECK(std::abs(evaluate_affine(aff, y) - aff.rhs) < 1e-10);
      // gamma is psd
      CHECK(min_eigenvalue(moment_matrix_of(rel, y)) > -1e-9);
      // objective matches the matrix-route swap fidelity (1+3w)/4
      CHECK(evaluate_objective(rel, y) == doctest::Approx((1 + 3 * w) / 4).epsilon(1e-10));
    }
  }
}

TEST_CASE("compiled relaxation recovers pinned moments") {
  const Realization r = ideal_realization(0.97);
  const auto chsh = realization_chsh(r);
  const auto rel = build_relaxation(chsh, SwapObjective::f3);
  const auto comp = compile_relaxation(rel);
  CHECK(comp.pivots.size() == 4);
  CHECK(static_cast<int>(comp.free_class.size()) == rel.num_classes() - 4);

  // free values of the realization reproduce the full moment vector
  const auto y_full = realization_moments(rel, r);
  std::vector<double> y_free(comp.free_class.size());
  for (size_t f = 0; f < comp.free_class.size(); ++f)
    y_free[f] = y_full[static_cast<size_t>(comp.free_class[f])];
  const auto rec = recover_class_moments(comp, y_free);
  for (size_t k = 0; k < rec.size(); ++k) CHECK(std::abs(rec[k] - y_full[k]) < 1e-9);

  // inequality mode appends one slack row per line
  const auto comp_ineq = compile_relaxation(rel, true);
  CHECK(comp_ineq.problem.n == rel.n() + 3);
  CHECK(comp_ineq.pivots.size() == 1);
}

TEST_CASE("classical point cannot certify") {
  const auto bound = fidelity_lower_bound({2.0, 2.0, 2.0}, SwapObjective::f3);
  CHECK(bound.value < 0.9);
  CHECK(bound.primal_residual < 1e-5);
}

TEST_CASE("fidelity bound at a mildly noisy point") {
  // small, fast solve: f3 objective; bound must certify 1 at the ideal lines
  // minus a small deficit, and stay below the true fidelity of the depolarized
  // realization producing those lines
  const double w = 0.999;
  const Realization r = ideal_realization(w);
  const auto chsh = realization_chsh(r);
  const auto bound = fidelity_lower_bound(chsh, SwapObjective::f3);
  const double f_true = (1 + 3 * w) / 4;
  CHECK(bound.value <= f_true + 1e-6);
  CHECK(bound.value > 0.9);
  CHECK(bound.reliable(1e-6, 1e-4));
}
