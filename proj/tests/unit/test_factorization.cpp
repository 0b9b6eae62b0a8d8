#include "msys/factorization.hpp"

#include "support/generators.hpp"

#include <doctest.h>

using namespace msys;
using namespace msys::testing;

namespace {

MultiSystem z_squared() {
  MultiSystem s = MultiSystem::zero(1, 1, 1, 1);
  s.b[0](0, 0) = 1.0;
  s.c[0](0, 0) = 1.0;
  return s;
}

ComplexVector scalar(Complex z) {
  ComplexVector v(1);
  v(0) = z;
  return v;
}

}  // namespace

TEST_CASE("LinearFactorChain shapes and products") {
  Rng rng(1);
  std::vector<std::vector<ComplexMatrix>> f = {
      {random_gaussian(2, 3, rng), random_gaussian(2, 3, rng)},
      {random_gaussian(3, 1, rng), random_gaussian(3, 1, rng)}};
  const LinearFactorChain chain(2, f);
  CHECK(chain.space_dims() == std::vector<Index>{2, 3, 1});
  const ComplexVector z = random_ball(2, 1.0, rng);
  const ComplexMatrix direct = linear_combination(f[0], z) * linear_combination(f[1], z);
  CHECK((chain.eval(z) - direct).norm() < 1e-12);
  CHECK((chain.expand().eval(z) - direct).norm() < 1e-12);
  CHECK(*chain.expand().min_degree() == 2);

  auto bad = f;
  bad[1][0] = random_gaussian(2, 1, rng);
  CHECK_THROWS_AS(LinearFactorChain(2, bad), ShapeError);
  CHECK_THROWS_AS(LinearFactorChain(2, {}), ShapeError);
}

TEST_CASE("multiplicity") {
  Rng rng(2);
  const MultiSystem lin = random_system(2, 0, 1, 1, rng);
  CHECK(multiplicity(lin, 4) == 1u);
  CHECK(multiplicity(z_squared(), 5) == 2u);

  PolyGerm g(2, 2, 2);
  g.set({2, 1}, random_gaussian(2, 2, rng));
  CHECK(multiplicity(realize_germ(g), 6) == 3u);

  const MultiSystem zero = MultiSystem::zero(2, 2, 1, 1);
  CHECK_FALSE(multiplicity(zero, 5).has_value());
  CHECK(default_degree_cap(zero) == 4u);
}

TEST_CASE("factor_left") {
  Rng rng(3);
  const MultiSystem lin = random_system(3, 0, 2, 2, rng);
  const LeftFactorization f1 = factor_left(lin, 1);
  CHECK(f1.chain.length() == 1);
  for (std::size_t k = 0; k < 3; ++k) CHECK((f1.chain.factor(0)[k] - lin.d[k]).norm() == 0.0);
  CHECK((f1.tail.constant - ComplexMatrix::Identity(2, 2)).norm() == 0.0);

  const LeftFactorization f2 = factor_left(z_squared(), 2);
  CHECK(f2.chain.length() == 2);
  CHECK(std::abs(f2.eval(scalar(0.3))(0, 0) - 0.09) < 1e-12);
  CHECK(op_norm(f2.tail.constant) >= 1.0);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MultiSystem s = conservative_with_multiplicity(2, 2, 3, 2, seed);
    REQUIRE(multiplicity(s, 6) == 2u);
    const LeftFactorization f = factor_left(s, 2);
    CHECK(reconstruction_residual(s, f) < 1e-9);
    CHECK(op_norm(f.tail.constant) >= 1.0);
  }

  CHECK_THROWS_AS(factor_left(z_squared(), 1), PreconditionError);
  CHECK_THROWS_AS(factor_left(z_squared(), 3), PreconditionError);
}

TEST_CASE("factor_right") {
  Rng rng(4);
  const MultiSystem lin = random_system(2, 0, 3, 2, rng);
  const RightFactorization f1 = factor_right(lin, 1);
  CHECK(f1.chain.length() == 1);
  for (std::size_t k = 0; k < 2; ++k) CHECK((f1.chain.factor(0)[k] - lin.d[k]).norm() < 1e-15);
  CHECK((f1.tail.constant - ComplexMatrix::Identity(2, 2)).norm() == 0.0);

  const RightFactorization f2 = factor_right(z_squared(), 2);
  CHECK(std::abs(f2.eval(scalar(0.3))(0, 0) - 0.09) < 1e-12);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (unsigned m : {1u, 2u, 3u}) {
      const MultiSystem s = conservative_with_multiplicity(m, 1 + seed % 3, 3, 2, 50 + seed);
      REQUIRE(multiplicity(s, 8) == m);
      CHECK(reconstruction_residual(s, factor_right(s, m)) < 1e-9);
      CHECK(reconstruction_residual(s, factor_left(s, m)) < 1e-9);
    }
  }
}

TEST_CASE("left and right factorizations of realized germs") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const unsigned m = 1 + trial % 3;
    const PolyGerm g = random_germ(2, 2, 2, m, m + 1, rng);
    const MultiSystem s = realize_germ(g);
    REQUIRE(multiplicity(s, default_degree_cap(s)) == m);
    CHECK(reconstruction_residual(s, factor_left(s, m)) < 1e-9);
    CHECK(reconstruction_residual(s, factor_right(s, m)) < 1e-9);
  }
}

TEST_CASE("factor_homogeneous") {
  // z1 z2 with B = (0, 1), C = (1, 0), A = 0.
  MultiSystem s = MultiSystem::zero(2, 1, 1, 1);
  s.b[1](0, 0) = 1.0;
  s.c[0](0, 0) = 1.0;
  const LinearFactorChain chain = factor_homogeneous(s, 2);
  PolyGerm want(2, 1, 1);
  want.set({1, 1}, ComplexMatrix::Ones(1, 1));
  CHECK(germ_distance(chain.expand(), want) < 1e-15);

  Rng rng(6);
  const MultiSystem lin = random_system(2, 0, 2, 2, rng);
  CHECK(factor_homogeneous(lin, 1).length() == 1);

  for (int trial = 0; trial < 10; ++trial) {
    const unsigned m = 1 + trial % 3;
    const PolyGerm g = random_germ(1 + trial % 3, 2, 2, m, m, rng);
    const LinearFactorChain c = factor_homogeneous(realize_germ(g), m);
    CHECK(germ_distance(c.expand(), g) < 1e-10);
  }

  // One variable: z^m L.
  PolyGerm zl(1, 2, 2);
  zl.set({3}, random_gaussian(2, 2, rng));
  CHECK(germ_distance(factor_homogeneous(realize_germ(zl), 3).expand(), zl) < 1e-10);

  CHECK_THROWS_AS(factor_homogeneous(random_conservative(2, 2, 2, 2, 7), 1), PreconditionError);
}

TEST_CASE("homogeneous factors of conservative realizations are contractive") {
  Rng rng(7);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const MultiSystem s3 = random_conservative(n, 0, 2, 2, 3 * seed);
    const MultiSystem s2 = random_conservative(n, 0, 2, 2, 3 * seed + 1);
    const MultiSystem s1 = random_conservative(n, 0, 2, 2, 3 * seed + 2);
    const MultiSystem s = cascade(s3, cascade(s2, s1));
    REQUIRE(is_conservative(s).conservative());
    const auto m = multiplicity(s, 8);
    REQUIRE(m == 3u);
    const LinearFactorChain chain = factor_homogeneous(s, 3);
    CHECK(germ_distance(chain.expand(), taylor_coefficients(s, 6)) < 1e-10);
    for (double nrm : chain.torus_norms(100)) CHECK(nrm <= 1.0 + 1e-8);
  }
}

TEST_CASE("invariant_subspace_candidates") {
  const MultiSystem s = random_conservative(2, 3, 2, 2, 8);
  const auto cands = invariant_subspace_candidates(s, 10, 1);
  REQUIRE_FALSE(cands.empty());
  CHECK(cands.front().is_zero());
  for (const auto& c : cands) CHECK(check_condition_i(s, c));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MultiSystem a2 = random_conservative(2, 2, 2, 2, 100 + seed);
    const MultiSystem a1 = random_conservative(2, 2, 2, 2, 200 + seed);
    const MultiSystem c = cascade(a2, a1);
    const Subspace x2 = cascade_x2_block(a2, a1);
    bool found = false;
    for (const auto& cand : invariant_subspace_candidates(c, 50, seed)) {
      if (projector_distance(cand, x2) < 1e-8) found = true;
    }
    CHECK(found);
  }

  MultiSystem zero = MultiSystem::zero(2, 4, 1, 1);
  const auto zc = invariant_subspace_candidates(zero, 6, 3);
  for (const auto& c : zc) CHECK(check_condition_i(zero, c));
  CHECK(zc.size() <= 1 + 4 + 6);
}

TEST_CASE("solve_problem2") {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const MultiSystem a2 = random_conservative(n, 1 + seed % 2, 2, 2, 300 + seed);
    const MultiSystem a1 = random_conservative(n, 2, 2, 2, 400 + seed);
    const MultiSystem s = restrict_to_cc(cascade(a2, a1));
    const auto out = solve_problem2(s, 32, seed);
    REQUIRE(out.has_value());
    CHECK(is_conservative(out->theta2).conservative());
    CHECK(is_conservative(out->theta1).conservative());
    CHECK(out->product_residual < 1e-9);
    CHECK(verify_factor_tf(s, out->theta2, out->theta1) < 1e-9);
    CHECK(transfer_eval(out->theta2, ComplexVector::Zero(n)).norm() == 0.0);
    CHECK(transfer_eval(out->theta1, ComplexVector::Zero(n)).norm() == 0.0);
    if (out->witness_x2.is_zero()) {
      // theta2 is then a linear homogeneous function.
      CHECK(out->theta2.dim_x == 0);
    }
  }

  CHECK_THROWS_AS(solve_problem2(random_conservative(2, 2, 2, 2, 1), 8, 0), PreconditionError);
  Rng r2(10);
  CHECK_THROWS_AS(solve_problem2(random_contractive(2, 2, 2, 2, r2), 8, 0), PreconditionError);
}

TEST_CASE("from_factorization candidates pass both conditions") {
  int p_closure_failures = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const MultiSystem a2 = random_conservative(n, seed % 3, 2, 2, 500 + seed);
    const MultiSystem a1 = random_conservative(n, seed % 4, 2, 2, 600 + seed);
    const CascadeRealization r = from_factorization(a2, a1);
    const MultiSystem& acc = r.cc.system;
    for (const Subspace* x2 : {&r.p_closure, &r.intersection}) {
      REQUIRE(check_condition_i(acc, *x2));
      const bool ok = check_condition_ii(acc, *x2).holds;
      if (!ok && x2 == &r.p_closure) ++p_closure_failures;
      CHECK(ok);
      if (!ok) continue;
      const CascadeDecomposition dec = decompose(acc, *x2);
      CHECK(verify_factor_tf(acc, dec.alpha2, dec.alpha1) < 1e-9);
    }
  }
  MESSAGE("P-closure candidates failing condition (ii): " << p_closure_failures);
}

TEST_CASE("from_factorization of closely connected cascades keeps X2") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MultiSystem a2 = random_conservative(2, 2, 2, 2, 700 + seed);
    const MultiSystem a1 = random_conservative(2, 2, 2, 2, 800 + seed);
    const MultiSystem c = cascade(a2, a1);
    if (!is_closely_connected(c)) continue;
    const CascadeRealization r = from_factorization(a2, a1);
    CHECK(r.cc.system.dim_x == c.dim_x);
    const Subspace mapped =
        image_subspace(r.cc.subspace.basis().adjoint(), cascade_x2_block(a2, a1));
    CHECK(projector_distance(r.p_closure, mapped) < 1e-8);
  }
}

TEST_CASE("from_factorization with stateless factors") {
  const MultiSystem a2 = random_conservative(2, 0, 2, 2, 900);
  const MultiSystem a1 = random_conservative(2, 0, 2, 2, 901);
  const CascadeRealization r = from_factorization(a2, a1);
  CHECK(r.cc.system.dim_x <= 2);
  for (const Subspace* x2 : {&r.p_closure, &r.intersection}) {
    CHECK(check_condition_i(r.cc.system, *x2));
    CHECK(check_condition_ii(r.cc.system, *x2).holds);
  }
}
