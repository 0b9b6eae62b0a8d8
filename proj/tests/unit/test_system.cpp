#include "msys/system.hpp"

#include "support/generators.hpp"

#include <doctest.h>

using namespace msys;
using namespace msys::testing;

namespace {

MultiSystem scalar_system(Complex a, Complex b, Complex c, Complex d) {
  MultiSystem s = MultiSystem::zero(1, 1, 1, 1);
  s.a[0](0, 0) = a;
  s.b[0](0, 0) = b;
  s.c[0](0, 0) = c;
  s.d[0](0, 0) = d;
  return s;
}

ComplexVector vec(std::initializer_list<Complex> v) {
  ComplexVector z(static_cast<Index>(v.size()));
  Index i = 0;
  for (Complex x : v) z(i++) = x;
  return z;
}

}  // namespace

TEST_CASE("validate") {
  Rng rng(1);
  MultiSystem s = random_system(2, 3, 2, 1, rng);
  CHECK_NOTHROW(validate(s));

  MultiSystem short_b = s;
  short_b.b.pop_back();
  try {
    validate(short_b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("list b") != std::string::npos);
  }

  MultiSystem bad_a = s;
  bad_a.a[0] = ComplexMatrix::Zero(3, 2);
  try {
    validate(bad_a);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("A_1") != std::string::npos);
  }

  MultiSystem nan = s;
  nan.d[1](0, 0) = Complex(std::nan(""), 0.0);
  CHECK_THROWS(validate(nan));
}

TEST_CASE("pencil") {
  Rng rng(2);
  const MultiSystem s = random_system(3, 2, 2, 1, rng);
  CHECK(pencil(s, ComplexVector::Zero(3)).norm() == 0.0);
  const MultiSystem one = random_system(1, 2, 1, 2, rng);
  CHECK((pencil(one, vec({1.0})) - one.block(0)).norm() == 0.0);
  for (int i = 0; i < 10; ++i) {
    const ComplexVector z = random_ball(3, 1.0, rng);
    CHECK((pencil(s, z) - pencil_loop(s, z)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(pencil(s, ComplexVector::Zero(2)), ShapeError);
}

TEST_CASE("transfer_eval") {
  const MultiSystem sq = scalar_system(0.0, 1.0, 1.0, 0.0);
  CHECK(std::abs(transfer_eval(sq, vec({0.5}))(0, 0) - 0.25) < 1e-15);

  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const MultiSystem s = random_system(2, 4, 2, 3, rng, 0.5);
    CHECK(transfer_eval(s, ComplexVector::Zero(2)).norm() == 0.0);
    const ComplexVector z = random_ball(2, 0.3, rng);
    // Keep the series convergent: rescale A so ||zA|| <= 1/2.
    MultiSystem t = s;
    const double na = op_norm(linear_combination(t.a, z));
    if (na > 0.5)
      for (auto& a : t.a) a *= 0.5 / na;
    CHECK((transfer_eval(t, z) - neumann_transfer(t, z, 60)).norm() < 1e-10);
  }
}

TEST_CASE("transfer_eval refuses a singular resolvent") {
  const MultiSystem s = scalar_system(1.0, 1.0, 1.0, 0.0);
  CHECK_THROWS_AS(transfer_eval(s, vec({1.0})), NumericalError);
}

TEST_CASE("taylor_coefficients") {
  const PolyGerm sq = taylor_coefficients(scalar_system(0.0, 1.0, 1.0, 0.0), 6);
  REQUIRE(sq.coefficients().size() == 1);
  CHECK(std::abs(sq.coefficient({2})(0, 0) - 1.0) < 1e-15);

  Rng rng(4);
  MultiSystem stateless = random_system(3, 0, 2, 2, rng);
  const PolyGerm lin = taylor_coefficients(stateless, 4);
  CHECK(lin.coefficients().size() == 3);
  CHECK((lin.coefficient({0, 1, 0}) - stateless.d[1]).norm() == 0.0);

  for (int trial = 0; trial < 5; ++trial) {
    const MultiSystem s = random_system(2, 3, 2, 2, rng, 0.5);
    const PolyGerm g = taylor_coefficients(s, 5);
    CHECK(germ_distance(g, word_taylor(s, 5)) < 1e-10);
  }
}

TEST_CASE("taylor coefficients evaluate to the transfer function near 0") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const MultiSystem s = random_contractive(2, 3, 2, 2, rng);
    const PolyGerm g = taylor_coefficients(s, 30);
    for (int i = 0; i < 20; ++i) {
      const ComplexVector z = random_ball(2, 0.2, rng);
      CHECK((g.eval(z) - transfer_eval(s, z)).norm() < 1e-8);
    }
  }
}

TEST_CASE("PolyGerm basics") {
  PolyGerm g(2, 1, 1);
  CHECK(g.empty());
  CHECK_FALSE(g.min_degree().has_value());
  ComplexMatrix one = ComplexMatrix::Ones(1, 1);
  g.set({1, 1}, one);
  g.set({0, 3}, 2.0 * one);
  g.set({2, 0}, ComplexMatrix::Zero(1, 1));
  CHECK(g.coefficients().size() == 2);
  CHECK(*g.min_degree() == 2);
  CHECK(*g.max_degree() == 3);
  CHECK(g.homogeneous_part(2).coefficients().size() == 1);
  CHECK(std::abs(g.eval(vec({0.5, 2.0}))(0, 0) - (1.0 + 16.0)) < 1e-12);
  CHECK_THROWS_AS(g.set({1}, one), ShapeError);
  CHECK_THROWS_AS(g.set({1, 0}, ComplexMatrix::Ones(2, 1)), ShapeError);
}

TEST_CASE("is_conservative small cases") {
  MultiSystem s = MultiSystem::zero(2, 1, 1, 1);
  s.a[0](0, 0) = 1.0;
  s.d[1](0, 0) = 1.0;
  CHECK(is_conservative(s).conservative());

  Rng rng(6);
  MultiSystem u = MultiSystem::zero(1, 2, 1, 1);
  u.set_block(0, haar_unitary(3, rng));
  CHECK(is_conservative(u).conservative());

  MultiSystem half = u;
  half.set_block(0, 0.5 * u.block(0));
  const ConservativityReport r = is_conservative(half);
  CHECK_FALSE(r.conservative());
  CHECK(r.worst_residual > 0.5);
}

TEST_CASE("is_conservative reports a failing cross pair") {
  MultiSystem s = MultiSystem::zero(2, 0, 1, 1);
  s.d[0](0, 0) = std::sqrt(0.5);
  s.d[1](0, 0) = std::sqrt(0.5);
  const ConservativityReport r = is_conservative(s);
  CHECK_FALSE(r.conservative());
  REQUIRE(r.failing_pair.has_value());
  CHECK(r.failing_pair->first != r.failing_pair->second);
}

TEST_CASE("random_conservative against torus sampling") {
  Rng rng(7);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const MultiSystem s = random_conservative(n, 1 + seed % 5, 1 + seed % 3, 1 + seed % 3, seed);
    CHECK(is_conservative(s).conservative());
    CHECK(sampled_unitarity_defect(s, 100, rng) < 1e-10);
    for (int i = 0; i < 10; ++i) {
      CHECK(op_norm(transfer_eval(s, random_ball(n, 0.95, rng))) <= 1.0 + 1e-9);
    }
  }
  const MultiSystem one = random_conservative(1, 3, 2, 2, 5);
  const ComplexMatrix g = one.block(0);
  CHECK((g.adjoint() * g - ComplexMatrix::Identity(5, 5)).norm() < 1e-12);

  const MultiSystem a = random_conservative(2, 4, 2, 2, 99);
  const MultiSystem b = random_conservative(2, 4, 2, 2, 99);
  for (std::size_t k = 0; k < 2; ++k) CHECK((a.block(k) - b.block(k)).norm() == 0.0);

  CHECK_THROWS_AS(random_conservative(2, 3, 2, 1, 0), ShapeError);
}

TEST_CASE("zero feedthrough conservative draws") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MultiSystem s = random_conservative(2, 3, 2, 2, seed, {.zero_feedthrough = true});
    CHECK(is_conservative(s).conservative());
    for (const auto& d : s.d) CHECK(d.norm() == 0.0);
  }
}

TEST_CASE("algebraic and sampled conservativity agree") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 3;
    MultiSystem s = random_conservative(n, 2 + trial % 4, 2, 2, 100 + trial);
    if (trial % 2) s = perturbed(s, std::pow(10.0, -1 - trial % 6), rng);
    const ConservativityReport r = is_conservative(s);
    const double defect = sampled_unitarity_defect(s, 100, rng);
    if (r.conservative()) CHECK(defect < 10 * r.tol);
    if (defect > 10 * r.tol) CHECK_FALSE(r.conservative());
  }
}

TEST_CASE("is_dissipative_sampled") {
  const MultiSystem s = random_conservative(2, 3, 2, 2, 1);
  CHECK(is_dissipative_sampled(s, 50).passed);

  MultiSystem twice = s;
  for (std::size_t k = 0; k < 2; ++k) twice.set_block(k, 2.0 * s.block(k));
  const DissipativityVerdict v = is_dissipative_sampled(twice, 50);
  CHECK_FALSE(v.passed);
  REQUIRE(v.witness.has_value());
  CHECK(op_norm(pencil(twice, *v.witness)) > 1.0);

  Rng rng(9);
  MultiSystem one = random_system(1, 2, 1, 1, rng);
  one.set_block(0, one.block(0) / op_norm(one.block(0)));
  for (std::size_t n : {1, 7, 100}) CHECK(is_dissipative_sampled(one, n).passed);
}

TEST_CASE("torus_point lies on the torus") {
  for (std::size_t i = 0; i < 20; ++i) {
    const ComplexVector z = torus_point(3, i);
    for (Index k = 0; k < 3; ++k) CHECK(std::abs(std::abs(z(k)) - 1.0) < 1e-14);
  }
}

TEST_CASE("closely_connected_subspace") {
  Rng rng(10);
  MultiSystem s = random_system(2, 3, 1, 1, rng);
  for (auto& b : s.b) b.setZero();
  for (auto& c : s.c) c.setZero();
  CHECK(closely_connected_subspace(s).dim() == 0);

  MultiSystem e1 = MultiSystem::zero(1, 2, 1, 1);
  e1.b[0](0, 0) = 1.0;
  const Subspace cc = closely_connected_subspace(e1);
  CHECK(projector_distance(cc, Subspace::coordinate_block(2, 0, 1)) < 1e-12);

  // Unitary block on the leading coordinates, decoupled from B and C.
  const MultiSystem inner = random_conservative(2, 3, 2, 2, 11);
  MultiSystem block = MultiSystem::zero(2, 5, 2, 2);
  const ComplexMatrix u = haar_unitary(2, rng);
  for (std::size_t k = 0; k < 2; ++k) {
    block.a[k].topLeftCorner(2, 2) = k == 0 ? u : ComplexMatrix::Zero(2, 2);
    block.a[k].bottomRightCorner(3, 3) = inner.a[k];
    block.b[k].bottomRows(3) = inner.b[k];
    block.c[k].rightCols(3) = inner.c[k];
    block.d[k] = inner.d[k];
  }
  REQUIRE(is_closely_connected(inner));
  CHECK(projector_distance(closely_connected_subspace(block),
                           Subspace::coordinate_block(5, 2, 3)) < 1e-9);
}

TEST_CASE("restrict_to_cc") {
  Rng rng(12);
  const MultiSystem s = random_conservative(2, 4, 2, 2, 12);
  REQUIRE(is_closely_connected(s));
  const MultiSystem r = restrict_to_cc(s);
  CHECK(r.dim_x == 4);
  for (int i = 0; i < 10; ++i) {
    const ComplexVector z = random_ball(2, 0.9, rng);
    CHECK((transfer_eval(s, z) - transfer_eval(r, z)).norm() < 1e-10);
  }

  const MultiSystem big = with_unitary_block(s, 3, rng);
  REQUIRE(is_conservative(big).conservative());
  const MultiSystem small = restrict_to_cc(big);
  CHECK(small.dim_x == 4);
  CHECK(is_conservative(small).conservative());
  CHECK(restrict_to_cc(small).dim_x == small.dim_x);
  for (int i = 0; i < 10; ++i) {
    const ComplexVector z = random_ball(2, 0.9, rng);
    CHECK((transfer_eval(big, z) - transfer_eval(small, z)).norm() < 1e-10);
  }

  const MultiSystem stateless = random_conservative(3, 0, 2, 2, 13);
  const MultiSystem sr = restrict_to_cc(stateless);
  CHECK(sr.dim_x == 0);
  for (std::size_t k = 0; k < 3; ++k) CHECK((sr.d[k] - stateless.d[k]).norm() == 0.0);

  CHECK_THROWS_AS(restrict_to_cc(random_system(2, 2, 1, 1, rng)), PreconditionError);
}

TEST_CASE("unitary_part") {
  Rng rng(14);
  MultiSystem s = MultiSystem::zero(3, 3, 1, 1);
  s.a[0] = haar_unitary(3, rng);
  CHECK(unitary_part(s).is_whole());

  MultiSystem c = random_system(1, 4, 1, 1, rng);
  c.a[0] *= 0.9 / op_norm(c.a[0]);
  CHECK(unitary_part(c).is_zero());

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MultiSystem t = random_conservative(1 + seed % 3, 2 + seed % 4, 1 + seed % 2, 1 + seed % 2,
                                        1000 + seed);
    if (seed % 3 == 0) t = with_unitary_block(t, 1 + seed % 2, rng);
    const bool cnu = unitary_part(t).is_zero();
    CHECK(cnu == is_closely_connected(t));
    if (!cnu) CHECK(unitary_part(t).dim() + closely_connected_subspace(t).dim() == t.dim_x);
  }
}

TEST_CASE("realize_germ") {
  Rng rng(15);
  PolyGerm lin(2, 2, 3);
  const ComplexMatrix m = random_gaussian(3, 2, rng);
  lin.set({1, 0}, m);
  const MultiSystem s = realize_germ(lin);
  CHECK(s.dim_x == 0);
  CHECK((s.d[0] - m).norm() == 0.0);
  CHECK(s.d[1].norm() == 0.0);

  PolyGerm z1z2(2, 1, 1);
  z1z2.set({1, 1}, ComplexMatrix::Ones(1, 1));
  const MultiSystem r = realize_germ(z1z2);
  CHECK(r.dim_x == 2);
  const PolyGerm back = taylor_coefficients(r, 6);
  REQUIRE(back.coefficients().size() == 1);
  CHECK(std::abs(back.coefficient({1, 1})(0, 0) - 1.0) < 1e-15);

  for (int trial = 0; trial < 5; ++trial) {
    const PolyGerm g = random_germ(2, 2, 2, 1, 4, rng);
    CHECK(germ_distance(taylor_coefficients(realize_germ(g), 8), g) < 1e-12);
  }
  const PolyGerm g3 = random_germ(3, 1, 2, 2, 3, rng);
  CHECK(germ_distance(taylor_coefficients(realize_germ(g3), 6), g3) < 1e-12);

  PolyGerm constant(1, 1, 1);
  constant.set({0}, ComplexMatrix::Ones(1, 1));
  CHECK_THROWS_AS(realize_germ(constant), PreconditionError);
}

TEST_CASE("adjoint_system and scale_transfer") {
  Rng rng(16);
  const MultiSystem s = random_contractive(2, 3, 1, 2, rng);
  const MultiSystem adj = adjoint_system(s);
  const MultiSystem sc = scale_transfer(s, 1.5);
  for (int i = 0; i < 5; ++i) {
    const ComplexVector z = random_ball(2, 0.9, rng);
    CHECK((transfer_eval(adj, z.conjugate()) - transfer_eval(s, z).adjoint()).norm() < 1e-12);
    CHECK((transfer_eval(sc, z) - 1.5 * transfer_eval(s, z)).norm() < 1e-12);
  }
}
