#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "carnotlab/algebra.hpp"
#include "carnotlab/errors.hpp"

using namespace carnotlab;

namespace {

GroupPoint random_point(const AlgebraPtr& alg, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  std::vector<double> c(alg->dim());
  for (double& x : c) x = unif(rng);
  return GroupPoint(alg, std::move(c));
}

double max_coord_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double coord_scale(const std::vector<double>& a) {
  double m = 1.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("catalog dimensions and steps") {
  auto h1 = heisenberg_algebra(1);
  CHECK(h1->dim() == 3);
  CHECK(h1->step() == 2);
  auto h2 = heisenberg_algebra(2);
  CHECK(h2->strata_dims() == std::vector<int>{4, 1});
  CHECK(h2->dim() == 5);
  CHECK_THROWS_AS(heisenberg_algebra(0), DomainError);

  auto f1 = filiform_algebra(1);
  CHECK(f1->dim() == 2);
  CHECK(f1->step() == 1);
  auto engel = filiform_algebra(3);
  CHECK(engel->dim() == 4);
  CHECK(engel->step() == 3);
  CHECK_THROWS_AS(filiform_algebra(0), DomainError);

  // filiform step 2 is the 3-dimensional Heisenberg algebra
  auto f2 = filiform_algebra(2);
  CHECK(f2->strata_dims() == h1->strata_dims());
}

TEST_CASE("catalog lookup by name") {
  CHECK(algebra_by_name("heisenberg:2")->dim() == 5);
  CHECK(algebra_by_name("filiform:4")->step() == 4);
  CHECK_THROWS_AS(algebra_by_name("nilpotent:3"), DomainError);
  CHECK_THROWS_AS(algebra_by_name("heisenberg:x"), DomainError);
}

TEST_CASE("invalid structure constants are rejected") {
  // grading violation: [X_{1,1}, X_{1,2}] with a stratum-1 component
  std::vector<BracketTriple> bad = {{0, 1, {{0, 1.0}}}};
  CHECK_THROWS_AS(GradedLieAlgebra("bad", {2, 1}, bad), DomainError);
  // stratum 2 not generated
  CHECK_THROWS_AS(GradedLieAlgebra("hollow", {2, 1}, {}), DomainError);
}

TEST_CASE("central elements bracket to zero") {
  auto h1 = heisenberg_algebra(1);
  std::vector<double> z(3, 0.0);
  z[h1->index(2, 1)] = 1.0;
  CHECK(is_central(*h1, z));
  std::vector<double> x(3, 0.0);
  x[h1->index(1, 1)] = 1.0;
  CHECK(!is_central(*h1, x));
}

TEST_CASE("bch on the first Heisenberg group") {
  auto h1 = heisenberg_algebra(1);
  const GroupPoint a = basis_point(h1, 1, 1);
  const GroupPoint b = basis_point(h1, 1, 2);
  const AlgebraVector p = bch_product(a.v, b.v);
  CHECK(p.c[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.c[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.c[2] == doctest::Approx(0.5).epsilon(1e-14));

  std::mt19937_64 rng(7);
  const GroupPoint g = random_point(h1, rng);
  const AlgebraVector ge = bch_product(g.v, identity(h1).v);
  CHECK(max_coord_diff(ge.c, g.coords()) == 0.0);
}

TEST_CASE("group multiplication examples") {
  auto h1 = heisenberg_algebra(1);
  const GroupPoint x(h1, {1.0, 0.0, 0.0});
  const GroupPoint y(h1, {0.0, 1.0, 0.0});
  const GroupPoint xy = group_mul(x, y);
  CHECK(xy.coords()[2] == doctest::Approx(0.5).epsilon(1e-14));

  // commutator lands in the center
  const GroupPoint comm =
      group_mul(group_mul(xy, group_inv(x)), group_inv(y));
  CHECK(std::abs(comm.coords()[0]) < 1e-14);
  CHECK(std::abs(comm.coords()[1]) < 1e-14);
  CHECK(comm.coords()[2] == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(3);
  const GroupPoint g = random_point(h1, rng);
  const GroupPoint gg = group_mul(g, group_inv(g));
  CHECK(max_coord_diff(gg.coords(), identity(h1).coords()) < 1e-14);
}

TEST_CASE("bch associativity on random triples") {
  std::mt19937_64 rng(12345);
  for (const char* name : {"heisenberg:1", "heisenberg:2", "filiform:3", "filiform:4"}) {
    auto alg = algebra_by_name(name);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const GroupPoint a = random_point(alg, rng);
      const GroupPoint b = random_point(alg, rng);
      const GroupPoint c = random_point(alg, rng);
      const GroupPoint left = group_mul(group_mul(a, b), c);
      const GroupPoint right = group_mul(a, group_mul(b, c));
      const double err =
          max_coord_diff(left.coords(), right.coords()) / coord_scale(left.coords());
      worst = std::max(worst, err);
    }
    INFO(name);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("dilations") {
  auto h1 = heisenberg_algebra(1);
  const GroupPoint g(h1, {1.0, 1.0, 1.0});
  const GroupPoint d2 = dilate(2.0, g);
  CHECK(d2.coords() == std::vector<double>{2.0, 2.0, 4.0});
  CHECK(dilate(1.0, g).coords() == g.coords());
  CHECK_THROWS_AS(dilate(0.0, g), DomainError);
  CHECK_THROWS_AS(dilate(-1.0, g), DomainError);

  // composition is exact for dyadic factors
  const GroupPoint a = dilate(0.5, dilate(8.0, g));
  const GroupPoint b = dilate(4.0, g);
  CHECK(max_coord_diff(a.coords(), b.coords()) == 0.0);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lam(0.2, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const GroupPoint x = random_point(h1, rng);
    const GroupPoint y = random_point(h1, rng);
    const double l = lam(rng);
    const GroupPoint lhs = dilate(l, group_mul(x, y));
    const GroupPoint rhs = group_mul(dilate(l, x), dilate(l, y));
    worst = std::max(worst, max_coord_diff(lhs.coords(), rhs.coords()));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("one-parameter subgroups") {
  auto h1 = heisenberg_algebra(1);
  std::mt19937_64 rng(4);
  const GroupPoint g = random_point(h1, rng);
  CHECK(max_coord_diff(one_param(g, 0.0).coords(), identity(h1).coords()) == 0.0);

  const GroupPoint z(h1, {0.0, 0.0, 1.0});
  CHECK(one_param(z, 0.75).coords() == std::vector<double>{0.0, 0.0, 0.75});

  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const GroupPoint x = random_point(h1, rng);
    const GroupPoint half = one_param(x, 0.5);
    worst = std::max(worst, max_coord_diff(group_mul(half, half).coords(), x.coords()));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("hausdorff dimension") {
  CHECK(hausdorff_dimension(*heisenberg_algebra(1)) == 4);
  CHECK(hausdorff_dimension(*filiform_algebra(1)) == 2);
  CHECK(hausdorff_dimension(*filiform_algebra(3)) == 7);
}

TEST_CASE("commutators of random points have no horizontal part") {
  auto h1 = heisenberg_algebra(1);
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const GroupPoint g = random_point(h1, rng);
    const GroupPoint h = random_point(h1, rng);
    const GroupPoint comm =
        group_mul(group_mul(group_mul(g, h), group_inv(g)), group_inv(h));
    CHECK(std::abs(comm.coords()[0]) < 1e-12);
    CHECK(std::abs(comm.coords()[1]) < 1e-12);
  }
}

TEST_CASE("descriptor round trip") {
  for (const char* name : {"heisenberg:2", "filiform:4"}) {
    auto alg = algebra_by_name(name);
    auto copy = GradedLieAlgebra::from_descriptor(alg->descriptor());
    CHECK(copy->same_as(*alg));
    std::mt19937_64 rng(5);
    const GroupPoint a = random_point(alg, rng);
    const GroupPoint b = random_point(alg, rng);
    const AlgebraVector via_copy =
        bch_product(AlgebraVector(copy, a.coords()), AlgebraVector(copy, b.coords()));
    CHECK(max_coord_diff(via_copy.c, bch_product(a.v, b.v).c) == 0.0);
  }
}

TEST_CASE("dimension mismatch rejected") {
  auto h1 = heisenberg_algebra(1);
  auto h2 = heisenberg_algebra(2);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(bch_product(random_point(h1, rng).v, random_point(h2, rng).v), DomainError);
  CHECK_THROWS_AS(GroupPoint(h1, {1.0, 2.0}), DomainError);
}

TEST_CASE("multi-index weighted degree") {
  auto h1 = heisenberg_algebra(1);
  MultiIndex z;
  z.e = {0, 0, 1};
  CHECK(z.weighted_degree(*h1) == 2);
  MultiIndex xy;
  xy.e = {1, 1, 0};
  CHECK(xy.weighted_degree(*h1) == 2);
  MultiIndex zero;
  zero.e = {0, 0, 0};
  CHECK(zero.weighted_degree(*h1) == 0);
  CHECK(xy.eval({2.0, 3.0, 5.0}) == 6.0);
}
