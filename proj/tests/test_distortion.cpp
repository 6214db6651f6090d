#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "carnotlab/distortion.hpp"
#include "carnotlab/errors.hpp"
#include "carnotlab/vvh.hpp"

using namespace carnotlab;

namespace {

FiniteMetric path_metric(int n) {
  std::vector<std::string> labels;
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    labels.push_back("p" + std::to_string(i));
    for (int j = 0; j < n; ++j) d(i, j) = std::abs(i - j);
  }
  return FiniteMetric(std::move(labels), std::move(d));
}

FiniteMetric cycle4_metric() {
  Eigen::MatrixXd d(4, 4);
  d << 0, 1, 2, 1,
       1, 0, 1, 2,
       2, 1, 0, 1,
       1, 2, 1, 0;
  return FiniteMetric({"c0", "c1", "c2", "c3"}, std::move(d));
}

FiniteMetric random_snowflake_metric(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(3));
  for (auto& p : pts)
    for (double& x : p) x = unif(rng);
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      d(i, j) = std::pow(std::sqrt(s), 0.8);
    }
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = "r" + std::to_string(i);
  return FiniteMetric(std::move(labels), std::move(d));
}

}  // namespace

TEST_CASE("finite metric validation") {
  CHECK_NOTHROW(path_metric(4));

  Eigen::MatrixXd bad = path_metric(3).table();
  bad(0, 2) = bad(2, 0) = 2.0 + 1e-6;  // violates the triangle through p1
  CHECK_THROWS_AS(FiniteMetric({"a", "b", "c"}, bad), DomainError);

  Eigen::MatrixXd asym = path_metric(3).table();
  asym(0, 1) = 1.5;
  CHECK_THROWS_AS(FiniteMetric({"a", "b", "c"}, asym), DomainError);

  Eigen::MatrixXd neg = path_metric(3).table();
  neg(0, 1) = neg(1, 0) = -1.0;
  CHECK_THROWS_AS(FiniteMetric({"a", "b", "c"}, neg), DomainError);

  Eigen::MatrixXd coincident = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(FiniteMetric({"a", "b"}, coincident), DomainError);

  // a small perturbation within tolerance passes
  Eigen::MatrixXd ok = path_metric(3).table();
  ok(0, 2) = ok(2, 0) = 2.0 + 1e-10;
  CHECK_NOTHROW(FiniteMetric({"a", "b", "c"}, ok));
}

TEST_CASE("csv round trip and snowflake") {
  const FiniteMetric m = cycle4_metric();
  std::stringstream ss;
  m.to_csv(ss);
  const FiniteMetric back = FiniteMetric::from_csv(ss);
  CHECK(back.size() == 4);
  CHECK(back.dist(0, 2) == 2.0);

  const FiniteMetric snow = m.snowflake(0.5);
  CHECK(snow.dist(0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(m.snowflake(1.5), DomainError);
}

TEST_CASE("metric from enumerated balls") {
  DiscreteHeisenberg G(1);
  const CayleyBall ball = bfs_ball(G, 4);
  const FiniteMetric m = metric_from_ball(ball, 1);
  CHECK(m.size() == 5);
  // identify the generators among the sorted labels via distances:
  // every pair of distinct non-identity points lies at distance 2
  int zeros = 0, ones = 0, twos = 0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      if (m.dist(i, j) == 1.0) ++ones;
      else if (m.dist(i, j) == 2.0) ++twos;
      else ++zeros;
    }
  CHECK(ones == 4);  // identity to each generator
  CHECK(twos == 6);  // generator pairs, including inverse pairs
  CHECK(zeros == 0);

  CHECK_THROWS_AS(metric_from_ball(ball, 3), GuardError);
}

TEST_CASE("embedding distortion") {
  const FiniteMetric path = path_metric(4);
  std::vector<std::vector<double>> line = {{0.0}, {1.0}, {2.0}, {3.0}};
  CHECK(embedding_distortion(path, line, 2.0) == doctest::Approx(1.0).epsilon(1e-14));

  const FiniteMetric c4 = cycle4_metric();
  std::vector<std::vector<double>> square = {
      {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}};
  CHECK(embedding_distortion(c4, square, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // distortion is scale invariant
  std::vector<std::vector<double>> scaled = square;
  for (auto& p : scaled)
    for (double& x : p) x *= 17.0;
  CHECK(embedding_distortion(c4, scaled, 2.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  std::vector<std::vector<double>> collapsed = {{0.0}, {0.0}, {1.0}, {2.0}};
  CHECK(std::isinf(embedding_distortion(path, collapsed, 2.0)));
}

TEST_CASE("exact euclidean distortion of paths and cycles") {
  const C2Result path = exact_c2(path_metric(5), 1e-4);
  CHECK(path.converged);
  CHECK(path.c2 == doctest::Approx(1.0).epsilon(2e-4));

  // oracle for the 4-cycle: the diagonals force
  // D^2 >= (d13^2 + d24^2) / max embedding of the four unit sides, and the
  // parallelogram law in Hilbert space gives
  // |v1-v3|^2 + |v2-v4|^2 <= sum of the four side lengths squared, so
  // D >= sqrt(8/4) = sqrt(2); the unit square achieves it.
  const double lower = std::sqrt((2.0 * 2.0 + 2.0 * 2.0) / 4.0);
  CHECK(lower == doctest::Approx(std::sqrt(2.0)));
  const FiniteMetric c4 = cycle4_metric();
  std::vector<std::vector<double>> square = {
      {0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}};
  CHECK(embedding_distortion(c4, square, 2.0) == doctest::Approx(std::sqrt(2.0)));

  const C2Result cyc = exact_c2(c4, 1e-4);
  CHECK(cyc.c2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));

  // witness consistency
  std::vector<std::vector<double>> images;
  for (Eigen::Index i = 0; i < cyc.vectors.rows(); ++i) {
    images.emplace_back(cyc.vectors.cols());
    for (Eigen::Index j = 0; j < cyc.vectors.cols(); ++j) images.back()[j] = cyc.vectors(i, j);
  }
  CHECK(embedding_distortion(c4, images, 2.0) <= cyc.c2 * (1.0 + 10.0 * 1e-4));
}

TEST_CASE("c2 monotone under subspaces and bounded by explicit embeddings") {
  std::mt19937_64 rng(107);
  const FiniteMetric m = random_snowflake_metric(9, rng);
  const double tol = 1e-3;
  const C2Result full = exact_c2(m, tol);
  CHECK(full.c2 >= 1.0 - tol);

  const FiniteMetric sub = m.submetric({0, 2, 3, 5, 7});
  const C2Result part = exact_c2(sub, tol);
  CHECK(part.c2 <= full.c2 * (1.0 + 10.0 * tol));

  // witness at the computed distortion
  std::vector<std::vector<double>> images;
  for (Eigen::Index i = 0; i < full.vectors.rows(); ++i) {
    images.emplace_back(full.vectors.cols());
    for (Eigen::Index j = 0; j < full.vectors.cols(); ++j) images.back()[j] = full.vectors(i, j);
  }
  CHECK(embedding_distortion(m, images, 2.0) <= full.c2 * (1.0 + 10.0 * tol));

  CHECK_THROWS_AS(exact_c2(m, 0.0), DomainError);
  CHECK_THROWS_AS(exact_c2(m, 1e-3, 5), GuardError);
}

TEST_CASE("distortion of small word-metric balls grows") {
  DiscreteHeisenberg G(1);
  const CayleyBall ball = bfs_ball(G, 4);
  const double tol = 1e-3;
  const C2Result b1 = exact_c2(metric_from_ball(ball, 1), tol);
  const C2Result b2 = exact_c2(metric_from_ball(ball, 2), tol);
  CHECK(b1.c2 > 1.05);  // the 4-star with pairwise distance 2 is not flat
  CHECK(b2.c2 >= b1.c2 - tol);
}

TEST_CASE("uniform convexity constants") {
  CHECK(uniform_convexity_constant(2.0, 2.0) == doctest::Approx(1.0));
  CHECK(uniform_convexity_constant(1.5, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(uniform_convexity_constant(4.0, 4.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(uniform_convexity_constant(1.5, 3.0), DomainError);
  CHECK_THROWS_AS(uniform_convexity_constant(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(uniform_convexity_constant(4.0, 2.0), DomainError);
}

TEST_CASE("certificate lower bounds") {
  // growth shape: bound(n) tracks (log n)^{1/q} with a stable prefactor
  double lo = 1e300, hi = 0.0;
  double prev = 0.0;
  for (int n : {4, 8, 16, 32, 64}) {
    const DistortionCertificate cert =
        certificate_lower_bound(n, 2.0, 1.0, 1.0, 4, 2, 3.5, 4.0);
    CHECK(cert.lower_bound > prev);  // nondecreasing in n
    prev = cert.lower_bound;
    const double shape = cert.lower_bound / std::sqrt(std::log(n));
    lo = std::min(lo, shape);
    hi = std::max(hi, shape);
  }
  INFO("shape window [" << lo << ", " << hi << "]");
  CHECK(hi / lo < 1.25);

  // exact ball sizes override the growth model
  const DistortionCertificate model = certificate_lower_bound(2, 2.0, 1.0, 1.0, 4, 2, 4.0, 4.0);
  const DistortionCertificate exact = certificate_lower_bound(
      2, 2.0, 1.0, 1.0, 4, 2, 4.0, 4.0, kDiscreteEnlargement, std::make_pair(17ul, 2867ul));
  CHECK(model.exact_ball_ratio == false);
  CHECK(exact.exact_ball_ratio == true);
  CHECK(exact.ball_ratio == doctest::Approx(2867.0 / 17.0));

  CHECK_THROWS_AS(certificate_lower_bound(1, 2.0, 1.0, 1.0, 4, 2, 4.0, 4.0), DomainError);
  CHECK_THROWS_AS(certificate_lower_bound(4, 70.0, 1.0, 1.0, 4, 2, 4.0, 4.0), DomainError);
  CHECK_THROWS_AS(certificate_lower_bound(4, 2.0, 1.0, -1.0, 4, 2, 4.0, 4.0), DomainError);

  CHECK(model.to_json().find("lower_bound") != std::string::npos);
}

TEST_CASE("certificate sits below the exact distortion") {
  DiscreteHeisenberg G(1);
  const CayleyBall ball = bfs_ball(G, 13);
  FamilySpec spec{"random-sparse", 20, 2024, 2, 2.0, 2.0, 0.3};
  const EmpiricalConstant sweep = empirical_vvh_constant(ball, spec);
  REQUIRE(sweep.kappa_hat > 0.0);

  const VerticalProfile prof = vertical_profile(G, 4);
  double c1 = 1e300;
  for (int k = 1; k <= 4; ++k)
    c1 = std::min(c1, prof.lengths[k - 1] / std::sqrt(static_cast<double>(k)));

  const CayleyBall big = bfs_ball(G, 12);
  const auto sizes = std::make_pair(big.ball_size(2), big.ball_size(12));
  const DistortionCertificate cert = certificate_lower_bound(
      2, 2.0, 1.0, sweep.kappa_hat, 4, 2, c1, 4.0, kDiscreteEnlargement, sizes);

  const C2Result c2 = exact_c2(metric_from_ball(bfs_ball(G, 4), 2), 1e-3);
  INFO("certificate " << cert.lower_bound << " vs exact " << c2.c2);
  CHECK(cert.lower_bound <= c2.c2);
}
