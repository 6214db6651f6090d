#ifndef CARNOTLAB_DISTORTION_HPP
#define CARNOTLAB_DISTORTION_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "carnotlab/cayley.hpp"

namespace carnotlab {

// Finite metric space: labels plus a symmetric distance table with zero
// diagonal. Construction validates nonnegativity, symmetry, and the
// triangle inequality (violations beyond 1e-9 are rejected).
class FiniteMetric {
public:
  FiniteMetric(std::vector<std::string> labels, Eigen::MatrixXd distances);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  double dist(std::size_t i, std::size_t j) const { return d_(i, j); }
  const Eigen::MatrixXd& table() const { return d_; }

  FiniteMetric submetric(const std::vector<std::size_t>& indices) const;
  // Entry-wise d^{1-eps}; still a metric for 0 < 1-eps <= 1.
  FiniteMetric snowflake(double eps) const;

  void to_csv(std::ostream& os) const;
  static FiniteMetric from_csv(std::istream& is);

private:
  std::vector<std::string> labels_;
  Eigen::MatrixXd d_;
};

// Word metric restricted to B_n; exact because d_W(x,y) = |x^{-1} y| and the
// cache covers B_{2n}. Refuses when the cached radius is below 2n.
FiniteMetric metric_from_ball(const CayleyBall& ball, int n);

// Distortion of a given embedding: max expansion times max contraction in
// the l_p norm; +infinity when two points share an image.
double embedding_distortion(const FiniteMetric& M,
                            const std::vector<std::vector<double>>& images, double p_norm);

struct C2Result {
  double c2 = 1.0;
  Eigen::MatrixXd vectors;  // one embedding row per point, witness at c2
  double residual = 0.0;    // constraint violation of the witness Gram matrix
  int bisection_steps = 0;
  bool converged = false;
};

// Least Euclidean distortion of a finite metric by bisection over D, with
// each feasibility problem (exists Gram K >= 0 with
// d_ij^2 <= K_ii + K_jj - 2 K_ij <= D^2 d_ij^2) solved by alternating
// projections onto the semidefinite cone and the pairwise slabs.
C2Result exact_c2(const FiniteMetric& M, double tol, std::size_t size_guard = 150);

// Tabulated upper bound for the q-uniform-convexity constant of L_p with
// q = max(p, 2): 1/sqrt(p-1) for 1 < p <= 2 and 1 for p >= 2.
double uniform_convexity_constant(double p, double q);

struct DistortionCertificate {
  int n = 0;
  double q = 2.0;
  double K_q = 1.0;
  double kappa = 1.0;
  double c1 = 1.0;  // min over k of d_W(c^k)/k^{1/s}
  int s = 2;
  int n_h = 4;
  double generator_count = 4.0;
  double ball_ratio = 1.0;  // |B_{cn}|/|B_n|, exact or modeled as c^{n_h}
  bool exact_ball_ratio = false;
  double lower_bound = 0.0;

  std::string to_json() const;
};

// Lower bound on the Euclidean/q-convex distortion of B_n implied by the
// discrete functional: (sum_{k<=n^s} c1^q k^{q/s} / k^{1+q/s})^{1/q}
// divided by kappa * K_q * |S|^{1/q} * ball_ratio^{1/q}. kappa is an
// empirical input; only the (log n)^{1/q} growth shape is structural.
DistortionCertificate certificate_lower_bound(
    int n, double q, double K_q, double kappa, int n_h, int s, double c1,
    double generator_count, int enlargement = kDiscreteEnlargement,
    std::optional<std::pair<std::size_t, std::size_t>> exact_ball_sizes = std::nullopt);

}  // namespace carnotlab

#endif
