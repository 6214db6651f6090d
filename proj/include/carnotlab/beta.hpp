#ifndef CARNOTLAB_BETA_HPP
#define CARNOTLAB_BETA_HPP

#include <functional>
#include <vector>

#include "carnotlab/algebra.hpp"
#include "carnotlab/metrics.hpp"

namespace carnotlab {

using PointFn = std::function<double(const GroupPoint&)>;

// All multi-indices of weighted degree <= d, in graded lexicographic order
// (degree first, then exponent vector), deterministic.
std::vector<MultiIndex> monomial_basis(const GradedLieAlgebra& alg, int d);

// Polynomial of weighted degree <= d in the rescaled centered monomials
// u^gamma with u = dilate(1/r, x^{-1} p). The rescaling keeps the Gram
// matrix of a ball sample independent of r.
class WeightedPolynomial {
public:
  WeightedPolynomial(GroupPoint center, double scale, int degree,
                     std::vector<MultiIndex> basis, std::vector<double> coeffs);

  const GroupPoint& center() const { return center_; }
  double scale() const { return scale_; }
  int degree() const { return degree_; }
  const std::vector<MultiIndex>& basis() const { return basis_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  double operator()(const GroupPoint& p) const;
  double eval_coords(const std::vector<double>& coords) const;

private:
  GroupPoint center_;
  double scale_ = 1.0;
  int degree_ = 0;
  std::vector<MultiIndex> basis_;
  std::vector<double> coeffs_;
};

// Weighted least-squares fit of f over the sample onto the degree-<= d
// rescaled basis. With d = 0 this is the weighted sample mean. Throws
// DomainError when the Gram matrix is too ill-conditioned (fewer sample
// points than basis elements, degenerate geometry).
WeightedPolynomial local_projection(const PointFn& f, const GroupPoint& x, double r, int d,
                                    const BallSample& sample,
                                    double condition_guard = 1e10);

struct BetaReport {
  std::vector<double> center;
  double radius = 0.0;
  int degree = 0;
  double q = 1.0;
  double beta = 0.0;
  std::size_t quadrature_count = 0;
  std::uint64_t seed = 0;
  double stderr_estimate = 0.0;
};

// beta = (weighted mean of |f - A^d_{x,r} f|^q over the sample)^{1/q}.
BetaReport beta_number(const PointFn& f, const GroupPoint& x, double r, int d, double q,
                       const BallSample& sample);

// (sum over r of [r^{-alpha} beta_{f,d,q}(B_r(x))]^2 dr/r)^{1/2} with the
// unit-ball sample transported to each radius (paired quadrature).
double dorronsoro_gfn(const PointFn& f, const GroupPoint& x, int d, double alpha, double q,
                      const std::vector<double>& r_grid, const BallSample& unit_sample);

struct TaylorCoefficients {
  std::vector<MultiIndex> basis;
  std::vector<double> radii;
  // per_radius[j][g]: coefficient of the gamma-th monomial at radii[j],
  // normalized so it estimates the r -> 0 limit (coefficient of y^gamma).
  std::vector<std::vector<double>> per_radius;
  std::vector<double> extrapolated;  // Richardson limit per basis element
  std::vector<bool> converged;
};

// Projection coefficients along a decreasing radius sequence with a
// Richardson extrapolation of each coefficient, using the expected
// O(r^{d+1-|gamma|}) convergence rate.
TaylorCoefficients taylor_coefficients(const PointFn& f, const GroupPoint& x, int d,
                                       const std::vector<double>& r_sequence,
                                       const BallSample& unit_sample);

void write_beta_reports_csv(const std::vector<BetaReport>& reports, std::ostream& os);

}  // namespace carnotlab

#endif
