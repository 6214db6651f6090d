#ifndef CARNOTLAB_METRICS_HPP
#define CARNOTLAB_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "carnotlab/algebra.hpp"

namespace carnotlab {

// Homogeneous quasi-norm: N(dilate(lambda, g)) = lambda N(g), N(g) = 0 iff
// g = e, N(inv g) = N(g). Two variants: the Koranyi-type fourth-root norm on
// step <= 2 groups (with a fixed constant kappa = 16 so reported values are
// reproducible) and the stratified power sum otherwise.
enum class NormVariant { koranyi, power_sum };

class HomogeneousNorm {
public:
  explicit HomogeneousNorm(AlgebraPtr alg);
  HomogeneousNorm(AlgebraPtr alg, NormVariant variant);

  double operator()(const GroupPoint& g) const;
  double eval_coords(const std::vector<double>& c) const;
  NormVariant variant() const { return variant_; }
  const AlgebraPtr& alg() const { return alg_; }

  // Half-width of the bounding box of the radius-r ball, per coordinate.
  std::vector<double> ball_box_halfwidths(double r) const;

  static constexpr double kKoranyiKappa = 16.0;

private:
  AlgebraPtr alg_;
  NormVariant variant_;
};

double homogeneous_norm(const GroupPoint& g);
double quasi_distance(const GroupPoint& g, const GroupPoint& h);

// Weighted point cloud inside a quasi-norm ball. Weights are
// (bounding box volume) / (proposal count), so their sum estimates the Haar
// measure of the ball. Haar measure is Lebesgue in exponential coordinates.
struct BallSample {
  AlgebraPtr alg;
  std::vector<double> center;
  double radius = 0.0;
  std::uint64_t seed = 0;
  int dim = 0;
  std::vector<double> coords;  // size() * dim, row-major
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return coords.data() + i * dim; }
  double weight_sum() const;

  // Same cloud moved to a new center and radius: p' = c' . dilate(r'/r, c^-1 p),
  // weights scaled by (r'/r)^{n_h}. Keeps quadrature paired across radii.
  BallSample transported(const GroupPoint& new_center, double new_radius) const;
};

// Rejection sampling over the bounding box of the norm ball; deterministic
// for a fixed seed. `count` is the number of proposals; accepted points
// carry weight box_volume / count. Throws GuardError when nothing lands in
// the ball.
BallSample ball_sample(const GroupPoint& center, double r, std::size_t count, std::uint64_t seed,
                       NormVariant variant);
BallSample ball_sample(const GroupPoint& center, double r, std::size_t count, std::uint64_t seed);

void write_ball_sample_csv(const BallSample& s, std::ostream& os);
void write_ball_sample_binary(const BallSample& s, const std::string& path);
BallSample read_ball_sample_binary(const AlgebraPtr& alg, const std::string& path);

}  // namespace carnotlab

#endif
