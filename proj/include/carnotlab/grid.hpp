#ifndef CARNOTLAB_GRID_HPP
#define CARNOTLAB_GRID_HPP

#include <functional>
#include <string>
#include <vector>

#include "carnotlab/algebra.hpp"

namespace carnotlab {

// Uniform rectangular lattice in exponential coordinates.
struct Grid {
  std::vector<double> origin;   // coordinate of node (0,...,0)
  std::vector<double> spacing;  // per coordinate, > 0
  std::vector<int> shape;       // nodes per coordinate, >= 2

  int dim() const { return static_cast<int>(shape.size()); }
  std::size_t node_count() const;
  double cell_volume() const;
  std::vector<double> node_coords(std::size_t flat) const;
  double upper(int d) const { return origin[d] + spacing[d] * (shape[d] - 1); }

  static Grid centered_box(const std::vector<double>& halfwidths, const std::vector<int>& shape);
};

// Real- or vector-valued samples on a Grid; evaluation between nodes is
// multilinear with zero extension outside the box (the support box of the
// sampled function).
class GridFunction {
public:
  GridFunction(AlgebraPtr alg, Grid grid, int arity);

  static GridFunction sample(const AlgebraPtr& alg, const Grid& grid,
                             const std::function<double(const std::vector<double>&)>& f);
  static GridFunction sample_vector(
      const AlgebraPtr& alg, const Grid& grid, int arity,
      const std::function<void(const std::vector<double>&, double*)>& f);

  const AlgebraPtr& alg() const { return alg_; }
  const Grid& grid() const { return grid_; }
  int arity() const { return arity_; }
  std::size_t nodes() const { return grid_.node_count(); }

  double* node_values(std::size_t flat) { return values_.data() + flat * arity_; }
  const double* node_values(std::size_t flat) const { return values_.data() + flat * arity_; }

  // Multilinear interpolation of component `comp` at exponential coordinates c.
  double eval(const std::vector<double>& c, int comp = 0) const;
  void eval_all(const std::vector<double>& c, double* out) const;

  // Euclidean norm across components at a point.
  double eval_norm(const std::vector<double>& c) const;

  // sum over nodes of |f|^p * cell volume, then ^(1/p).
  double lp_norm(double p) const;

  std::vector<double>& raw() { return values_; }
  const std::vector<double>& raw() const { return values_; }

private:
  AlgebraPtr alg_;
  Grid grid_;
  int arity_ = 1;
  std::vector<double> values_;
};

void write_grid_function(const GridFunction& f, const std::string& path);
GridFunction read_grid_function(const AlgebraPtr& alg, const std::string& path);
// one row per node: coordinates then value components
void write_grid_function_csv(const GridFunction& f, std::ostream& os);

// Smooth compactly supported mollifier bump: exp(1 - 1/(1 - |c/R|^2)) inside
// the coordinate ball of radius R, zero outside.
double bump_function(const std::vector<double>& coords, double radius);

}  // namespace carnotlab

#endif
