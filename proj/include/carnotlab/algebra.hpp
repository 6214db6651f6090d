#ifndef CARNOTLAB_ALGEBRA_HPP
#define CARNOTLAB_ALGEBRA_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace carnotlab {

// Basis entry/coefficient pairs of a single Lie bracket value.
using SparseVec = std::vector<std::pair<int, double>>;

// One structure-constant entry: [basis a, basis b] = value (flat indices).
struct BracketTriple {
  int a = 0;
  int b = 0;
  SparseVec value;
};

// Stratified nilpotent Lie algebra given by strata dimensions and sparse
// structure constants on the graded basis X_{r,i}. Construction validates
// antisymmetry, the grading, the Jacobi identity, and that each stratum
// r+1 is spanned by brackets of stratum 1 with stratum r; invalid tables
// are rejected.
class GradedLieAlgebra {
public:
  GradedLieAlgebra(std::string name, std::vector<int> strata_dims,
                   const std::vector<BracketTriple>& table);

  const std::string& name() const { return name_; }
  int step() const { return static_cast<int>(strata_dims_.size()); }
  int dim() const { return dim_; }
  const std::vector<int>& strata_dims() const { return strata_dims_; }
  int stratum_dim(int r) const { return strata_dims_.at(r - 1); }

  // Flat index of basis vector X_{r,i}; r in 1..step, i in 1..k_r.
  int index(int r, int i) const;
  int stratum_of(int flat) const { return stratum_of_[flat]; }
  int weight_of(int flat) const { return stratum_of_[flat]; }

  const SparseVec& basis_bracket(int a, int b) const { return table_[a * dim_ + b]; }

  // Bilinear extension of the basis brackets.
  std::vector<double> bracket(const std::vector<double>& a, const std::vector<double>& b) const;

  int hausdorff_dimension() const;

  nlohmann::json descriptor() const;
  static std::shared_ptr<const GradedLieAlgebra> from_descriptor(const nlohmann::json& j);

  bool same_as(const GradedLieAlgebra& other) const;

private:
  std::string name_;
  std::vector<int> strata_dims_;
  int dim_ = 0;
  std::vector<int> offset_;      // offset_[r-1] = flat index of X_{r,1}
  std::vector<int> stratum_of_;  // flat index -> stratum
  std::vector<SparseVec> table_; // dense dim x dim table of sparse values

  void validate() const;
};

using AlgebraPtr = std::shared_ptr<const GradedLieAlgebra>;

// Element of the algebra in graded-basis coordinates. Identified with the
// group element exp(.) throughout.
struct AlgebraVector {
  AlgebraPtr alg;
  std::vector<double> c;

  AlgebraVector() = default;
  AlgebraVector(AlgebraPtr a, std::vector<double> coords);
  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }
};

// Group point in exponential coordinates; the identity is all zeros.
struct GroupPoint {
  AlgebraVector v;

  GroupPoint() = default;
  explicit GroupPoint(AlgebraVector w) : v(std::move(w)) {}
  GroupPoint(AlgebraPtr a, std::vector<double> coords) : v(std::move(a), std::move(coords)) {}
  const AlgebraPtr& alg() const { return v.alg; }
  const std::vector<double>& coords() const { return v.c; }
  std::vector<double>& coords() { return v.c; }
};

GroupPoint identity(const AlgebraPtr& alg);
GroupPoint basis_point(const AlgebraPtr& alg, int r, int i, double scale = 1.0);

// log(exp a . exp b) via the Dynkin commutator series, which terminates at
// bracket depth step() for nilpotent algebras.
AlgebraVector bch_product(const AlgebraVector& a, const AlgebraVector& b);

GroupPoint group_mul(const GroupPoint& g, const GroupPoint& h);
GroupPoint group_inv(const GroupPoint& g);

// Anisotropic dilation: stratum-r coordinates scale by lambda^r.
GroupPoint dilate(double lambda, const GroupPoint& g);
std::vector<double> dilate_coords(const GradedLieAlgebra& alg, double lambda,
                                  const std::vector<double>& c);

// One-parameter subgroup through g: exp(t log g).
GroupPoint one_param(const GroupPoint& g, double t);

int hausdorff_dimension(const GradedLieAlgebra& alg);

// True when [w, X] = 0 for every basis vector X, up to tol.
bool is_central(const GradedLieAlgebra& alg, const std::vector<double>& w, double tol = 1e-12);

// Smallest stratum with a nonzero coordinate (0 for the zero vector).
int lowest_stratum(const GradedLieAlgebra& alg, const std::vector<double>& w, double tol = 1e-12);

// Catalog.
AlgebraPtr heisenberg_algebra(int k);
AlgebraPtr filiform_algebra(int s);
// Parses "heisenberg:<k>" and "filiform:<s>".
AlgebraPtr algebra_by_name(const std::string& spec);

// Multi-index over the graded coordinates; the weighted degree counts each
// gamma_{r,i} with weight r.
struct MultiIndex {
  std::vector<int> e;  // exponent per flat basis index

  int weighted_degree(const GradedLieAlgebra& alg) const;
  int total_degree() const;
  double eval(const std::vector<double>& coords) const;
  bool operator==(const MultiIndex& o) const { return e == o.e; }
};

}  // namespace carnotlab

#endif
