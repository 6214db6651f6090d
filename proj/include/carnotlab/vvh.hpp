#ifndef CARNOTLAB_VVH_HPP
#define CARNOTLAB_VVH_HPP

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "carnotlab/cayley.hpp"
#include "carnotlab/grid.hpp"

namespace carnotlab {

struct VvhReport {
  double lhs = 0.0;
  std::optional<double> rhs;  // absent for lhs-only functionals
  double ratio = 0.0;         // lhs/rhs; 0 when 0/0, +inf when rhs = 0 < lhs
  std::map<std::string, double> params;
};

double safe_ratio(double lhs, double rhs);

// Vertical difference quotients along the central one-parameter subgroup
// v^t against the horizontal gradient:
//   lhs = (sum_t [int (|f(h v^t)-f(h)| / t^{1/rho})^p dmu]^{M/p} dt/t)^{1/M},
//   rhs = (int |grad f|_{l2}^p dmu)^{1/p},  M = max(p, q).
// The h-integral runs over the grid box enlarged along v so translated mass
// is not missed.
VvhReport continuous_vvh(const GridFunction& f, const GroupPoint& v, double rho, double p,
                         double q, const std::vector<double>& t_grid);

// Fractional version with iterated differences:
//   lhs = (sum_r [int (r^{-alpha} |Delta^n_{dilate(r,v)} f|)^p dmu]^{2/p} dr/r)^{1/2}.
// Requires v in exp(V_{floor(alpha/n)+1} + ... + V_s); rhs = |grad f|_{L^p}
// only when alpha = 1. With restrict_to_support the h-integral keeps only
// points whose whole difference stencil stays inside the grid box, treating
// the box as the function's domain (the polynomial-annihilation regime);
// otherwise f is zero-extended and the region is enlarged to cover every
// shifted stencil.
VvhReport fractional_vvh(const GridFunction& f, const GroupPoint& v, double alpha, int n,
                         double p, const std::vector<double>& r_grid,
                         bool restrict_to_support = false);

// Finitely represented map from the discrete group to R^arity. Points
// without an explicit value take the default; with no default, evaluation
// at a missing point is a domain error naming the point.
class DiscreteFunction {
public:
  explicit DiscreteFunction(int arity,
                            std::optional<std::vector<double>> default_value = std::nullopt);

  int arity() const { return arity_; }
  void set(const IntWord& g, std::vector<double> v);
  const std::vector<double>& at(const IntWord& g) const;
  bool has_default() const { return default_.has_value(); }
  const std::vector<double>& default_value() const;
  const std::unordered_map<IntWord, std::vector<double>, IntWordHash>& table() const {
    return values_;
  }
  // Points whose value differs from the default (all points when no default).
  std::vector<IntWord> support() const;
  DiscreteFunction scaled(double lambda) const;

private:
  int arity_ = 1;
  std::optional<std::vector<double>> default_;
  std::unordered_map<IntWord, std::vector<double>, IntWordHash> values_;
};

std::string format_word(const IntWord& g);

// Exact discrete functional with v = c and s = 2:
//   lhs = (sum_{k=1}^{n^2} k^{-1-M/2} (sum_{x in B_n} |f(x c^k)-f(x)|^p)^{M/p})^{1/M}
//   rhs = (sum_{x in B_{6n}} sum_{a in S} |f(xa)-f(x)|^p)^{1/p}.
VvhReport discrete_vvh(const DiscreteFunction& f, const CayleyBall& ball, int n, double p,
                       double q);

struct PoincareReport {
  double lhs = 0.0;
  double rhs = 0.0;       // constant * gradient term
  double constant = 0.0;  // (2n)^p |B_2n| (local) or n^p |B_n| (global)
  double gradient_term = 0.0;
  bool holds = false;
};

// sum_{x,y in B_n} |f(x)-f(y)|^p <= (2n)^p |B_2n| sum_{x in B_3n, a} |f(xa)-f(x)|^p.
PoincareReport poincare_local_check(const DiscreteFunction& f, const CayleyBall& ball, int n,
                                    double p);

// sum_{x, z in B_n} |f(xz)-f(x)|^p <= n^p |B_n| sum_{x, a} |f(xa)-f(x)|^p
// for finitely supported f, all sums over the whole group.
PoincareReport poincare_global_check(const DiscreteFunction& f, const CayleyBall& ball, int n,
                                     double p);

// One VvhReport as a single JSON line; batches become JSON-lines files.
std::string vvh_report_json_line(const VvhReport& rep);
void write_vvh_reports_csv(const std::vector<VvhReport>& reports, std::ostream& os);

struct FamilySpec {
  std::string name;  // random-sparse | coordinate-z | bump
  int size = 1;
  std::uint64_t seed = 0;
  int n = 2;
  double p = 2.0;
  double q = 2.0;
  double density = 0.1;  // random-sparse: fraction of B_n carrying a value

  // config document: {"name":..., "size":..., "seed":..., "n":..., "p":...,
  // "q":..., "density":...}; unknown keys are rejected
  static FamilySpec from_json_text(const std::string& text);
};

struct EmpiricalConstant {
  double kappa_hat = 0.0;
  std::vector<double> ratios;  // included ratios only
  int excluded = 0;            // 0/0 members of the family
};

// Max lhs/rhs of discrete_vvh over a generated family of test functions.
EmpiricalConstant empirical_vvh_constant(const CayleyBall& ball, const FamilySpec& spec);

}  // namespace carnotlab

#endif
