#ifndef CARNOTLAB_CALCULUS_HPP
#define CARNOTLAB_CALCULUS_HPP

#include <functional>
#include <vector>

#include "carnotlab/grid.hpp"

namespace carnotlab {

// Heat kernel on the real line and its derivatives, closed form.
double heat_kernel(double t, double x);
double heat_kernel_dt(double t, double x);
double heat_kernel_dx(double t, double x);

// One-dimensional kernel with an effective support half-width used by the
// convolution quadrature.
struct Kernel1D {
  std::function<double(double)> f;
  double halfwidth = 0.0;
};

Kernel1D heat_kernel_1d(double t);
Kernel1D heat_kernel_dt_1d(double t);

// Composite Simpson on [lo, hi] with n subintervals (n made even).
double integrate_simpson(const std::function<double(double)>& f, double lo, double hi, int n);

struct HeatIdentityReport {
  double t = 0.0;
  double mass = 0.0;              // integral of h_t
  double dx_l1 = 0.0;             // L1 norm of d/dx h_t
  double dx_l1_expected = 0.0;    // 1/sqrt(pi t)
  double dt_l1_times_t = 0.0;     // t * L1 norm of d/dt h_t
  double moment = 0.0;            // integral over (0,inf) of x^{1/rho} h_t
  double moment_expected = 0.0;   // Gamma(1/2 + 1/(2 rho)) (4t)^{1/rho} / (2 sqrt(pi))
  double rho = 2.0;
  double semigroup_err = 0.0;     // max_x |(h_t * h_s)(x) - h_{t+s}(x)|, s = t
};

HeatIdentityReport heat_identities(double t, double rho = 2.0);

// Derivative of f along the left-invariant extension of each stratum-1 basis
// vector, by central differences of step h_dir along p . exp(+-h X_{1,i}),
// interpolating f multilinearly. Output has arity k_1.
struct HorizontalGradient {
  GridFunction field;
  double h_dir = 0.0;
  bool step_below_grid = false;  // h_dir finer than the grid can resolve
};

HorizontalGradient horizontal_gradient(const GridFunction& f, double h_dir = 0.0);

// Group convolution with a measure on the central one-parameter subgroup
// through v: (psi * f)(g) = integral of psi(u) f(g . v^{-u}) du. Rejects
// non-central v.
GridFunction vertical_convolve(const Kernel1D& psi, const GridFunction& f, const GroupPoint& v,
                               int quad_points = 257);

// Littlewood-Paley square function along v built from time derivatives of
// heat convolutions, discretized over the logarithmic t_grid:
// (sum over t of t^{p-1} |(dh_t * f)(x)|^p dt)^{1/p}.
GridFunction g_function(const GridFunction& f, const GroupPoint& v, double p,
                        const std::vector<double>& t_grid, int quad_points = 257);

// Iterated binomial difference sum_{j=0}^n (-1)^{n-j} C(n,j) F(x g^j).
double finite_difference_eval(const std::function<double(const GroupPoint&)>& f,
                              const GroupPoint& x, const GroupPoint& g, int n);
GridFunction finite_difference(const GridFunction& f, const GroupPoint& g, int n);

// Nonnegative piecewise-constant function on (0, infinity):
// value[i] on (breaks[i], breaks[i+1]), zero outside [breaks.front(), breaks.back()].
struct StepFunction {
  std::vector<double> breaks;
  std::vector<double> values;

  double total_mass() const;
};

enum class HardyForm { first, second };

struct HardyReport {
  double lhs = 0.0;
  double rhs = 0.0;       // constant * weighted norm
  double constant = 0.0;  // 1/(nu - 1/p) or 1/(nu + 1/p)
  double ratio = 0.0;     // lhs / weighted norm (0 when both vanish)
  bool holds = false;
};

HardyReport hardy_check(const StepFunction& f, double nu, double p, HardyForm form);

}  // namespace carnotlab

#endif
