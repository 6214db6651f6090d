#include "carnotlab/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "carnotlab/errors.hpp"
#include "carnotlab/util.hpp"

namespace carnotlab {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
}

double heat_kernel(double t, double x) {
  if (!(t > 0)) throw DomainError("heat_kernel: t must be positive");
  return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(M_PI * t));
}

double heat_kernel_dt(double t, double x) {
  if (!(t > 0)) throw DomainError("heat_kernel_dt: t must be positive");
  return (x * x - 2.0 * t) * std::exp(-x * x / (4.0 * t)) /
         (8.0 * kSqrtPi * std::pow(t, 2.5));
}

double heat_kernel_dx(double t, double x) {
  if (!(t > 0)) throw DomainError("heat_kernel_dx: t must be positive");
  return -x * std::exp(-x * x / (4.0 * t)) / (4.0 * kSqrtPi * std::pow(t, 1.5));
}

Kernel1D heat_kernel_1d(double t) {
  if (!(t > 0)) throw DomainError("heat_kernel_1d: t must be positive");
  return {[t](double x) { return heat_kernel(t, x); }, 16.0 * std::sqrt(2.0 * t)};
}

Kernel1D heat_kernel_dt_1d(double t) {
  if (!(t > 0)) throw DomainError("heat_kernel_dt_1d: t must be positive");
  return {[t](double x) { return heat_kernel_dt(t, x); }, 16.0 * std::sqrt(2.0 * t)};
}

double integrate_simpson(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (n < 2) n = 2;
  if (n % 2) ++n;
  const double h = (hi - lo) / n;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(lo + h * i) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

HeatIdentityReport heat_identities(double t, double rho) {
  if (!(t > 0)) throw DomainError("heat_identities: t must be positive");
  if (!(rho > 1)) throw DomainError("heat_identities: rho must exceed 1");
  HeatIdentityReport r;
  r.t = t;
  r.rho = rho;
  const double U = 18.0 * std::sqrt(2.0 * t);
  const int n = 4000;
  r.mass = integrate_simpson([t](double x) { return heat_kernel(t, x); }, -U, U, n);
  // |d/dx h_t| is even with a kink at 0; |d/dt h_t| has kinks at +-sqrt(2t).
  // Integrate the smooth pieces separately so Simpson keeps its order.
  r.dx_l1 = 2.0 * integrate_simpson([t](double x) { return -heat_kernel_dx(t, x); }, 0.0, U, n);
  r.dx_l1_expected = 1.0 / std::sqrt(M_PI * t);
  const double kink = std::sqrt(2.0 * t);
  r.dt_l1_times_t =
      t * 2.0 *
      (integrate_simpson([t](double x) { return -heat_kernel_dt(t, x); }, 0.0, kink, n) +
       integrate_simpson([t](double x) { return heat_kernel_dt(t, x); }, kink, U, n));
  // substitute x = u^2 to remove the root singularity of x^{1/rho} at 0
  r.moment = integrate_simpson(
      [t, rho](double u) {
        return 2.0 * std::pow(u, 2.0 / rho + 1.0) * heat_kernel(t, u * u);
      },
      0.0, std::sqrt(U), n);
  // Gaussian scaling x ~ sqrt(t) puts the moment at (4t)^{1/(2 rho)}
  r.moment_expected =
      std::tgamma(0.5 + 0.5 / rho) * std::pow(4.0 * t, 0.5 / rho) / (2.0 * kSqrtPi);
  const double s = t;
  double worst = 0.0;
  for (int i = -20; i <= 20; ++i) {
    const double x = 0.35 * i * std::sqrt(t + s);
    const double conv = integrate_simpson(
        [t, s, x](double u) { return heat_kernel(t, u) * heat_kernel(s, x - u); }, -U, U, n);
    worst = std::max(worst, std::abs(conv - heat_kernel(t + s, x)));
  }
  r.semigroup_err = worst;
  return r;
}

HorizontalGradient horizontal_gradient(const GridFunction& f, double h_dir) {
  if (f.arity() != 1) throw DomainError("horizontal_gradient: scalar input required");
  const AlgebraPtr alg = f.alg();
  const int k1 = alg->stratum_dim(1);
  double max_spacing = 0.0;
  for (double s : f.grid().spacing) max_spacing = std::max(max_spacing, s);
  if (h_dir <= 0.0) h_dir = max_spacing;

  HorizontalGradient out{GridFunction(alg, f.grid(), k1), h_dir,
                         h_dir < 0.999 * max_spacing};
  GridFunction& grad = out.field;

  std::vector<AlgebraVector> steps;
  for (int i = 1; i <= k1; ++i) {
    steps.push_back(basis_point(alg, 1, i, h_dir).v);
    steps.push_back(basis_point(alg, 1, i, -h_dir).v);
  }

  const double inv2h = 1.0 / (2.0 * h_dir);
  parallel_for(f.nodes(), [&](std::size_t b, std::size_t e) {
    for (std::size_t node = b; node < e; ++node) {
      const std::vector<double> p = f.grid().node_coords(node);
      AlgebraVector pv(alg, p);
      double* g = grad.node_values(node);
      for (int i = 0; i < k1; ++i) {
        const AlgebraVector fwd = bch_product(pv, steps[2 * i]);
        const AlgebraVector bwd = bch_product(pv, steps[2 * i + 1]);
        g[i] = (f.eval(fwd.c) - f.eval(bwd.c)) * inv2h;
      }
    }
  });
  return out;
}

namespace {

// Central vectors add under the group law, so g . v^{-u} is a translation
// of the coordinates by -u * w. Checked at the call sites below.
std::vector<double> central_direction(const GridFunction& f, const GroupPoint& v) {
  if (!v.alg()->same_as(*f.alg())) throw DomainError("vertical op: algebra mismatch");
  if (!is_central(*f.alg(), v.coords()))
    throw DomainError("vertical op: direction is not central (bracket test failed)");
  return v.coords();
}

}  // namespace

GridFunction vertical_convolve(const Kernel1D& psi, const GridFunction& f, const GroupPoint& v,
                               int quad_points) {
  const std::vector<double> w = central_direction(f, v);
  if (!(psi.halfwidth > 0)) throw DomainError("vertical_convolve: kernel halfwidth must be positive");
  if (quad_points < 3) quad_points = 3;
  if (quad_points % 2 == 0) ++quad_points;

  // Simpson nodes and weights on [-U, U]
  const int n = quad_points - 1;
  const double U = psi.halfwidth;
  const double h = 2.0 * U / n;
  std::vector<double> qu(quad_points), qw(quad_points);
  for (int i = 0; i <= n; ++i) {
    qu[i] = -U + h * i;
    qw[i] = (i == 0 || i == n) ? h / 3.0 : ((i % 2) ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
    qw[i] *= psi.f(qu[i]);
  }

  GridFunction out(f.alg(), f.grid(), f.arity());
  const int arity = f.arity();
  parallel_for(f.nodes(), [&](std::size_t b, std::size_t e) {
    std::vector<double> c(f.grid().dim());
    std::vector<double> tmp(arity);
    for (std::size_t node = b; node < e; ++node) {
      const std::vector<double> p = f.grid().node_coords(node);
      double* o = out.node_values(node);
      for (int i = 0; i < quad_points; ++i) {
        if (qw[i] == 0.0) continue;
        for (std::size_t d = 0; d < c.size(); ++d) c[d] = p[d] - qu[i] * w[d];
        f.eval_all(c, tmp.data());
        for (int j = 0; j < arity; ++j) o[j] += qw[i] * tmp[j];
      }
    }
  });
  return out;
}

GridFunction g_function(const GridFunction& f, const GroupPoint& v, double p,
                        const std::vector<double>& t_grid, int quad_points) {
  if (!(p >= 1.0)) throw DomainError("g_function: p must be >= 1");
  if (t_grid.empty()) throw DomainError("g_function: empty t grid");
  central_direction(f, v);
  const std::vector<double> dt = log_grid_weights(t_grid);

  GridFunction acc(f.alg(), f.grid(), 1);
  const int arity = f.arity();
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const double t = t_grid[j];
    const GridFunction conv = vertical_convolve(heat_kernel_dt_1d(t), f, v, quad_points);
    const double factor = std::pow(t, p - 1.0) * dt[j];
    for (std::size_t node = 0; node < f.nodes(); ++node) {
      double s = 0.0;
      const double* cv = conv.node_values(node);
      for (int m = 0; m < arity; ++m) s += cv[m] * cv[m];
      acc.node_values(node)[0] += factor * std::pow(std::sqrt(s), p);
    }
  }
  for (std::size_t node = 0; node < acc.nodes(); ++node)
    acc.node_values(node)[0] = std::pow(acc.node_values(node)[0], 1.0 / p);
  return acc;
}

double finite_difference_eval(const std::function<double(const GroupPoint&)>& f,
                              const GroupPoint& x, const GroupPoint& g, int n) {
  if (n < 1) throw DomainError("finite_difference: n must be >= 1");
  double acc = 0.0;
  GroupPoint xg = x;
  for (int j = 0; j <= n; ++j) {
    const double sign = ((n - j) % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binomial(n, j) * f(xg);
    if (j < n) xg = group_mul(xg, g);
  }
  return acc;
}

GridFunction finite_difference(const GridFunction& f, const GroupPoint& g, int n) {
  if (n < 1) throw DomainError("finite_difference: n must be >= 1");
  if (!g.alg()->same_as(*f.alg())) throw DomainError("finite_difference: algebra mismatch");
  GridFunction out(f.alg(), f.grid(), f.arity());
  const int arity = f.arity();
  parallel_for(f.nodes(), [&](std::size_t b, std::size_t e) {
    std::vector<double> tmp(arity);
    for (std::size_t node = b; node < e; ++node) {
      GroupPoint xg(f.alg(), f.grid().node_coords(node));
      double* o = out.node_values(node);
      for (int j = 0; j <= n; ++j) {
        const double c = (((n - j) % 2 == 0) ? 1.0 : -1.0) * binomial(n, j);
        f.eval_all(xg.coords(), tmp.data());
        for (int m = 0; m < arity; ++m) o[m] += c * tmp[m];
        if (j < n) xg = group_mul(xg, g);
      }
    }
  });
  return out;
}

double StepFunction::total_mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * (breaks[i + 1] - breaks[i]);
  return m;
}

namespace {

void validate_step_function(const StepFunction& f) {
  if (f.breaks.size() != f.values.size() + 1 || f.values.empty())
    throw DomainError("hardy_check: malformed step function");
  if (f.breaks.front() < 0.0) throw DomainError("hardy_check: support must lie in (0, infinity)");
  for (std::size_t i = 0; i + 1 < f.breaks.size(); ++i)
    if (!(f.breaks[i] < f.breaks[i + 1])) throw DomainError("hardy_check: breaks must increase");
  for (double v : f.values)
    if (v < 0.0 || !std::isfinite(v)) throw DomainError("hardy_check: values must be nonnegative");
}

// integral of x^a over [lo, hi], requiring convergence at the endpoints used
double power_integral(double a, double lo, double hi) {
  if (a == -1.0) return std::log(hi / lo);
  return (std::pow(hi, a + 1.0) - std::pow(lo, a + 1.0)) / (a + 1.0);
}

}  // namespace

HardyReport hardy_check(const StepFunction& f, double nu, double p, HardyForm form) {
  validate_step_function(f);
  if (!(p >= 1.0)) throw DomainError("hardy_check: p must be >= 1");
  if (form == HardyForm::first && !(nu > 1.0 / p))
    throw DomainError("hardy_check: first form requires nu > 1/p");
  if (form == HardyForm::second && !(nu > -1.0 / p))
    throw DomainError("hardy_check: second form requires nu > -1/p");

  HardyReport rep;
  rep.constant = (form == HardyForm::first) ? 1.0 / (nu - 1.0 / p) : 1.0 / (nu + 1.0 / p);

  const std::size_t m = f.values.size();
  const int sub = 2000;
  double lhs_p = 0.0;
  double rhs_p = 0.0;

  if (form == HardyForm::first) {
    // C(x) = integral of f over (0, x)
    double C = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double lo = f.breaks[i], hi = f.breaks[i + 1], v = f.values[i];
      const double C0 = C;
      lhs_p += integrate_simpson(
          [&](double x) {
            return std::pow(std::pow(x, -nu) * std::max(0.0, C0 + v * (x - lo)), p);
          },
          lo, hi, sub);
      if (v > 0.0) rhs_p += std::pow(v, p) * power_integral((1.0 - nu) * p, lo, hi);
      C += v * (hi - lo);
    }
    // tail: cumulative mass is constant, integrand x^{-nu p} C^p
    if (C > 0.0) lhs_p += std::pow(C, p) * std::pow(f.breaks.back(), 1.0 - nu * p) / (nu * p - 1.0);
  } else {
    // T(t) = integral of f over (t, infinity); rounding may drive the linear
    // expression a hair below zero at piece ends
    double T = f.total_mass();
    if (T > 0.0 && f.breaks.front() > 0.0)
      lhs_p += std::pow(T, p) * power_integral(nu * p, 0.0, f.breaks.front());
    for (std::size_t i = 0; i < m; ++i) {
      const double lo = f.breaks[i], hi = f.breaks[i + 1], v = f.values[i];
      const double T0 = T;
      lhs_p += integrate_simpson(
          [&](double t) {
            return std::pow(std::pow(t, nu) * std::max(0.0, T0 - v * (t - lo)), p);
          },
          lo, hi, sub);
      if (v > 0.0) rhs_p += std::pow(v, p) * power_integral((1.0 + nu) * p, lo, hi);
      T -= v * (hi - lo);
    }
  }

  rep.lhs = std::pow(lhs_p, 1.0 / p);
  const double weighted = std::pow(rhs_p, 1.0 / p);
  rep.rhs = rep.constant * weighted;
  rep.ratio = (weighted > 0.0) ? rep.lhs / weighted : 0.0;
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-9) + 1e-300;
  return rep;
}

}  // namespace carnotlab
