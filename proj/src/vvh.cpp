#include "carnotlab/vvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "carnotlab/calculus.hpp"
#include "carnotlab/errors.hpp"
#include "carnotlab/util.hpp"

namespace carnotlab {

double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

namespace {

// |x|^p with the p = 2 path kept free of pow/sqrt so that scaling f by a
// power of two scales the functionals bit-exactly.
double norm_sq(const double* a, const double* b, int m) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double pow_from_sq(double s2, double p) {
  if (p == 2.0) return s2;
  if (p == 1.0) return std::sqrt(s2);
  return std::pow(s2, p / 2.0);
}

double root(double x, double p) {
  if (p == 2.0) return std::sqrt(x);
  if (p == 1.0) return x;
  return std::pow(x, 1.0 / p);
}

Grid enlarged_along(const Grid& base, const std::vector<double>& extension) {
  Grid g = base;
  for (int d = 0; d < base.dim(); ++d) {
    const int extra = static_cast<int>(std::ceil(extension[d] / base.spacing[d]));
    g.origin[d] -= extra * base.spacing[d];
    g.shape[d] += 2 * extra;
  }
  return g;
}

// integral of |grad f|_{l2}^p over the grid, gradient taken per component.
double grad_norm_integral(const GridFunction& f, double p) {
  const AlgebraPtr alg = f.alg();
  const int k1 = alg->stratum_dim(1);
  const int arity = f.arity();
  double h = 0.0;
  for (double s : f.grid().spacing) h = std::max(h, s);
  std::vector<AlgebraVector> steps;
  for (int i = 1; i <= k1; ++i) {
    steps.push_back(basis_point(alg, 1, i, h).v);
    steps.push_back(basis_point(alg, 1, i, -h).v);
  }
  const double inv2h = 1.0 / (2.0 * h);
  std::vector<double> partial(f.nodes());
  parallel_for(f.nodes(), [&](std::size_t b, std::size_t e) {
    std::vector<double> fwd(arity), bwd(arity);
    for (std::size_t node = b; node < e; ++node) {
      AlgebraVector pv(alg, f.grid().node_coords(node));
      double s2 = 0.0;
      for (int i = 0; i < k1; ++i) {
        const AlgebraVector qf = bch_product(pv, steps[2 * i]);
        const AlgebraVector qb = bch_product(pv, steps[2 * i + 1]);
        f.eval_all(qf.c, fwd.data());
        f.eval_all(qb.c, bwd.data());
        for (int m = 0; m < arity; ++m) {
          const double d = (fwd[m] - bwd[m]) * inv2h;
          s2 += d * d;
        }
      }
      partial[node] = pow_from_sq(s2, p);
    }
  });
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc * f.grid().cell_volume();
}

}  // namespace

VvhReport continuous_vvh(const GridFunction& f, const GroupPoint& v, double rho, double p,
                         double q, const std::vector<double>& t_grid) {
  if (!(rho > 1.0)) throw DomainError("continuous_vvh: rho must exceed 1");
  if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("continuous_vvh: p, q must be >= 1");
  if (t_grid.size() < 2) throw DomainError("continuous_vvh: t grid too small");
  if (!v.alg()->same_as(*f.alg())) throw DomainError("continuous_vvh: algebra mismatch");
  if (!is_central(*f.alg(), v.coords()))
    throw DomainError("continuous_vvh: direction is not central (bracket test failed)");

  const std::vector<double>& w = v.coords();
  const double t_max = t_grid.back();
  std::vector<double> ext(w.size());
  for (std::size_t d = 0; d < w.size(); ++d) ext[d] = t_max * std::abs(w[d]);
  const Grid region = enlarged_along(f.grid(), ext);
  const double vol = region.cell_volume();
  const std::vector<double> dt = log_grid_weights(t_grid);

  const int arity = f.arity();
  const double M = std::max(p, q);
  std::vector<double> inner(t_grid.size(), 0.0);
  parallel_for(t_grid.size(), [&](std::size_t jb, std::size_t je) {
    std::vector<double> shifted(w.size()), f0(arity), f1(arity);
    for (std::size_t j = jb; j < je; ++j) {
      const double t = t_grid[j];
      const double scale = std::pow(t, -1.0 / rho);
      double acc = 0.0;
      for (std::size_t node = 0; node < region.node_count(); ++node) {
        const std::vector<double> h = region.node_coords(node);
        for (std::size_t d = 0; d < w.size(); ++d) shifted[d] = h[d] + t * w[d];
        f.eval_all(h, f0.data());
        f.eval_all(shifted, f1.data());
        const double s2 = norm_sq(f1.data(), f0.data(), arity);
        acc += pow_from_sq(s2 * scale * scale, p);
      }
      inner[j] = acc * vol;
    }
  });

  double lhs_acc = 0.0;
  for (std::size_t j = 0; j < t_grid.size(); ++j)
    lhs_acc += std::pow(inner[j], M / p) * dt[j] / t_grid[j];

  VvhReport rep;
  rep.lhs = root(lhs_acc, M);
  rep.rhs = root(grad_norm_integral(f, p), p);
  rep.ratio = safe_ratio(rep.lhs, *rep.rhs);
  rep.params = {{"rho", rho},        {"p", p},
                {"q", q},            {"t_min", t_grid.front()},
                {"t_max", t_max},    {"t_count", static_cast<double>(t_grid.size())}};
  return rep;
}

namespace {

// Bounding-box extension covering h -> h . g^{-j} for the given shift list,
// estimated on a coarse subgrid of the box boundary with margin.
std::vector<double> shift_extension(const Grid& base, const AlgebraPtr& alg,
                                    const std::vector<AlgebraVector>& shifts) {
  const int dim = base.dim();
  std::vector<double> ext(dim, 0.0);
  const int per_axis = 5;
  std::vector<int> idx(dim, 0);
  std::vector<double> probe(dim);
  while (true) {
    for (int d = 0; d < dim; ++d)
      probe[d] = base.origin[d] + (base.upper(d) - base.origin[d]) * idx[d] / (per_axis - 1);
    AlgebraVector pv(alg, probe);
    for (const AlgebraVector& s : shifts) {
      const AlgebraVector moved = bch_product(pv, s);
      for (int d = 0; d < dim; ++d)
        ext[d] = std::max(ext[d], std::abs(moved.c[d] - probe[d]));
    }
    int d = 0;
    while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == dim) break;
  }
  for (double& e : ext) e *= 1.25;
  return ext;
}

}  // namespace

VvhReport fractional_vvh(const GridFunction& f, const GroupPoint& v, double alpha, int n,
                         double p, const std::vector<double>& r_grid,
                         bool restrict_to_support) {
  if (!(p > 1.0) || !(p <= 2.0)) throw DomainError("fractional_vvh: requires 1 < p <= 2");
  if (!(alpha > 0.0)) throw DomainError("fractional_vvh: alpha must be positive");
  if (n < 1) throw DomainError("fractional_vvh: n must be >= 1");
  if (r_grid.size() < 2) throw DomainError("fractional_vvh: r grid too small");
  if (!v.alg()->same_as(*f.alg())) throw DomainError("fractional_vvh: algebra mismatch");
  const AlgebraPtr alg_ptr = f.alg();
  const GradedLieAlgebra& alg = *alg_ptr;
  const int min_stratum = static_cast<int>(std::floor(alpha / n)) + 1;
  const int low = lowest_stratum(alg, v.coords());
  if (low == 0 || low < min_stratum)
    throw DomainError(
        "fractional_vvh: the theorem hypothesis requires v in exp(V_" +
        std::to_string(min_stratum) + " + ... + V_s); lowest occupied stratum is " +
        std::to_string(low));

  const std::vector<double>& w = v.coords();
  const double r_max = r_grid.back();
  std::vector<AlgebraVector> probe_shifts;
  for (int jj = 1; jj <= n; ++jj) {
    std::vector<double> s = dilate_coords(alg, r_max, w);
    for (double& x : s) x *= -jj;
    probe_shifts.emplace_back(alg_ptr, std::move(s));
  }
  const Grid region =
      restrict_to_support
          ? f.grid()
          : enlarged_along(f.grid(), shift_extension(f.grid(), alg_ptr, probe_shifts));
  const double vol = region.cell_volume();
  const std::vector<double> dr = log_grid_weights(r_grid);

  const int arity = f.arity();
  std::vector<double> coefs(n + 1);
  for (int j = 0; j <= n; ++j) coefs[j] = (((n - j) % 2 == 0) ? 1.0 : -1.0) * binomial(n, j);

  auto inside = [&](const std::vector<double>& c) {
    for (int d = 0; d < f.grid().dim(); ++d)
      if (c[d] < f.grid().origin[d] || c[d] > f.grid().upper(d)) return false;
    return true;
  };

  std::vector<double> inner(r_grid.size(), 0.0);
  parallel_for(r_grid.size(), [&](std::size_t jb, std::size_t je) {
    std::vector<double> tmp(arity), diff(arity), ju(w.size());
    for (std::size_t j = jb; j < je; ++j) {
      const double r = r_grid[j];
      const std::vector<double> step = dilate_coords(alg, r, w);
      const double scale = std::pow(r, -alpha);
      double acc = 0.0;
      for (std::size_t node = 0; node < region.node_count(); ++node) {
        AlgebraVector h(alg_ptr, region.node_coords(node));
        std::fill(diff.begin(), diff.end(), 0.0);
        bool stencil_ok = true;
        for (int jj = 0; jj <= n; ++jj) {
          if (jj == 0) {
            f.eval_all(h.c, tmp.data());
          } else {
            for (std::size_t d = 0; d < step.size(); ++d) ju[d] = jj * step[d];
            const AlgebraVector shifted = bch_product(h, AlgebraVector(alg_ptr, ju));
            if (restrict_to_support && !inside(shifted.c)) {
              stencil_ok = false;
              break;
            }
            f.eval_all(shifted.c, tmp.data());
          }
          for (int m = 0; m < arity; ++m) diff[m] += coefs[jj] * tmp[m];
        }
        if (!stencil_ok) continue;
        double s2 = 0.0;
        for (int m = 0; m < arity; ++m) s2 += diff[m] * diff[m];
        acc += pow_from_sq(s2 * scale * scale, p);
      }
      inner[j] = acc * vol;
    }
  });

  double lhs_acc = 0.0;
  for (std::size_t j = 0; j < r_grid.size(); ++j)
    lhs_acc += std::pow(inner[j], 2.0 / p) * dr[j] / r_grid[j];

  VvhReport rep;
  rep.lhs = std::sqrt(lhs_acc);
  if (std::abs(alpha - 1.0) < 1e-14) {
    rep.rhs = root(grad_norm_integral(f, p), p);
    rep.ratio = safe_ratio(rep.lhs, *rep.rhs);
  }
  rep.params = {{"alpha", alpha},
                {"n", static_cast<double>(n)},
                {"p", p},
                {"r_min", r_grid.front()},
                {"r_max", r_max},
                {"r_count", static_cast<double>(r_grid.size())}};
  return rep;
}

DiscreteFunction::DiscreteFunction(int arity, std::optional<std::vector<double>> default_value)
    : arity_(arity), default_(std::move(default_value)) {
  if (arity_ < 1) throw DomainError("DiscreteFunction: arity must be >= 1");
  if (default_ && static_cast<int>(default_->size()) != arity_)
    throw DomainError("DiscreteFunction: default value arity mismatch");
}

void DiscreteFunction::set(const IntWord& g, std::vector<double> v) {
  if (static_cast<int>(v.size()) != arity_) throw DomainError("DiscreteFunction: arity mismatch");
  values_[g] = std::move(v);
}

const std::vector<double>& DiscreteFunction::at(const IntWord& g) const {
  auto it = values_.find(g);
  if (it != values_.end()) return it->second;
  if (default_) return *default_;
  throw DomainError("DiscreteFunction: no value at " + format_word(g));
}

const std::vector<double>& DiscreteFunction::default_value() const {
  if (!default_) throw DomainError("DiscreteFunction: no default value");
  return *default_;
}

std::vector<IntWord> DiscreteFunction::support() const {
  std::vector<IntWord> out;
  for (const auto& [g, v] : values_) {
    if (default_ && v == *default_) continue;
    out.push_back(g);
  }
  std::sort(out.begin(), out.end(), [](const IntWord& a, const IntWord& b) { return a.v < b.v; });
  return out;
}

DiscreteFunction DiscreteFunction::scaled(double lambda) const {
  std::optional<std::vector<double>> def = default_;
  if (def)
    for (double& x : *def) x *= lambda;
  DiscreteFunction out(arity_, std::move(def));
  for (const auto& [g, v] : values_) {
    std::vector<double> sv = v;
    for (double& x : sv) x *= lambda;
    out.values_[g] = std::move(sv);
  }
  return out;
}

std::string format_word(const IntWord& g) {
  std::ostringstream os;
  os << "(a=";
  for (int i = 0; i < g.k; ++i) os << (i ? "," : "") << g.a(i);
  os << "; b=";
  for (int i = 0; i < g.k; ++i) os << (i ? "," : "") << g.b(i);
  os << "; c=" << g.c() << ")";
  return os.str();
}

VvhReport discrete_vvh(const DiscreteFunction& f, const CayleyBall& ball, int n, double p,
                       double q) {
  if (n < 1) throw DomainError("discrete_vvh: n must be >= 1");
  if (!(p >= 1.0) || !(q >= 1.0)) throw DomainError("discrete_vvh: p, q must be >= 1");
  const int cn = kDiscreteEnlargement * n;
  if (ball.radius() < cn)
    throw GuardError("discrete_vvh: ball radius " + std::to_string(ball.radius()) +
                     " < required " + std::to_string(cn));
  const DiscreteHeisenberg& G = ball.group();
  const int m = f.arity();
  const double M = std::max(p, q);
  const double s = 2.0;

  const std::vector<IntWord> bn = ball.elements(n);
  const std::int64_t kmax = static_cast<std::int64_t>(n) * n;

  double lhs_acc = 0.0;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    const IntWord ck = G.central_power(k);
    double inner = 0.0;
    for (const IntWord& x : bn) {
      const std::vector<double>& fx = f.at(x);
      const std::vector<double>& fxc = f.at(G.mul(x, ck));
      inner += pow_from_sq(norm_sq(fxc.data(), fx.data(), m), p);
    }
    lhs_acc += std::pow(static_cast<double>(k), -1.0 - M / s) * std::pow(inner, M / p);
  }

  double rhs_acc = 0.0;
  for (const IntWord& x : ball.elements(cn)) {
    const std::vector<double>& fx = f.at(x);
    for (const IntWord& a : G.generators()) {
      const std::vector<double>& fxa = f.at(G.mul(x, a));
      rhs_acc += pow_from_sq(norm_sq(fxa.data(), fx.data(), m), p);
    }
  }

  VvhReport rep;
  rep.lhs = root(lhs_acc, M);
  rep.rhs = root(rhs_acc, p);
  rep.ratio = safe_ratio(rep.lhs, *rep.rhs);
  rep.params = {{"n", static_cast<double>(n)}, {"p", p}, {"q", q},
                {"s", s},                      {"c", static_cast<double>(kDiscreteEnlargement)}};
  return rep;
}

PoincareReport poincare_local_check(const DiscreteFunction& f, const CayleyBall& ball, int n,
                                    double p) {
  if (n < 1) throw DomainError("poincare_local_check: n must be >= 1");
  if (ball.radius() < 3 * n)
    throw GuardError("poincare_local_check: ball radius " + std::to_string(ball.radius()) +
                     " < required " + std::to_string(3 * n));
  const DiscreteHeisenberg& G = ball.group();
  const int m = f.arity();

  PoincareReport rep;
  const std::vector<IntWord> bn = ball.elements(n);
  for (const IntWord& x : bn) {
    const std::vector<double>& fx = f.at(x);
    for (const IntWord& y : bn)
      rep.lhs += pow_from_sq(norm_sq(f.at(y).data(), fx.data(), m), p);
  }
  for (const IntWord& x : ball.elements(3 * n)) {
    const std::vector<double>& fx = f.at(x);
    for (const IntWord& a : G.generators())
      rep.gradient_term += pow_from_sq(norm_sq(f.at(G.mul(x, a)).data(), fx.data(), m), p);
  }
  rep.constant =
      std::pow(2.0 * n, p) * static_cast<double>(ball.ball_size(2 * n));
  rep.rhs = rep.constant * rep.gradient_term;
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  return rep;
}

PoincareReport poincare_global_check(const DiscreteFunction& f, const CayleyBall& ball, int n,
                                     double p) {
  if (n < 1) throw DomainError("poincare_global_check: n must be >= 1");
  if (!f.has_default())
    throw DomainError("poincare_global_check: f must be finitely supported (needs a default)");
  if (ball.radius() < n)
    throw GuardError("poincare_global_check: cached ball radius " +
                     std::to_string(ball.radius()) + " < required " + std::to_string(n));
  const DiscreteHeisenberg& G = ball.group();
  const int m = f.arity();
  const std::vector<IntWord> support = f.support();

  PoincareReport rep;
  const std::vector<IntWord> bn = ball.elements(n);
  // terms vanish unless x touches the support within distance n
  std::unordered_map<IntWord, char, IntWordHash> xs;
  for (const IntWord& s : support) {
    xs.emplace(s, 1);
    for (const IntWord& z : bn) xs.emplace(G.mul(s, z), 1);
  }
  for (const auto& [x, tag] : xs) {
    const std::vector<double>& fx = f.at(x);
    for (const IntWord& z : bn)
      rep.lhs += pow_from_sq(norm_sq(f.at(G.mul(x, z)).data(), fx.data(), m), p);
  }

  std::unordered_map<IntWord, char, IntWordHash> gs;
  for (const IntWord& s : support) {
    gs.emplace(s, 1);
    for (const IntWord& a : G.generators()) gs.emplace(G.mul(s, a), 1);
  }
  for (const auto& [x, tag] : gs) {
    const std::vector<double>& fx = f.at(x);
    for (const IntWord& a : G.generators())
      rep.gradient_term += pow_from_sq(norm_sq(f.at(G.mul(x, a)).data(), fx.data(), m), p);
  }

  rep.constant = std::pow(static_cast<double>(n), p) * static_cast<double>(ball.ball_size(n));
  rep.rhs = rep.constant * rep.gradient_term;
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  return rep;
}

std::string vvh_report_json_line(const VvhReport& rep) {
  nlohmann::ordered_json j;
  j["lhs"] = rep.lhs;
  if (rep.rhs)
    j["rhs"] = *rep.rhs;
  else
    j["rhs"] = nullptr;
  j["ratio"] = std::isfinite(rep.ratio) ? nlohmann::ordered_json(rep.ratio)
                                        : nlohmann::ordered_json("inf");
  j["params"] = rep.params;
  return j.dump();
}

void write_vvh_reports_csv(const std::vector<VvhReport>& reports, std::ostream& os) {
  os << "lhs,rhs,ratio\n";
  char buf[128];
  for (const VvhReport& r : reports) {
    if (r.rhs)
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g\n", r.lhs, *r.rhs, r.ratio);
    else
      std::snprintf(buf, sizeof(buf), "%.12g,,%.12g\n", r.lhs, r.ratio);
    os << buf;
  }
}

FamilySpec FamilySpec::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw DomainError(std::string("family spec: invalid JSON: ") + e.what());
  }
  FamilySpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "name") spec.name = value.get<std::string>();
    else if (key == "size") spec.size = value.get<int>();
    else if (key == "seed") spec.seed = value.get<std::uint64_t>();
    else if (key == "n") spec.n = value.get<int>();
    else if (key == "p") spec.p = value.get<double>();
    else if (key == "q") spec.q = value.get<double>();
    else if (key == "density") spec.density = value.get<double>();
    else throw DomainError("family spec: unknown key '" + key + "'");
  }
  if (spec.name.empty()) throw DomainError("family spec: missing name");
  return spec;
}

EmpiricalConstant empirical_vvh_constant(const CayleyBall& ball, const FamilySpec& spec) {
  if (spec.size < 1) throw DomainError("empirical_vvh_constant: empty family");
  const int need = kDiscreteEnlargement * spec.n + 1;
  if (ball.radius() < need)
    throw GuardError("empirical_vvh_constant: ball radius " + std::to_string(ball.radius()) +
                     " < required " + std::to_string(need));

  std::mt19937_64 rng(spec.seed);
  const std::vector<IntWord> domain = ball.elements(need);
  const std::vector<IntWord> bn = ball.elements(spec.n);

  EmpiricalConstant out;
  for (int member = 0; member < spec.size; ++member) {
    DiscreteFunction f(1, std::vector<double>{0.0});
    if (spec.name == "random-sparse") {
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (const IntWord& x : bn)
        if (coin(rng) < spec.density) f.set(x, {unif(rng)});
    } else if (spec.name == "coordinate-z") {
      const double shift = static_cast<double>(member);
      for (const IntWord& x : domain)
        f.set(x, {static_cast<double>(x.c()) + shift});
    } else if (spec.name == "bump") {
      const double width = static_cast<double>(spec.n + 1 + member);
      for (const IntWord& x : domain) {
        const double d = static_cast<double>(*ball.word_length(x));
        f.set(x, {std::max(0.0, 1.0 - d / width)});
      }
    } else if (spec.name == "constant") {
      const double value = static_cast<double>(member + 1);
      DiscreteFunction g(1, std::vector<double>{value});
      const VvhReport r = discrete_vvh(g, ball, spec.n, spec.p, spec.q);
      if (r.lhs == 0.0 && *r.rhs == 0.0) {
        out.excluded += 1;
        continue;
      }
      out.ratios.push_back(r.ratio);
      continue;
    } else {
      throw DomainError("empirical_vvh_constant: unknown family " + spec.name);
    }
    const VvhReport r = discrete_vvh(f, ball, spec.n, spec.p, spec.q);
    if (r.lhs == 0.0 && *r.rhs == 0.0) {
      out.excluded += 1;
      continue;
    }
    out.ratios.push_back(r.ratio);
  }
  out.kappa_hat = 0.0;
  for (double r : out.ratios) out.kappa_hat = std::max(out.kappa_hat, r);
  return out;
}

}  // namespace carnotlab
