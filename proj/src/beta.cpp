#include "carnotlab/beta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <Eigen/Dense>

#include "carnotlab/errors.hpp"
#include "carnotlab/util.hpp"

namespace carnotlab {

std::vector<MultiIndex> monomial_basis(const GradedLieAlgebra& alg, int d) {
  if (d < 0) throw DomainError("monomial_basis: degree must be >= 0");
  std::vector<MultiIndex> out;
  MultiIndex cur;
  cur.e.assign(alg.dim(), 0);
  std::function<void(int, int)> rec = [&](int pos, int budget) {
    if (pos == alg.dim()) {
      out.push_back(cur);
      return;
    }
    const int w = alg.weight_of(pos);
    for (int k = 0; k * w <= budget; ++k) {
      cur.e[pos] = k;
      rec(pos + 1, budget - k * w);
    }
    cur.e[pos] = 0;
  };
  rec(0, d);
  std::sort(out.begin(), out.end(), [&](const MultiIndex& a, const MultiIndex& b) {
    const int da = a.weighted_degree(alg), db = b.weighted_degree(alg);
    if (da != db) return da < db;
    return a.e < b.e;
  });
  return out;
}

WeightedPolynomial::WeightedPolynomial(GroupPoint center, double scale, int degree,
                                       std::vector<MultiIndex> basis, std::vector<double> coeffs)
    : center_(std::move(center)),
      scale_(scale),
      degree_(degree),
      basis_(std::move(basis)),
      coeffs_(std::move(coeffs)) {
  if (!(scale_ > 0)) throw DomainError("WeightedPolynomial: scale must be positive");
  if (basis_.size() != coeffs_.size()) throw DomainError("WeightedPolynomial: size mismatch");
}

double WeightedPolynomial::eval_coords(const std::vector<double>& coords) const {
  const AlgebraPtr& alg = center_.alg();
  GroupPoint rel = group_mul(group_inv(center_), GroupPoint(alg, coords));
  const std::vector<double> u = dilate_coords(*alg, 1.0 / scale_, rel.coords());
  double s = 0.0;
  for (std::size_t i = 0; i < basis_.size(); ++i) s += coeffs_[i] * basis_[i].eval(u);
  return s;
}

double WeightedPolynomial::operator()(const GroupPoint& p) const {
  return eval_coords(p.coords());
}

WeightedPolynomial local_projection(const PointFn& f, const GroupPoint& x, double r, int d,
                                    const BallSample& sample, double condition_guard) {
  if (!(r > 0)) throw DomainError("local_projection: radius must be positive");
  if (!sample.alg->same_as(*x.alg())) throw DomainError("local_projection: algebra mismatch");
  if (sample.center != x.coords() || std::abs(sample.radius - r) > 1e-12 * std::max(1.0, r))
    throw DomainError("local_projection: sample must be centered at x with radius r");

  const AlgebraPtr& alg = x.alg();
  const std::vector<MultiIndex> basis = monomial_basis(*alg, d);
  const int nb = static_cast<int>(basis.size());
  if (static_cast<int>(sample.size()) < nb)
    throw DomainError("local_projection: sample smaller than the basis (" +
                      std::to_string(sample.size()) + " < " + std::to_string(nb) + ")");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
  const GroupPoint x_inv = group_inv(x);
  std::vector<double> phi(nb);
  std::vector<double> p(alg->dim());
  for (std::size_t n = 0; n < sample.size(); ++n) {
    p.assign(sample.point(n), sample.point(n) + sample.dim);
    GroupPoint rel = group_mul(x_inv, GroupPoint(alg, p));
    const std::vector<double> u = dilate_coords(*alg, 1.0 / r, rel.coords());
    for (int i = 0; i < nb; ++i) phi[i] = basis[i].eval(u);
    const double w = sample.weights[n];
    const double fv = f(GroupPoint(alg, std::vector<double>(sample.point(n), sample.point(n) + sample.dim)));
    for (int i = 0; i < nb; ++i) {
      rhs[i] += w * phi[i] * fv;
      for (int j = i; j < nb; ++j) gram(i, j) += w * phi[i] * phi[j];
    }
  }
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < i; ++j) gram(i, j) = gram(j, i);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > condition_guard)
    throw DomainError("local_projection: Gram matrix ill-conditioned (condition ~ " +
                      std::to_string(lo > 0 ? hi / lo : std::numeric_limits<double>::infinity()) +
                      ")");
  Eigen::VectorXd c = eig.eigenvectors() *
                      (eig.eigenvectors().transpose() * rhs).cwiseQuotient(eig.eigenvalues());
  return WeightedPolynomial(x, r, d, basis, std::vector<double>(c.data(), c.data() + nb));
}

BetaReport beta_number(const PointFn& f, const GroupPoint& x, double r, int d, double q,
                       const BallSample& sample) {
  if (!(q >= 1.0)) throw DomainError("beta_number: q must be >= 1");
  const WeightedPolynomial A = local_projection(f, x, r, d, sample);
  const AlgebraPtr& alg = x.alg();
  double wsum = 0.0, acc = 0.0, acc2 = 0.0;
  std::vector<double> p(alg->dim());
  for (std::size_t n = 0; n < sample.size(); ++n) {
    p.assign(sample.point(n), sample.point(n) + sample.dim);
    const GroupPoint gp(alg, p);
    const double dev = std::pow(std::abs(f(gp) - A(gp)), q);
    const double w = sample.weights[n];
    wsum += w;
    acc += w * dev;
    acc2 += w * dev * dev;
  }
  BetaReport rep;
  rep.center = x.coords();
  rep.radius = r;
  rep.degree = d;
  rep.q = q;
  rep.quadrature_count = sample.size();
  rep.seed = sample.seed;
  const double mean = acc / wsum;
  rep.beta = std::pow(mean, 1.0 / q);
  const double var = std::max(0.0, acc2 / wsum - mean * mean);
  const double se_mean = std::sqrt(var / static_cast<double>(sample.size()));
  rep.stderr_estimate =
      (mean > 0.0) ? se_mean * rep.beta / (q * mean) : 0.0;
  return rep;
}

double dorronsoro_gfn(const PointFn& f, const GroupPoint& x, int d, double alpha, double q,
                      const std::vector<double>& r_grid, const BallSample& unit_sample) {
  if (!(alpha > 0)) throw DomainError("dorronsoro_gfn: alpha must be positive");
  if (d != static_cast<int>(std::floor(alpha)))
    throw DomainError("dorronsoro_gfn: degree must equal floor(alpha)");
  if (r_grid.size() < 2) throw DomainError("dorronsoro_gfn: r grid too small");
  const std::vector<double> dr = log_grid_weights(r_grid);
  double acc = 0.0;
  for (std::size_t j = 0; j < r_grid.size(); ++j) {
    const double r = r_grid[j];
    const BallSample s = unit_sample.transported(x, r);
    const BetaReport rep = beta_number(f, x, r, d, q, s);
    const double term = std::pow(r, -alpha) * rep.beta;
    acc += term * term * dr[j] / r;
  }
  return std::sqrt(acc);
}

TaylorCoefficients taylor_coefficients(const PointFn& f, const GroupPoint& x, int d,
                                       const std::vector<double>& r_sequence,
                                       const BallSample& unit_sample) {
  if (r_sequence.size() < 2) throw DomainError("taylor_coefficients: need at least two radii");
  for (std::size_t i = 0; i + 1 < r_sequence.size(); ++i)
    if (!(r_sequence[i] > r_sequence[i + 1]))
      throw DomainError("taylor_coefficients: radii must decrease");

  const GradedLieAlgebra& alg = *x.alg();
  TaylorCoefficients out;
  out.basis = monomial_basis(alg, d);
  out.radii = r_sequence;
  for (double r : r_sequence) {
    const BallSample s = unit_sample.transported(x, r);
    const WeightedPolynomial A = local_projection(f, x, r, d, s);
    // rescaled coefficient c_gamma equals (coefficient of y^gamma) * r^{|gamma|}
    std::vector<double> row(out.basis.size());
    for (std::size_t g = 0; g < out.basis.size(); ++g)
      row[g] = A.coeffs()[g] / std::pow(r, out.basis[g].weighted_degree(alg));
    out.per_radius.push_back(std::move(row));
  }

  const std::size_t last = r_sequence.size() - 1;
  for (std::size_t g = 0; g < out.basis.size(); ++g) {
    double order = d + 1 - out.basis[g].weighted_degree(alg);
    const double r1 = r_sequence[last - 1], r2 = r_sequence[last];
    const double v1 = out.per_radius[last - 1][g], v2 = out.per_radius[last][g];
    bool conv = true;
    if (r_sequence.size() >= 3) {
      // prefer the observed order when three radii expose it (symmetry often
      // buys a better rate than the theoretical floor)
      const double d1 = out.per_radius[last - 1][g] - out.per_radius[last - 2][g];
      const double d2 = v2 - v1;
      conv = std::abs(d2) <= std::abs(d1) + 1e-12;
      const double r0 = r_sequence[last - 2];
      const double ratio_steps = std::log(r1 / r0);
      if (std::abs(d1) > 0.0 && std::abs(d2) > 0.0 && std::abs(ratio_steps) > 1e-12) {
        const double observed = std::log(std::abs(d2 / d1)) / std::log(r2 / r1);
        if (std::isfinite(observed) && observed > 0.2 && observed < 10.0)
          order = std::max(order, observed);
      }
    }
    const double theta = std::pow(r2 / r1, order);
    out.extrapolated.push_back((v2 - theta * v1) / (1.0 - theta));
    out.converged.push_back(conv);
  }
  return out;
}

void write_beta_reports_csv(const std::vector<BetaReport>& reports, std::ostream& os) {
  os << "center,r,d,q,beta,stderr,count,seed\n";
  char buf[128];
  for (const BetaReport& r : reports) {
    os << "\"";
    for (std::size_t i = 0; i < r.center.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12g", r.center[i]);
      os << (i ? " " : "") << buf;
    }
    std::snprintf(buf, sizeof(buf), "\",%.12g,%d,%.12g,%.12g,%.12g,%zu,%llu\n", r.radius,
                  r.degree, r.q, r.beta, r.stderr_estimate, r.quadrature_count,
                  static_cast<unsigned long long>(r.seed));
    os << buf;
  }
}

}  // namespace carnotlab
