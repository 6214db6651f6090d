#include "carnotlab/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carnotlab/errors.hpp"

namespace carnotlab {

FiniteMetric::FiniteMetric(std::vector<std::string> labels, Eigen::MatrixXd distances)
    : labels_(std::move(labels)), d_(std::move(distances)) {
  const std::size_t n = labels_.size();
  if (d_.rows() != static_cast<Eigen::Index>(n) || d_.cols() != static_cast<Eigen::Index>(n))
    throw DomainError("FiniteMetric: table size does not match label count");
  constexpr double tol = 1e-9;
  for (std::size_t i = 0; i < n; ++i) {
    if (d_(i, i) != 0.0) throw DomainError("FiniteMetric: nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      if (d_(i, j) < 0.0) throw DomainError("FiniteMetric: negative distance");
      if (std::abs(d_(i, j) - d_(j, i)) > tol) throw DomainError("FiniteMetric: not symmetric");
      if (i != j && d_(i, j) <= 0.0) throw DomainError("FiniteMetric: coincident points");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (d_(i, j) > d_(i, k) + d_(k, j) + tol)
          throw DomainError("FiniteMetric: triangle inequality fails at (" + labels_[i] + "," +
                            labels_[j] + "," + labels_[k] + ")");
}

FiniteMetric FiniteMetric::submetric(const std::vector<std::size_t>& indices) const {
  std::vector<std::string> labels;
  Eigen::MatrixXd d(indices.size(), indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    labels.push_back(labels_.at(indices[i]));
    for (std::size_t j = 0; j < indices.size(); ++j) d(i, j) = d_(indices[i], indices[j]);
  }
  return FiniteMetric(std::move(labels), std::move(d));
}

FiniteMetric FiniteMetric::snowflake(double eps) const {
  if (!(eps >= 0.0) || !(eps < 1.0)) throw DomainError("snowflake: need 0 <= eps < 1");
  Eigen::MatrixXd d = d_;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j)
      if (i != j) d(i, j) = std::pow(d(i, j), 1.0 - eps);
  return FiniteMetric(labels_, std::move(d));
}

void FiniteMetric::to_csv(std::ostream& os) const {
  os << "label";
  for (const auto& l : labels_) os << "," << l;
  os << "\n";
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    os << labels_[i];
    for (std::size_t j = 0; j < size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d_(i, j));
      os << "," << buf;
    }
    os << "\n";
  }
}

FiniteMetric FiniteMetric::from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("FiniteMetric: empty csv");
  std::vector<std::string> labels;
  {
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // "label" corner
    while (std::getline(ss, cell, ',')) labels.push_back(cell);
  }
  const std::size_t n = labels.size();
  Eigen::MatrixXd d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw DomainError("FiniteMetric: truncated csv");
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::getline(ss, cell, ',')) throw DomainError("FiniteMetric: truncated csv row");
      d(i, j) = std::stod(cell);
    }
  }
  return FiniteMetric(std::move(labels), std::move(d));
}

FiniteMetric metric_from_ball(const CayleyBall& ball, int n) {
  if (n < 0) throw DomainError("metric_from_ball: n must be >= 0");
  if (ball.radius() < 2 * n)
    throw GuardError("metric_from_ball: cached radius " + std::to_string(ball.radius()) +
                     " < required margin " + std::to_string(2 * n));
  const DiscreteHeisenberg& G = ball.group();
  const std::vector<IntWord> pts = ball.elements(n);
  std::vector<std::string> labels;
  labels.reserve(pts.size());
  for (const IntWord& w : pts) {
    std::ostringstream os;
    for (int i = 0; i < G.k(); ++i) os << w.a(i) << ":";
    for (int i = 0; i < G.k(); ++i) os << w.b(i) << ":";
    os << w.c();
    labels.push_back(os.str());
  }
  Eigen::MatrixXd d(pts.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d(i, i) = 0.0;
    const IntWord inv = G.inv(pts[i]);
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const auto len = ball.word_length(G.mul(inv, pts[j]));
      if (!len)
        throw GuardError("metric_from_ball: margin insufficient, need radius >= " +
                         std::to_string(2 * n));
      d(i, j) = d(j, i) = static_cast<double>(*len);
    }
  }
  return FiniteMetric(std::move(labels), std::move(d));
}

double embedding_distortion(const FiniteMetric& M,
                            const std::vector<std::vector<double>>& images, double p_norm) {
  if (images.size() != M.size()) throw DomainError("embedding_distortion: one image per point");
  if (!(p_norm >= 1.0)) throw DomainError("embedding_distortion: p_norm must be >= 1");
  double expansion = 0.0;
  double contraction = 0.0;
  for (std::size_t i = 0; i < M.size(); ++i) {
    if (images[i].size() != images[0].size())
      throw DomainError("embedding_distortion: images must share a dimension");
    for (std::size_t j = i + 1; j < M.size(); ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < images[i].size(); ++d) {
        const double diff = std::abs(images[i][d] - images[j][d]);
        s += (p_norm == 2.0) ? diff * diff : std::pow(diff, p_norm);
      }
      const double dist = (p_norm == 2.0) ? std::sqrt(s) : std::pow(s, 1.0 / p_norm);
      if (dist == 0.0) return std::numeric_limits<double>::infinity();
      expansion = std::max(expansion, dist / M.dist(i, j));
      contraction = std::max(contraction, M.dist(i, j) / dist);
    }
  }
  if (M.size() < 2) return 1.0;
  return expansion * contraction;
}

namespace {

struct FeasibilityOutcome {
  bool feasible = false;
  double residual = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd K;
};

// relative violation of d^2 <= s_ij <= D^2 d^2 over all pairs
double box_residual(const Eigen::MatrixXd& K, const Eigen::MatrixXd& d2, double D2) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < K.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < K.cols(); ++j) {
      const double s = K(i, i) + K(j, j) - 2.0 * K(i, j);
      const double lo = d2(i, j), hi = D2 * d2(i, j);
      double v = 0.0;
      if (s < lo) v = (lo - s) / lo;
      else if (s > hi) v = (s - hi) / lo;
      worst = std::max(worst, v);
    }
  }
  return worst;
}

void project_box(Eigen::MatrixXd& K, const Eigen::MatrixXd& d2, double D2) {
  const Eigen::Index n = K.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = K(i, i) + K(j, j) - 2.0 * K(i, j);
      const double lo = d2(i, j), hi = D2 * d2(i, j);
      const double target = std::clamp(s, lo, hi);
      if (target == s) continue;
      const double delta = (target - s) / 4.0;
      K(i, i) += delta;
      K(j, j) += delta;
      K(i, j) -= delta;
      K(j, i) -= delta;
    }
  }
}

void project_psd(Eigen::MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (K + K.transpose()));
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  K = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

FeasibilityOutcome solve_feasibility(const Eigen::MatrixXd& d2, double D2,
                                     const Eigen::MatrixXd& K0, double eps, int max_iter) {
  FeasibilityOutcome out;
  out.K = K0;
  double best = box_residual(out.K, d2, D2);
  Eigen::MatrixXd K = K0;
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    project_box(K, d2, D2);
    project_psd(K);
    const double res = box_residual(K, d2, D2);
    if (res < best - 1e-14) {
      if (res < best * 0.9995) stall = 0;
      best = res;
      out.K = K;
    } else {
      ++stall;
    }
    if (best < eps) break;
    if (stall > 60) break;
  }
  out.residual = best;
  out.feasible = best < eps;
  return out;
}

Eigen::MatrixXd vectors_from_gram(const Eigen::MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lam.asDiagonal();
}

}  // namespace

C2Result exact_c2(const FiniteMetric& M, double tol, std::size_t size_guard) {
  if (!(tol > 0.0)) throw DomainError("exact_c2: tolerance must be positive");
  if (M.size() > size_guard)
    throw GuardError("exact_c2: metric with " + std::to_string(M.size()) +
                     " points exceeds the size guard of " + std::to_string(size_guard));
  const std::size_t n = M.size();
  C2Result result;
  if (n < 3) {
    // two points or fewer always embed isometrically on a line
    result.c2 = 1.0;
    result.vectors = Eigen::MatrixXd::Zero(n, 1);
    if (n == 2) result.vectors(1, 0) = M.dist(0, 1);
    result.converged = true;
    return result;
  }

  Eigen::MatrixXd d2(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d2(i, j) = M.dist(i, j) * M.dist(i, j);

  // classical multidimensional scaling start
  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) -
                      Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd K0 = -0.5 * J * d2 * J;
  project_psd(K0);

  double d_min = std::numeric_limits<double>::infinity();
  double d_max = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      d_min = std::min(d_min, M.dist(i, j));
      d_max = std::max(d_max, M.dist(i, j));
    }

  const double eps = std::min(1e-8, tol * tol);
  const int max_iter = 4000;

  double hi = d_max / d_min;  // rescaled simplex embedding achieves this
  double lo = 1.0 - tol;
  Eigen::MatrixXd K_feasible;
  {
    FeasibilityOutcome probe = solve_feasibility(d2, hi * hi, K0, eps, max_iter);
    while (!probe.feasible) {
      hi *= 1.5;
      probe = solve_feasibility(d2, hi * hi, probe.K, eps, max_iter);
      if (hi > 1e6) throw DomainError("exact_c2: feasibility solver failed to converge");
    }
    K_feasible = probe.K;
    result.residual = probe.residual;
  }
  // a feasible probe at D = 1 short-circuits the search
  {
    FeasibilityOutcome probe = solve_feasibility(d2, 1.0, K0, eps, max_iter);
    if (probe.feasible) {
      result.c2 = 1.0;
      result.vectors = vectors_from_gram(probe.K);
      result.residual = probe.residual;
      result.converged = true;
      return result;
    }
  }

  Eigen::MatrixXd warm = K0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    FeasibilityOutcome probe = solve_feasibility(d2, mid * mid, warm, eps, max_iter);
    if (probe.feasible) {
      hi = mid;
      K_feasible = probe.K;
      result.residual = probe.residual;
      warm = probe.K;
    } else {
      lo = mid;
    }
    result.bisection_steps += 1;
    if (result.bisection_steps > 200) break;
  }

  // polish the witness at the accepted D
  FeasibilityOutcome fin = solve_feasibility(d2, hi * hi, K_feasible, eps * 1e-2, 2 * max_iter);
  if (fin.residual <= result.residual) {
    K_feasible = fin.K;
    result.residual = fin.residual;
  }

  result.c2 = hi;
  result.vectors = vectors_from_gram(K_feasible);
  result.converged = true;
  return result;
}

double uniform_convexity_constant(double p, double q) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("uniform_convexity_constant: need 1 < p < inf");
  const double expected_q = std::max(p, 2.0);
  if (std::abs(q - expected_q) > 1e-12)
    throw DomainError("uniform_convexity_constant: only q = max(p,2) is tabulated");
  if (p <= 2.0) return 1.0 / std::sqrt(p - 1.0);
  return 1.0;
}

std::string DistortionCertificate::to_json() const {
  nlohmann::ordered_json j = {
      {"n", n},
      {"q", q},
      {"K_q", K_q},
      {"kappa", kappa},
      {"c1", c1},
      {"s", s},
      {"n_h", n_h},
      {"generator_count", generator_count},
      {"ball_ratio", ball_ratio},
      {"exact_ball_ratio", exact_ball_ratio},
      {"lower_bound", lower_bound},
  };
  return j.dump();
}

DistortionCertificate certificate_lower_bound(
    int n, double q, double K_q, double kappa, int n_h, int s, double c1,
    double generator_count, int enlargement,
    std::optional<std::pair<std::size_t, std::size_t>> exact_ball_sizes) {
  if (n < 2) throw DomainError("certificate_lower_bound: n must be >= 2");
  if (!(q >= 2.0)) throw DomainError("certificate_lower_bound: q must be >= 2");
  if (q > 64.0) throw DomainError("certificate_lower_bound: q > 64 is out of numeric range");
  if (!(kappa > 0.0)) throw DomainError("certificate_lower_bound: kappa must be positive");
  if (!(K_q > 0.0)) throw DomainError("certificate_lower_bound: K_q must be positive");
  if (!(c1 > 0.0)) throw DomainError("certificate_lower_bound: c1 must be positive");
  if (s < 2) throw DomainError("certificate_lower_bound: s must be >= 2");

  DistortionCertificate cert;
  cert.n = n;
  cert.q = q;
  cert.K_q = K_q;
  cert.kappa = kappa;
  cert.c1 = c1;
  cert.s = s;
  cert.n_h = n_h;
  cert.generator_count = generator_count;

  const double kmax = std::pow(static_cast<double>(n), s);
  double sum = 0.0;
  for (double k = 1.0; k <= kmax + 0.5; k += 1.0)
    sum += std::pow(c1, q) * std::pow(k, q / s) / std::pow(k, 1.0 + q / s);
  const double numer = std::pow(sum, 1.0 / q);

  if (exact_ball_sizes) {
    cert.ball_ratio = static_cast<double>(exact_ball_sizes->second) /
                      static_cast<double>(exact_ball_sizes->first);
    cert.exact_ball_ratio = true;
  } else {
    cert.ball_ratio = std::pow(static_cast<double>(enlargement), n_h);
    cert.exact_ball_ratio = false;
  }

  const double denom = kappa * K_q * std::pow(generator_count, 1.0 / q) *
                       std::pow(cert.ball_ratio, 1.0 / q);
  cert.lower_bound = numer / denom;
  return cert;
}

}  // namespace carnotlab
