#include "carnotlab/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "carnotlab/errors.hpp"

namespace carnotlab {

HomogeneousNorm::HomogeneousNorm(AlgebraPtr alg)
    : HomogeneousNorm(alg, alg->step() <= 2 ? NormVariant::koranyi : NormVariant::power_sum) {}

HomogeneousNorm::HomogeneousNorm(AlgebraPtr alg, NormVariant variant)
    : alg_(std::move(alg)), variant_(variant) {
  if (!alg_) throw DomainError("HomogeneousNorm: null algebra");
  if (variant_ == NormVariant::koranyi && alg_->step() > 2)
    throw DomainError("HomogeneousNorm: koranyi variant requires step <= 2");
}

double HomogeneousNorm::eval_coords(const std::vector<double>& c) const {
  const GradedLieAlgebra& A = *alg_;
  if (static_cast<int>(c.size()) != A.dim())
    throw DomainError("HomogeneousNorm: coordinate dimension mismatch");
  if (variant_ == NormVariant::koranyi) {
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < A.dim(); ++i) {
      if (A.stratum_of(i) == 1)
        s1 += c[i] * c[i];
      else
        s2 += c[i] * c[i];
    }
    return std::pow(s1 * s1 + kKoranyiKappa * s2, 0.25);
  }
  double s = 0.0;
  for (int i = 0; i < A.dim(); ++i)
    s += std::pow(std::abs(c[i]), 1.0 / A.stratum_of(i));
  return s;
}

double HomogeneousNorm::operator()(const GroupPoint& g) const {
  if (!g.alg()->same_as(*alg_)) throw DomainError("HomogeneousNorm: algebra mismatch");
  return eval_coords(g.coords());
}

std::vector<double> HomogeneousNorm::ball_box_halfwidths(double r) const {
  const GradedLieAlgebra& A = *alg_;
  std::vector<double> hw(A.dim());
  for (int i = 0; i < A.dim(); ++i) {
    const int s = A.stratum_of(i);
    if (variant_ == NormVariant::koranyi) {
      hw[i] = (s == 1) ? r : r * r / std::sqrt(kKoranyiKappa);
    } else {
      hw[i] = std::pow(r, s);
    }
  }
  return hw;
}

double homogeneous_norm(const GroupPoint& g) { return HomogeneousNorm(g.alg())(g); }

double quasi_distance(const GroupPoint& g, const GroupPoint& h) {
  if (!g.alg()->same_as(*h.alg())) throw DomainError("quasi_distance: algebra mismatch");
  return homogeneous_norm(group_mul(group_inv(g), h));
}

double BallSample::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

BallSample BallSample::transported(const GroupPoint& new_center, double new_radius) const {
  if (!new_center.alg()->same_as(*alg)) throw DomainError("transported: algebra mismatch");
  if (!(new_radius > 0.0)) throw DomainError("transported: radius must be positive");
  const double lam = new_radius / radius;
  const double wscale = std::pow(lam, alg->hausdorff_dimension());
  const GroupPoint c_inv = group_inv(GroupPoint(alg, center));
  BallSample out;
  out.alg = alg;
  out.center = new_center.coords();
  out.radius = new_radius;
  out.seed = seed;
  out.dim = dim;
  out.coords.resize(coords.size());
  out.weights.resize(weights.size());
  for (std::size_t i = 0; i < size(); ++i) {
    std::vector<double> p(point(i), point(i) + dim);
    GroupPoint moved = group_mul(
        new_center, dilate(lam, group_mul(c_inv, GroupPoint(alg, std::move(p)))));
    for (int d = 0; d < dim; ++d) out.coords[i * dim + d] = moved.coords()[d];
    out.weights[i] = weights[i] * wscale;
  }
  return out;
}

BallSample ball_sample(const GroupPoint& center, double r, std::size_t count, std::uint64_t seed,
                       NormVariant variant) {
  if (!(r > 0.0)) throw DomainError("ball_sample: radius must be positive");
  if (count < 1) throw DomainError("ball_sample: count must be >= 1");
  const AlgebraPtr alg = center.alg();
  const HomogeneousNorm norm(alg, variant);
  const int dim = alg->dim();
  const std::vector<double> hw = norm.ball_box_halfwidths(r);
  double box_volume = 1.0;
  for (double h : hw) box_volume *= 2.0 * h;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  BallSample out;
  out.alg = alg;
  out.center = center.coords();
  out.radius = r;
  out.seed = seed;
  out.dim = dim;
  const double per_point_weight = box_volume / static_cast<double>(count);
  std::vector<double> u(dim);
  for (std::size_t n = 0; n < count; ++n) {
    for (int d = 0; d < dim; ++d) u[d] = hw[d] * unif(rng);
    if (norm.eval_coords(u) >= r) continue;
    GroupPoint p = group_mul(center, GroupPoint(alg, u));
    out.coords.insert(out.coords.end(), p.coords().begin(), p.coords().end());
    out.weights.push_back(per_point_weight);
  }
  if (out.weights.empty())
    throw GuardError("ball_sample: no proposal landed in the ball after " +
                     std::to_string(count) + " draws (degenerate radius?)");
  return out;
}

BallSample ball_sample(const GroupPoint& center, double r, std::size_t count, std::uint64_t seed) {
  const NormVariant v =
      center.alg()->step() <= 2 ? NormVariant::koranyi : NormVariant::power_sum;
  return ball_sample(center, r, count, seed, v);
}

void write_ball_sample_csv(const BallSample& s, std::ostream& os) {
  const GradedLieAlgebra& A = *s.alg;
  for (int r = 1; r <= A.step(); ++r)
    for (int i = 1; i <= A.stratum_dim(r); ++i) os << "x_" << r << "_" << i << ",";
  os << "weight\n";
  char buf[64];
  for (std::size_t n = 0; n < s.size(); ++n) {
    for (int d = 0; d < s.dim; ++d) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.point(n)[d]);
      os << buf << ",";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", s.weights[n]);
    os << buf << "\n";
  }
}

void write_ball_sample_binary(const BallSample& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open for writing: " + path);
  nlohmann::json header = {{"format", "carnotlab-ball-sample"},
                           {"version", 1},
                           {"algebra", s.alg->name()},
                           {"dim", s.dim},
                           {"count", s.size()},
                           {"radius", s.radius},
                           {"seed", s.seed},
                           {"center", s.center}};
  const std::string h = header.dump();
  f << h << '\n';
  f.write(reinterpret_cast<const char*>(s.coords.data()),
          static_cast<std::streamsize>(s.coords.size() * sizeof(double)));
  f.write(reinterpret_cast<const char*>(s.weights.data()),
          static_cast<std::streamsize>(s.weights.size() * sizeof(double)));
}

BallSample read_ball_sample_binary(const AlgebraPtr& alg, const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open for reading: " + path);
  std::string line;
  std::getline(f, line);
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.at("format") != "carnotlab-ball-sample")
    throw DomainError("not a ball sample file: " + path);
  if (header.at("algebra") != alg->name())
    throw DomainError("ball sample algebra mismatch: " + path);
  BallSample s;
  s.alg = alg;
  s.dim = header.at("dim").get<int>();
  s.radius = header.at("radius").get<double>();
  s.seed = header.at("seed").get<std::uint64_t>();
  s.center = header.at("center").get<std::vector<double>>();
  const std::size_t count = header.at("count").get<std::size_t>();
  s.coords.resize(count * s.dim);
  s.weights.resize(count);
  f.read(reinterpret_cast<char*>(s.coords.data()),
         static_cast<std::streamsize>(s.coords.size() * sizeof(double)));
  f.read(reinterpret_cast<char*>(s.weights.data()),
         static_cast<std::streamsize>(s.weights.size() * sizeof(double)));
  if (!f) throw DomainError("truncated ball sample file: " + path);
  return s;
}

}  // namespace carnotlab
