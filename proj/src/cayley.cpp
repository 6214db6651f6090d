#include "carnotlab/cayley.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "carnotlab/errors.hpp"

namespace carnotlab {

namespace {

std::int64_t checked_add(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_add_overflow(x, y, &r)) throw DomainError("integer overflow in group arithmetic");
  return r;
}

std::int64_t checked_mul(std::int64_t x, std::int64_t y) {
  std::int64_t r;
  if (__builtin_mul_overflow(x, y, &r)) throw DomainError("integer overflow in group arithmetic");
  return r;
}

}  // namespace

bool IntWord::is_identity() const {
  for (std::int64_t x : v)
    if (x != 0) return false;
  return true;
}

DiscreteHeisenberg::DiscreteHeisenberg(int k) : k_(k) {
  if (k < 1) throw DomainError("DiscreteHeisenberg: k must be >= 1");
  if (k > IntWord::kMaxK)
    throw GuardError("DiscreteHeisenberg: k > " + std::to_string(IntWord::kMaxK) +
                     " exceeds the compiled coordinate width");
  for (int i = 0; i < k_; ++i) {
    for (int part = 0; part < 2; ++part) {
      for (int sign : {+1, -1}) {
        IntWord g;
        g.k = static_cast<std::int8_t>(k_);
        g.v[part * IntWord::kMaxK + i] = sign;
        gens_.push_back(g);
      }
    }
  }
}

IntWord DiscreteHeisenberg::identity() const {
  IntWord e;
  e.k = static_cast<std::int8_t>(k_);
  return e;
}

IntWord DiscreteHeisenberg::central() const { return central_power(1); }

IntWord DiscreteHeisenberg::central_power(std::int64_t m) const {
  IntWord g = identity();
  g.v[2 * IntWord::kMaxK] = m;
  return g;
}

IntWord DiscreteHeisenberg::mul(const IntWord& g, const IntWord& h) const {
  if (g.k != k_ || h.k != k_) throw DomainError("dh_mul: mixed group ranks");
  IntWord r;
  r.k = g.k;
  std::int64_t twist = 0;
  for (int i = 0; i < k_; ++i) {
    r.v[i] = checked_add(g.a(i), h.a(i));
    r.v[IntWord::kMaxK + i] = checked_add(g.b(i), h.b(i));
    twist = checked_add(twist, checked_mul(g.a(i), h.b(i)));
  }
  r.v[2 * IntWord::kMaxK] = checked_add(checked_add(g.c(), h.c()), twist);
  return r;
}

IntWord DiscreteHeisenberg::inv(const IntWord& g) const {
  if (g.k != k_) throw DomainError("dh_inv: mixed group ranks");
  IntWord r;
  r.k = g.k;
  std::int64_t twist = 0;
  for (int i = 0; i < k_; ++i) {
    r.v[i] = -g.a(i);
    r.v[IntWord::kMaxK + i] = -g.b(i);
    twist = checked_add(twist, checked_mul(g.a(i), g.b(i)));
  }
  r.v[2 * IntWord::kMaxK] = checked_add(-g.c(), twist);
  return r;
}

std::vector<double> DiscreteHeisenberg::to_exponential(const IntWord& g) const {
  std::vector<double> c(2 * k_ + 1, 0.0);
  double dot = 0.0;
  for (int i = 0; i < k_; ++i) {
    c[i] = static_cast<double>(g.a(i));
    c[k_ + i] = static_cast<double>(g.b(i));
    dot += static_cast<double>(g.a(i)) * static_cast<double>(g.b(i));
  }
  c[2 * k_] = static_cast<double>(g.c()) - dot / 2.0;
  return c;
}

IntWord DiscreteHeisenberg::from_exponential(const std::vector<double>& coords) const {
  if (static_cast<int>(coords.size()) != 2 * k_ + 1)
    throw DomainError("from_exponential: dimension mismatch");
  IntWord g = identity();
  double dot = 0.0;
  for (int i = 0; i < k_; ++i) {
    g.v[i] = std::llround(coords[i]);
    g.v[IntWord::kMaxK + i] = std::llround(coords[k_ + i]);
    dot += coords[i] * coords[k_ + i];
  }
  g.v[2 * IntWord::kMaxK] = std::llround(coords[2 * k_] + dot / 2.0);
  return g;
}

CayleyBall::CayleyBall(DiscreteHeisenberg group, int radius,
                       std::unordered_map<IntWord, std::int32_t, IntWordHash> dist,
                       std::vector<std::size_t> sphere_sizes)
    : group_(std::move(group)), radius_(radius), dist_(std::move(dist)) {
  cum_sizes_.resize(sphere_sizes.size());
  std::size_t acc = 0;
  for (std::size_t i = 0; i < sphere_sizes.size(); ++i) {
    acc += sphere_sizes[i];
    cum_sizes_[i] = acc;
  }
}

std::size_t CayleyBall::ball_size(int n) const {
  if (n < 0 || n > radius_) throw DomainError("ball_size: n outside enumerated radius");
  return cum_sizes_[n];
}

std::optional<int> CayleyBall::word_length(const IntWord& g) const {
  auto it = dist_.find(g);
  if (it == dist_.end()) return std::nullopt;
  return static_cast<int>(it->second);
}

std::vector<IntWord> CayleyBall::elements(int n) const {
  if (n < 0 || n > radius_) throw DomainError("elements: n outside enumerated radius");
  std::vector<IntWord> out;
  out.reserve(cum_sizes_[n]);
  for (const auto& [w, d] : dist_)
    if (d <= n) out.push_back(w);
  std::sort(out.begin(), out.end(), [](const IntWord& x, const IntWord& y) { return x.v < y.v; });
  return out;
}

double estimate_ball_size(const DiscreteHeisenberg& G, int n) {
  if (n <= 1) return 1.0 + (n == 1 ? G.generators().size() : 0.0);
  return std::pow(static_cast<double>(n) + 1.0, G.hausdorff_dimension());
}

CayleyBall bfs_ball(const DiscreteHeisenberg& G, int n, std::size_t guard) {
  if (n < 0) throw DomainError("bfs_ball: radius must be >= 0");
  const double estimate = estimate_ball_size(G, n);
  if (estimate > static_cast<double>(guard))
    throw GuardError("bfs_ball: estimated |B_" + std::to_string(n) + "| ~ " +
                     std::to_string(static_cast<std::uint64_t>(estimate)) +
                     " exceeds the guard of " + std::to_string(guard));

  std::unordered_map<IntWord, std::int32_t, IntWordHash> dist;
  dist.reserve(static_cast<std::size_t>(std::min(estimate * 1.3, 1e18)));
  std::vector<std::size_t> sphere_sizes(static_cast<std::size_t>(n) + 1, 0);
  std::vector<IntWord> frontier = {G.identity()};
  dist.emplace(G.identity(), 0);
  sphere_sizes[0] = 1;
  for (int level = 1; level <= n; ++level) {
    std::vector<IntWord> next;
    next.reserve(frontier.size() * G.generators().size());
    for (const IntWord& g : frontier) {
      for (const IntWord& a : G.generators()) {
        IntWord h = G.mul(g, a);
        if (dist.emplace(h, level).second) next.push_back(h);
      }
    }
    sphere_sizes[level] = next.size();
    if (dist.size() > guard)
      throw GuardError("bfs_ball: enumeration exceeded the guard of " + std::to_string(guard));
    frontier = std::move(next);
  }
  return CayleyBall(G, n, std::move(dist), std::move(sphere_sizes));
}

std::vector<std::size_t> growth_series(const DiscreteHeisenberg& G, int n_max,
                                       std::size_t guard) {
  const CayleyBall ball = bfs_ball(G, n_max, guard);
  std::vector<std::size_t> out(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) out[n] = ball.ball_size(n);
  return out;
}

VerticalProfile vertical_profile(const DiscreteHeisenberg& G, int k_max, std::size_t guard) {
  if (k_max < 1) throw DomainError("vertical_profile: k_max must be >= 1");
  VerticalProfile out;
  out.k_requested = k_max;

  // d_W(c^j) <= 4 ceil(sqrt(j)), so a half ball of radius 2 ceil(sqrt(k_max)) + 2
  // meets every geodesic midpoint.
  int half = 2 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k_max)))) + 2;
  while (half > 1 && estimate_ball_size(G, half) > static_cast<double>(guard)) --half;
  const CayleyBall ball = bfs_ball(G, half, guard);
  const std::int64_t reach = 2 * static_cast<std::int64_t>(half);

  std::int64_t max_c = 0;
  for (const auto& [w, d] : ball.table())
    max_c = std::max<std::int64_t>(max_c, std::abs(w.c()));

  // d_W(c^j) = min |w| + |w^{-1} c^j| over w in the half ball, and since c^j
  // is central, w^{-1} c^j differs from w^{-1} only in its c-entry.
  const std::int64_t kUnset = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> best(static_cast<std::size_t>(k_max) + 1, kUnset);
  for (const auto& [w, dw] : ball.table()) {
    IntWord u = G.inv(w);
    const std::int64_t base_c = u.c();
    const std::int64_t j_lo = std::max<std::int64_t>(1, -max_c - base_c);
    const std::int64_t j_hi = std::min<std::int64_t>(k_max, max_c - base_c);
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      u.v[2 * IntWord::kMaxK] = base_c + j;
      auto du = ball.word_length(u);
      if (du && dw + *du < best[j]) best[j] = dw + *du;
    }
  }
  for (int j = 1; j <= k_max; ++j) {
    if (best[j] == kUnset || best[j] > reach) {
      out.k_reached = j - 1;
      return out;  // partial: target out of reach of the guarded ball
    }
    out.lengths.push_back(best[j]);
  }
  out.k_reached = k_max;
  return out;
}

int word_length(const CayleyBall& ball, const IntWord& g) {
  auto d = ball.word_length(g);
  if (!d) throw DomainError("word_length: element not enumerated in the cached ball");
  return *d;
}

std::vector<IntWord> generator_neighbors(const DiscreteHeisenberg& G, const IntWord& g) {
  std::vector<IntWord> out;
  out.reserve(G.generators().size());
  for (const IntWord& a : G.generators()) out.push_back(G.mul(g, a));
  return out;
}

DiscreteHeisenberg discrete_group_by_name(const std::string& spec) {
  const std::string prefix = "heisenberg-z:";
  if (spec.rfind(prefix, 0) != 0)
    throw DomainError("unknown discrete group spec: " + spec);
  int k = 0;
  try {
    k = std::stoi(spec.substr(prefix.size()));
  } catch (const std::exception&) {
    throw DomainError("bad discrete group parameter in spec: " + spec);
  }
  return DiscreteHeisenberg(k);
}

void write_ball_cache(const CayleyBall& ball, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open for writing: " + path);
  nlohmann::json header = {{"format", "carnotlab-ball-cache"},
                           {"version", 1},
                           {"tool_version", kVersion},
                           {"group", "heisenberg-z:" + std::to_string(ball.group().k())},
                           {"radius", ball.radius()},
                           {"count", ball.size()}};
  f << header.dump() << '\n';
  std::vector<IntWord> sorted = ball.elements(ball.radius());
  for (const IntWord& w : sorted) {
    const std::int32_t d = *ball.word_length(w);
    f.write(reinterpret_cast<const char*>(w.v.data()),
            static_cast<std::streamsize>(w.v.size() * sizeof(std::int64_t)));
    f.write(reinterpret_cast<const char*>(&d), sizeof(d));
  }
}

std::optional<CayleyBall> read_ball_cache(const std::string& path, const DiscreteHeisenberg& G,
                                          int min_radius) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::string line;
  std::getline(f, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (header.value("format", "") != "carnotlab-ball-cache" || header.value("version", 0) != 1)
    return std::nullopt;
  if (header.value("group", "") != "heisenberg-z:" + std::to_string(G.k())) return std::nullopt;
  const int radius = header.value("radius", -1);
  if (radius < min_radius) return std::nullopt;
  const std::size_t count = header.value("count", std::size_t{0});
  std::unordered_map<IntWord, std::int32_t, IntWordHash> dist;
  dist.reserve(count * 13 / 10);
  std::vector<std::size_t> sphere_sizes(static_cast<std::size_t>(radius) + 1, 0);
  for (std::size_t i = 0; i < count; ++i) {
    IntWord w;
    w.k = static_cast<std::int8_t>(G.k());
    std::int32_t d = 0;
    f.read(reinterpret_cast<char*>(w.v.data()),
           static_cast<std::streamsize>(w.v.size() * sizeof(std::int64_t)));
    f.read(reinterpret_cast<char*>(&d), sizeof(d));
    if (!f) return std::nullopt;
    dist.emplace(w, d);
    sphere_sizes[static_cast<std::size_t>(d)] += 1;
  }
  return CayleyBall(G, radius, std::move(dist), std::move(sphere_sizes));
}

}  // namespace carnotlab
