#ifndef CARNOTLAB_CAYLEY_HPP
#define CARNOTLAB_CAYLEY_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "carnotlab/algebra.hpp"
#include "carnotlab/util.hpp"

namespace carnotlab {

// Integer normal form of an element of the discrete Heisenberg group
// H^{2k+1}_Z in the unipotent matrix model: a-part, b-part, corner c.
// Multiplication is (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a.b'), exact in
// 64-bit integers with overflow checks.
struct IntWord {
  static constexpr int kMaxK = 2;
  std::array<std::int64_t, 2 * kMaxK + 1> v{};  // a x kMaxK, b x kMaxK, c
  std::int8_t k = 1;

  std::int64_t a(int i) const { return v[i]; }
  std::int64_t b(int i) const { return v[kMaxK + i]; }
  std::int64_t c() const { return v[2 * kMaxK]; }
  bool is_identity() const;
  bool operator==(const IntWord& o) const { return k == o.k && v == o.v; }
};

struct IntWordHash {
  std::size_t operator()(const IntWord& w) const {
    std::uint64_t h = 0x243f6a8885a308d3ULL ^ static_cast<std::uint64_t>(w.k);
    for (std::int64_t x : w.v) h = hash_mix(h ^ static_cast<std::uint64_t>(x));
    return static_cast<std::size_t>(h);
  }
};

class DiscreteHeisenberg {
public:
  explicit DiscreteHeisenberg(int k);

  int k() const { return k_; }
  int hausdorff_dimension() const { return 2 * k_ + 2; }
  IntWord identity() const;
  // Symmetric generating set {a_i^{+-1}, b_i^{+-1}}, 4k elements.
  const std::vector<IntWord>& generators() const { return gens_; }
  IntWord central() const;  // c = [a_1, b_1]
  IntWord central_power(std::int64_t m) const;

  IntWord mul(const IntWord& g, const IntWord& h) const;
  IntWord inv(const IntWord& g) const;

  // Exponential coordinates in heisenberg_algebra(k): the horizontal parts
  // carry over and z_exp = c - a.b/2.
  std::vector<double> to_exponential(const IntWord& g) const;
  IntWord from_exponential(const std::vector<double>& coords) const;

private:
  int k_ = 1;
  std::vector<IntWord> gens_;
};

// Enumerated word-metric ball with exact minimal word lengths.
class CayleyBall {
public:
  CayleyBall(DiscreteHeisenberg group, int radius,
             std::unordered_map<IntWord, std::int32_t, IntWordHash> dist,
             std::vector<std::size_t> sphere_sizes);

  const DiscreteHeisenberg& group() const { return group_; }
  int radius() const { return radius_; }
  std::size_t size() const { return dist_.size(); }
  // |B_n| for n = 0..radius.
  std::size_t ball_size(int n) const;
  std::optional<int> word_length(const IntWord& g) const;

  const std::unordered_map<IntWord, std::int32_t, IntWordHash>& table() const { return dist_; }
  // Elements with word length <= n, in a deterministic (sorted) order.
  std::vector<IntWord> elements(int n) const;

private:
  DiscreteHeisenberg group_;
  int radius_ = 0;
  std::unordered_map<IntWord, std::int32_t, IntWordHash> dist_;
  std::vector<std::size_t> cum_sizes_;  // cum_sizes_[n] = |B_n|
};

// Default cap on enumerated elements; bfs_ball refuses beyond it.
inline constexpr std::size_t kDefaultBallGuard = 40'000'000;

// Estimated |B_n| ~ n^{n_h}, used by the memory guard before enumerating.
double estimate_ball_size(const DiscreteHeisenberg& G, int n);

CayleyBall bfs_ball(const DiscreteHeisenberg& G, int n,
                    std::size_t guard = kDefaultBallGuard);

// Exact |B_0|, ..., |B_{n_max}|.
std::vector<std::size_t> growth_series(const DiscreteHeisenberg& G, int n_max,
                                       std::size_t guard = kDefaultBallGuard);

struct VerticalProfile {
  std::vector<std::int64_t> lengths;  // d_W(c^j) for j = 1..k_reached
  int k_requested = 0;
  int k_reached = 0;  // < k_requested when the guard cut the run short
};

// Word lengths of central powers via a meet-in-the-middle search on a ball
// of half the needed radius.
VerticalProfile vertical_profile(const DiscreteHeisenberg& G, int k_max,
                                 std::size_t guard = kDefaultBallGuard);

int word_length(const CayleyBall& ball, const IntWord& g);
std::vector<IntWord> generator_neighbors(const DiscreteHeisenberg& G, const IntWord& g);

// Enlargement factor: B_n . c^k stays inside B_{cn} for k <= n^2 because
// d_W(c^k) <= 4 ceil(sqrt(k)) <= 4n + 4 <= 5n + 1 <= 6n.
inline constexpr int kDiscreteEnlargement = 6;

// Parses "heisenberg-z:<k>".
DiscreteHeisenberg discrete_group_by_name(const std::string& spec);

// Sorted binary record cache with a JSON header line.
void write_ball_cache(const CayleyBall& ball, const std::string& path);
std::optional<CayleyBall> read_ball_cache(const std::string& path, const DiscreteHeisenberg& G,
                                          int min_radius);

}  // namespace carnotlab

#endif
