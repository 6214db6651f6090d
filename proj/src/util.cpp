#include "carnotlab/util.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "carnotlab/errors.hpp"

namespace carnotlab {

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("log_grid: need 0 < lo < hi");
  if (count < 2) throw DomainError("log_grid: need count >= 2");
  std::vector<double> t(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) t[i] = lo * std::exp(step * i);
  t.front() = lo;
  t.back() = hi;
  return t;
}

std::vector<double> log_grid_weights(const std::vector<double>& t) {
  const std::size_t n = t.size();
  if (n < 2) throw DomainError("log_grid_weights: need at least 2 points");
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i == 0) ? t[0] : std::sqrt(t[i - 1] * t[i]);
    const double right = (i + 1 == n) ? t[n - 1] : std::sqrt(t[i] * t[i + 1]);
    w[i] = right - left;
  }
  return w;
}

namespace {
int g_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int max_threads() { return g_threads; }
void set_max_threads(int n) { g_threads = std::max(1, n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t nthreads = std::min<std::size_t>(g_threads, n);
  if (nthreads <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("ls_slope: bad input");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::uint64_t hash_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace carnotlab
