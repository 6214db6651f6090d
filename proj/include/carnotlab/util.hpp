#ifndef CARNOTLAB_UTIL_HPP
#define CARNOTLAB_UTIL_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace carnotlab {

inline constexpr const char* kVersion = "0.1.0";

// Geometric grid from lo to hi with `count` points (count >= 2, lo < hi).
std::vector<double> log_grid(double lo, double hi, int count);

// Midpoint weights dt_j for a geometric grid, suitable for sums
// approximating an integral in dt (not dt/t): dt_j = t_{j+1/2} - t_{j-1/2}.
std::vector<double> log_grid_weights(const std::vector<double>& t);

// Thread count used by parallel_for. Settable once from the CLI.
int max_threads();
void set_max_threads(int n);

// Runs fn(begin, end) on disjoint chunks of [0, n). Results must be written
// to disjoint slots; reductions should happen afterwards in index order so
// output does not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

double binomial(int n, int k);

// Ordinary least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

std::uint64_t hash_mix(std::uint64_t x);

}  // namespace carnotlab

#endif
