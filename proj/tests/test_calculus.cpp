#include <doctest.h>

#include <cmath>
#include <random>

#include "carnotlab/calculus.hpp"
#include "carnotlab/util.hpp"
#include "carnotlab/errors.hpp"

using namespace carnotlab;

namespace {

GridFunction sample_h1(const AlgebraPtr& alg, double halfwidth, int nodes_per_axis,
                       const std::function<double(double, double, double)>& f) {
  const Grid grid = Grid::centered_box({halfwidth, halfwidth, halfwidth},
                                       {nodes_per_axis, nodes_per_axis, nodes_per_axis});
  return GridFunction::sample(alg, grid,
                              [&](const std::vector<double>& c) { return f(c[0], c[1], c[2]); });
}

}  // namespace

TEST_CASE("heat kernel closed forms match finite differences") {
  for (double t : {0.3, 1.0, 2.5}) {
    CHECK(heat_kernel(t, 0.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(M_PI * t))).epsilon(1e-14));
    for (double x : {-1.7, -0.4, 0.0, 0.9, 2.2}) {
      const double eps_t = 1e-5 * t;
      const double dt_fd = (heat_kernel(t + eps_t, x) - heat_kernel(t - eps_t, x)) / (2 * eps_t);
      CHECK(heat_kernel_dt(t, x) == doctest::Approx(dt_fd).epsilon(1e-6));
      const double eps_x = 1e-6;
      const double dx_fd = (heat_kernel(t, x + eps_x) - heat_kernel(t, x - eps_x)) / (2 * eps_x);
      CHECK(heat_kernel_dx(t, x) == doctest::Approx(dx_fd).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(heat_kernel(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(heat_kernel(-1.0, 1.0), DomainError);
}

TEST_CASE("heat kernel integral identities") {
  const HeatIdentityReport r1 = heat_identities(0.5);
  CHECK(r1.mass == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r1.dx_l1 == doctest::Approx(r1.dx_l1_expected).epsilon(1e-6));
  CHECK(r1.moment == doctest::Approx(r1.moment_expected).epsilon(1e-8));
  CHECK(r1.semigroup_err < 1e-8);

  // t |dh/dt|_1 is t-independent; its value is sqrt(2/pi) e^{-1/2}
  const double expected_c = std::sqrt(2.0 / M_PI) * std::exp(-0.5);
  for (double t : {0.25, 1.0, 4.0}) {
    const HeatIdentityReport r = heat_identities(t);
    CHECK(r.dt_l1_times_t == doctest::Approx(expected_c).epsilon(1e-6));
    CHECK(r.mass == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("horizontal gradient on coordinate functions") {
  auto h1 = heisenberg_algebra(1);
  const GridFunction constf = sample_h1(h1, 1.0, 21, [](double, double, double) { return 3.5; });
  const HorizontalGradient gc = horizontal_gradient(constf);
  CHECK(!gc.step_below_grid);
  for (std::size_t i = 0; i < gc.field.nodes(); ++i) {
    const std::vector<double> c = constf.grid().node_coords(i);
    // the zero extension bites at the box boundary; interior nodes only
    if (std::abs(c[0]) > 0.7 || std::abs(c[1]) > 0.7 || std::abs(c[2]) > 0.7) continue;
    CHECK(std::abs(gc.field.node_values(i)[0]) < 1e-13);
    CHECK(std::abs(gc.field.node_values(i)[1]) < 1e-13);
  }

  const GridFunction fx = sample_h1(h1, 1.0, 21, [](double x, double, double) { return x; });
  const HorizontalGradient gx = horizontal_gradient(fx);
  const GridFunction fz = sample_h1(h1, 1.0, 21, [](double, double, double z) { return z; });
  const HorizontalGradient gz = horizontal_gradient(fz);
  const Grid& grid = fx.grid();
  for (std::size_t i = 0; i < fx.nodes(); ++i) {
    const std::vector<double> c = grid.node_coords(i);
    const bool interior = std::abs(c[0]) < 0.7 && std::abs(c[1]) < 0.7 && std::abs(c[2]) < 0.7;
    if (!interior) continue;
    CHECK(gx.field.node_values(i)[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(gx.field.node_values(i)[1]) < 1e-12);
    // left-invariant fields applied to z: X z = -y/2, Y z = x/2
    CHECK(gz.field.node_values(i)[0] == doctest::Approx(-c[1] / 2).epsilon(1e-10));
    CHECK(gz.field.node_values(i)[1] == doctest::Approx(c[0] / 2).epsilon(1e-10));
  }
}

TEST_CASE("horizontal gradient converges at second order") {
  auto h1 = heisenberg_algebra(1);
  auto f = [](double x, double y, double z) { return std::sin(x + 2 * z) * std::cos(y); };
  // X f = df/dx - (y/2) df/dz, Y f = df/dy + (x/2) df/dz
  auto xf = [](double x, double y, double z) {
    return std::cos(x + 2 * z) * std::cos(y) * (1.0 - y);
  };
  auto yf = [](double x, double y, double z) {
    return -std::sin(x + 2 * z) * std::sin(y) + (x / 2) * 2 * std::cos(x + 2 * z) * std::cos(y);
  };
  double err[2];
  int idx = 0;
  for (int nodes : {21, 41}) {
    const GridFunction g = sample_h1(h1, 1.0, nodes, f);
    const HorizontalGradient hg = horizontal_gradient(g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.nodes(); ++i) {
      const std::vector<double> c = g.grid().node_coords(i);
      if (std::abs(c[0]) > 0.5 || std::abs(c[1]) > 0.5 || std::abs(c[2]) > 0.5) continue;
      worst = std::max(worst, std::abs(hg.field.node_values(i)[0] - xf(c[0], c[1], c[2])));
      worst = std::max(worst, std::abs(hg.field.node_values(i)[1] - yf(c[0], c[1], c[2])));
    }
    err[idx++] = worst;
  }
  const double order = std::log2(err[0] / err[1]);
  INFO("observed order: " << order);
  CHECK(order >= 1.9);
}

TEST_CASE("gradient step warning") {
  auto h1 = heisenberg_algebra(1);
  const GridFunction f = sample_h1(h1, 1.0, 11, [](double x, double, double) { return x; });
  CHECK(horizontal_gradient(f, 0.01).step_below_grid);
}

TEST_CASE("vertical convolution") {
  auto h1 = heisenberg_algebra(1);
  const GroupPoint v(h1, {0.0, 0.0, 1.0});
  const GridFunction f = sample_h1(h1, 1.5, 25, [](double x, double y, double z) {
    return bump_function({x, y, z}, 1.0);
  });

  SUBCASE("narrow kernels approximate the identity") {
    double prev = 1e300;
    for (double t : {1e-4, 1e-5, 1e-6}) {
      const GridFunction conv = vertical_convolve(heat_kernel_1d(t), f, v, 513);
      double worst = 0.0;
      for (std::size_t i = 0; i < f.nodes(); ++i)
        worst = std::max(worst, std::abs(conv.node_values(i)[0] - f.node_values(i)[0]));
      CHECK(worst < prev + 1e-12);
      prev = worst;
    }
    CHECK(prev < 1e-3);
  }

  SUBCASE("semigroup property within quadrature tolerance") {
    // convolution runs along z, so only the z resolution matters here
    const Grid fine_grid = Grid::centered_box({1.5, 1.5, 1.5}, {5, 5, 3001});
    const GridFunction ff = GridFunction::sample(h1, fine_grid, [](const std::vector<double>& c) {
      return bump_function(c, 1.0);
    });
    const GridFunction once = vertical_convolve(heat_kernel_1d(0.004), ff, v, 513);
    const GridFunction twice = vertical_convolve(heat_kernel_1d(0.004), once, v, 513);
    const GridFunction direct = vertical_convolve(heat_kernel_1d(0.008), ff, v, 513);
    double worst = 0.0;
    for (std::size_t i = 0; i < ff.nodes(); ++i)
      worst = std::max(worst, std::abs(twice.node_values(i)[0] - direct.node_values(i)[0]));
    CHECK(worst < 1e-6);
  }

  SUBCASE("Young inequality") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    GridFunction noisy = f;
    for (double& x : noisy.raw()) x = unif(rng);
    const double t = 0.05;
    const GridFunction conv = vertical_convolve(heat_kernel_dt_1d(t), noisy, v, 513);
    const double psi_l1 = std::sqrt(2.0 / M_PI) * std::exp(-0.5) / t;
    for (double p : {1.0, 2.0, 3.0})
      CHECK(conv.lp_norm(p) <= psi_l1 * noisy.lp_norm(p) * (1.0 + 1e-9));
  }

  SUBCASE("non-central directions are rejected") {
    const GroupPoint bad(h1, {1.0, 0.0, 0.0});
    CHECK_THROWS_AS(vertical_convolve(heat_kernel_1d(0.1), f, bad), DomainError);
  }
}

TEST_CASE("g-function") {
  auto h1 = heisenberg_algebra(1);
  const GroupPoint v(h1, {0.0, 0.0, 1.0});
  const GridFunction zero = sample_h1(h1, 1.0, 15, [](double, double, double) { return 0.0; });
  const std::vector<double> t_grid = log_grid(1e-3, 1.0, 10);
  const GridFunction gz = g_function(zero, v, 2.0, t_grid);
  for (std::size_t i = 0; i < gz.nodes(); ++i) CHECK(gz.node_values(i)[0] == 0.0);
  CHECK_THROWS_AS(g_function(zero, v, 2.0, {}), DomainError);

  const GridFunction f = sample_h1(h1, 1.5, 21, [](double x, double y, double z) {
    return bump_function({x, y, z}, 1.0);
  });
  const GridFunction coarse = g_function(f, v, 2.0, log_grid(1e-3, 2.0, 12));
  const GridFunction fine = g_function(f, v, 2.0, log_grid(1e-3, 2.0, 24));
  const double nc = coarse.lp_norm(2.0), nf = fine.lp_norm(2.0);
  CHECK(std::abs(nc - nf) / nf < 0.01);

  // martingale-cotype shape: the L2 -> L2 ratio of this bump family came out
  // at 0.41..0.44 on first computation; guarded as a regression window
  for (double radius : {0.6, 0.8, 1.0}) {
    const GridFunction b = sample_h1(h1, 1.5, 21, [radius](double x, double y, double z) {
      return bump_function({x, y, z}, radius);
    });
    const GridFunction gb = g_function(b, v, 2.0, log_grid(1e-3, 4.0, 16));
    const double ratio = gb.lp_norm(2.0) / b.lp_norm(2.0);
    INFO("g-function L2 ratio at radius " << radius << ": " << ratio);
    CHECK(ratio > 0.35);
    CHECK(ratio < 0.50);
  }
}

TEST_CASE("finite differences") {
  auto h1 = heisenberg_algebra(1);
  const GridFunction f = sample_h1(h1, 1.0, 17, [](double x, double y, double z) {
    return 2.0 * z + 0.5 * x - y + 3.0;
  });

  SUBCASE("difference along the identity vanishes") {
    const GridFunction d = finite_difference(f, identity(h1), 1);
    for (std::size_t i = 0; i < d.nodes(); ++i) CHECK(d.node_values(i)[0] == 0.0);
  }

  SUBCASE("second difference kills functions affine along the orbit") {
    const GroupPoint g(h1, {0.0, 0.0, 0.3});
    const GridFunction d2 = finite_difference(f, g, 2);
    for (std::size_t i = 0; i < d2.nodes(); ++i) {
      const std::vector<double> c = f.grid().node_coords(i);
      if (std::abs(c[0]) > 0.9 || std::abs(c[1]) > 0.9 || std::abs(c[2]) > 0.3) continue;
      CHECK(std::abs(d2.node_values(i)[0]) < 1e-12);
    }
  }

  SUBCASE("iterated differences annihilate low weighted degree exactly") {
    // weighted degree <= 2 on the Heisenberg group, dilated central direction
    auto poly = [](const GroupPoint& p) {
      const auto& c = p.coords();
      return 1.5 * c[0] * c[0] - 2.0 * c[0] * c[1] + 0.25 * c[1] * c[1] + c[0] - 3.0 * c[2] + 2.0;
    };
    const GroupPoint v(h1, {0.0, 0.0, 1.0});
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const GroupPoint x(h1, {unif(rng), unif(rng), unif(rng)});
      const double d2 = finite_difference_eval(poly, x, dilate(0.35, v), 2);
      CHECK(std::abs(d2) < 1e-10);
    }
  }

  SUBCASE("annihilation on the Engel group with a stratum-2 direction") {
    auto engel = filiform_algebra(3);
    // weighted degree <= 3 in coordinates (x, y0; y1; y2)
    auto poly = [](const GroupPoint& p) {
      const auto& c = p.coords();
      return c[3] + 2.0 * c[2] - c[0] * c[2] + c[1] * c[2] + c[0] * c[0] * c[1] - 0.5;
    };
    const GroupPoint v(engel, {0.0, 0.0, 1.0, 0.0});
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const GroupPoint x(engel, {unif(rng), unif(rng), unif(rng), unif(rng)});
      const double d2 = finite_difference_eval(poly, x, dilate(0.5, v), 2);
      CHECK(std::abs(d2) < 1e-10);
    }
  }

  SUBCASE("commutes with left translation") {
    auto fonc = [](const GroupPoint& p) {
      const auto& c = p.coords();
      return std::sin(c[0]) + c[1] * c[2];
    };
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const GroupPoint g(h1, {0.2, -0.1, 0.4});
    for (int trial = 0; trial < 20; ++trial) {
      const GroupPoint h(h1, {unif(rng), unif(rng), unif(rng)});
      const GroupPoint x(h1, {unif(rng), unif(rng), unif(rng)});
      auto shifted = [&](const GroupPoint& p) { return fonc(group_mul(h, p)); };
      const double a = finite_difference_eval(shifted, x, g, 2);
      const double b = finite_difference_eval(fonc, group_mul(h, x), g, 2);
      CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(finite_difference(f, identity(h1), 0), DomainError);
}

TEST_CASE("hardy inequality checker") {
  SUBCASE("zero function") {
    const StepFunction zero{{1.0, 2.0}, {0.0}};
    const HardyReport r = hardy_check(zero, 1.0, 2.0, HardyForm::first);
    CHECK(r.lhs == 0.0);
    CHECK(r.holds);
  }

  SUBCASE("indicator of [1,2], first form, closed-form oracle") {
    const StepFunction ind{{1.0, 2.0}, {1.0}};
    const HardyReport r = hardy_check(ind, 1.0, 2.0, HardyForm::first);
    // lhs^2 = int_1^2 (x-1)^2/x^2 + int_2^inf 1/x^2 = 2 - 2 log 2
    CHECK(r.lhs == doctest::Approx(std::sqrt(2.0 - 2.0 * std::log(2.0))).epsilon(1e-9));
    CHECK(r.constant == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.ratio <= 2.0);
    CHECK(r.holds);
  }

  SUBCASE("indicator of [1,2], second form, closed-form oracle") {
    const StepFunction ind{{1.0, 2.0}, {1.0}};
    const HardyReport r = hardy_check(ind, 0.5, 2.0, HardyForm::second);
    // lhs^2 = int_0^1 t dt + int_1^2 t (2-t)^2 dt = 1/2 + 5/12
    CHECK(r.lhs == doctest::Approx(std::sqrt(11.0 / 12.0)).epsilon(1e-9));
    // weighted norm^2 = int_1^2 x^3 dx = 15/4
    CHECK(r.rhs == doctest::Approx(std::sqrt(3.75)).epsilon(1e-9));
    CHECK(r.holds);
  }

  SUBCASE("random piecewise constant functions satisfy both forms") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
      StepFunction f;
      double x = 0.05 + unif(rng);
      f.breaks.push_back(x);
      const int pieces = 1 + static_cast<int>(unif(rng) * 6);
      for (int i = 0; i < pieces; ++i) {
        x += 0.1 + unif(rng);
        f.breaks.push_back(x);
        f.values.push_back(unif(rng) * 3.0);
      }
      const double nu1 = 0.6 + unif(rng);
      const double p = 1.0 + 2.0 * unif(rng);
      if (nu1 > 1.0 / p) CHECK(hardy_check(f, nu1, p, HardyForm::first).holds);
      const double nu2 = unif(rng);
      CHECK(hardy_check(f, nu2, p, HardyForm::second).holds);
    }
  }

  SUBCASE("parameter range is enforced") {
    const StepFunction ind{{1.0, 2.0}, {1.0}};
    CHECK_THROWS_AS(hardy_check(ind, 0.4, 2.0, HardyForm::first), DomainError);
    CHECK_THROWS_AS(hardy_check(ind, -0.6, 2.0, HardyForm::second), DomainError);
    CHECK_THROWS_AS(hardy_check(ind, 1.0, 0.5, HardyForm::first), DomainError);
  }
}
