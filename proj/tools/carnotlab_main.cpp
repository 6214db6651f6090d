// carnotlab: batch front-end for the group-analysis laboratory.
// Subcommands mirror the library modules; every run echoes its resolved
// configuration, the tool version, and the seed into the output header so
// results are reproducible byte for byte.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "carnotlab/beta.hpp"
#include "carnotlab/calculus.hpp"
#include "carnotlab/cayley.hpp"
#include "carnotlab/distortion.hpp"
#include "carnotlab/errors.hpp"
#include "carnotlab/metrics.hpp"
#include "carnotlab/util.hpp"
#include "carnotlab/vvh.hpp"

using namespace carnotlab;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string cache_dir;
  bool no_cache = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "output file (default: stdout)");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--threads", o.threads, "worker threads (default: all cores)");
  cmd->add_option("--cache-dir", o.cache_dir, "ball cache directory (or CARNOTLAB_CACHE_DIR)");
  cmd->add_flag("--no-cache", o.no_cache, "recompute balls even when a cache exists");
}

void apply_common(const CommonOpts& o) {
  if (o.threads > 0) set_max_threads(o.threads);
}

std::string cache_directory(const CommonOpts& o) {
  if (!o.cache_dir.empty()) return o.cache_dir;
  if (const char* env = std::getenv("CARNOTLAB_CACHE_DIR")) return env;
  return {};
}

CayleyBall obtain_ball(const DiscreteHeisenberg& G, int radius, const CommonOpts& o) {
  const std::string dir = cache_directory(o);
  std::string path;
  if (!dir.empty()) {
    path = dir + "/ball_heisenberg-z" + std::to_string(G.k()) + "_r" + std::to_string(radius) +
           ".bin";
    if (!o.no_cache) {
      if (auto cached = read_ball_cache(path, G, radius)) return std::move(*cached);
    }
  }
  CayleyBall ball = bfs_ball(G, radius);
  if (!path.empty()) {
    std::filesystem::create_directories(dir);
    write_ball_cache(ball, path);
  }
  return ball;
}

void emit(const CommonOpts& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw DomainError("cannot open output file: " + o.out);
  f << text;
}

std::string json_output(const ordered_json& config, const ordered_json& result) {
  ordered_json doc;
  doc["tool"] = "carnotlab";
  doc["version"] = kVersion;
  doc["config"] = config;
  doc["result"] = result;
  return doc.dump(2) + "\n";
}

std::string csv_header(const ordered_json& config) {
  std::string h = "# carnotlab ";
  h += kVersion;
  h += "\n# config ";
  h += config.dump();
  h += "\n";
  return h;
}

std::vector<double> parse_coords(const std::string& text, int dim) {
  std::vector<double> c;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) c.push_back(std::stod(cell));
  if (static_cast<int>(c.size()) != dim)
    throw DomainError("expected " + std::to_string(dim) + " coordinates, got " +
                      std::to_string(c.size()));
  return c;
}

PointFn make_point_function(const AlgebraPtr& alg, const std::string& spec) {
  if (spec == "z") {
    const int idx = alg->index(alg->step(), 1);
    return [idx](const GroupPoint& p) { return p.coords()[idx]; };
  }
  if (spec.rfind("coord:", 0) == 0) {
    std::stringstream ss(spec.substr(6));
    int r = 0, i = 0;
    char sep = 0;
    ss >> r >> sep >> i;
    const int idx = alg->index(r, i);
    return [idx](const GroupPoint& p) { return p.coords()[idx]; };
  }
  if (spec.rfind("bump:", 0) == 0) {
    const double radius = std::stod(spec.substr(5));
    return [radius](const GroupPoint& p) { return bump_function(p.coords(), radius); };
  }
  if (spec == "sinx") {
    return [](const GroupPoint& p) { return std::sin(p.coords()[0]); };
  }
  throw DomainError("unknown function spec: " + spec +
                    " (expected z, coord:r,i, bump:R, or sinx)");
}

DiscreteFunction make_discrete_function(const std::string& spec, const CayleyBall& ball,
                                        int domain_radius, std::uint64_t seed) {
  const DiscreteHeisenberg& G = ball.group();
  if (spec == "indicator") {
    DiscreteFunction f(1, std::vector<double>{0.0});
    f.set(G.identity(), {1.0});
    return f;
  }
  if (spec == "coordinate-z") {
    DiscreteFunction f(1);
    for (const IntWord& x : ball.elements(domain_radius))
      f.set(x, {static_cast<double>(x.c())});
    return f;
  }
  if (spec.rfind("random-sparse:", 0) == 0) {
    const double density = std::stod(spec.substr(14));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    DiscreteFunction f(1, std::vector<double>{0.0});
    for (const IntWord& x : ball.elements(domain_radius))
      if (coin(rng) < density) f.set(x, {unif(rng)});
    return f;
  }
  if (spec == "bump") {
    DiscreteFunction f(1, std::vector<double>{0.0});
    const double width = domain_radius / 2.0 + 1.0;
    for (const IntWord& x : ball.elements(domain_radius))
      f.set(x, {std::max(0.0, 1.0 - *ball.word_length(x) / width)});
    return f;
  }
  throw DomainError("unknown discrete function spec: " + spec);
}

ordered_json report_json(const VvhReport& rep) {
  ordered_json j;
  j["lhs"] = rep.lhs;
  if (rep.rhs)
    j["rhs"] = *rep.rhs;
  else
    j["rhs"] = nullptr;
  j["ratio"] = std::isfinite(rep.ratio) ? ordered_json(rep.ratio) : ordered_json("inf");
  j["params"] = rep.params;
  return j;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"carnotlab: word metrics, heat-kernel calculus, beta numbers, and distortion "
               "bounds on nilpotent groups"};
  app.require_subcommand(1);

  // ---- group-info ----
  auto* info_cmd = app.add_subcommand("group-info", "describe a catalog algebra");
  std::string info_group = "heisenberg:1";
  CommonOpts info_opts;
  info_cmd->add_option("--group", info_group, "algebra spec (heisenberg:k | filiform:s)");
  add_common(info_cmd, info_opts);

  // ---- ball ----
  auto* ball_cmd = app.add_subcommand("ball", "sample a quasi-norm ball");
  std::string ball_group = "heisenberg:1";
  double ball_radius = 1.0;
  std::size_t ball_count = 100000;
  std::string ball_center;
  std::string ball_format = "csv";
  CommonOpts ball_opts;
  ball_cmd->add_option("--group", ball_group, "algebra spec");
  ball_cmd->add_option("--radius", ball_radius, "ball radius");
  ball_cmd->add_option("--count", ball_count, "proposal count");
  ball_cmd->add_option("--center", ball_center, "center coordinates c1,c2,...");
  ball_cmd->add_option("--format", ball_format, "csv | binary")
      ->check(CLI::IsMember({"csv", "binary"}));
  add_common(ball_cmd, ball_opts);

  // ---- growth ----
  auto* growth_cmd = app.add_subcommand("growth", "exact ball sizes of a discrete group");
  std::string growth_group = "heisenberg-z:1";
  int growth_nmax = 12;
  CommonOpts growth_opts;
  growth_cmd->add_option("--group", growth_group, "discrete group spec (heisenberg-z:k)");
  growth_cmd->add_option("--nmax", growth_nmax, "largest radius");
  add_common(growth_cmd, growth_opts);

  // ---- vertical-profile ----
  auto* vp_cmd = app.add_subcommand("vertical-profile", "word lengths of central powers");
  std::string vp_group = "heisenberg-z:1";
  int vp_kmax = 100;
  CommonOpts vp_opts;
  vp_cmd->add_option("--group", vp_group, "discrete group spec");
  vp_cmd->add_option("--kmax", vp_kmax, "largest central power");
  add_common(vp_cmd, vp_opts);

  // ---- vvh-discrete ----
  auto* vd_cmd = app.add_subcommand("vvh-discrete", "discrete vertical-versus-horizontal report");
  std::string vd_group = "heisenberg-z:1";
  int vd_n = 2;
  double vd_p = 2.0, vd_q = 2.0;
  std::string vd_function = "indicator";
  CommonOpts vd_opts;
  vd_cmd->add_option("--group", vd_group, "discrete group spec");
  vd_cmd->add_option("--n", vd_n, "ball radius parameter");
  vd_cmd->add_option("--p", vd_p, "exponent p");
  vd_cmd->add_option("--q", vd_q, "exponent q");
  vd_cmd->add_option("--function", vd_function,
                     "indicator | coordinate-z | random-sparse:<density> | bump");
  add_common(vd_cmd, vd_opts);

  // ---- vvh-continuous ----
  auto* vc_cmd = app.add_subcommand("vvh-continuous", "grid vertical-versus-horizontal report");
  std::string vc_group = "heisenberg:1";
  double vc_rho = 2.0, vc_p = 2.0, vc_q = 2.0;
  double vc_box = 1.2, vc_bump = 0.9;
  int vc_nodes = 25, vc_tcount = 14;
  double vc_tmin = 1e-3, vc_tmax = 4.0;
  CommonOpts vc_opts;
  vc_cmd->add_option("--group", vc_group, "algebra spec");
  vc_cmd->add_option("--rho", vc_rho, "vertical exponent rho");
  vc_cmd->add_option("--p", vc_p, "exponent p");
  vc_cmd->add_option("--q", vc_q, "exponent q");
  vc_cmd->add_option("--box", vc_box, "grid half-width");
  vc_cmd->add_option("--bump-radius", vc_bump, "support radius of the test bump");
  vc_cmd->add_option("--nodes", vc_nodes, "grid nodes per axis");
  vc_cmd->add_option("--tmin", vc_tmin, "smallest t");
  vc_cmd->add_option("--tmax", vc_tmax, "largest t");
  vc_cmd->add_option("--tcount", vc_tcount, "t grid size");
  add_common(vc_cmd, vc_opts);

  // ---- vvh-fractional ----
  auto* vf_cmd = app.add_subcommand("vvh-fractional", "fractional difference report");
  std::string vf_group = "heisenberg:1";
  double vf_alpha = 1.0, vf_p = 2.0;
  int vf_order = 1;
  double vf_box = 1.2, vf_bump = 0.9;
  int vf_nodes = 21, vf_rcount = 10;
  double vf_rmin = 0.01, vf_rmax = 1.0;
  CommonOpts vf_opts;
  vf_cmd->add_option("--group", vf_group, "algebra spec");
  vf_cmd->add_option("--alpha", vf_alpha, "smoothness order alpha");
  vf_cmd->add_option("--n", vf_order, "difference order n");
  vf_cmd->add_option("--p", vf_p, "exponent p in (1,2]");
  vf_cmd->add_option("--box", vf_box, "grid half-width");
  vf_cmd->add_option("--bump-radius", vf_bump, "support radius of the test bump");
  vf_cmd->add_option("--nodes", vf_nodes, "grid nodes per axis");
  vf_cmd->add_option("--rmin", vf_rmin, "smallest r");
  vf_cmd->add_option("--rmax", vf_rmax, "largest r");
  vf_cmd->add_option("--rcount", vf_rcount, "r grid size");
  add_common(vf_cmd, vf_opts);

  // ---- beta ----
  auto* beta_cmd = app.add_subcommand("beta", "beta numbers over a radius sweep");
  std::string beta_group = "heisenberg:1";
  std::string beta_function = "z";
  std::string beta_radii = "0.1,0.2,0.5,1.0";
  std::string beta_center;
  int beta_degree = 1;
  double beta_q = 1.0;
  std::size_t beta_count = 100000;
  CommonOpts beta_opts;
  beta_cmd->add_option("--group", beta_group, "algebra spec");
  beta_cmd->add_option("--function", beta_function, "z | coord:r,i | bump:R | sinx");
  beta_cmd->add_option("--degree", beta_degree, "weighted degree bound");
  beta_cmd->add_option("--q", beta_q, "deviation exponent q >= 1");
  beta_cmd->add_option("--radii", beta_radii, "comma-separated radius list");
  beta_cmd->add_option("--center", beta_center, "center coordinates (default identity)");
  beta_cmd->add_option("--count", beta_count, "Monte Carlo proposals");
  add_common(beta_cmd, beta_opts);

  // ---- dorronsoro ----
  auto* dg_cmd = app.add_subcommand("dorronsoro", "square function of beta numbers");
  std::string dg_group = "heisenberg:1";
  std::string dg_function = "bump:1.0";
  double dg_alpha = 1.5, dg_q = 1.0;
  int dg_rcount = 16;
  double dg_rmin = 0.01, dg_rmax = 1.0;
  std::size_t dg_count = 100000;
  CommonOpts dg_opts;
  dg_cmd->add_option("--group", dg_group, "algebra spec");
  dg_cmd->add_option("--function", dg_function, "z | coord:r,i | bump:R | sinx");
  dg_cmd->add_option("--alpha", dg_alpha, "order alpha (degree = floor(alpha))");
  dg_cmd->add_option("--q", dg_q, "deviation exponent q >= 1");
  dg_cmd->add_option("--rmin", dg_rmin, "smallest radius");
  dg_cmd->add_option("--rmax", dg_rmax, "largest radius");
  dg_cmd->add_option("--rcount", dg_rcount, "radius grid size");
  dg_cmd->add_option("--count", dg_count, "Monte Carlo proposals");
  add_common(dg_cmd, dg_opts);

  // ---- poincare-check ----
  auto* pc_cmd = app.add_subcommand("poincare-check", "local and global Poincare inequalities");
  std::string pc_group = "heisenberg-z:1";
  int pc_n = 3, pc_trials = 20;
  double pc_p = 2.0;
  CommonOpts pc_opts;
  pc_cmd->add_option("--group", pc_group, "discrete group spec");
  pc_cmd->add_option("--n", pc_n, "radius parameter");
  pc_cmd->add_option("--p", pc_p, "exponent p");
  pc_cmd->add_option("--trials", pc_trials, "random functions per form");
  add_common(pc_cmd, pc_opts);

  // ---- distortion-exact ----
  auto* de_cmd = app.add_subcommand("distortion-exact", "least Euclidean distortion of a ball");
  std::string de_group = "heisenberg-z:1";
  int de_n = 2;
  double de_tol = 1e-3;
  std::string de_metric_csv;
  CommonOpts de_opts;
  de_cmd->add_option("--group", de_group, "discrete group spec");
  de_cmd->add_option("--n", de_n, "ball radius");
  de_cmd->add_option("--tol", de_tol, "bisection tolerance");
  de_cmd->add_option("--metric-csv", de_metric_csv, "explicit metric table instead of a ball");
  add_common(de_cmd, de_opts);

  // ---- distortion-certificate ----
  auto* dc_cmd = app.add_subcommand("distortion-certificate",
                                    "lower bound implied by the discrete functional");
  std::string dc_group = "heisenberg-z:1";
  int dc_n = 4;
  double dc_q = 2.0, dc_kq = 1.0, dc_kappa = 0.0;
  int dc_sweep = 20;
  double dc_density = 0.3;
  CommonOpts dc_opts;
  dc_cmd->add_option("--group", dc_group, "discrete group spec");
  dc_cmd->add_option("--n", dc_n, "ball radius parameter");
  dc_cmd->add_option("--q", dc_q, "convexity exponent q >= 2");
  dc_cmd->add_option("--kq", dc_kq, "uniform convexity constant K_q");
  dc_cmd->add_option("--kappa", dc_kappa,
                     "empirical functional constant (0 = estimate from a sweep)");
  dc_cmd->add_option("--sweep-size", dc_sweep, "family size for the kappa estimate");
  dc_cmd->add_option("--sweep-density", dc_density, "sparsity of the sweep family");
  add_common(dc_cmd, dc_opts);

  // ---- heat-check ----
  auto* hc_cmd = app.add_subcommand("heat-check", "one-dimensional heat kernel identities");
  double hc_t = 0.5, hc_rho = 2.0;
  CommonOpts hc_opts;
  hc_cmd->add_option("--t", hc_t, "time parameter");
  hc_cmd->add_option("--rho", hc_rho, "moment exponent rho");
  add_common(hc_cmd, hc_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage errors carry a fixed exit code
  }

  if (info_cmd->parsed()) {
    apply_common(info_opts);
    auto alg = algebra_by_name(info_group);
    ordered_json config = {{"subcommand", "group-info"}, {"group", info_group}};
    ordered_json result;
    result["name"] = alg->name();
    result["step"] = alg->step();
    result["strata_dims"] = alg->strata_dims();
    result["dim"] = alg->dim();
    result["hausdorff_dimension"] = alg->hausdorff_dimension();
    result["descriptor"] = alg->descriptor();
    emit(info_opts, json_output(config, result));
    return 0;
  }

  if (ball_cmd->parsed()) {
    apply_common(ball_opts);
    auto alg = algebra_by_name(ball_group);
    const GroupPoint center =
        ball_center.empty() ? identity(alg) : GroupPoint(alg, parse_coords(ball_center, alg->dim()));
    const BallSample s = ball_sample(center, ball_radius, ball_count, ball_opts.seed);
    ordered_json config = {{"subcommand", "ball"},       {"group", ball_group},
                           {"radius", ball_radius},      {"count", ball_count},
                           {"seed", ball_opts.seed},     {"format", ball_format},
                           {"center", center.coords()}};
    if (ball_format == "binary") {
      if (ball_opts.out.empty()) throw DomainError("binary format requires --out");
      write_ball_sample_binary(s, ball_opts.out);
    } else {
      std::ostringstream os;
      os << csv_header(config);
      write_ball_sample_csv(s, os);
      emit(ball_opts, os.str());
    }
    return 0;
  }

  if (growth_cmd->parsed()) {
    apply_common(growth_opts);
    const DiscreteHeisenberg G = discrete_group_by_name(growth_group);
    const CayleyBall ball = obtain_ball(G, growth_nmax, growth_opts);
    ordered_json config = {
        {"subcommand", "growth"}, {"group", growth_group}, {"nmax", growth_nmax}};
    std::ostringstream os;
    os << csv_header(config) << "n,ball_size\n";
    for (int n = 0; n <= growth_nmax; ++n) os << n << "," << ball.ball_size(n) << "\n";
    emit(growth_opts, os.str());
    return 0;
  }

  if (vp_cmd->parsed()) {
    apply_common(vp_opts);
    const DiscreteHeisenberg G = discrete_group_by_name(vp_group);
    const VerticalProfile prof = vertical_profile(G, vp_kmax);
    ordered_json config = {{"subcommand", "vertical-profile"},
                           {"group", vp_group},
                           {"kmax", vp_kmax},
                           {"k_reached", prof.k_reached}};
    double lo = 1e300, hi = 0.0;
    for (int k = 1; k <= prof.k_reached; ++k) {
      const double ratio = prof.lengths[k - 1] / std::sqrt(static_cast<double>(k));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    // quasi-norm analog of the two-sided scaling constants for v^t
    config["ratio_min"] = lo;
    config["ratio_max"] = hi;
    std::ostringstream os;
    os << csv_header(config) << "k,word_length,ratio_to_sqrt_k\n";
    char buf[64];
    for (int k = 1; k <= prof.k_reached; ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%lld,%.12g\n", k,
                    static_cast<long long>(prof.lengths[k - 1]),
                    prof.lengths[k - 1] / std::sqrt(static_cast<double>(k)));
      os << buf;
    }
    emit(vp_opts, os.str());
    return 0;
  }

  if (vd_cmd->parsed()) {
    apply_common(vd_opts);
    const DiscreteHeisenberg G = discrete_group_by_name(vd_group);
    const int radius = kDiscreteEnlargement * vd_n + 1;
    const CayleyBall ball = obtain_ball(G, radius, vd_opts);
    const DiscreteFunction f = make_discrete_function(vd_function, ball, radius, vd_opts.seed);
    const VvhReport rep = discrete_vvh(f, ball, vd_n, vd_p, vd_q);
    ordered_json config = {{"subcommand", "vvh-discrete"}, {"group", vd_group},
                           {"n", vd_n},                    {"p", vd_p},
                           {"q", vd_q},                    {"function", vd_function},
                           {"seed", vd_opts.seed}};
    emit(vd_opts, json_output(config, report_json(rep)));
    return 0;
  }

  if (vc_cmd->parsed()) {
    apply_common(vc_opts);
    auto alg = algebra_by_name(vc_group);
    std::vector<double> hw(alg->dim(), vc_box);
    std::vector<int> shape(alg->dim(), vc_nodes);
    const GridFunction f =
        GridFunction::sample(alg, Grid::centered_box(hw, shape), [&](const std::vector<double>& c) {
          return bump_function(c, vc_bump);
        });
    const GroupPoint v = basis_point(alg, alg->step(), 1);
    const VvhReport rep =
        continuous_vvh(f, v, vc_rho, vc_p, vc_q, log_grid(vc_tmin, vc_tmax, vc_tcount));
    ordered_json config = {{"subcommand", "vvh-continuous"},
                           {"group", vc_group},
                           {"rho", vc_rho},
                           {"p", vc_p},
                           {"q", vc_q},
                           {"box", vc_box},
                           {"bump_radius", vc_bump},
                           {"nodes", vc_nodes},
                           {"tmin", vc_tmin},
                           {"tmax", vc_tmax},
                           {"tcount", vc_tcount}};
    emit(vc_opts, json_output(config, report_json(rep)));
    return 0;
  }

  if (vf_cmd->parsed()) {
    apply_common(vf_opts);
    auto alg = algebra_by_name(vf_group);
    std::vector<double> hw(alg->dim(), vf_box);
    std::vector<int> shape(alg->dim(), vf_nodes);
    const GridFunction f =
        GridFunction::sample(alg, Grid::centered_box(hw, shape), [&](const std::vector<double>& c) {
          return bump_function(c, vf_bump);
        });
    const GroupPoint v = basis_point(alg, alg->step(), 1);
    const VvhReport rep =
        fractional_vvh(f, v, vf_alpha, vf_order, vf_p, log_grid(vf_rmin, vf_rmax, vf_rcount));
    ordered_json config = {{"subcommand", "vvh-fractional"},
                           {"group", vf_group},
                           {"alpha", vf_alpha},
                           {"n", vf_order},
                           {"p", vf_p},
                           {"box", vf_box},
                           {"bump_radius", vf_bump},
                           {"nodes", vf_nodes},
                           {"rmin", vf_rmin},
                           {"rmax", vf_rmax},
                           {"rcount", vf_rcount}};
    emit(vf_opts, json_output(config, report_json(rep)));
    return 0;
  }

  if (beta_cmd->parsed()) {
    apply_common(beta_opts);
    auto alg = algebra_by_name(beta_group);
    const PointFn f = make_point_function(alg, beta_function);
    const GroupPoint center = beta_center.empty()
                                  ? identity(alg)
                                  : GroupPoint(alg, parse_coords(beta_center, alg->dim()));
    const BallSample unit = ball_sample(identity(alg), 1.0, beta_count, beta_opts.seed);
    std::vector<BetaReport> reports;
    std::stringstream radii(beta_radii);
    std::string cell;
    while (std::getline(radii, cell, ',')) {
      const double r = std::stod(cell);
      const BallSample s = unit.transported(center, r);
      reports.push_back(beta_number(f, center, r, beta_degree, beta_q, s));
    }
    ordered_json config = {{"subcommand", "beta"},       {"group", beta_group},
                           {"function", beta_function},  {"degree", beta_degree},
                           {"q", beta_q},                {"radii", beta_radii},
                           {"count", beta_count},        {"seed", beta_opts.seed},
                           {"center", center.coords()}};
    std::ostringstream os;
    os << csv_header(config);
    write_beta_reports_csv(reports, os);
    emit(beta_opts, os.str());
    return 0;
  }

  if (dg_cmd->parsed()) {
    apply_common(dg_opts);
    auto alg = algebra_by_name(dg_group);
    const PointFn f = make_point_function(alg, dg_function);
    const BallSample unit = ball_sample(identity(alg), 1.0, dg_count, dg_opts.seed);
    const double value =
        dorronsoro_gfn(f, identity(alg), static_cast<int>(std::floor(dg_alpha)), dg_alpha, dg_q,
                       log_grid(dg_rmin, dg_rmax, dg_rcount), unit);
    ordered_json config = {{"subcommand", "dorronsoro"}, {"group", dg_group},
                           {"function", dg_function},    {"alpha", dg_alpha},
                           {"q", dg_q},                  {"rmin", dg_rmin},
                           {"rmax", dg_rmax},            {"rcount", dg_rcount},
                           {"count", dg_count},          {"seed", dg_opts.seed}};
    emit(dg_opts, json_output(config, ordered_json{{"value", value}}));
    return 0;
  }

  if (pc_cmd->parsed()) {
    apply_common(pc_opts);
    const DiscreteHeisenberg G = discrete_group_by_name(pc_group);
    const int radius = 3 * pc_n + 1;
    const CayleyBall ball = obtain_ball(G, radius, pc_opts);
    std::mt19937_64 rng(pc_opts.seed);
    std::uniform_int_distribution<int> val(-5, 5);
    int local_viol = 0, global_viol = 0;
    for (int trial = 0; trial < pc_trials; ++trial) {
      DiscreteFunction f(1);
      for (const IntWord& x : ball.elements(radius))
        f.set(x, {static_cast<double>(val(rng))});
      if (!poincare_local_check(f, ball, pc_n, pc_p).holds) ++local_viol;
      DiscreteFunction g(1, std::vector<double>{0.0});
      for (const IntWord& x : ball.elements(std::min(2, radius)))
        g.set(x, {static_cast<double>(val(rng))});
      if (!poincare_global_check(g, ball, pc_n, pc_p).holds) ++global_viol;
    }
    ordered_json config = {{"subcommand", "poincare-check"}, {"group", pc_group},
                           {"n", pc_n},                      {"p", pc_p},
                           {"trials", pc_trials},            {"seed", pc_opts.seed}};
    ordered_json result = {{"local_violations", local_viol},
                           {"global_violations", global_viol},
                           {"holds", local_viol == 0 && global_viol == 0}};
    emit(pc_opts, json_output(config, result));
    return 0;
  }

  if (de_cmd->parsed()) {
    apply_common(de_opts);
    ordered_json config = {{"subcommand", "distortion-exact"}, {"tol", de_tol}};
    std::optional<FiniteMetric> metric;
    if (!de_metric_csv.empty()) {
      std::ifstream in(de_metric_csv);
      if (!in) throw DomainError("cannot open metric csv: " + de_metric_csv);
      metric = FiniteMetric::from_csv(in);
      config["metric_csv"] = de_metric_csv;
    } else {
      const DiscreteHeisenberg G = discrete_group_by_name(de_group);
      const CayleyBall ball = obtain_ball(G, 2 * de_n, de_opts);
      metric = metric_from_ball(ball, de_n);
      config["group"] = de_group;
      config["n"] = de_n;
    }
    const C2Result res = exact_c2(*metric, de_tol);
    ordered_json result = {{"c2", res.c2},
                           {"points", metric->size()},
                           {"residual", res.residual},
                           {"bisection_steps", res.bisection_steps},
                           {"converged", res.converged}};
    emit(de_opts, json_output(config, result));
    return 0;
  }

  if (dc_cmd->parsed()) {
    apply_common(dc_opts);
    const DiscreteHeisenberg G = discrete_group_by_name(dc_group);
    double kappa = dc_kappa;
    if (kappa <= 0.0) {
      const CayleyBall ball = obtain_ball(G, kDiscreteEnlargement * dc_n + 1, dc_opts);
      FamilySpec spec{"random-sparse", dc_sweep, dc_opts.seed, dc_n, dc_q, dc_q, dc_density};
      kappa = empirical_vvh_constant(ball, spec).kappa_hat;
    }
    const VerticalProfile prof = vertical_profile(G, dc_n * dc_n);
    if (prof.k_reached < dc_n * dc_n)
      throw GuardError("vertical profile truncated before n^2");
    double c1 = 1e300;
    for (int k = 1; k <= dc_n * dc_n; ++k)
      c1 = std::min(c1, prof.lengths[k - 1] / std::sqrt(static_cast<double>(k)));
    std::optional<std::pair<std::size_t, std::size_t>> sizes;
    const int cn = kDiscreteEnlargement * dc_n;
    if (estimate_ball_size(G, cn) < 5e6) {
      const CayleyBall ball = obtain_ball(G, cn, dc_opts);
      sizes = std::make_pair(ball.ball_size(dc_n), ball.ball_size(cn));
    }
    const DistortionCertificate cert = certificate_lower_bound(
        dc_n, dc_q, dc_kq, kappa, G.hausdorff_dimension(), 2, c1,
        static_cast<double>(G.generators().size()), kDiscreteEnlargement, sizes);
    ordered_json config = {{"subcommand", "distortion-certificate"},
                           {"group", dc_group},
                           {"n", dc_n},
                           {"q", dc_q},
                           {"kq", dc_kq},
                           {"kappa", kappa},
                           {"kappa_was_estimated", dc_kappa <= 0.0},
                           {"seed", dc_opts.seed}};
    emit(dc_opts, json_output(config, ordered_json::parse(cert.to_json())));
    return 0;
  }

  if (hc_cmd->parsed()) {
    apply_common(hc_opts);
    const HeatIdentityReport r = heat_identities(hc_t, hc_rho);
    ordered_json config = {{"subcommand", "heat-check"}, {"t", hc_t}, {"rho", hc_rho}};
    ordered_json result = {{"mass", r.mass},
                           {"dx_l1", r.dx_l1},
                           {"dx_l1_expected", r.dx_l1_expected},
                           {"dt_l1_times_t", r.dt_l1_times_t},
                           {"moment", r.moment},
                           {"moment_expected", r.moment_expected},
                           {"semigroup_err", r.semigroup_err}};
    emit(hc_opts, json_output(config, result));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const GuardError& e) {
    ordered_json err = {{"error", "guard"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 4;
  } catch (const DomainError& e) {
    ordered_json err = {{"error", "domain"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    ordered_json err = {{"error", "domain"}, {"message", e.what()}};
    std::cerr << err.dump() << "\n";
    return 3;
  }
}
