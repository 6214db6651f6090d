#include "carnotlab/grid.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "carnotlab/errors.hpp"

namespace carnotlab {

std::size_t Grid::node_count() const {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (double s : spacing) v *= s;
  return v;
}

std::vector<double> Grid::node_coords(std::size_t flat) const {
  std::vector<double> c(dim());
  for (int d = dim() - 1; d >= 0; --d) {
    const std::size_t s = static_cast<std::size_t>(shape[d]);
    c[d] = origin[d] + spacing[d] * static_cast<double>(flat % s);
    flat /= s;
  }
  return c;
}

Grid Grid::centered_box(const std::vector<double>& halfwidths, const std::vector<int>& shape) {
  if (halfwidths.size() != shape.size()) throw DomainError("centered_box: size mismatch");
  Grid g;
  g.shape = shape;
  g.origin.resize(shape.size());
  g.spacing.resize(shape.size());
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (shape[d] < 2) throw DomainError("centered_box: need at least 2 nodes per axis");
    if (!(halfwidths[d] > 0)) throw DomainError("centered_box: halfwidths must be positive");
    g.origin[d] = -halfwidths[d];
    g.spacing[d] = 2.0 * halfwidths[d] / (shape[d] - 1);
  }
  return g;
}

GridFunction::GridFunction(AlgebraPtr alg, Grid grid, int arity)
    : alg_(std::move(alg)), grid_(std::move(grid)), arity_(arity) {
  if (!alg_) throw DomainError("GridFunction: null algebra");
  if (grid_.dim() != alg_->dim()) throw DomainError("GridFunction: grid/algebra dimension mismatch");
  if (arity_ < 1) throw DomainError("GridFunction: arity must be >= 1");
  for (double s : grid_.spacing)
    if (!(s > 0)) throw DomainError("GridFunction: spacings must be positive");
  values_.assign(grid_.node_count() * static_cast<std::size_t>(arity_), 0.0);
}

GridFunction GridFunction::sample(const AlgebraPtr& alg, const Grid& grid,
                                  const std::function<double(const std::vector<double>&)>& f) {
  GridFunction g(alg, grid, 1);
  for (std::size_t i = 0; i < g.nodes(); ++i) {
    const double v = f(grid.node_coords(i));
    if (!std::isfinite(v)) throw DomainError("GridFunction::sample: non-finite value");
    g.values_[i] = v;
  }
  return g;
}

GridFunction GridFunction::sample_vector(
    const AlgebraPtr& alg, const Grid& grid, int arity,
    const std::function<void(const std::vector<double>&, double*)>& f) {
  GridFunction g(alg, grid, arity);
  for (std::size_t i = 0; i < g.nodes(); ++i) f(grid.node_coords(i), g.node_values(i));
  return g;
}

double GridFunction::eval(const std::vector<double>& c, int comp) const {
  double out = 0.0;
  // inline the multilinear loop once for all components via eval_all on demand
  const int dim = grid_.dim();
  std::vector<int> base(dim);
  std::vector<double> frac(dim);
  for (int d = 0; d < dim; ++d) {
    const double t = (c[d] - grid_.origin[d]) / grid_.spacing[d];
    if (t < 0.0 || t > static_cast<double>(grid_.shape[d] - 1)) return 0.0;
    int b = static_cast<int>(std::floor(t));
    if (b >= grid_.shape[d] - 1) b = grid_.shape[d] - 2;
    base[d] = b;
    frac[d] = t - b;
  }
  const unsigned corners = 1u << dim;
  for (unsigned m = 0; m < corners; ++m) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int d = 0; d < dim; ++d) {
      const bool hi = (m >> d) & 1u;
      w *= hi ? frac[d] : (1.0 - frac[d]);
      flat = flat * static_cast<std::size_t>(grid_.shape[d]) +
             static_cast<std::size_t>(base[d] + (hi ? 1 : 0));
    }
    if (w != 0.0) out += w * values_[flat * arity_ + comp];
  }
  return out;
}

void GridFunction::eval_all(const std::vector<double>& c, double* out) const {
  for (int j = 0; j < arity_; ++j) out[j] = 0.0;
  const int dim = grid_.dim();
  std::vector<int> base(dim);
  std::vector<double> frac(dim);
  for (int d = 0; d < dim; ++d) {
    const double t = (c[d] - grid_.origin[d]) / grid_.spacing[d];
    if (t < 0.0 || t > static_cast<double>(grid_.shape[d] - 1)) return;
    int b = static_cast<int>(std::floor(t));
    if (b >= grid_.shape[d] - 1) b = grid_.shape[d] - 2;
    base[d] = b;
    frac[d] = t - b;
  }
  const unsigned corners = 1u << dim;
  for (unsigned m = 0; m < corners; ++m) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int d = 0; d < dim; ++d) {
      const bool hi = (m >> d) & 1u;
      w *= hi ? frac[d] : (1.0 - frac[d]);
      flat = flat * static_cast<std::size_t>(grid_.shape[d]) +
             static_cast<std::size_t>(base[d] + (hi ? 1 : 0));
    }
    if (w == 0.0) continue;
    const double* v = values_.data() + flat * arity_;
    for (int j = 0; j < arity_; ++j) out[j] += w * v[j];
  }
}

double GridFunction::eval_norm(const std::vector<double>& c) const {
  if (arity_ == 1) return std::abs(eval(c, 0));
  std::vector<double> tmp(arity_);
  eval_all(c, tmp.data());
  double s = 0.0;
  for (double x : tmp) s += x * x;
  return std::sqrt(s);
}

double GridFunction::lp_norm(double p) const {
  const double vol = grid_.cell_volume();
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes(); ++i) {
    double s = 0.0;
    const double* v = node_values(i);
    for (int j = 0; j < arity_; ++j) s += v[j] * v[j];
    acc += std::pow(std::sqrt(s), p);
  }
  return std::pow(acc * vol, 1.0 / p);
}

void write_grid_function(const GridFunction& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open for writing: " + path);
  nlohmann::json header = {{"format", "carnotlab-grid-function"},
                           {"version", 1},
                           {"algebra", f.alg()->name()},
                           {"origin", f.grid().origin},
                           {"spacing", f.grid().spacing},
                           {"shape", f.grid().shape},
                           {"arity", f.arity()}};
  os << header.dump() << '\n';
  os.write(reinterpret_cast<const char*>(f.raw().data()),
           static_cast<std::streamsize>(f.raw().size() * sizeof(double)));
}

GridFunction read_grid_function(const AlgebraPtr& alg, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open for reading: " + path);
  std::string line;
  std::getline(is, line);
  nlohmann::json header = nlohmann::json::parse(line);
  if (header.at("format") != "carnotlab-grid-function")
    throw DomainError("not a grid function file: " + path);
  if (header.at("algebra") != alg->name()) throw DomainError("grid function algebra mismatch");
  Grid grid;
  grid.origin = header.at("origin").get<std::vector<double>>();
  grid.spacing = header.at("spacing").get<std::vector<double>>();
  grid.shape = header.at("shape").get<std::vector<int>>();
  GridFunction f(alg, grid, header.at("arity").get<int>());
  is.read(reinterpret_cast<char*>(f.raw().data()),
          static_cast<std::streamsize>(f.raw().size() * sizeof(double)));
  if (!is) throw DomainError("truncated grid function file: " + path);
  return f;
}

void write_grid_function_csv(const GridFunction& f, std::ostream& os) {
  for (int d = 0; d < f.grid().dim(); ++d) os << "c" << d << ",";
  for (int j = 0; j < f.arity(); ++j) os << "v" << j << (j + 1 < f.arity() ? "," : "\n");
  char buf[64];
  for (std::size_t i = 0; i < f.nodes(); ++i) {
    const std::vector<double> c = f.grid().node_coords(i);
    for (double x : c) {
      std::snprintf(buf, sizeof(buf), "%.12g,", x);
      os << buf;
    }
    const double* v = f.node_values(i);
    for (int j = 0; j < f.arity(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.12g", v[j]);
      os << buf << (j + 1 < f.arity() ? "," : "\n");
    }
  }
}

double bump_function(const std::vector<double>& coords, double radius) {
  double r2 = 0.0;
  for (double c : coords) r2 += (c / radius) * (c / radius);
  if (r2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r2));
}

}  // namespace carnotlab
