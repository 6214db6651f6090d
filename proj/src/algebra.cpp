#include "carnotlab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carnotlab/errors.hpp"

namespace carnotlab {

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Rank of a set of vectors by Gaussian elimination with partial pivoting.
int rank_of(std::vector<std::vector<double>> rows, double tol = 1e-9) {
  int rank = 0;
  const std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t col = 0; col < ncols && rank < static_cast<int>(rows.size()); ++col) {
    std::size_t piv = rank;
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (std::abs(rows[r][col]) > std::abs(rows[piv][col])) piv = r;
    if (std::abs(rows[piv][col]) < tol) continue;
    std::swap(rows[piv], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank)) continue;
      const double f = rows[r][col] / rows[rank][col];
      for (std::size_t c2 = col; c2 < ncols; ++c2) rows[r][c2] -= f * rows[rank][c2];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

GradedLieAlgebra::GradedLieAlgebra(std::string name, std::vector<int> strata_dims,
                                   const std::vector<BracketTriple>& table)
    : name_(std::move(name)), strata_dims_(std::move(strata_dims)) {
  if (strata_dims_.empty()) throw DomainError("algebra: at least one stratum required");
  for (int k : strata_dims_)
    if (k <= 0) throw DomainError("algebra: strata dimensions must be positive");
  offset_.resize(strata_dims_.size());
  for (std::size_t r = 0; r < strata_dims_.size(); ++r) {
    offset_[r] = dim_;
    dim_ += strata_dims_[r];
  }
  stratum_of_.resize(dim_);
  for (std::size_t r = 0; r < strata_dims_.size(); ++r)
    for (int i = 0; i < strata_dims_[r]; ++i) stratum_of_[offset_[r] + i] = static_cast<int>(r) + 1;

  table_.assign(static_cast<std::size_t>(dim_) * dim_, {});
  std::vector<bool> given(static_cast<std::size_t>(dim_) * dim_, false);
  auto put = [&](int a, int b, const SparseVec& v) {
    const std::size_t idx = static_cast<std::size_t>(a) * dim_ + b;
    if (given[idx]) {
      if (table_[idx] != v) throw DomainError("algebra: inconsistent duplicate bracket entry");
      return;
    }
    given[idx] = true;
    table_[idx] = v;
  };
  for (const auto& t : table) {
    if (t.a < 0 || t.a >= dim_ || t.b < 0 || t.b >= dim_)
      throw DomainError("algebra: bracket index out of range");
    SparseVec neg = t.value;
    for (auto& [i, c] : neg) {
      if (i < 0 || i >= dim_) throw DomainError("algebra: bracket value index out of range");
      c = -c;
    }
    put(t.a, t.b, t.value);
    put(t.b, t.a, neg);
  }
  validate();
}

void GradedLieAlgebra::validate() const {
  const int s = step();
  // antisymmetry on the diagonal and grading of every entry
  for (int a = 0; a < dim_; ++a) {
    if (!basis_bracket(a, a).empty()) throw DomainError("algebra: [X,X] must vanish");
    for (int b = 0; b < dim_; ++b) {
      const int target = stratum_of_[a] + stratum_of_[b];
      for (const auto& [i, c] : basis_bracket(a, b)) {
        if (c == 0.0) continue;
        if (target > s) throw DomainError("algebra: bracket exceeds the step");
        if (stratum_of_[i] != target) throw DomainError("algebra: bracket violates the grading");
      }
    }
  }
  // Jacobi identity on all basis triples
  for (int a = 0; a < dim_; ++a) {
    std::vector<double> ea(dim_, 0.0);
    ea[a] = 1.0;
    for (int b = a + 1; b < dim_; ++b) {
      std::vector<double> eb(dim_, 0.0);
      eb[b] = 1.0;
      for (int c = b + 1; c < dim_; ++c) {
        std::vector<double> ec(dim_, 0.0);
        ec[c] = 1.0;
        std::vector<double> acc = bracket(bracket(ea, eb), ec);
        axpy(acc, 1.0, bracket(bracket(eb, ec), ea));
        axpy(acc, 1.0, bracket(bracket(ec, ea), eb));
        if (max_abs(acc) > 1e-12) throw DomainError("algebra: Jacobi identity fails");
      }
    }
  }
  // V_{r+1} = [V_1, V_r]
  for (int r = 1; r < s; ++r) {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < strata_dims_[0]; ++i) {
      for (int j = 0; j < strata_dims_[r - 1]; ++j) {
        const SparseVec& v = basis_bracket(offset_[0] + i, offset_[r - 1] + j);
        std::vector<double> row(strata_dims_[r], 0.0);
        for (const auto& [idx, c] : v) row[idx - offset_[r]] = c;
        rows.push_back(std::move(row));
      }
    }
    if (rank_of(rows) != strata_dims_[r])
      throw DomainError("algebra: stratum " + std::to_string(r + 1) +
                        " is not spanned by [V_1, V_" + std::to_string(r) + "]");
  }
}

int GradedLieAlgebra::index(int r, int i) const {
  if (r < 1 || r > step() || i < 1 || i > strata_dims_[r - 1])
    throw DomainError("algebra: basis index (r,i) out of range");
  return offset_[r - 1] + (i - 1);
}

std::vector<double> GradedLieAlgebra::bracket(const std::vector<double>& a,
                                              const std::vector<double>& b) const {
  if (static_cast<int>(a.size()) != dim_ || static_cast<int>(b.size()) != dim_)
    throw DomainError("algebra: bracket dimension mismatch");
  std::vector<double> out(dim_, 0.0);
  for (int i = 0; i < dim_; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (b[j] == 0.0) continue;
      const double f = a[i] * b[j];
      for (const auto& [k, c] : basis_bracket(i, j)) out[k] += f * c;
    }
  }
  return out;
}

int GradedLieAlgebra::hausdorff_dimension() const {
  int n = 0;
  for (int r = 1; r <= step(); ++r) n += r * strata_dims_[r - 1];
  return n;
}

int hausdorff_dimension(const GradedLieAlgebra& alg) { return alg.hausdorff_dimension(); }

bool GradedLieAlgebra::same_as(const GradedLieAlgebra& other) const {
  return this == &other || (name_ == other.name_ && strata_dims_ == other.strata_dims_ &&
                            table_ == other.table_);
}

nlohmann::json GradedLieAlgebra::descriptor() const {
  nlohmann::json brackets = nlohmann::json::array();
  for (int a = 0; a < dim_; ++a) {
    for (int b = a + 1; b < dim_; ++b) {
      const SparseVec& v = basis_bracket(a, b);
      if (v.empty()) continue;
      nlohmann::json value = nlohmann::json::array();
      for (const auto& [i, c] : v)
        value.push_back({{"basis", {stratum_of_[i], i - offset_[stratum_of_[i] - 1] + 1}},
                         {"coef", c}});
      brackets.push_back({{"a", {stratum_of_[a], a - offset_[stratum_of_[a] - 1] + 1}},
                          {"b", {stratum_of_[b], b - offset_[stratum_of_[b] - 1] + 1}},
                          {"value", value}});
    }
  }
  return {{"name", name_}, {"strata_dims", strata_dims_}, {"brackets", brackets}};
}

std::shared_ptr<const GradedLieAlgebra> GradedLieAlgebra::from_descriptor(const nlohmann::json& j) {
  const std::string name = j.at("name").get<std::string>();
  const std::vector<int> dims = j.at("strata_dims").get<std::vector<int>>();
  std::vector<int> off(dims.size(), 0);
  for (std::size_t r = 1; r < dims.size(); ++r) off[r] = off[r - 1] + dims[r - 1];
  auto flat = [&](const nlohmann::json& ri) {
    const int r = ri.at(0).get<int>(), i = ri.at(1).get<int>();
    if (r < 1 || r > static_cast<int>(dims.size()) || i < 1 || i > dims[r - 1])
      throw DomainError("algebra descriptor: basis index out of range");
    return off[r - 1] + i - 1;
  };
  std::vector<BracketTriple> table;
  for (const auto& entry : j.at("brackets")) {
    BracketTriple t;
    t.a = flat(entry.at("a"));
    t.b = flat(entry.at("b"));
    for (const auto& term : entry.at("value"))
      t.value.emplace_back(flat(term.at("basis")), term.at("coef").get<double>());
    table.push_back(std::move(t));
  }
  return std::make_shared<GradedLieAlgebra>(name, dims, table);
}

AlgebraVector::AlgebraVector(AlgebraPtr a, std::vector<double> coords)
    : alg(std::move(a)), c(std::move(coords)) {
  if (!alg) throw DomainError("AlgebraVector: null algebra");
  if (static_cast<int>(c.size()) != alg->dim())
    throw DomainError("AlgebraVector: coordinate dimension mismatch");
}

GroupPoint identity(const AlgebraPtr& alg) {
  return GroupPoint(alg, std::vector<double>(alg->dim(), 0.0));
}

GroupPoint basis_point(const AlgebraPtr& alg, int r, int i, double scale) {
  std::vector<double> c(alg->dim(), 0.0);
  c[alg->index(r, i)] = scale;
  return GroupPoint(alg, std::move(c));
}

namespace {

// One merged Dynkin word: right-nested bracket of the letter sequence
// (true = first argument, false = second), scaled by coef.
struct DynkinWord {
  std::vector<bool> letters;
  double coef;
};

std::vector<DynkinWord> build_dynkin_words(int step) {
  // key: (length, bitmask with bit j set when letter j is the first argument)
  std::map<std::pair<int, std::uint32_t>, double> merged;

  // blocks: flattened (r_i, s_i) pairs of the current composition
  std::vector<std::pair<int, int>> blocks;
  auto emit = [&]() {
    int n = 0;
    double denom_fact = 1.0;
    for (auto [r, s] : blocks) {
      n += r + s;
      for (int i = 2; i <= r; ++i) denom_fact *= i;
      for (int i = 2; i <= s; ++i) denom_fact *= i;
    }
    const int m = static_cast<int>(blocks.size());
    const double coef =
        ((m % 2 == 1) ? 1.0 : -1.0) / (m * n * denom_fact);
    std::vector<bool> word;
    word.reserve(n);
    for (auto [r, s] : blocks) {
      for (int i = 0; i < r; ++i) word.push_back(true);
      for (int i = 0; i < s; ++i) word.push_back(false);
    }
    // a trailing [w,w] makes the nested bracket vanish
    if (n >= 2 && word[n - 1] == word[n - 2]) return;
    std::uint32_t mask = 0;
    for (int j = 0; j < n; ++j)
      if (word[j]) mask |= (1u << j);
    merged[{n, mask}] += coef;
  };

  std::function<void(int)> rec = [&](int remaining) {
    if (!blocks.empty()) emit();
    if (remaining == 0) return;
    for (int r = 0; r <= remaining; ++r) {
      for (int s = 0; s + r <= remaining; ++s) {
        if (r == 0 && s == 0) continue;
        blocks.emplace_back(r, s);
        rec(remaining - r - s);
        blocks.pop_back();
      }
    }
  };
  rec(step);

  std::vector<DynkinWord> out;
  for (const auto& [key, coef] : merged) {
    if (std::abs(coef) < 1e-15) continue;
    DynkinWord w;
    w.coef = coef;
    w.letters.resize(key.first);
    for (int j = 0; j < key.first; ++j) w.letters[j] = (key.second >> j) & 1u;
    out.push_back(std::move(w));
  }
  return out;
}

const std::vector<DynkinWord>& dynkin_words(int step) {
  static std::mutex mu;
  static std::map<int, std::vector<DynkinWord>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(step);
  if (it == cache.end()) it = cache.emplace(step, build_dynkin_words(step)).first;
  return it->second;
}

}  // namespace

AlgebraVector bch_product(const AlgebraVector& a, const AlgebraVector& b) {
  if (!a.alg || !b.alg || !a.alg->same_as(*b.alg))
    throw DomainError("bch_product: operands from different algebras");
  const GradedLieAlgebra& alg = *a.alg;
  std::vector<double> out(alg.dim(), 0.0);
  for (const DynkinWord& w : dynkin_words(alg.step())) {
    const std::size_t L = w.letters.size();
    std::vector<double> acc = w.letters[L - 1] ? a.c : b.c;
    for (std::size_t j = L - 1; j-- > 0;) {
      acc = alg.bracket(w.letters[j] ? a.c : b.c, acc);
    }
    axpy(out, w.coef, acc);
  }
  return AlgebraVector(a.alg, std::move(out));
}

GroupPoint group_mul(const GroupPoint& g, const GroupPoint& h) {
  return GroupPoint(bch_product(g.v, h.v));
}

GroupPoint group_inv(const GroupPoint& g) {
  std::vector<double> c = g.coords();
  for (double& x : c) x = -x;
  return GroupPoint(g.alg(), std::move(c));
}

std::vector<double> dilate_coords(const GradedLieAlgebra& alg, double lambda,
                                  const std::vector<double>& c) {
  if (!(lambda > 0.0)) throw DomainError("dilate: lambda must be positive");
  std::vector<double> out(c.size());
  std::vector<double> powers(alg.step() + 1, 1.0);
  for (int r = 1; r <= alg.step(); ++r) powers[r] = powers[r - 1] * lambda;
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = powers[alg.stratum_of(static_cast<int>(i))] * c[i];
  return out;
}

GroupPoint dilate(double lambda, const GroupPoint& g) {
  return GroupPoint(g.alg(), dilate_coords(*g.alg(), lambda, g.coords()));
}

GroupPoint one_param(const GroupPoint& g, double t) {
  std::vector<double> c = g.coords();
  for (double& x : c) x *= t;
  return GroupPoint(g.alg(), std::move(c));
}

bool is_central(const GradedLieAlgebra& alg, const std::vector<double>& w, double tol) {
  for (int b = 0; b < alg.dim(); ++b) {
    std::vector<double> eb(alg.dim(), 0.0);
    eb[b] = 1.0;
    if (max_abs(alg.bracket(w, eb)) > tol) return false;
  }
  return true;
}

int lowest_stratum(const GradedLieAlgebra& alg, const std::vector<double>& w, double tol) {
  for (int i = 0; i < alg.dim(); ++i)
    if (std::abs(w[i]) > tol) return alg.stratum_of(i);
  return 0;
}

AlgebraPtr heisenberg_algebra(int k) {
  if (k < 1) throw DomainError("heisenberg_algebra: k must be >= 1");
  std::vector<int> dims = {2 * k, 1};
  std::vector<BracketTriple> table;
  const int z = 2 * k;
  for (int i = 0; i < k; ++i) table.push_back({i, k + i, {{z, 1.0}}});
  return std::make_shared<GradedLieAlgebra>("heisenberg:" + std::to_string(k), std::move(dims),
                                            table);
}

AlgebraPtr filiform_algebra(int s) {
  if (s < 1) throw DomainError("filiform_algebra: s must be >= 1");
  std::vector<int> dims(s, 1);
  dims[0] = 2;
  std::vector<BracketTriple> table;
  // basis: X = 0, Y_0 = 1, Y_1 = 2, ..., Y_{s-1} = s
  for (int i = 0; i + 2 <= s; ++i) table.push_back({0, i + 1, {{i + 2, 1.0}}});
  return std::make_shared<GradedLieAlgebra>("filiform:" + std::to_string(s), std::move(dims),
                                            table);
}

AlgebraPtr algebra_by_name(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("unknown algebra spec: " + spec);
  const std::string family = spec.substr(0, colon);
  int param = 0;
  try {
    param = std::stoi(spec.substr(colon + 1));
  } catch (const std::exception&) {
    throw DomainError("bad algebra parameter in spec: " + spec);
  }
  if (family == "heisenberg") return heisenberg_algebra(param);
  if (family == "filiform") return filiform_algebra(param);
  throw DomainError("unknown algebra family: " + family);
}

int MultiIndex::weighted_degree(const GradedLieAlgebra& alg) const {
  int d = 0;
  for (std::size_t i = 0; i < e.size(); ++i) d += alg.weight_of(static_cast<int>(i)) * e[i];
  return d;
}

int MultiIndex::total_degree() const {
  int d = 0;
  for (int x : e) d += x;
  return d;
}

double MultiIndex::eval(const std::vector<double>& coords) const {
  double p = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (int j = 0; j < e[i]; ++j) p *= coords[i];
  }
  return p;
}

}  // namespace carnotlab
