#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tanaka/linalg.hpp"

namespace tanaka {

struct BasisElement {
  std::string label;
  int weight = 0;
  friend bool operator==(const BasisElement&, const BasisElement&) = default;
};

/// Structure constants [e_i, e_j] for i < j.
using StructureConstants = std::map<std::pair<Index, Index>, SparseVector>;

class GradedLieAlgebra {
 public:
  GradedLieAlgebra() = default;
  GradedLieAlgebra(std::vector<BasisElement> basis, StructureConstants sc)
      : basis_(std::move(basis)) {
    const std::size_t d = basis_.size();
    for (Index i = 0; i < d; ++i) {
      if (!by_label_.emplace(basis_[i].label, i).second)
        throw Error("duplicate basis label '" + basis_[i].label + "'");
    }
    table_.assign(d * d, SparseVector());
    for (auto& [key, v] : sc) {
      auto [i, j] = key;
      if (i >= j) throw Error("structure constants must be stored with i < j");
      if (j >= d) throw Error("structure constant index out of range");
      if (!v.is_zero() && v.max_index() >= d) throw Error("structure constant result out of range");
      if (v.is_zero()) continue;
      sc_.emplace(key, v);
      table_[i * d + j] = v;
      table_[j * d + i] = -v;
    }
  }

  std::size_t dim() const { return basis_.size(); }
  const std::vector<BasisElement>& basis() const { return basis_; }
  const StructureConstants& structure_constants() const { return sc_; }
  const std::string& label(Index i) const { return basis_.at(i).label; }
  int weight(Index i) const { return basis_.at(i).weight; }
  std::optional<Index> find(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
  }
  Index index_of(const std::string& label) const {
    auto i = find(label);
    if (!i) throw Error("unknown basis label '" + label + "'");
    return *i;
  }
  SparseVector element(const std::string& label) const { return SparseVector::unit(index_of(label)); }

  const SparseVector& bracket_basis(Index i, Index j) const { return table_[i * dim() + j]; }

  SparseVector bracket(const SparseVector& x, const SparseVector& y) const {
    SparseVector out;
    for (const auto& [i, a] : x)
      for (const auto& [j, b] : y)
        if (i != j) out.axpy(a * b, bracket_basis(i, j));
    return out;
  }
  /// [e_i, y]
  SparseVector bracket(Index i, const SparseVector& y) const {
    SparseVector out;
    for (const auto& [j, b] : y)
      if (i != j) out.axpy(b, bracket_basis(i, j));
    return out;
  }

  std::vector<Index> graded_component(int w) const {
    std::vector<Index> out;
    for (Index i = 0; i < dim(); ++i)
      if (basis_[i].weight == w) out.push_back(i);
    return out;
  }
  int min_weight() const {
    int m = 0;
    for (const auto& b : basis_) m = std::min(m, b.weight);
    return m;
  }
  int max_weight() const {
    int m = basis_.empty() ? 0 : basis_[0].weight;
    for (const auto& b : basis_) m = std::max(m, b.weight);
    return m;
  }
  /// Sorted distinct weights with their multiplicities.
  std::map<int, std::size_t> weight_dims() const {
    std::map<int, std::size_t> m;
    for (const auto& b : basis_) ++m[b.weight];
    return m;
  }
  /// Weight of a homogeneous vector; nullopt for zero or inhomogeneous input.
  std::optional<int> weight_of(const SparseVector& v) const {
    std::optional<int> w;
    for (const auto& [i, _] : v) {
      if (w && *w != weight(i)) return std::nullopt;
      w = weight(i);
    }
    return w;
  }

  std::string format(const SparseVector& v) const {
    if (v.is_zero()) return "0";
    std::string s;
    for (const auto& [i, c] : v) {
      std::string cs = c.str();
      if (!s.empty()) s += c.sign() < 0 ? " - " : " + ";
      else if (c.sign() < 0) s += "-";
      if (c.sign() < 0) cs = cs.substr(1);
      if (cs != "1") s += cs + "*";
      s += label(i);
    }
    return s;
  }

  /// Same brackets, new weights.
  GradedLieAlgebra reweighted(const std::vector<int>& weights) const {
    if (weights.size() != dim()) throw Error("reweighting needs one weight per basis element");
    auto b = basis_;
    for (Index i = 0; i < dim(); ++i) b[i].weight = weights[i];
    return GradedLieAlgebra(std::move(b), sc_);
  }

  /// Subalgebra spanned by a subset of basis elements, renumbered in the
  /// given order; throws if the subset is not closed.
  GradedLieAlgebra subalgebra(const std::vector<Index>& idx) const {
    std::vector<Index> pos(dim(), static_cast<Index>(-1));
    std::vector<BasisElement> b;
    for (Index k = 0; k < idx.size(); ++k) {
      pos.at(idx[k]) = k;
      b.push_back(basis_.at(idx[k]));
    }
    StructureConstants sc;
    for (Index a = 0; a < idx.size(); ++a)
      for (Index c = a + 1; c < idx.size(); ++c) {
        const auto& v = bracket_basis(idx[a], idx[c]);
        SparseVector w;
        for (const auto& [i, x] : v) {
          if (pos[i] == static_cast<Index>(-1))
            throw Error("subset is not closed under the bracket");
          w.add_to(pos[i], x);
        }
        if (!w.is_zero()) sc.emplace(std::make_pair(a, c), w);
      }
    return GradedLieAlgebra(std::move(b), std::move(sc));
  }

  friend bool operator==(const GradedLieAlgebra& a, const GradedLieAlgebra& b) {
    return a.basis_ == b.basis_ && a.sc_ == b.sc_;
  }

 private:
  std::vector<BasisElement> basis_;
  StructureConstants sc_;
  std::vector<SparseVector> table_;
  std::unordered_map<std::string, Index> by_label_;
};

/// Convenience builder accepting brackets in either order.
class AlgebraBuilder {
 public:
  Index add(std::string label, int weight) {
    basis_.push_back({std::move(label), weight});
    return basis_.size() - 1;
  }
  /// [e_i, e_j] += c e_k
  void add_bracket(Index i, Index j, Index k, const Rational& c) {
    if (i == j) throw Error("bracket of a basis element with itself is zero by convention");
    if (i < j) sc_[{i, j}].add_to(k, c);
    else sc_[{j, i}].add_to(k, -c);
  }
  void add_bracket(Index i, Index j, const SparseVector& v) {
    for (const auto& [k, c] : v) add_bracket(i, j, k, c);
  }
  GradedLieAlgebra build() const { return GradedLieAlgebra(basis_, sc_); }

 private:
  std::vector<BasisElement> basis_;
  StructureConstants sc_;
};

struct GradingViolation {
  Index i, j, k;  // [e_i, e_j] has a component along e_k of the wrong weight
};

struct ValidationReport {
  std::vector<std::array<Index, 3>> jacobi_failures;
  std::vector<GradingViolation> grading_violations;
  bool ok() const { return jacobi_failures.empty() && grading_violations.empty(); }
};

inline ValidationReport validate(const GradedLieAlgebra& g) {
  ValidationReport rep;
  const std::size_t d = g.dim();
  for (const auto& [key, v] : g.structure_constants())
    for (const auto& [k, _] : v)
      if (g.weight(k) != g.weight(key.first) + g.weight(key.second))
        rep.grading_violations.push_back({key.first, key.second, k});
  for (Index a = 0; a < d; ++a)
    for (Index b = a + 1; b < d; ++b)
      for (Index c = b + 1; c < d; ++c) {
        SparseVector s = g.bracket(a, g.bracket_basis(b, c));
        s += g.bracket(b, g.bracket_basis(c, a));
        s += g.bracket(c, g.bracket_basis(a, b));
        if (!s.is_zero()) rep.jacobi_failures.push_back({a, b, c});
      }
  return rep;
}

/// Matrix of ad(x); column j holds [x, e_j].
inline Matrix adjoint_matrix(const GradedLieAlgebra& g, const SparseVector& x) {
  Matrix m(g.dim(), g.dim());
  for (Index j = 0; j < g.dim(); ++j)
    for (const auto& [i, c] : g.bracket(x, SparseVector::unit(j))) m.set(i, j, c);
  return m;
}

inline std::vector<Index> graded_component(const GradedLieAlgebra& g, int w) { return g.graded_component(w); }

/// Lower central series g ⊇ [g,g] ⊇ ... terminates at zero within dim steps.
inline bool is_nilpotent(const GradedLieAlgebra& g) {
  std::vector<SparseVector> cur;
  for (Index i = 0; i < g.dim(); ++i) cur.push_back(SparseVector::unit(i));
  for (std::size_t step = 0; step <= g.dim(); ++step) {
    RowSpace next;
    for (Index i = 0; i < g.dim(); ++i)
      for (const auto& v : cur) next.add(g.bracket(i, v));
    if (next.dim() == 0) return true;
    cur = next.basis();
  }
  return false;
}

/// Negatively graded algebra: a Tanaka symbol candidate.
class SymbolAlgebra {
 public:
  SymbolAlgebra() = default;
  explicit SymbolAlgebra(GradedLieAlgebra g) : alg_(std::move(g)) {
    for (const auto& b : alg_.basis())
      if (b.weight >= 0) throw Error("symbol algebra needs all weights negative; '" + b.label + "' has weight " + std::to_string(b.weight));
  }
  const GradedLieAlgebra& alg() const { return alg_; }
  std::size_t dim() const { return alg_.dim(); }
  int depth() const { return -alg_.min_weight(); }

 private:
  GradedLieAlgebra alg_;
};

/// Iterated brackets of the weight -1 part span the whole algebra.
inline bool is_fundamental(const SymbolAlgebra& m) {
  const auto& g = m.alg();
  auto gen = g.graded_component(-1);
  RowSpace span;
  std::vector<SparseVector> frontier;
  for (Index i : gen)
    if (span.add(SparseVector::unit(i))) frontier.push_back(SparseVector::unit(i));
  while (!frontier.empty()) {
    std::vector<SparseVector> next;
    for (const auto& v : frontier)
      for (Index i : gen) {
        SparseVector w = g.bracket(i, v);
        if (span.add(w)) next.push_back(w);
      }
    frontier = std::move(next);
  }
  return span.dim() == g.dim();
}

inline GradedLieAlgebra negative_part(const GradedLieAlgebra& g) {
  std::vector<Index> idx;
  for (Index i = 0; i < g.dim(); ++i)
    if (g.weight(i) < 0) idx.push_back(i);
  return g.subalgebra(idx);
}

}  // namespace tanaka
