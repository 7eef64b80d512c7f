#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tanaka/glie.hpp"

namespace tanaka {

struct ProlongationResult {
  GradedLieAlgebra full;
  std::map<int, std::size_t> level_dims;
  bool terminated = false;
  std::vector<Index> embedding;
};

namespace detail {

/// Working state of the prolongation: negative basis from the symbol,
/// non-negative elements stored by their action on the negative part.
class ProlongationBuilder {
 public:
  explicit ProlongationBuilder(const GradedLieAlgebra& m) : m_(m), d_(m.dim()) {
    for (Index i = 0; i < d_; ++i) weight_.push_back(m.weight(i));
  }

  std::size_t size() const { return weight_.size(); }
  int top_level() const { return size() > d_ ? weight_.back() : -1; }
  int weight(Index i) const { return weight_[i]; }
  bool negative(Index i) const { return i < d_; }

  SparseVector br(Index a, Index b) const {
    if (a == b) return {};
    if (negative(a) && negative(b)) return m_.bracket_basis(a, b);
    if (!negative(a) && negative(b)) return act_[a - d_][b];
    if (negative(a) && !negative(b)) return -act_[b - d_][a];
    auto it = memo_.find({std::min(a, b), std::max(a, b)});
    if (it == memo_.end()) throw Error("internal: bracket of non-negative elements requested too early");
    return a < b ? it->second : -it->second;
  }
  SparseVector br(Index a, const SparseVector& v) const {
    SparseVector out;
    for (const auto& [j, c] : v) out.axpy(c, br(a, j));
    return out;
  }

  /// Solves the derivation constraints for level i; returns the number of
  /// new elements.
  std::size_t add_level(int i) {
    std::vector<std::pair<Index, Index>> unknowns;  // (x, target)
    std::map<std::pair<Index, Index>, Index> uidx;
    for (Index x = 0; x < d_; ++x)
      for (Index t = 0; t < size(); ++t)
        if (weight_[t] == i + weight_[x]) {
          uidx[{x, t}] = unknowns.size();
          unknowns.push_back({x, t});
        }
    if (unknowns.empty()) return 0;
    std::vector<std::vector<Index>> targets(d_);
    for (const auto& [x, t] : unknowns) targets[x].push_back(t);

    std::vector<SparseVector> rows;
    for (Index x = 0; x < d_; ++x)
      for (Index y = x + 1; y < d_; ++y) {
        std::map<Index, SparseVector> eq;  // component -> row over unknowns
        for (const auto& [z, c] : m_.bracket_basis(x, y))
          for (Index t : targets[z]) eq[t].add_to(uidx.at({z, t}), c);
        for (Index t : targets[x])
          for (const auto& [comp, c] : br(t, y)) eq[comp].add_to(uidx.at({x, t}), -c);
        for (Index t : targets[y])
          for (const auto& [comp, c] : br(x, t)) eq[comp].add_to(uidx.at({y, t}), -c);
        for (auto& [_, r] : eq)
          if (!r.is_zero()) rows.push_back(std::move(r));
      }
    Matrix sys = Matrix::from_rows(std::move(rows), unknowns.size());
    auto ker = kernel_basis(sys);
    for (const auto& v : ker) {
      std::vector<SparseVector> act(d_);
      for (const auto& [u, c] : v) act[unknowns[u].first].add_to(unknowns[u].second, c);
      act_.push_back(std::move(act));
      weight_.push_back(i);
    }
    return ker.size();
  }

  /// Brackets among non-negative elements by induction on total weight.
  void install_brackets(bool truncated) {
    std::vector<std::pair<Index, Index>> pairs;
    for (Index a = d_; a < size(); ++a)
      for (Index b = a + 1; b < size(); ++b) pairs.push_back({a, b});
    std::stable_sort(pairs.begin(), pairs.end(), [&](auto p, auto q) {
      return weight_[p.first] + weight_[p.second] < weight_[q.first] + weight_[q.second];
    });
    const std::size_t total = size();
    std::map<int, RowSpace> level_span;
    std::map<int, std::vector<Index>> level_members;
    auto flat = [&](const std::vector<SparseVector>& act) {
      SparseVector f;
      for (Index x = 0; x < d_; ++x)
        for (const auto& [c, v] : act[x]) f.add_to(x * total + c, v);
      return f;
    };
    for (Index a = d_; a < total; ++a) {
      auto [it, _] = level_span.try_emplace(weight_[a], true);
      it->second.add(flat(act_[a - d_]));
      level_members[weight_[a]].push_back(a);
    }
    for (auto [a, b] : pairs) {
      std::vector<SparseVector> r(d_);
      for (Index x = 0; x < d_; ++x) {
        r[x] = br(a, br(b, x));
        r[x] -= br(b, br(a, x));
      }
      int s = weight_[a] + weight_[b];
      SparseVector f = flat(r);
      SparseVector result;
      // Past the last computed level only truncated runs can land here.
      if (!f.is_zero() && (s <= top_level() || !truncated)) {
        auto it = level_span.find(s);
        std::optional<SparseVector> coords;
        if (it != level_span.end()) coords = it->second.coordinates(f);
        if (!coords) throw Error("bracket of prolongation elements leaves the prolongation (level " + std::to_string(s) + ")");
        for (const auto& [k, c] : *coords) result.add_to(level_members[s][k], c);
      }
      memo_[{a, b}] = result;
    }
  }

  GradedLieAlgebra build() const {
    std::vector<BasisElement> basis = m_.basis();
    std::map<int, int> counter;
    for (Index a = d_; a < size(); ++a)
      basis.push_back({"g" + std::to_string(weight_[a]) + "_" + std::to_string(++counter[weight_[a]]), weight_[a]});
    StructureConstants sc = m_.structure_constants();
    for (Index a = d_; a < size(); ++a) {
      for (Index x = 0; x < d_; ++x)
        if (!act_[a - d_][x].is_zero()) sc[{x, a}] = -act_[a - d_][x];
      for (Index b = a + 1; b < size(); ++b) {
        const auto& v = memo_.at({a, b});
        if (!v.is_zero()) sc[{a, b}] = v;
      }
    }
    return GradedLieAlgebra(std::move(basis), std::move(sc));
  }

 private:
  const GradedLieAlgebra& m_;
  std::size_t d_;
  std::vector<int> weight_;
  std::vector<std::vector<SparseVector>> act_;
  std::map<std::pair<Index, Index>, SparseVector> memo_;
};

}  // namespace detail

inline int default_max_level(const SymbolAlgebra& m) { return 2 * m.depth() + 4; }

inline ProlongationResult tanaka_prolong(const SymbolAlgebra& m, std::optional<int> max_level = std::nullopt) {
  if (!is_fundamental(m)) throw Error("symbol is not fundamental (not generated by its weight -1 part)");
  const int cap = max_level.value_or(default_max_level(m));
  detail::ProlongationBuilder pb(m.alg());
  ProlongationResult r;
  r.level_dims = m.alg().weight_dims();
  for (int i = 0;; ++i) {
    if (i > cap) { r.terminated = false; break; }
    std::size_t added = pb.add_level(i);
    if (added == 0) { r.terminated = true; break; }
    r.level_dims[i] = added;
  }
  pb.install_brackets(!r.terminated);
  r.full = pb.build();
  for (Index i = 0; i < m.dim(); ++i) r.embedding.push_back(i);
  return r;
}

inline GradedLieAlgebra nonnegative_part(const ProlongationResult& r) {
  std::vector<Index> idx;
  for (Index i = 0; i < r.full.dim(); ++i)
    if (r.full.weight(i) >= 0) idx.push_back(i);
  return r.full.subalgebra(idx);
}

/// Linear map between algebras as the list of basis images.
using LinearMap = std::vector<SparseVector>;

/// True iff `map` (images of src basis in dst) is a bijective, weight
/// preserving Lie algebra homomorphism. On failure `why` names the first
/// violated relation.
inline bool is_graded_isomorphism(const GradedLieAlgebra& src, const GradedLieAlgebra& dst, const LinearMap& map,
                                  std::string* why = nullptr) {
  auto fail = [&](std::string s) { if (why) *why = std::move(s); return false; };
  if (src.dim() != dst.dim() || map.size() != src.dim()) return fail("dimension mismatch");
  for (Index i = 0; i < src.dim(); ++i) {
    for (const auto& [j, _] : map[i])
      if (dst.weight(j) != src.weight(i)) return fail("image of " + src.label(i) + " is not homogeneous of its weight");
  }
  if (rank(map) != src.dim()) return fail("map is not injective");
  auto image = [&](const SparseVector& v) {
    SparseVector out;
    for (const auto& [i, c] : v) out.axpy(c, map[i]);
    return out;
  };
  for (Index i = 0; i < src.dim(); ++i)
    for (Index j = i + 1; j < src.dim(); ++j) {
      if (image(src.bracket_basis(i, j)) != dst.bracket(map[i], map[j]))
        return fail("[" + src.label(i) + "," + src.label(j) + "] is not preserved");
    }
  return true;
}

/// Extends a graded isomorphism known on the negative part of `src` to the
/// non-negative levels by matching actions on the negative part, then checks
/// the whole map. `neg` maps negative src basis indices to dst vectors.
inline std::optional<LinearMap> extend_isomorphism(const GradedLieAlgebra& src, const GradedLieAlgebra& dst,
                                                   const std::map<Index, SparseVector>& neg,
                                                   std::string* why = nullptr) {
  LinearMap map(src.dim());
  std::vector<bool> known(src.dim(), false);
  for (const auto& [i, v] : neg) { map.at(i) = v; known[i] = true; }
  std::vector<Index> src_neg, dst_neg;
  for (Index i = 0; i < src.dim(); ++i) {
    if (src.weight(i) < 0) {
      src_neg.push_back(i);
      if (!known[i]) { if (why) *why = "negative image missing for " + src.label(i); return std::nullopt; }
    }
  }
  auto image = [&](const SparseVector& v) {
    SparseVector out;
    for (const auto& [i, c] : v) {
      if (!known[i]) throw Error("internal: image requested before it is known");
      out.axpy(c, map[i]);
    }
    return out;
  };
  const std::size_t D = dst.dim();
  for (int level = 0; level <= src.max_weight(); ++level) {
    auto targets = dst.graded_component(level);
    RowSpace span(true);
    for (Index s : targets) {
      SparseVector f;
      for (Index xi = 0; xi < src_neg.size(); ++xi)
        for (const auto& [c, v] : dst.bracket(s, map[src_neg[xi]])) f.add_to(xi * D + c, v);
      span.add(f);
    }
    for (Index u : src.graded_component(level)) {
      SparseVector rhs;
      for (Index xi = 0; xi < src_neg.size(); ++xi)
        for (const auto& [c, v] : image(src.bracket_basis(u, src_neg[xi]))) rhs.add_to(xi * D + c, v);
      auto coords = span.coordinates(rhs);
      if (!coords) { if (why) *why = "no image for " + src.label(u) + " at level " + std::to_string(level); return std::nullopt; }
      SparseVector img;
      for (const auto& [k, c] : *coords) img.add_to(targets[k], c);
      map[u] = img;
      known[u] = true;
    }
  }
  if (!is_graded_isomorphism(src, dst, map, why)) return std::nullopt;
  return map;
}

}  // namespace tanaka
