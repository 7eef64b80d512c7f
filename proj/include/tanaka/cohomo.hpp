#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tanaka/glie.hpp"

namespace tanaka {

class UnsupportedDegree : public Error {
 public:
  using Error::Error;
};

/// Wedge-basis key: sorted negative-weight arguments and a target index.
struct CochainKey {
  std::vector<Index> args;
  Index target = 0;
  auto operator<=>(const CochainKey&) const = default;
};

/// Sorts in place and returns the permutation sign, or 0 on a repeated index.
inline int sort_with_sign(std::vector<Index>& v) {
  int sign = 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    for (std::size_t j = i; j > 0 && v[j - 1] >= v[j]; --j) {
      if (v[j - 1] == v[j]) return 0;
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  return sign;
}

/// Element of C^k(m, g) = Λ^k m* ⊗ g on the wedge basis.
class Cochain {
 public:
  explicit Cochain(int degree = 1) : degree_(degree) {
    if (degree < 1 || degree > 3) throw UnsupportedDegree("cochain degree must be 1, 2 or 3");
  }
  static Cochain basis(std::vector<Index> args, Index target) {
    Cochain c(static_cast<int>(args.size()));
    c.add(std::move(args), target, 1);
    return c;
  }

  int degree() const { return degree_; }
  const std::map<CochainKey, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// += c x^{a_1} ∧ ... ∧ x^{a_k} ⊗ e_target, arguments in any order.
  void add(std::vector<Index> args, Index target, const Rational& c) {
    if (static_cast<int>(args.size()) != degree_) throw Error("cochain argument count does not match degree");
    int s = sort_with_sign(args);
    if (s == 0 || c.is_zero()) return;
    CochainKey key{std::move(args), target};
    auto [it, fresh] = terms_.try_emplace(std::move(key), s > 0 ? c : -c);
    if (!fresh) {
      it->second += s > 0 ? c : -c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }
  Rational get(std::vector<Index> args, Index target) const {
    int s = sort_with_sign(args);
    if (s == 0) return {};
    auto it = terms_.find(CochainKey{std::move(args), target});
    if (it == terms_.end()) return {};
    return s > 0 ? it->second : -it->second;
  }

  /// Value on basis arguments (any order), as a vector in g.
  SparseVector evaluate(const std::vector<Index>& xs) const {
    std::vector<Index> sorted = xs;
    int s = sort_with_sign(sorted);
    SparseVector out;
    if (s == 0) return out;
    auto lo = terms_.lower_bound(CochainKey{sorted, 0});
    for (auto it = lo; it != terms_.end() && it->first.args == sorted; ++it)
      out.add_to(it->first.target, s > 0 ? it->second : -it->second);
    return out;
  }

  Cochain& operator+=(const Cochain& o) {
    check_same(o);
    for (const auto& [k, c] : o.terms_) add(k.args, k.target, c);
    return *this;
  }
  Cochain& operator-=(const Cochain& o) {
    check_same(o);
    for (const auto& [k, c] : o.terms_) add(k.args, k.target, -c);
    return *this;
  }
  Cochain& operator*=(const Rational& c) {
    if (c.is_zero()) terms_.clear();
    else for (auto& [_, v] : terms_) v *= c;
    return *this;
  }
  friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
  friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
  friend Cochain operator*(const Rational& c, Cochain a) { return a *= c; }
  friend bool operator==(const Cochain& a, const Cochain& b) { return a.degree_ == b.degree_ && a.terms_ == b.terms_; }

  /// Weight wt(target) - Σ wt(args) when homogeneous.
  std::optional<int> weight(const GradedLieAlgebra& g) const {
    std::optional<int> w;
    for (const auto& [k, _] : terms_) {
      int v = key_weight(g, k);
      if (w && *w != v) return std::nullopt;
      w = v;
    }
    return w;
  }
  static int key_weight(const GradedLieAlgebra& g, const CochainKey& k) {
    int w = g.weight(k.target);
    for (Index a : k.args) w -= g.weight(a);
    return w;
  }

  std::string format(const GradedLieAlgebra& g) const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [k, c] : terms_) {
      std::string cs = c.str();
      if (!s.empty()) s += c.sign() < 0 ? " - " : " + ";
      else if (c.sign() < 0) s += "-";
      if (c.sign() < 0) cs = cs.substr(1);
      if (cs != "1") s += cs + "*";
      for (std::size_t i = 0; i < k.args.size(); ++i) s += (i ? "^" : "") + g.label(k.args[i]) + "*";
      s += "(x)" + g.label(k.target);
    }
    return s;
  }

 private:
  void check_same(const Cochain& o) const {
    if (o.degree_ != degree_) throw Error("cochain degree mismatch");
  }
  int degree_;
  std::map<CochainKey, Rational> terms_;
};

namespace detail {

inline void check_arguments(const Cochain& c, const GradedLieAlgebra& g) {
  for (const auto& [k, _] : c.terms()) {
    for (Index a : k.args)
      if (a >= g.dim() || g.weight(a) >= 0) throw Error("cochain argument is not a negative-weight basis element");
    if (k.target >= g.dim()) throw Error("cochain target out of range");
  }
}

inline std::vector<Index> negative_indices(const GradedLieAlgebra& g) {
  std::vector<Index> v;
  for (Index i = 0; i < g.dim(); ++i)
    if (g.weight(i) < 0) v.push_back(i);
  return v;
}

}  // namespace detail

/// Chevalley-Eilenberg coboundary
///   ∂φ(X_0..X_k) = Σ (-1)^i [X_i, φ(..X̂_i..)] + Σ_{i<j} (-1)^{i+j} φ([X_i,X_j], ..),
/// computed term-wise as ∂(α⊗t) = Σ_b (x^b ∧ α) ⊗ [e_b, t] + dα ⊗ t.
inline Cochain coboundary(const Cochain& c, const GradedLieAlgebra& g) {
  if (c.degree() > 2) throw UnsupportedDegree("coboundary is implemented for degrees 1 and 2 only");
  detail::check_arguments(c, g);
  const auto neg = detail::negative_indices(g);
  // dx^c = -Σ_{p<q} c^c_{pq} x^p ∧ x^q
  std::map<Index, std::vector<std::pair<std::pair<Index, Index>, Rational>>> dx;
  for (std::size_t a = 0; a < neg.size(); ++a)
    for (std::size_t b = a + 1; b < neg.size(); ++b)
      for (const auto& [r, v] : g.bracket_basis(neg[a], neg[b])) dx[r].push_back({{neg[a], neg[b]}, -v});

  Cochain out(c.degree() + 1);
  for (const auto& [key, coef] : c.terms()) {
    for (Index b : neg) {
      const auto& v = g.bracket_basis(b, key.target);
      if (v.is_zero()) continue;
      std::vector<Index> args{b};
      args.insert(args.end(), key.args.begin(), key.args.end());
      for (const auto& [t, x] : v) out.add(args, t, coef * x);
    }
    for (std::size_t i = 0; i < key.args.size(); ++i) {
      auto it = dx.find(key.args[i]);
      if (it == dx.end()) continue;
      Rational sign = i % 2 == 0 ? 1 : -1;
      for (const auto& [pq, x] : it->second) {
        std::vector<Index> args(key.args.begin(), key.args.begin() + i);
        args.push_back(pq.first);
        args.push_back(pq.second);
        args.insert(args.end(), key.args.begin() + i + 1, key.args.end());
        out.add(args, key.target, coef * sign * x);
      }
    }
  }
  return out;
}

/// (a·φ)(x_1..x_k) = [a, φ(x)] - Σ_i φ(.., pr_m [a, x_i], ..), the projection
/// to the negative part taken along the non-negative part.
inline Cochain g0_action(const SparseVector& a, const Cochain& c, const GradedLieAlgebra& g) {
  detail::check_arguments(c, g);
  Cochain out(c.degree());
  if (a.is_zero() || c.is_zero()) return out;
  const auto neg = detail::negative_indices(g);
  // a·x^p = -Σ_y (coefficient of e_p in pr[a, e_y]) x^y
  std::map<Index, std::vector<std::pair<Index, Rational>>> co;
  for (Index y : neg)
    for (const auto& [p, v] : g.bracket(a, SparseVector::unit(y)))
      if (g.weight(p) < 0) co[p].push_back({y, -v});
  for (const auto& [key, coef] : c.terms()) {
    for (const auto& [t, v] : g.bracket(a, SparseVector::unit(key.target))) out.add(key.args, t, coef * v);
    for (std::size_t i = 0; i < key.args.size(); ++i) {
      auto it = co.find(key.args[i]);
      if (it == co.end()) continue;
      for (const auto& [y, v] : it->second) {
        std::vector<Index> args = key.args;
        args[i] = y;
        out.add(args, key.target, coef * v);
      }
    }
  }
  return out;
}

inline Cochain g0_action(Index a, const Cochain& c, const GradedLieAlgebra& g) {
  return g0_action(SparseVector::unit(a), c, g);
}

/// Indexed wedge basis of C^k (optionally only weights >= 1).
class CochainSpace {
 public:
  CochainSpace(const GradedLieAlgebra& g, int k, bool positive) : degree_(k) {
    if (k < 1 || k > 3) throw UnsupportedDegree("cochain degree must be 1, 2 or 3");
    const auto neg = detail::negative_indices(g);
    std::vector<Index> pick(k);
    auto rec = [&](auto&& self, std::size_t from, int depth) -> void {
      if (depth == k) {
        for (Index t = 0; t < g.dim(); ++t) {
          CochainKey key{pick, t};
          if (!positive || Cochain::key_weight(g, key) >= 1) {
            index_.emplace(key, keys_.size());
            keys_.push_back(std::move(key));
          }
        }
        return;
      }
      for (std::size_t i = from; i < neg.size(); ++i) {
        pick[depth] = neg[i];
        self(self, i + 1, depth + 1);
      }
    };
    rec(rec, 0, 0);
    for (const auto& key : keys_) weights_.push_back(Cochain::key_weight(g, key));
  }

  int degree() const { return degree_; }
  std::size_t size() const { return keys_.size(); }
  const CochainKey& key(Index i) const { return keys_.at(i); }
  int weight(Index i) const { return weights_.at(i); }
  std::optional<Index> find(const CochainKey& k) const {
    auto it = index_.find(k);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Cochain basis(Index i) const { return Cochain::basis(keys_.at(i).args, keys_.at(i).target); }

  SparseVector to_vector(const Cochain& c) const {
    if (c.degree() != degree_) throw Error("cochain degree mismatch");
    SparseVector v;
    for (const auto& [k, x] : c.terms()) {
      auto i = find(k);
      if (!i) throw Error("cochain has a component outside this space");
      v.add_to(*i, x);
    }
    return v;
  }
  Cochain from_vector(const SparseVector& v) const {
    Cochain c(degree_);
    for (const auto& [i, x] : v) c.add(keys_.at(i).args, keys_.at(i).target, x);
    return c;
  }

 private:
  int degree_;
  std::vector<CochainKey> keys_;
  std::vector<int> weights_;
  std::map<CochainKey, Index> index_;
};

struct WeightedSpace {
  int weight = 0;
  std::vector<Cochain> basis;
};

/// Weight decomposition of C^k (or C^k_+), ascending weights.
inline std::vector<WeightedSpace> weight_decompose(int k, bool positive, const GradedLieAlgebra& g) {
  if (k < 1 || k > 2) throw UnsupportedDegree("weight decomposition is provided for k = 1, 2");
  CochainSpace sp(g, k, positive);
  std::map<int, WeightedSpace> by;
  for (Index i = 0; i < sp.size(); ++i) {
    auto& ws = by[sp.weight(i)];
    ws.weight = sp.weight(i);
    ws.basis.push_back(sp.basis(i));
  }
  std::vector<WeightedSpace> out;
  for (auto& [_, ws] : by) out.push_back(std::move(ws));
  return out;
}

/// Deterministic (reduced echelon) basis of ∂(C^k), optionally from C^k_+.
inline std::vector<Cochain> image_of_coboundary(int k, bool positive, const GradedLieAlgebra& g) {
  if (k < 1 || k > 2) throw UnsupportedDegree("image of the coboundary is provided for k = 1, 2");
  CochainSpace src(g, k, positive), dst(g, k + 1, false);
  RowSpace rs;
  for (Index i = 0; i < src.size(); ++i) rs.add(dst.to_vector(coboundary(src.basis(i), g)));
  std::vector<Cochain> out;
  for (const auto& v : rs.basis()) out.push_back(dst.from_vector(v));
  return out;
}

/// Diagonal of ad(e_u) when it is diagonal in the stored basis.
inline std::optional<std::vector<Rational>> ad_diagonal(const GradedLieAlgebra& g, Index u) {
  std::vector<Rational> d(g.dim());
  for (Index j = 0; j < g.dim(); ++j) {
    const auto& v = g.bracket_basis(u, j);
    for (const auto& [i, c] : v) {
      if (i != j) return std::nullopt;
      d[j] = c;
    }
  }
  return d;
}

/// Eigenvalue of a diagonal element on a wedge-basis key.
inline Rational key_eigenvalue(const std::vector<Rational>& diag, const CochainKey& k) {
  Rational e = diag[k.target];
  for (Index a : k.args) e -= diag[a];
  return e;
}

}  // namespace tanaka
