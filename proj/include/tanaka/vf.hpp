#pragma once

#include <random>
#include <string>
#include <vector>

#include "tanaka/catalog.hpp"
#include "tanaka/glie.hpp"
#include "tanaka/poly.hpp"
#include "tanaka/prolong.hpp"

namespace tanaka {

/// Left-nested word [X_{w0},[X_{w1},[...,X_{wk}]]] with letters 1 or 2.
using BracketWord = std::vector<int>;

inline std::string word_label(const BracketWord& w) {
  std::string s = "w";
  for (int l : w) s += std::to_string(l);
  return s;
}

struct FlagReport {
  std::vector<Rational> point;
  std::vector<std::size_t> dims;       // small growth vector
  std::vector<BracketWord> words;      // spanning words, by level
  std::vector<int> levels;             // word length of each spanning word
  std::vector<std::vector<Rational>> values;
  std::vector<PolyVectorField> fields;
  bool stabilized = false;
};

/// Weak derived flag at q. Words whose value at q depends on earlier ones are
/// pruned, which gives the flag at points where its ranks are locally
/// constant. depth = 0 runs until the flag stops growing.
inline FlagReport weak_derived_flag(const PolyFrame& f, const std::vector<Rational>& q, int depth = 0) {
  f.check();
  if (q.size() != f.dim()) throw Error("point has " + std::to_string(q.size()) + " coordinates, frame has " + std::to_string(f.dim()));
  FlagReport rep;
  rep.point = q;
  RowSpace span;
  std::vector<std::size_t> current;
  for (int l = 0; l < 2; ++l) {
    auto v = f.fields[l].evaluate(q);
    if (!span.add(SparseVector::from_dense(v))) throw Error("frame is degenerate at the point");
    rep.words.push_back({l + 1});
    rep.levels.push_back(1);
    rep.values.push_back(v);
    rep.fields.push_back(f.fields[l]);
    current.push_back(rep.words.size() - 1);
  }
  rep.dims.push_back(2);
  for (int level = 2; depth == 0 || level <= depth; ++level) {
    if (span.dim() == f.dim()) { rep.stabilized = true; break; }
    std::vector<std::size_t> next;
    for (std::size_t w : current)
      for (int l = 0; l < 2; ++l) {
        PolyVectorField b = lie_bracket(f.fields[l], rep.fields[w]);
        auto v = b.evaluate(q);
        if (!span.add(SparseVector::from_dense(v))) continue;
        BracketWord word{l + 1};
        word.insert(word.end(), rep.words[w].begin(), rep.words[w].end());
        rep.words.push_back(word);
        rep.levels.push_back(level);
        rep.values.push_back(v);
        rep.fields.push_back(std::move(b));
        next.push_back(rep.words.size() - 1);
      }
    if (next.empty()) { rep.stabilized = true; break; }
    rep.dims.push_back(span.dim());
    current = std::move(next);
  }
  return rep;
}

/// Seeded rational sampling from the box with numerators and denominators
/// bounded by 10.
class PointSampler {
 public:
  explicit PointSampler(std::uint64_t seed) : rng_(seed) {}
  Rational next() {
    std::uniform_int_distribution<long> num(-10, 10), den(1, 10);
    long p = num(rng_), d = den(rng_);
    return Rational(p, d);
  }
  std::vector<Rational> point(std::size_t dim) {
    std::vector<Rational> q;
    for (std::size_t i = 0; i < dim; ++i) q.push_back(next());
    return q;
  }

 private:
  std::mt19937_64 rng_;
};

constexpr int resample_limit = 8;

/// Ranks of the flag are lower semicontinuous and generically maximal, so q
/// is equiregular iff its growth vector equals the componentwise maximum
/// over sampled nearby points.
inline bool equiregular_at(const PolyFrame& f, const std::vector<Rational>& q, const FlagReport& at_q, std::uint64_t seed) {
  PointSampler s(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> best;
  for (int t = 0; t < resample_limit; ++t) {
    auto q2 = q;
    for (auto& x : q2) x += s.next() / Rational(7);
    std::vector<std::size_t> dims;
    try {
      dims = weak_derived_flag(f, q2).dims;
    } catch (const Error&) {
      continue;
    }
    if (dims.size() > best.size()) best.resize(dims.size(), 0);
    for (std::size_t i = 0; i < best.size(); ++i) {
      std::size_t v = i < dims.size() ? dims[i] : dims.back();
      best[i] = std::max(best[i], v);
    }
  }
  auto mine = at_q.dims;
  if (mine.size() < best.size()) mine.resize(best.size(), mine.back());
  return mine == best || best.empty();
}

/// Graded nilpotent algebra of the flag at q, on the spanning words.
inline SymbolAlgebra tanaka_symbol_at(const PolyFrame& f, const std::vector<Rational>& q, std::uint64_t seed = 0,
                                      FlagReport* flag_out = nullptr) {
  FlagReport rep = weak_derived_flag(f, q);
  if (!equiregular_at(f, q, rep, seed))
    throw Error("growth vector changes near the point (not equiregular); resample the point");
  if (rep.dims.back() != f.dim()) throw Error("distribution is not bracket generating at the point");
  RowSpace coords(true);
  for (const auto& v : rep.values) coords.add(SparseVector::from_dense(v));
  AlgebraBuilder b;
  for (std::size_t i = 0; i < rep.words.size(); ++i) b.add(word_label(rep.words[i]), -rep.levels[i]);
  for (std::size_t i = 0; i < rep.words.size(); ++i)
    for (std::size_t j = i + 1; j < rep.words.size(); ++j) {
      const int L = rep.levels[i] + rep.levels[j];
      auto v = lie_bracket(rep.fields[i], rep.fields[j]).evaluate(q);
      auto c = coords.coordinates(SparseVector::from_dense(v));
      if (!c) throw Error("internal: spanning words do not span the tangent space");
      for (const auto& [w, x] : *c) {
        if (rep.levels[w] > L)
          throw Error("bracket of " + word_label(rep.words[i]) + " and " + word_label(rep.words[j]) +
                      " leaves the flag filtration at the point");
        if (rep.levels[w] == L) b.add_bracket(i, j, w, x);
      }
    }
  SymbolAlgebra m(b.build());
  if (!validate(m.alg()).ok()) throw Error("internal: symbol fails validation");
  if (!is_fundamental(m)) throw Error("internal: symbol is not fundamental");
  if (flag_out) *flag_out = std::move(rep);
  return m;
}

// ---------------------------------------------------------------------------
// Cartan prolongation in the affine chart a -> X1 + (a + a0) X2.

struct ChartLevel {
  PolyFrame frame;
  std::string fiber_coord;
  Rational shift;
};

struct ChartTower {
  PolyFrame base;
  std::vector<ChartLevel> levels;
  const PolyFrame& top() const { return levels.empty() ? base : levels.back().frame; }
  std::vector<std::string> fiber_coords() const {
    std::vector<std::string> v;
    for (const auto& l : levels) v.push_back(l.fiber_coord);
    return v;
  }
};

inline std::string fresh_coord(const std::vector<std::string>& used, const std::string& want) {
  std::string name = want;
  while (std::find(used.begin(), used.end(), name) != used.end()) name += "_";
  return name;
}

inline PolyFrame cartan_prolong_chart(const PolyFrame& f, const std::string& fiber = "a", const Rational& shift = 0) {
  f.check();
  std::string name = fresh_coord(f.coords, fiber);
  auto coords = f.coords;
  coords.push_back(name);
  PolyVectorField x1 = f.fields[0].extended({name}), x2 = f.fields[1].extended({name});
  Polynomial a = Polynomial::variable(coords.size(), coords.size() - 1) + Polynomial::constant(coords.size(), shift);
  PolyVectorField lifted = x1 + a * x2;
  return PolyFrame(coords, {lifted, PolyVectorField::coordinate(coords, coords.size() - 1)});
}

inline ChartTower iterate_prolong(const PolyFrame& f, int k, const std::vector<Rational>& shifts = {}) {
  if (k < 1) throw Error("prolongation count must be at least 1");
  ChartTower t;
  t.base = f;
  for (int i = 1; i <= k; ++i) {
    Rational s = static_cast<std::size_t>(i - 1) < shifts.size() ? shifts[i - 1] : Rational(0);
    PolyFrame next = cartan_prolong_chart(t.top(), "a" + std::to_string(i), s);
    t.levels.push_back({next, next.coords.back(), s});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Involutivity of vertical flags against the derived flag.

struct InclusionCheck {
  std::size_t v_dim = 0;  // number of trailing fiber coordinates spanning V
  int j_level = 0;        // derived-flag level of J
  bool vv = true;
  bool vj = true;
  std::string witness;
};

struct InvolutivityReport {
  std::vector<Rational> point;
  std::vector<InclusionCheck> paired;   // V = last n-3-i fiber fields, J level n-3+i
  std::vector<InclusionCheck> indexed;  // V = last i fiber fields, J level n-3+i
  static bool all(const std::vector<InclusionCheck>& v) {
    for (const auto& c : v)
      if (!c.vv || !c.vj) return false;
    return true;
  }
  bool ok() const { return !paired.empty() && all(paired); }
  bool indexed_ok() const { return all(indexed); }
};

namespace detail {

inline InclusionCheck check_inclusion(const ChartTower& t, const FlagReport& flag, std::size_t v_dim, int level,
                                      const std::vector<Rational>& q) {
  InclusionCheck c;
  c.v_dim = v_dim;
  c.j_level = level;
  const auto& top = t.top();
  const auto fibers = t.fiber_coords();
  std::vector<PolyVectorField> V;
  for (std::size_t r = 0; r < v_dim; ++r)
    V.push_back(PolyVectorField::coordinate(top.coords, top.index_of(fibers[fibers.size() - 1 - r])));
  RowSpace vspan, jspan;
  for (const auto& v : V) vspan.add(SparseVector::from_dense(v.evaluate(q)));
  std::vector<std::size_t> jw;
  for (std::size_t w = 0; w < flag.words.size(); ++w)
    if (flag.levels[w] <= level) {
      jw.push_back(w);
      jspan.add(SparseVector::from_dense(flag.values[w]));
    }
  for (std::size_t a = 0; a < V.size() && c.vv; ++a)
    for (std::size_t b = a + 1; b < V.size(); ++b)
      if (!vspan.contains(SparseVector::from_dense(lie_bracket(V[a], V[b]).evaluate(q)))) {
        c.vv = false;
        c.witness = "[V,V] leaves V";
        break;
      }
  for (std::size_t a = 0; a < V.size() && c.vj; ++a)
    for (std::size_t w : jw)
      if (!jspan.contains(SparseVector::from_dense(lie_bracket(V[a], flag.fields[w]).evaluate(q)))) {
        c.vj = false;
        c.witness = "[d/d" + fibers[fibers.size() - 1 - a] + ", " + word_label(flag.words[w]) + "] leaves level " +
                    std::to_string(level);
        break;
      }
  return c;
}

}  // namespace detail

/// Checks [V,V] ⊆ V and [V,J] ⊆ J at q for vertical flags V of the tower
/// (spanned by trailing fiber coordinate fields) and derived-flag pieces J
/// of the top frame. The pass criterion pairs the (n-3-i)-dimensional
/// vertical flag with J at level n-3+i; the i-dimensional pairing is
/// reported alongside.
inline InvolutivityReport check_involutivity_flags(const ChartTower& t, const std::vector<Rational>& q,
                                                   std::uint64_t seed = 0) {
  const int n = static_cast<int>(t.base.dim());
  const int k = static_cast<int>(t.levels.size());
  if (k < 1) throw Error("tower has no prolongation levels");
  FlagReport flag = weak_derived_flag(t.top(), q);
  if (!equiregular_at(t.top(), q, flag, seed))
    throw Error("growth vector changes near the point (not equiregular); resample the point");
  InvolutivityReport rep;
  rep.point = q;
  for (int i = 1; i <= k; ++i) {
    rep.indexed.push_back(detail::check_inclusion(t, flag, i, n - 3 + i, q));
    int vd = n - 3 - i;
    if (vd >= 1 && vd <= k) rep.paired.push_back(detail::check_inclusion(t, flag, vd, n - 3 + i, q));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Recognition of s^{k,n}.

enum class Recognition { yes, no, indeterminate };

inline const char* to_string(Recognition r) {
  switch (r) {
    case Recognition::yes: return "true";
    case Recognition::no: return "false";
    default: return "indeterminate";
  }
}

struct RecognizeResult {
  Recognition status = Recognition::no;
  LinearMap map;  // images of the build_skn(k,n) basis in m
  std::string failure;
};

/// Decides m ≅ s^{k,n}. The eps-line of m_{-1} is the common kernel of
/// ad(.)|m_{-j}, j ∉ {1, 2k+2}; X̄ is any other element of m_{-1}
/// centralizing m_{2-n-k}. Every such choice is carried to X by an
/// automorphism, so a failed chain refutes the isomorphism.
inline RecognizeResult recognize_skn(const SymbolAlgebra& m, int k, int n) {
  SymbolAlgebra target = build_skn(k, n);
  const auto& g = m.alg();
  const auto& t = target.alg();
  RecognizeResult res;
  auto fail = [&](std::string why) {
    res.status = Recognition::no;
    res.failure = std::move(why);
    res.map.clear();
    return res;
  };
  if (g.weight_dims() != t.weight_dims()) return fail("weight dimensions differ");
  auto m1 = g.graded_component(-1);
  if (m1.size() != 2) return fail("m_{-1} is not 2-dimensional");
  // eps-line: y = c0 m1[0] + c1 m1[1] with [y, m_{-j}] = 0 for j ∉ {1, 2k+2}
  std::vector<SparseVector> rows;
  std::map<Index, SparseVector> cons;
  for (int j = 2; j <= m.depth(); ++j) {
    if (j == 2 * k + 2) continue;
    for (Index z : g.graded_component(-j))
      for (Index c = 0; c < 2; ++c)
        for (const auto& [r, x] : g.bracket_basis(m1[c], z)) cons[z * g.dim() + r].add_to(c, x);
  }
  for (auto& [_, r] : cons) rows.push_back(r);
  auto line = kernel_basis(Matrix::from_rows(rows, 2));
  if (line.size() != 1) return fail("eps-line condition has a " + std::to_string(line.size()) + "-dimensional solution space");
  SparseVector eps;
  for (const auto& [c, x] : line[0]) eps.axpy(x, SparseVector::unit(m1[c]));
  // X̄: centralizer of m_{2-n-k} in m_{-1}, off the eps-line
  std::vector<SparseVector> crow;
  std::map<Index, SparseVector> ccons;
  for (Index z : g.graded_component(2 - n - k))
    for (Index c = 0; c < 2; ++c)
      for (const auto& [r, x] : g.bracket_basis(m1[c], z)) ccons[z * g.dim() + r].add_to(c, x);
  for (auto& [_, r] : ccons) crow.push_back(r);
  std::optional<SparseVector> xbar;
  for (const auto& kv : kernel_basis(Matrix::from_rows(crow, 2))) {
    SparseVector cand;
    for (const auto& [c, x] : kv) cand.axpy(x, SparseVector::unit(m1[c]));
    if (rank(std::vector<SparseVector>{cand, eps}) == 2) { xbar = cand; break; }
  }
  if (!xbar) return fail("no element of m_{-1} off the eps-line centralizes m_{" + std::to_string(2 - n - k) + "}");
  // chain eps_{a}, ..., eps_{2n-6} and eta
  const int a = n - 3 - k;
  std::map<int, SparseVector> e{{a, eps}};
  for (int i = a; i < 2 * n - 6; ++i) e[i + 1] = g.bracket(*xbar, e[i]);
  SparseVector eta = g.bracket(e[a], e[n - 2 + k]);
  if ((a % 2) != 0) eta = -eta;
  res.map.assign(t.dim(), SparseVector());
  res.map[t.index_of("X")] = *xbar;
  for (int i = a; i <= 2 * n - 6; ++i) res.map[t.index_of(eps_label(i))] = e[i];
  res.map[t.index_of("eta")] = eta;
  std::string why;
  if (!is_graded_isomorphism(t, g, res.map, &why)) return fail(why);
  res.status = Recognition::yes;
  return res;
}

/// Dimension of the centralizer of m_{-1} inside m_{-2} ⊕ m_{-3}.
inline std::size_t centralizer_invariant(const SymbolAlgebra& m) {
  const auto& g = m.alg();
  std::vector<Index> span;
  for (int w : {-2, -3})
    for (Index z : g.graded_component(w)) span.push_back(z);
  std::map<Index, SparseVector> cons;
  for (Index x : g.graded_component(-1))
    for (Index c = 0; c < span.size(); ++c)
      for (const auto& [r, v] : g.bracket_basis(x, span[c])) cons[x * g.dim() + r].add_to(c, v);
  std::vector<SparseVector> rows;
  for (auto& [_, r] : cons) rows.push_back(r);
  return kernel_basis(Matrix::from_rows(rows, span.size())).size();
}

}  // namespace tanaka
