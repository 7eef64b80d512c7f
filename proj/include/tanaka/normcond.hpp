#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tanaka/catalog.hpp"
#include "tanaka/cohomo.hpp"
#include "tanaka/prolong.hpp"

namespace tanaka {

struct MorimotoData {
  std::vector<SparseVector> k_subalg;  // basis of the subalgebra k ⊆ g^0
  Matrix form;                         // Gram matrix on g
  Matrix tau;                          // column j = tau(k_subalg[j])
};

struct MorimotoCondition {
  bool pass = true;
  std::string witness;
};

struct MorimotoReport {
  MorimotoCondition graded_orthogonal;  // (g_p, g_q) = 0 for p != q
  MorimotoCondition weight_flip;        // tau(g_p ∩ k) ⊆ g_{-p}
  MorimotoCondition adjoint;            // ([A,x],y) = (x,[tau A,y])
  bool ok() const { return graded_orthogonal.pass && weight_flip.pass && adjoint.pass; }
};

namespace detail {

inline Rational form_value(const Matrix& G, const SparseVector& u, const SparseVector& v) {
  return u.dot(G.apply(v));
}

/// Positive definiteness through the pivots of an unpivoted LDL^T
/// elimination (equivalently, all leading principal minors positive).
inline bool positive_definite(const Matrix& G) {
  const std::size_t d = G.rows();
  std::vector<std::vector<Rational>> a(d, std::vector<Rational>(d));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a[i][j] = G.get(i, j);
  for (Index k = 0; k < d; ++k) {
    if (a[k][k].sign() <= 0) return false;
    for (Index i = k + 1; i < d; ++i) {
      if (a[i][k].is_zero()) continue;
      Rational f = a[i][k] / a[k][k];
      for (Index j = k; j < d; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return true;
}

}  // namespace detail

inline MorimotoReport check_morimoto(const GradedLieAlgebra& g, const MorimotoData& d) {
  const std::size_t n = g.dim();
  if (d.form.rows() != n || d.form.cols() != n) throw Error("form must be a dim(g) square matrix");
  if (!(d.form == d.form.transpose())) throw Error("form is not symmetric");
  if (!detail::positive_definite(d.form)) throw Error("form is not positive definite");
  if (d.tau.rows() != n || d.tau.cols() != d.k_subalg.size()) throw Error("tau must have one column per element of k");
  MorimotoReport rep;
  for (Index i = 0; i < n && rep.graded_orthogonal.pass; ++i)
    for (const auto& [j, v] : d.form.row(i))
      if (g.weight(i) != g.weight(j)) {
        rep.graded_orthogonal = {false, "(" + g.label(i) + "," + g.label(j) + ") = " + v.str()};
        break;
      }
  Matrix tauT = d.tau.transpose();
  std::vector<SparseVector> taus;
  for (Index c = 0; c < d.k_subalg.size(); ++c) taus.push_back(tauT.row(c));
  for (Index c = 0; c < d.k_subalg.size() && rep.weight_flip.pass; ++c) {
    auto wa = g.weight_of(d.k_subalg[c]);
    if (!wa) { rep.weight_flip = {false, "k basis element " + g.format(d.k_subalg[c]) + " is not homogeneous"}; break; }
    if (taus[c].is_zero()) continue;
    auto wt = g.weight_of(taus[c]);
    if (!wt || *wt != -*wa)
      rep.weight_flip = {false, "tau(" + g.format(d.k_subalg[c]) + ") = " + g.format(taus[c])};
  }
  for (Index c = 0; c < d.k_subalg.size() && rep.adjoint.pass; ++c) {
    const SparseVector& A = d.k_subalg[c];
    for (Index x = 0; x < n && rep.adjoint.pass; ++x)
      for (Index y = 0; y < n; ++y) {
        SparseVector ex = SparseVector::unit(x), ey = SparseVector::unit(y);
        Rational lhs = detail::form_value(d.form, g.bracket(A, ex), ey);
        Rational rhs = detail::form_value(d.form, ex, g.bracket(taus[c], ey));
        if (lhs != rhs) {
          rep.adjoint = {false, "A=" + g.format(A) + ", x=" + g.label(x) + ", y=" + g.label(y) + ": " + lhs.str() +
                                    " != " + rhs.str()};
          break;
        }
      }
  }
  return rep;
}

inline MorimotoReport check_morimoto(const ProlongationResult& r, const MorimotoData& d) {
  return check_morimoto(r.full, d);
}

/// Orthogonal basis data for gl2 ⋉ heis_{2n-5}: |Y|^2=|X|^2=|eta|^2=1,
/// |H|^2=|E|^2=2, |e_i|^2=(i-1)!/(2n-6-i)!, tau: Y->X, H->H, E->E.
/// Indices are taken from `g` by label.
inline MorimotoData standard_morimoto_data(int n, const GradedLieAlgebra& g) {
  if (n < 6) throw Error("Morimoto data are defined for n >= 6");
  if (g.dim() != static_cast<std::size_t>(2 * n - 1)) throw Error("algebra size does not match n");
  MorimotoData d;
  d.form = Matrix(g.dim(), g.dim());
  auto set = [&](const std::string& l, const Rational& v) {
    Index i = g.index_of(l);
    d.form.set(i, i, v);
  };
  set("Y", 1);
  set("X", 1);
  set("eta", 1);
  set("H", 2);
  set("E", 2);
  for (int i = 1; i <= 2 * n - 6; ++i) set(eps_label(i), factorial(i - 1) / factorial(2 * n - 6 - i));
  d.k_subalg = {g.element("Y"), g.element("H"), g.element("E")};
  d.tau = Matrix(g.dim(), 3);
  d.tau.set(g.index_of("X"), 0, 1);
  d.tau.set(g.index_of("H"), 1, 1);
  d.tau.set(g.index_of("E"), 2, 1);
  return d;
}

inline MorimotoData standard_morimoto_data(int n) {
  return standard_morimoto_data(n, grade(build_gl2_semidirect_heis(n), GradingScheme::symp));
}

/// Pushes Morimoto data forward along a graded isomorphism phi: src -> dst.
inline MorimotoData transport_morimoto(const MorimotoData& d, const GradedLieAlgebra& dst, const LinearMap& phi) {
  const std::size_t D = phi.size();
  Matrix M(D, D);
  for (Index i = 0; i < D; ++i)
    for (const auto& [r, c] : phi[i]) M.set(r, i, c);
  Matrix inv(D, D);
  for (Index j = 0; j < D; ++j) {
    auto col = solve(M, SparseVector::unit(j));
    if (!col) throw Error("transport map is not invertible");
    for (const auto& [r, c] : *col) inv.set(r, j, c);
  }
  auto push = [&](const SparseVector& v) {
    SparseVector out;
    for (const auto& [i, c] : v) out.axpy(c, phi[i]);
    return out;
  };
  MorimotoData out;
  out.form = inv.transpose() * d.form * inv;
  for (const auto& a : d.k_subalg) out.k_subalg.push_back(push(a));
  out.tau = Matrix(dst.dim(), d.k_subalg.size());
  Matrix tauT = d.tau.transpose();
  for (Index c = 0; c < d.k_subalg.size(); ++c)
    for (const auto& [r, x] : push(tauT.row(c))) out.tau.set(r, c, x);
  return out;
}

/// Morimoto data for any algebra isomorphic to the Symp-graded
/// gl2 ⋉ heis_{2n-5} with matching labels on the negative part.
inline std::optional<MorimotoData> standard_morimoto_data_for(const GradedLieAlgebra& dst, int n) {
  if (n < 6 || dst.dim() != static_cast<std::size_t>(2 * n - 1)) return std::nullopt;
  GradedLieAlgebra src = grade(build_gl2_semidirect_heis(n), GradingScheme::symp);
  std::map<Index, SparseVector> neg;
  for (Index i = 0; i < src.dim(); ++i) {
    if (src.weight(i) >= 0) continue;
    auto j = dst.find(src.label(i));
    if (!j) return std::nullopt;
    neg[i] = SparseVector::unit(*j);
  }
  auto phi = extend_isomorphism(src, dst, neg);
  if (!phi) return std::nullopt;
  return transport_morimoto(standard_morimoto_data(n, src), dst, *phi);
}

enum class NormStatus { exists, not_exists, undecided };

inline const char* to_string(NormStatus s) {
  switch (s) {
    case NormStatus::exists: return "exists";
    case NormStatus::not_exists: return "not_exists";
    default: return "undecided";
  }
}

/// Obstruction: a cochain forced into every admissible complement whose
/// orbit under g^0 reaches a nonzero element of im d.
struct Obstruction {
  std::vector<std::pair<std::string, Rational>> block;  // ("weight", w), ("H", λ), ...
  Cochain generator{2};
  std::vector<std::string> chain;  // g^0 basis labels in order of application
  std::vector<Cochain> steps;      // intermediate cochains, last one = result
  Cochain result{2};
  Cochain preimage{1};             // element of C^1_+ with d(preimage) = result
  bool single_word = true;
};

struct NormDecision {
  bool exists = false;
  NormStatus status = NormStatus::undecided;
  std::string method;
  std::size_t dim_c1 = 0, dim_c2 = 0, dim_image = 0;
  std::vector<Cochain> complement;
  std::optional<Obstruction> obstruction;
  std::string note;
};

struct NormOptions {
  std::optional<MorimotoData> hint;
  bool constructive = true;
  int word_depth = 4;
};

namespace detail {

/// C^1_+ → C^2_+ with its block structure and cached g^0 actions.
class PositiveComplex {
 public:
  explicit PositiveComplex(const GradedLieAlgebra& g) : g_(g), c1_(g, 1, true), c2_(g, 2, true), image_(true) {
    for (Index i = 0; i < g.dim(); ++i) {
      if (g.weight(i) < 0) continue;
      g0_.push_back(i);
      if (g.weight(i) == 0)
        if (auto d = ad_diagonal(g, i)) {
          toral_.push_back(i);
          toral_diag_.push_back(std::move(*d));
        }
    }
    for (Index i : g0_)
      if (std::find(toral_.begin(), toral_.end(), i) == toral_.end()) moving_.push_back(i);
    for (Index i = 0; i < c2_.size(); ++i) {
      auto key = block_key(c2_.key(i));
      auto [it, fresh] = block_index_.try_emplace(key, blocks_.size());
      if (fresh) { blocks_.push_back(key); members_.emplace_back(); }
      block_of_.push_back(it->second);
      members_[it->second].push_back(i);
    }
    image_by_block_.assign(blocks_.size(), RowSpace());
    for (Index i = 0; i < c1_.size(); ++i) {
      SparseVector v = c2_.to_vector(coboundary(c1_.basis(i), g));
      images_.push_back(v);
      image_.add(v);
      if (!v.is_zero()) image_by_block_[block_of_[v.leading()]].add(v);
    }
  }

  const GradedLieAlgebra& g() const { return g_; }
  const CochainSpace& c1() const { return c1_; }
  const CochainSpace& c2() const { return c2_; }
  const std::vector<Index>& g0() const { return g0_; }
  const std::vector<Index>& moving() const { return moving_; }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<Rational>& block(std::size_t b) const { return blocks_[b]; }
  const std::vector<Index>& members(std::size_t b) const { return members_[b]; }
  std::size_t block_of(Index c2_index) const { return block_of_[c2_index]; }
  const RowSpace& image_block(std::size_t b) const { return image_by_block_[b]; }
  const RowSpace& image() const { return image_; }

  std::vector<std::pair<std::string, Rational>> describe_block(std::size_t b) const {
    std::vector<std::pair<std::string, Rational>> out{{"weight", blocks_[b][0]}};
    for (std::size_t t = 0; t < toral_.size(); ++t) out.push_back({g_.label(toral_[t]), blocks_[b][t + 1]});
    return out;
  }

  const SparseVector& act(Index a, Index i) const {
    auto key = std::make_pair(a, i);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SparseVector v = c2_.to_vector(g0_action(a, c2_.basis(i), g_));
    return cache_.emplace(key, std::move(v)).first->second;
  }
  SparseVector act(Index a, const SparseVector& v) const {
    SparseVector out;
    for (const auto& [i, c] : v) out.axpy(c, act(a, i));
    return out;
  }

  std::optional<SparseVector> preimage(const SparseVector& v) const { return image_.coordinates(v); }

 private:
  std::vector<Rational> block_key(const CochainKey& k) const {
    std::vector<Rational> key{Rational(Cochain::key_weight(g_, k))};
    for (const auto& d : toral_diag_) key.push_back(key_eigenvalue(d, k));
    return key;
  }

  const GradedLieAlgebra& g_;
  CochainSpace c1_, c2_;
  std::vector<Index> g0_, toral_, moving_;
  std::vector<std::vector<Rational>> toral_diag_;
  std::vector<std::vector<Rational>> blocks_;
  std::map<std::vector<Rational>, std::size_t> block_index_;
  std::vector<std::vector<Index>> members_;
  std::vector<std::size_t> block_of_;
  std::vector<SparseVector> images_;
  RowSpace image_;
  std::vector<RowSpace> image_by_block_;
  mutable std::map<std::pair<Index, Index>, SparseVector> cache_;
};

struct ComplementCheck {
  bool ok = false;
  std::string reason;
};

inline ComplementCheck verify_complement(const PositiveComplex& pc, const std::vector<SparseVector>& n) {
  RowSpace span;
  for (const auto& v : n) span.add(v);
  if (span.dim() != n.size()) return {false, "complement basis is linearly dependent"};
  if (span.dim() + pc.image().dim() != pc.c2().size())
    return {false, "dim N + dim im d = " + std::to_string(span.dim() + pc.image().dim()) + " != dim C^2_+ = " +
                       std::to_string(pc.c2().size())};
  RowSpace all = span;
  for (const auto& v : pc.image().basis()) all.add(v);
  if (all.dim() != pc.c2().size()) return {false, "N meets im d"};
  for (Index a : pc.g0())
    for (const auto& v : n)
      if (!span.contains(pc.act(a, v)))
        return {false, "N is not invariant under " + pc.g().label(a)};
  return {true, ""};
}

/// Breadth-first search for a single action word carrying a forced basis
/// cochain into im d.
inline std::optional<Obstruction> search_word(const PositiveComplex& pc, const std::vector<Index>& forced, int depth) {
  struct Node {
    Index start;
    std::vector<Index> word;
    SparseVector v;
  };
  std::vector<Node> frontier;
  for (Index i : forced) frontier.push_back({i, {}, SparseVector::unit(i)});
  for (int d = 1; d <= depth && !frontier.empty(); ++d) {
    std::vector<Node> next;
    std::set<SparseVector> seen;
    for (const auto& node : frontier)
      for (Index a : pc.moving()) {
        SparseVector r = pc.act(a, node.v);
        if (r.is_zero()) continue;
        Node child{node.start, node.word, r};
        child.word.push_back(a);
        std::size_t b = pc.block_of(r.leading());
        if (pc.image_block(b).contains(r)) {
          Obstruction ob;
          ob.block = pc.describe_block(pc.block_of(child.start));
          ob.generator = pc.c2().basis(child.start);
          SparseVector cur = SparseVector::unit(child.start);
          for (Index w : child.word) {
            cur = pc.act(w, cur);
            ob.chain.push_back(pc.g().label(w));
            ob.steps.push_back(pc.c2().from_vector(cur));
          }
          ob.result = pc.c2().from_vector(r);
          auto coords = pc.preimage(r);
          if (!coords) throw Error("internal: image element without preimage");
          ob.preimage = pc.c1().from_vector(*coords);
          return ob;
        }
        if (seen.insert(r).second) next.push_back(std::move(child));
      }
    frontier = std::move(next);
  }
  return std::nullopt;
}

/// Blocks with zero image component are forced into any complement; if the
/// g^0-module they generate meets im d, no invariant complement exists.
inline std::optional<Obstruction> forced_obstruction(const PositiveComplex& pc, int depth, std::string* note) {
  std::vector<Index> forced;
  std::vector<RowSpace> closure(pc.block_count());
  std::deque<SparseVector> queue;
  for (std::size_t b = 0; b < pc.block_count(); ++b)
    if (pc.image_block(b).dim() == 0)
      for (Index i : pc.members(b)) {
        forced.push_back(i);
        closure[b].add(SparseVector::unit(i));
        queue.push_back(SparseVector::unit(i));
      }
  while (!queue.empty()) {
    SparseVector v = std::move(queue.front());
    queue.pop_front();
    for (Index a : pc.moving()) {
      SparseVector r = pc.act(a, v);
      if (r.is_zero()) continue;
      std::size_t b = pc.block_of(r.leading());
      if (closure[b].add(r)) queue.push_back(r);
    }
  }
  std::optional<std::size_t> hit;
  for (std::size_t b = 0; b < pc.block_count() && !hit; ++b) {
    const auto& ib = pc.image_block(b);
    if (ib.dim() == 0 || closure[b].dim() == 0) continue;
    if (intersection_dim(closure[b].basis(), ib.basis()) > 0) hit = b;
  }
  if (!hit) return std::nullopt;
  std::sort(forced.begin(), forced.end());
  if (auto ob = search_word(pc, forced, depth)) return ob;
  // Fall back to an element of the intersection itself.
  const auto cb = closure[*hit].basis(), ib = pc.image_block(*hit).basis();
  Matrix sys(pc.c2().size(), cb.size() + ib.size());
  for (Index j = 0; j < cb.size(); ++j)
    for (const auto& [i, c] : cb[j]) sys.set(i, j, c);
  for (Index j = 0; j < ib.size(); ++j)
    for (const auto& [i, c] : ib[j]) sys.set(i, cb.size() + j, c);
  auto ker = kernel_basis(sys);
  SparseVector v;
  for (const auto& [j, c] : ker.front())
    if (j < cb.size()) v.axpy(c, cb[j]);
  Obstruction ob;
  ob.single_word = false;
  ob.block = pc.describe_block(*hit);
  ob.generator = pc.c2().from_vector(v);
  ob.result = ob.generator;
  auto coords = pc.preimage(v);
  ob.preimage = pc.c1().from_vector(*coords);
  if (note) *note = "no single action word up to length " + std::to_string(depth) + "; certificate is an element of the forced module inside im d";
  return ob;
}

/// Per-weight orthogonal complement of im d for the form induced by `G`.
inline std::vector<SparseVector> orthogonal_candidate(const PositiveComplex& pc, const Matrix& G) {
  const auto& g = pc.g();
  std::vector<Index> neg;
  for (Index i = 0; i < g.dim(); ++i)
    if (g.weight(i) < 0) neg.push_back(i);
  // dual form on m*
  Matrix Gm(neg.size(), neg.size());
  for (Index a = 0; a < neg.size(); ++a)
    for (Index b = 0; b < neg.size(); ++b) Gm.set(a, b, G.get(neg[a], neg[b]));
  std::map<std::pair<Index, Index>, Rational> dual;
  for (Index b = 0; b < neg.size(); ++b) {
    auto col = solve(Gm, SparseVector::unit(b));
    if (!col) throw Error("form is degenerate on the negative part");
    for (const auto& [a, c] : *col) dual[{neg[a], neg[b]}] = c;
  }
  auto dget = [&](Index a, Index b) {
    auto it = dual.find({a, b});
    return it == dual.end() ? Rational() : it->second;
  };
  const auto& c2 = pc.c2();
  auto inner = [&](Index i, Index j) {
    const auto& ki = c2.key(i);
    const auto& kj = c2.key(j);
    Rational t = G.get(ki.target, kj.target);
    if (t.is_zero()) return t;
    Rational det = dget(ki.args[0], kj.args[0]) * dget(ki.args[1], kj.args[1]) -
                   dget(ki.args[0], kj.args[1]) * dget(ki.args[1], kj.args[0]);
    return det * t;
  };
  std::map<int, std::vector<Index>> by_weight;
  for (Index i = 0; i < c2.size(); ++i) by_weight[c2.weight(i)].push_back(i);
  std::vector<SparseVector> out;
  const auto img = pc.image().basis();
  for (const auto& [w, idx] : by_weight) {
    std::vector<SparseVector> rows;
    for (const auto& u : img) {
      if (c2.weight(u.leading()) != w) continue;
      SparseVector r;
      for (Index a = 0; a < idx.size(); ++a) {
        Rational s;
        for (const auto& [j, c] : u) s += c * inner(idx[a], j);
        r.add_to(a, s);
      }
      rows.push_back(r);
    }
    for (const auto& k : kernel_basis(Matrix::from_rows(rows, idx.size()))) out.push_back(k.remap([&](Index a) { return idx[a]; }));
  }
  return out;
}

/// Kernel of the Kostant codifferential, available when the Killing form of
/// g is nondegenerate. Cochains are transported to Λ²g_+ ⊗ g through the
/// Killing pairing of g_+ with m and the Lie algebra homology differential
/// of g_+ with coefficients in g is applied.
inline std::optional<std::vector<SparseVector>> kostant_candidate(const PositiveComplex& pc) {
  const auto& g = pc.g();
  const std::size_t D = g.dim();
  std::vector<Matrix> ad;
  for (Index i = 0; i < D; ++i) ad.push_back(adjoint_matrix(g, SparseVector::unit(i)));
  Matrix B(D, D);
  for (Index i = 0; i < D; ++i)
    for (Index j = i; j < D; ++j) {
      Matrix p = ad[i] * ad[j];
      Rational tr;
      for (Index r = 0; r < D; ++r) tr += p.get(r, r);
      B.set(i, j, tr);
      B.set(j, i, tr);
    }
  if (rank(B) != D) return std::nullopt;
  std::vector<Index> neg, pos;
  for (Index i = 0; i < D; ++i) (g.weight(i) < 0 ? neg : pos).push_back(i);
  std::vector<Index> plus;
  for (Index i : pos)
    if (g.weight(i) > 0) plus.push_back(i);
  if (plus.size() != neg.size()) return std::nullopt;
  // zeta[a]: element of g_+ with B(zeta[a], e_y) = δ_{a y} on m
  Matrix pair(neg.size(), plus.size());
  for (Index r = 0; r < neg.size(); ++r)
    for (Index c = 0; c < plus.size(); ++c) pair.set(r, c, B.get(neg[r], plus[c]));
  std::map<Index, SparseVector> zeta;
  for (Index a = 0; a < neg.size(); ++a) {
    auto sol = solve(pair, SparseVector::unit(a));
    if (!sol) return std::nullopt;
    zeta[neg[a]] = sol->remap([&](Index c) { return plus[c]; });
  }
  // homology differential on z1∧z2⊗v, output in g ⊗ g coordinates (z index * D + v index)
  auto boundary = [&](Index z1, Index z2, Index v) {
    SparseVector out;
    for (const auto& [w, c] : g.bracket_basis(z1, z2)) out.add_to(w * D + v, -c);
    for (const auto& [w, c] : g.bracket_basis(z1, v)) out.add_to(z2 * D + w, -c);
    for (const auto& [w, c] : g.bracket_basis(z2, v)) out.add_to(z1 * D + w, c);
    return out;
  };
  const auto& c2 = pc.c2();
  std::map<Index, SparseVector> cols;
  std::vector<SparseVector> images(c2.size());
  for (Index i = 0; i < c2.size(); ++i) {
    const auto& key = c2.key(i);
    SparseVector img;
    for (const auto& [p, x] : zeta.at(key.args[0]))
      for (const auto& [q, y] : zeta.at(key.args[1]))
        if (p != q) img.axpy(x * y, boundary(p, q, key.target));
    images[i] = img;
  }
  std::map<Index, SparseVector> rows;
  for (Index i = 0; i < c2.size(); ++i)
    for (const auto& [r, c] : images[i]) rows[r].add_to(i, c);
  std::vector<SparseVector> rv;
  for (auto& [_, r] : rows) rv.push_back(std::move(r));
  return kernel_basis(Matrix::from_rows(rv, c2.size()));
}

/// Top-down weight-by-weight construction of an invariant complement.
/// Each weight picks an equivariant complement of (admissible ∩ im d) inside
/// the admissible subspace; success yields a valid complement, failure is
/// inconclusive.
inline std::optional<std::vector<SparseVector>> greedy_complement(const PositiveComplex& pc, std::string* why) {
  const auto& g = pc.g();
  const auto& c2 = pc.c2();
  std::map<int, std::vector<std::size_t>> blocks_by_weight;
  for (std::size_t b = 0; b < pc.block_count(); ++b) blocks_by_weight[c2.weight(pc.members(b).front())].push_back(b);
  std::vector<RowSpace> chosen(pc.block_count());
  std::vector<SparseVector> result;
  std::vector<Index> positive, zero;
  for (Index a : pc.g0()) (g.weight(a) > 0 ? positive : zero).push_back(a);
  std::vector<Index> zero_moving;
  for (Index a : zero)
    if (std::find(pc.moving().begin(), pc.moving().end(), a) != pc.moving().end()) zero_moving.push_back(a);

  for (auto it = blocks_by_weight.rbegin(); it != blocks_by_weight.rend(); ++it) {
    const auto& blist = it->second;
    // admissible subspace T_b and J_b = T_b ∩ I_b per block
    std::map<std::size_t, std::vector<SparseVector>> T, J;
    for (std::size_t b : blist) {
      const auto& mem = pc.members(b);
      std::vector<SparseVector> rows;
      std::map<Index, SparseVector> cons;  // (target coordinate) -> row over members
      std::size_t offset = 0;
      for (Index a : positive) {
        for (Index m = 0; m < mem.size(); ++m) {
          SparseVector r = pc.act(a, mem[m]);
          if (r.is_zero()) continue;
          r = chosen[pc.block_of(r.leading())].reduce(r);
          for (const auto& [i, c] : r) cons[offset + i].add_to(m, c);
        }
        offset += c2.size();
      }
      for (auto& [_, r] : cons) rows.push_back(std::move(r));
      auto ker = kernel_basis(Matrix::from_rows(rows, mem.size()));
      std::vector<SparseVector> tb;
      for (const auto& k : ker) tb.push_back(k.remap([&](Index m) { return mem[m]; }));
      const auto ib = pc.image_block(b).basis();
      RowSpace sum;
      for (const auto& v : tb) sum.add(v);
      for (const auto& v : ib) sum.add(v);
      if (sum.dim() != mem.size()) {
        if (why) *why = "admissible subspace and im d do not span a block at weight " + std::to_string(it->first);
        return std::nullopt;
      }
      // J = {u in I_b : constraints(u) = 0}
      std::vector<SparseVector> jrows;
      std::map<Index, SparseVector> jcons;
      offset = 0;
      for (Index a : positive) {
        for (Index q = 0; q < ib.size(); ++q) {
          SparseVector r = pc.act(a, ib[q]);
          if (r.is_zero()) continue;
          r = chosen[pc.block_of(r.leading())].reduce(r);
          for (const auto& [i, c] : r) jcons[offset + i].add_to(q, c);
        }
        offset += c2.size();
      }
      for (auto& [_, r] : jcons) jrows.push_back(std::move(r));
      std::vector<SparseVector> jb;
      for (const auto& k : kernel_basis(Matrix::from_rows(jrows, ib.size()))) {
        SparseVector u;
        for (const auto& [q, c] : k) u.axpy(c, ib[q]);
        jb.push_back(u);
      }
      T[b] = tb;
      J[b] = jb;
    }
    // Unknown R_b : T_b -> J_b for each block, coupled by weight-zero moving
    // elements and pinned to the identity on J_b.
    std::map<std::size_t, std::size_t> base;
    std::size_t unknowns = 0;
    std::map<std::size_t, RowSpace> tspace, jspace;
    for (std::size_t b : blist) {
      base[b] = unknowns;
      unknowns += T[b].size() * J[b].size();
      RowSpace ts(true), js(true);
      for (const auto& v : T[b]) ts.add(v);
      for (const auto& v : J[b]) js.add(v);
      tspace.emplace(b, std::move(ts));
      jspace.emplace(b, std::move(js));
    }
    auto var = [&](std::size_t b, Index r, Index s) { return base[b] + r * T[b].size() + s; };
    std::vector<SparseVector> eqs;
    std::vector<Rational> rhs;
    for (std::size_t b : blist) {
      for (Index c = 0; c < J[b].size(); ++c) {
        auto tc = tspace.at(b).coordinates(J[b][c]);
        if (!tc) throw Error("internal: J not inside T");
        for (Index r = 0; r < J[b].size(); ++r) {
          SparseVector e;
          for (const auto& [s, x] : *tc) e.add_to(var(b, r, s), x);
          eqs.push_back(e);
          rhs.push_back(r == c ? 1 : 0);
        }
      }
      for (Index a : zero_moving) {
        // target block of a acting on block b
        std::optional<std::size_t> tb;
        std::vector<SparseVector> at;  // coordinates of a·t_s in T_{tb}
        for (Index s = 0; s < T[b].size(); ++s) {
          SparseVector img = pc.act(a, T[b][s]);
          if (!img.is_zero()) tb = pc.block_of(img.leading());
        }
        for (Index s = 0; s < J[b].size() && !tb; ++s) {
          SparseVector img = pc.act(a, J[b][s]);
          if (!img.is_zero()) tb = pc.block_of(img.leading());
        }
        if (!tb) continue;
        std::size_t b2 = *tb;
        std::vector<SparseVector> bt, bj;
        for (Index s = 0; s < T[b].size(); ++s) {
          auto c = tspace.at(b2).coordinates(pc.act(a, T[b][s]));
          if (!c) throw Error("internal: admissible subspace not invariant");
          bt.push_back(*c);
        }
        for (Index q = 0; q < J[b].size(); ++q) {
          auto c = jspace.at(b2).coordinates(pc.act(a, J[b][q]));
          if (!c) throw Error("internal: J not invariant");
          bj.push_back(*c);
        }
        // (R_{b2} · B_T)[r2][s] = (B_J · R_b)[r2][s]
        for (Index r2 = 0; r2 < J[b2].size(); ++r2)
          for (Index s = 0; s < T[b].size(); ++s) {
            SparseVector e;
            for (const auto& [s2, x] : bt[s]) e.add_to(var(b2, r2, s2), x);
            for (Index r = 0; r < J[b].size(); ++r) {
              Rational coef = bj[r].get(r2);
              if (!coef.is_zero()) e.add_to(var(b, r, s), -coef);
            }
            if (!e.is_zero()) {
              eqs.push_back(e);
              rhs.push_back(0);
            }
          }
      }
    }
    std::optional<SparseVector> sol = SparseVector();
    if (unknowns > 0) {
      Matrix sys = Matrix::from_rows(eqs, unknowns);
      sol = solve(sys, SparseVector::from_dense(rhs));
    }
    if (!sol) {
      if (why) *why = "no equivariant complement at weight " + std::to_string(it->first);
      return std::nullopt;
    }
    for (std::size_t b : blist) {
      // N_b = ker R_b inside T_b
      std::vector<SparseVector> rows(J[b].size());
      for (Index r = 0; r < J[b].size(); ++r)
        for (Index s = 0; s < T[b].size(); ++s) rows[r].add_to(s, sol->get(var(b, r, s)));
      auto ker = kernel_basis(Matrix::from_rows(rows, T[b].size()));
      for (const auto& k : ker) {
        SparseVector v;
        for (const auto& [s, x] : k) v.axpy(x, T[b][s]);
        chosen[b].add(v);
        result.push_back(v);
      }
    }
  }
  return result;
}

/// Exact decision when im d is g^0-invariant: an equivariant projection onto
/// im d exists iff an invariant complement does.
inline std::optional<std::vector<SparseVector>> projection_complement(const PositiveComplex& pc) {
  std::map<std::size_t, std::vector<SparseVector>> ib;
  std::map<std::size_t, RowSpace> ispace;
  std::map<std::size_t, std::size_t> base;
  std::size_t unknowns = 0;
  for (std::size_t b = 0; b < pc.block_count(); ++b) {
    ib[b] = pc.image_block(b).basis();
    RowSpace rs(true);
    for (const auto& v : ib[b]) rs.add(v);
    ispace.emplace(b, std::move(rs));
    base[b] = unknowns;
    unknowns += pc.members(b).size() * ib[b].size();
  }
  // π(e_i) = Σ_j P[i][j] r_j; variable index base + local(i) * |I_b| + j
  std::vector<Index> local(pc.c2().size());
  for (std::size_t b = 0; b < pc.block_count(); ++b)
    for (Index m = 0; m < pc.members(b).size(); ++m) local[pc.members(b)[m]] = m;
  auto var = [&](Index i, Index j) {
    std::size_t b = pc.block_of(i);
    return base[b] + local[i] * ib[b].size() + j;
  };
  std::vector<SparseVector> eqs;
  std::vector<Rational> rhs;
  for (std::size_t b = 0; b < pc.block_count(); ++b) {
    for (Index c = 0; c < ib[b].size(); ++c)
      for (Index j = 0; j < ib[b].size(); ++j) {
        SparseVector e;
        for (const auto& [i, x] : ib[b][c]) e.add_to(var(i, j), x);
        eqs.push_back(e);
        rhs.push_back(j == c ? 1 : 0);
      }
  }
  for (Index a : pc.moving()) {
    for (Index i = 0; i < pc.c2().size(); ++i) {
      SparseVector ai = pc.act(a, i);
      std::size_t b = pc.block_of(i);
      if (ai.is_zero() && ib[b].empty()) continue;
      std::optional<std::size_t> b2;
      if (!ai.is_zero()) b2 = pc.block_of(ai.leading());
      else
        for (const auto& r : ib[b]) {
          SparseVector x = pc.act(a, r);
          if (!x.is_zero()) { b2 = pc.block_of(x.leading()); break; }
        }
      if (!b2) continue;
      // π(a·e_i) - a·π(e_i) = 0 in coordinates of I_{b2}
      std::vector<SparseVector> arj;
      for (const auto& r : ib[b]) {
        auto c = ispace.at(*b2).coordinates(pc.act(a, r));
        if (!c) throw Error("internal: im d assumed invariant");
        arj.push_back(*c);
      }
      for (Index j2 = 0; j2 < ib[*b2].size(); ++j2) {
        SparseVector e;
        for (const auto& [l, x] : ai) e.add_to(var(l, j2), x);
        for (Index j = 0; j < ib[b].size(); ++j) {
          Rational coef = arj[j].get(j2);
          if (!coef.is_zero()) e.add_to(var(i, j), -coef);
        }
        if (!e.is_zero()) { eqs.push_back(e); rhs.push_back(0); }
      }
    }
  }
  auto sol = unknowns ? solve(Matrix::from_rows(eqs, unknowns), SparseVector::from_dense(rhs)) : std::optional<SparseVector>(SparseVector());
  if (!sol) return std::nullopt;
  std::vector<SparseVector> out;
  for (std::size_t b = 0; b < pc.block_count(); ++b) {
    const auto& mem = pc.members(b);
    std::vector<SparseVector> rows(ib[b].size());
    for (Index m = 0; m < mem.size(); ++m)
      for (Index j = 0; j < ib[b].size(); ++j) rows[j].add_to(m, sol->get(var(mem[m], j)));
    for (const auto& k : kernel_basis(Matrix::from_rows(rows, mem.size()))) out.push_back(k.remap([&](Index m) { return mem[m]; }));
  }
  return out;
}

inline bool image_invariant(const PositiveComplex& pc) {
  for (Index a : pc.moving())
    for (const auto& v : pc.image().basis())
      if (!pc.image().contains(pc.act(a, v))) return false;
  return true;
}

}  // namespace detail

/// Decides whether C^2_+ has a g^0-invariant complement to d(C^1_+).
inline NormDecision normalization_exists(const GradedLieAlgebra& g, const NormOptions& opt = {}) {
  detail::PositiveComplex pc(g);
  NormDecision dec;
  dec.dim_c1 = pc.c1().size();
  dec.dim_c2 = pc.c2().size();
  dec.dim_image = pc.image().dim();
  auto accept = [&](const std::vector<SparseVector>& n, const std::string& method) {
    auto chk = detail::verify_complement(pc, n);
    if (!chk.ok) return chk.reason;
    dec.exists = true;
    dec.status = NormStatus::exists;
    dec.method = method;
    for (const auto& v : n) dec.complement.push_back(pc.c2().from_vector(v));
    return std::string();
  };
  auto reject = [&](const std::string& method) {
    dec.exists = false;
    dec.status = NormStatus::not_exists;
    dec.method = method;
  };

  if (detail::image_invariant(pc)) {
    auto n = detail::projection_complement(pc);
    if (n) {
      std::string err = accept(*n, "equivariant-projection");
      if (!err.empty()) throw Error("internal: projection complement failed verification: " + err);
      return dec;
    }
    reject("equivariant-projection");
    dec.obstruction = detail::forced_obstruction(pc, opt.word_depth, &dec.note);
    return dec;
  }

  if (auto ob = detail::forced_obstruction(pc, opt.word_depth, &dec.note)) {
    reject("forced-module");
    dec.obstruction = std::move(ob);
    return dec;
  }

  std::vector<std::string> notes;
  if (opt.hint) {
    auto rep = check_morimoto(g, *opt.hint);
    if (rep.ok()) {
      std::string err = accept(detail::orthogonal_candidate(pc, opt.hint->form), "morimoto-orthogonal");
      if (err.empty()) return dec;
      notes.push_back("orthogonal complement: " + err);
    } else {
      notes.push_back("supplied form data fail the Morimoto conditions");
    }
  }
  if (opt.constructive) {
    if (auto n = detail::kostant_candidate(pc)) {
      std::string err = accept(*n, "kostant-codifferential");
      if (err.empty()) return dec;
      notes.push_back("codifferential kernel: " + err);
    }
    std::string why;
    if (auto n = detail::greedy_complement(pc, &why)) {
      std::string err = accept(*n, "weight-descent");
      if (err.empty()) return dec;
      notes.push_back("weight-descent: " + err);
    } else {
      notes.push_back("weight-descent: " + why);
    }
  }
  dec.status = NormStatus::undecided;
  dec.method = "none";
  for (const auto& s : notes) dec.note += (dec.note.empty() ? "" : "; ") + s;
  return dec;
}

inline NormDecision normalization_exists(const ProlongationResult& r, const NormOptions& opt = {}) {
  return normalization_exists(r.full, opt);
}

/// Explicit obstruction for s^{k,n}, k <= n-5, following the Leibniz-rule
/// chain ad(e_1) ad(e_{n-4-k})^2.
struct NonexistenceCertificate {
  int k = 0, n = 0;
  // (a) top H-eigenvalue of C^1 and its eigenspace
  Rational lambda;
  Cochain eigen_cochain{1};
  int eigen_cochain_weight = 0;
  std::size_t eigenspace_dim = 0;           // in the full C^1
  std::size_t eigenspace_dim_positive = 0;  // in C^1_+
  // (b)
  bool eigen_cochain_closed = false;
  // (c) starting cochain and the block it sits in
  Cochain classical_start{2};  // e*_{n-3-k} ^ eta* (x) e_{2n-6}
  int classical_start_weight = 0;
  Cochain start{2};        // e*_{n-3-k} ^ eta* (x) e_{n-1+k}
  int start_weight = 0;
  Rational start_h;
  std::size_t start_block_c1_dim = 0;
  std::size_t start_block_image_dim = 0;
  // (d)
  std::vector<Cochain> chain;  // after each application
  Cochain result{2};
  Cochain preimage{1};         // element of C^1_+ with d(preimage) = result
  Cochain literal_reference{1};   // X* (x) e_{n-4+k}
  bool literal_identity = false;  // result == -2 d(literal_reference)
};

inline NonexistenceCertificate nonexistence_witness(int k, int n) {
  if (n <= 5 || k < 0 || k > n - 5) throw Error("nonexistence witness needs n > 5 and 0 <= k <= n-5");
  GradedLieAlgebra g = grade(build_gl2_semidirect_heis(n), GradingScheme::skn, k);
  NonexistenceCertificate c;
  c.k = k;
  c.n = n;
  auto e = [&](int i) { return g.index_of(eps_label(i)); };
  const Index H = g.index_of("H"), X = g.index_of("X"), eta = g.index_of("eta");
  const auto diagH = *ad_diagonal(g, H);

  // (a)
  Rational top;
  bool first = true;
  CochainSpace c1(g, 1, false);
  for (Index i = 0; i < c1.size(); ++i) {
    Rational l = key_eigenvalue(diagH, c1.key(i));
    if (first || l > top) top = l;
    first = false;
  }
  c.lambda = top;
  std::vector<Index> top_keys;
  for (Index i = 0; i < c1.size(); ++i)
    if (key_eigenvalue(diagH, c1.key(i)) == top) top_keys.push_back(i);
  c.eigenspace_dim = top_keys.size();
  for (Index i : top_keys)
    if (c1.weight(i) >= 1) ++c.eigenspace_dim_positive;
  c.eigen_cochain = Cochain::basis({e(n - 3 - k)}, e(2 * n - 6));
  c.eigen_cochain_weight = *c.eigen_cochain.weight(g);
  if (top != Rational(2 * (n + k - 3)) || top_keys.size() != 1 || !(c1.basis(top_keys[0]) == c.eigen_cochain))
    throw Error("step (a): top eigenspace of C^1 is not spanned by e*_{n-3-k} (x) e_{2n-6}");

  // (b)
  c.eigen_cochain_closed = coboundary(c.eigen_cochain, g).is_zero();
  if (!c.eigen_cochain_closed) throw Error("step (b): e*_{n-3-k} (x) e_{2n-6} is not closed");

  // (c)
  c.classical_start.add({e(n - 3 - k), eta}, e(2 * n - 6), 1);
  c.classical_start_weight = *c.classical_start.weight(g);
  c.start.add({e(n - 3 - k), eta}, e(n - 1 + k), 1);
  c.start_weight = *c.start.weight(g);
  c.start_h = key_eigenvalue(diagH, c.start.terms().begin()->first);
  if (c.start_weight < 1) throw Error("step (c): starting cochain is not in C^2_+");
  {
    // C^1_+ cochains in the same (weight, H, E) block as the start
    const auto diagE = *ad_diagonal(g, g.index_of("E"));
    const auto& sk = c.start.terms().begin()->first;
    Rational sE = key_eigenvalue(diagE, sk);
    CochainSpace c1p(g, 1, true), c2(g, 2, false);
    RowSpace img;
    for (Index i = 0; i < c1p.size(); ++i) {
      const auto& key = c1p.key(i);
      if (c1p.weight(i) == c.start_weight && key_eigenvalue(diagH, key) == c.start_h &&
          key_eigenvalue(diagE, key) == sE) {
        ++c.start_block_c1_dim;
        img.add(c2.to_vector(coboundary(c1p.basis(i), g)));
      }
    }
    c.start_block_image_dim = img.dim();
    if (c.start_block_image_dim != 0) throw Error("step (c): im d has a component in the block of the starting cochain");
  }

  // (d)
  Cochain cur = c.start;
  for (Index a : {e(n - 4 - k), e(n - 4 - k), e(1)}) {
    cur = g0_action(a, cur, g);
    c.chain.push_back(cur);
  }
  c.result = cur;
  if (c.result.is_zero()) throw Error("step (d): chain output vanishes");
  CochainSpace c1p(g, 1, true), c2(g, 2, false);
  RowSpace img(true);
  for (Index i = 0; i < c1p.size(); ++i) img.add(c2.to_vector(coboundary(c1p.basis(i), g)));
  auto coords = img.coordinates(c2.to_vector(c.result));
  if (!coords) throw Error("step (d): chain output is not in im d");
  c.preimage = c1p.from_vector(*coords);
  if (n - 4 + k <= 2 * n - 6) {
    c.literal_reference = Cochain::basis({X}, e(n - 4 + k));
    c.literal_identity = Rational(-2) * coboundary(c.literal_reference, g) == c.result;
  }
  return c;
}

}  // namespace tanaka
