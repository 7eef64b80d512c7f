#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tanaka/frames.hpp"
#include "tanaka/io.hpp"

namespace tanaka {

enum class CheckStatus { pass, fail, indeterminate, skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::indeterminate: return "indeterminate";
    default: return "skipped";
  }
}

struct CheckRecord {
  std::string id;
  std::string anchor;
  CheckStatus status = CheckStatus::fail;
  std::string witness;
  std::optional<long> ms;
};

struct VerifyOptions {
  int n = 6;
  std::uint64_t seed = 0;
  bool timings = false;
};

struct VerifyReport {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> checks;
  bool any(CheckStatus s) const {
    return std::any_of(checks.begin(), checks.end(), [&](const CheckRecord& c) { return c.status == s; });
  }
  /// 1 if a check failed, 2 if none failed but one is indeterminate, else 0.
  int exit_code() const { return any(CheckStatus::fail) ? 1 : any(CheckStatus::indeterminate) ? 2 : 0; }
};

inline constexpr int verify_min_n = 5;
inline constexpr int verify_max_n = 8;

namespace detail {

struct Outcome {
  CheckStatus status;
  std::string witness;
};

inline Outcome pass_if(bool ok, std::string witness) { return {ok ? CheckStatus::pass : CheckStatus::fail, std::move(witness)}; }

inline std::string join_dims(const std::map<int, std::size_t>& dims) {
  std::string s;
  for (const auto& [w, d] : dims) s += (s.empty() ? "" : " ") + std::to_string(w) + ":" + std::to_string(d);
  return s;
}

inline std::string join(const std::vector<std::size_t>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

inline std::map<Index, SparseVector> identity_by_label(const GradedLieAlgebra& src, const GradedLieAlgebra& dst) {
  std::map<Index, SparseVector> m;
  for (Index i = 0; i < src.dim(); ++i)
    if (src.weight(i) < 0) m[i] = SparseVector::unit(dst.index_of(src.label(i)));
  return m;
}

/// Symbol at the first sampled point where it is defined.
struct GenericSymbol {
  std::optional<SymbolAlgebra> symbol;
  std::vector<std::size_t> growth;
  std::string last_error;
};

inline GenericSymbol symbol_at_generic(const PolyFrame& f, PointSampler& ps, std::uint64_t seed) {
  GenericSymbol r;
  for (int t = 0; t < resample_limit; ++t) {
    auto q = ps.point(f.dim());
    try {
      FlagReport rep;
      r.symbol = tanaka_symbol_at(f, q, seed, &rep);
      r.growth = rep.dims;
      return r;
    } catch (const Error& e) {
      r.last_error = e.what();
    }
  }
  return r;
}

inline Outcome check_cochain_complex(int n) {
  std::size_t count = 0;
  for (int k = 0; k <= n - 4; ++k) {
    GradedLieAlgebra g = grade(build_gl2_semidirect_heis(n), GradingScheme::skn, k);
    auto table = eigen_table(n, k);
    Index H = g.index_of("H");
    CochainSpace c1(g, 1, true);
    for (Index i = 0; i < c1.size(); ++i) {
      Cochain b = c1.basis(i);
      Cochain db = coboundary(b, g);
      std::string where = "k=" + std::to_string(k) + " " + b.format(g);
      if (!coboundary(db, g).is_zero()) return {CheckStatus::fail, "d(d(c)) != 0 for " + where};
      if (!db.is_zero() && db.weight(g) != std::optional<int>(c1.weight(i)))
        return {CheckStatus::fail, "d does not preserve the weight of " + where};
      Rational closed = table[c1.key(i).target].lh;
      for (Index a : c1.key(i).args) closed -= table[a].lh;
      if (g0_action(H, b, g) != closed * b) return {CheckStatus::fail, "ad(H) eigenvalue differs from the table at " + where};
      ++count;
    }
  }
  return {CheckStatus::pass, "d(d(c)) = 0, weight preserved, ad(H) eigenvalue matches the table on " +
                                 std::to_string(count) + " basis cochains of C^1_+ over k=0.." + std::to_string(n - 4)};
}

inline Outcome check_eigen_table(int n) {
  std::size_t rows = 0;
  for (int k = 0; k <= n - 4; ++k) rows += eigen_table(n, k).size();
  return {CheckStatus::pass, "ad(H), ad(E) diagonal with the closed-form eigenvalues on " + std::to_string(rows) +
                                 " basis rows over k=0.." + std::to_string(n - 4)};
}

inline Outcome check_prolong_skn(int k, int n) {
  auto r = tanaka_prolong(build_skn(k, n));
  GradedLieAlgebra ref = grade(build_gl2_semidirect_heis(n), GradingScheme::skn, k);
  std::string why;
  auto iso = extend_isomorphism(ref, r.full, identity_by_label(ref, r.full), &why);
  std::string w = "levels " + join_dims(r.level_dims) + "; total " + std::to_string(r.full.dim());
  if (!r.terminated) return {CheckStatus::fail, w + "; not terminated"};
  if (r.full.dim() != static_cast<std::size_t>(2 * n - 1)) return {CheckStatus::fail, w + "; expected 2n-1"};
  if (!iso) return {CheckStatus::fail, w + "; no graded isomorphism: " + why};
  return {CheckStatus::pass, w + "; graded isomorphic to gl2 x| heis_" + std::to_string(2 * n - 5)};
}

inline Outcome check_g2() {
  auto r = tanaka_prolong(symp_symbol(5));
  const std::map<int, std::size_t> expect = {{-5, 1}, {-4, 1}, {-3, 1}, {-2, 1}, {-1, 2}, {0, 2},
                                             {1, 2},  {2, 1},  {3, 1},  {4, 1},  {5, 1}};
  std::string w = "levels " + join_dims(r.level_dims) + "; total " + std::to_string(r.full.dim());
  return pass_if(r.terminated && r.full.dim() == 14 && r.level_dims == expect && validate(r.full).ok(), w);
}

inline Outcome check_morimoto_standard(int n) {
  GradedLieAlgebra g = grade(build_gl2_semidirect_heis(n), GradingScheme::symp);
  auto rep = check_morimoto(g, standard_morimoto_data(n));
  auto part = [](const char* name, const MorimotoCondition& c) {
    return std::string(name) + (c.pass ? " pass" : " FAIL (" + c.witness + ")");
  };
  return pass_if(rep.ok(), part("graded-orthogonal", rep.graded_orthogonal) + "; " + part("weight-flip", rep.weight_flip) +
                               "; " + part("adjoint", rep.adjoint));
}

inline std::string describe(const NormDecision& d) {
  std::string s = std::string(to_string(d.status)) + " via " + d.method + "; dim C^1_+ " + std::to_string(d.dim_c1) +
                  ", dim C^2_+ " + std::to_string(d.dim_c2) + ", dim im d " + std::to_string(d.dim_image);
  if (d.status == NormStatus::exists) s += ", complement dim " + std::to_string(d.complement.size());
  return s;
}

inline Outcome check_normcheck(const GradedLieAlgebra& g, int n, NormStatus expect) {
  NormOptions opt;
  opt.hint = standard_morimoto_data_for(g, n);
  auto d = normalization_exists(g, opt);
  if (d.status == NormStatus::undecided) return {CheckStatus::indeterminate, describe(d) + ": " + d.note};
  return pass_if(d.status == expect, describe(d));
}

inline Outcome check_nonexistence(int k, int n) {
  auto c = nonexistence_witness(k, n);
  GradedLieAlgebra g = grade(build_gl2_semidirect_heis(n), GradingScheme::skn, k);
  const Rational expect_lambda(2 * (n + k - 3));
  std::string e = eps_label(n - 4 - k);
  std::string w = "(a) top ad(H) eigenvalue " + c.lambda.str() + " on " + c.eigen_cochain.format(g) + "; (b) closed " +
                  (c.eigen_cochain_closed ? "yes" : "no") + "; (c) start " + c.start.format(g) + " of weight " +
                  std::to_string(c.start_weight) + " in a block with im d dim " + std::to_string(c.start_block_image_dim) +
                  "; (d) ad(e1) ad(" + e + ")^2 gives d(" + c.preimage.format(g) + ") != 0; -2 d(" +
                  c.literal_reference.format(g) + ") identity " + (c.literal_identity ? "holds" : "does not hold");
  bool ok = c.lambda == expect_lambda && c.eigen_cochain_closed && c.start_weight >= 1 &&
            c.start_block_image_dim == 0 && !c.result.is_zero() && coboundary(c.preimage, g) == c.result;
  return pass_if(ok, w);
}

inline Outcome check_flat(int k, int n) {
  auto m = build_skn(k, n);
  auto f = flat_model_frame(m);
  std::vector<Rational> origin(f.dim());
  FlagReport rep;
  auto s = tanaka_symbol_at(f, origin, 0, &rep);
  std::vector<std::size_t> expect;
  std::size_t acc = 0;
  const auto dims = m.alg().weight_dims();
  for (auto it = dims.rbegin(); it != dims.rend(); ++it) expect.push_back(acc += it->second);
  auto rec = recognize_skn(s, k, n);
  std::string w = "growth " + join(rep.dims) + " at the origin; recognized as s^{" + std::to_string(k) + "," +
                  std::to_string(n) + "}: " + to_string(rec.status);
  if (rec.status == Recognition::indeterminate) return {CheckStatus::indeterminate, w};
  return pass_if(rep.dims == expect && rec.status == Recognition::yes, w);
}

inline Outcome check_tower(int k, int n, std::uint64_t seed) {
  auto t = iterate_prolong(flat_model_frame(build_skn(0, n)), k);
  PointSampler ps(seed);
  auto gs = symbol_at_generic(t.top(), ps, seed);
  if (!gs.symbol) return {CheckStatus::indeterminate, "no generic point found: " + gs.last_error};
  auto rec = recognize_skn(*gs.symbol, k, n);
  std::string w = "growth " + join(gs.growth) + "; recognized as s^{" + std::to_string(k) + "," + std::to_string(n) +
                  "}: " + to_string(rec.status);
  if (rec.status == Recognition::indeterminate) return {CheckStatus::indeterminate, w};
  return pass_if(rec.status == Recognition::yes, w + (rec.failure.empty() ? "" : " (" + rec.failure + ")"));
}

inline Outcome check_involutivity(int n, std::uint64_t seed) {
  auto t = iterate_prolong(flat_model_frame(build_skn(0, n)), n - 4);
  PointSampler ps(seed);
  int done = 0, tries = 0;
  std::size_t inclusions = 0;
  std::string indexed;
  std::string last_error;
  while (done < 3 && tries < 3 * resample_limit) {
    ++tries;
    auto q = ps.point(t.top().dim());
    InvolutivityReport rep;
    try {
      rep = check_involutivity_flags(t, q, seed);
    } catch (const Error& e) {
      last_error = e.what();
      continue;
    }
    if (!rep.ok()) {
      for (const auto& c : rep.paired)
        if (!c.vv || !c.vj)
          return {CheckStatus::fail, "V dim " + std::to_string(c.v_dim) + ", J level " + std::to_string(c.j_level) + ": " +
                                         c.witness};
    }
    inclusions += 2 * rep.paired.size();
    if (indexed.empty())
      for (const auto& c : rep.indexed)
        if (!c.vv || !c.vj) {
          indexed = "; V dim " + std::to_string(c.v_dim) + " against J level " + std::to_string(c.j_level) + " fails";
          break;
        }
    ++done;
  }
  if (done < 3) return {CheckStatus::indeterminate, "only " + std::to_string(done) + " generic points: " + last_error};
  return {CheckStatus::pass, "pr^" + std::to_string(n - 4) + " of the flat model: " + std::to_string(inclusions) +
                                 " inclusions [V,V] in V, [V,J] in J hold at 3 points (V dim n-3-i, J level n-3+i)" +
                                 indexed};
}

inline Outcome check_monge(int n, int prolongations, bool expect_distinct, std::uint64_t seed) {
  std::string w;
  Recognition r[2];
  const int k = prolongations;
  for (int which = 1; which <= 2; ++which) {
    PolyFrame f = monge_frame(n, which);
    if (k > 0) f = iterate_prolong(f, k).top();
    PointSampler ps(seed);
    auto gs = symbol_at_generic(f, ps, seed);
    if (!gs.symbol) return {CheckStatus::indeterminate, "monge" + std::to_string(which) + ": " + gs.last_error};
    r[which - 1] = recognize_skn(*gs.symbol, k, n).status;
    w += (which == 1 ? "" : "; ") + std::string("monge") + std::to_string(which) + " after " + std::to_string(k) +
         " prolongations: growth " + join(gs.growth) + ", s^{" + std::to_string(k) + "," + std::to_string(n) +
         "}: " + to_string(r[which - 1]) + ", centralizer invariant " + std::to_string(centralizer_invariant(*gs.symbol));
  }
  if (r[0] == Recognition::indeterminate || r[1] == Recognition::indeterminate) return {CheckStatus::indeterminate, w};
  bool ok = expect_distinct ? (r[0] != r[1]) : (r[0] == Recognition::yes && r[1] == Recognition::yes);
  return pass_if(ok, w);
}

}  // namespace detail

/// Runs the theorem suite for one n. Checks are sorted by id.
inline VerifyReport verify_suite(const VerifyOptions& opt) {
  const int n = opt.n;
  if (n < verify_min_n || n > verify_max_n)
    throw Error("verify-paper needs " + std::to_string(verify_min_n) + " <= n <= " + std::to_string(verify_max_n) +
                " (got " + std::to_string(n) + ")");
  VerifyReport rep;
  rep.n = n;
  rep.seed = opt.seed;
  auto run = [&](std::string id, std::string anchor, const std::function<detail::Outcome()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    CheckRecord c{std::move(id), std::move(anchor), CheckStatus::fail, "", std::nullopt};
    try {
      auto o = f();
      c.status = o.status;
      c.witness = std::move(o.witness);
    } catch (const Error& e) {
      c.status = CheckStatus::fail;
      c.witness = std::string("error: ") + e.what();
    }
    if (opt.timings)
      c.ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    rep.checks.push_back(std::move(c));
  };
  auto skip = [&](std::string id, std::string anchor, std::string why) {
    rep.checks.push_back({std::move(id), std::move(anchor), CheckStatus::skipped, std::move(why), std::nullopt});
  };
  auto kid = [](const char* base, int k) { return std::string(base) + ".k" + std::to_string(k); };

  run("cochain.complex", "Chevalley-Eilenberg coboundary", [&] { return detail::check_cochain_complex(n); });
  run("eigen.table", "ad(H) and ad(E) eigenvalue table", [&] { return detail::check_eigen_table(n); });

  if (n == 5) {
    run("prolong.g2", "G2 prolongation of the Symp symbol", [] { return detail::check_g2(); });
    run("flat.symbol", "flat model distribution", [&] { return detail::check_flat(1, n); });
    skip("normcheck.skn", "nonexistence of a linear invariant normalization condition",
         "n=5 parabolic case out of scope");
    std::sort(rep.checks.begin(), rep.checks.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return rep;
  }

  for (int k = 0; k <= n - 4; ++k)
    run(kid("prolong.skn", k), "universal Tanaka prolongation", [&] { return detail::check_prolong_skn(k, n); });
  run("morimoto", "Morimoto criterion", [&] { return detail::check_morimoto_standard(n); });
  run("normcheck.symp", "existence of a linear invariant normalization condition", [&] {
    return detail::check_normcheck(grade(build_gl2_semidirect_heis(n), GradingScheme::symp), n, NormStatus::exists);
  });
  for (int k = 0; k <= n - 4; ++k) {
    bool exists = k == n - 4;
    run(kid("normcheck.skn", k),
        exists ? "existence of a linear invariant normalization condition"
               : "nonexistence of a linear invariant normalization condition",
        [&] {
          return detail::check_normcheck(tanaka_prolong(build_skn(k, n)).full, n,
                                         exists ? NormStatus::exists : NormStatus::not_exists);
        });
  }
  for (int k = 0; k <= n - 5; ++k)
    run(kid("nonexistence", k), "nonexistence certificate", [&] { return detail::check_nonexistence(k, n); });
  run("flat.symbol", "flat model distribution", [&] { return detail::check_flat(0, n); });
  for (int k = 1; k <= n - 4; ++k)
    run(kid("tower", k), "symbol of the iterated Cartan prolongation", [&] { return detail::check_tower(k, n, opt.seed); });
  run("involutivity", "involutive vertical flags", [&] { return detail::check_involutivity(n, opt.seed); });
  run("monge.distinct", "distinct Monge symbols", [&] { return detail::check_monge(n, n - 6, true, opt.seed); });
  run("monge.unify", "prolonged Monge symbols", [&] { return detail::check_monge(n, n - 5, false, opt.seed); });

  std::sort(rep.checks.begin(), rep.checks.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return rep;
}

inline Json report_to_json(const VerifyReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"id", c.id},
                      {"anchor", c.anchor},
                      {"status", to_string(c.status)},
                      {"witness", c.witness},
                      {"ms", c.ms ? Json(*c.ms) : Json(nullptr)}});
  return {{"checks", checks}};
}

inline std::string report_to_text(const VerifyReport& r) {
  std::ostringstream os;
  for (const auto& c : r.checks) {
    os << to_string(c.status) << "  " << c.id << "  [" << c.anchor << "]";
    if (c.ms) os << "  " << *c.ms << " ms";
    os << "\n    " << c.witness << "\n";
  }
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& c : r.checks) ++counts[static_cast<int>(c.status)];
  os << "n=" << r.n << " seed=" << r.seed << ": " << counts[0] << " pass, " << counts[1] << " fail, " << counts[2]
     << " indeterminate, " << counts[3] << " skipped\n";
  return os.str();
}

}  // namespace tanaka
