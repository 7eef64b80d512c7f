#include "catch_amalgamated.hpp"

#include "tanaka/normcond.hpp"

using namespace tanaka;

namespace {

GradedLieAlgebra skn_full(int k, int n) { return grade(build_gl2_semidirect_heis(n), GradingScheme::skn, k); }

std::vector<Index> negatives(const GradedLieAlgebra& g) {
  std::vector<Index> v;
  for (Index i = 0; i < g.dim(); ++i)
    if (g.weight(i) < 0) v.push_back(i);
  return v;
}

SparseVector eval2(const Cochain& c, Index x, Index y) {
  if (x == y) return {};
  SparseVector out;
  Index a = std::min(x, y), b = std::max(x, y);
  for (const auto& [k, v] : c.terms())
    if (k.args == std::vector<Index>{a, b}) out.add_to(k.target, x < y ? v : -v);
  return out;
}

SparseVector project_negative(const GradedLieAlgebra& g, const SparseVector& v) {
  SparseVector out;
  for (const auto& [i, c] : v)
    if (g.weight(i) < 0) out.add_to(i, c);
  return out;
}

// (a·φ)(x,y) = [a, φ(x,y)] - φ(pr[a,x], y) - φ(x, pr[a,y]), evaluated pairwise.
Cochain act_by_evaluation(Index a, const Cochain& phi, const GradedLieAlgebra& g) {
  auto neg = negatives(g);
  Cochain out(2);
  auto ea = SparseVector::unit(a);
  for (std::size_t i = 0; i < neg.size(); ++i)
    for (std::size_t j = i + 1; j < neg.size(); ++j) {
      Index x = neg[i], y = neg[j];
      SparseVector val = g.bracket(ea, eval2(phi, x, y));
      for (const auto& [z, c] : project_negative(g, g.bracket(ea, SparseVector::unit(x)))) val.axpy(-c, eval2(phi, z, y));
      for (const auto& [z, c] : project_negative(g, g.bracket(ea, SparseVector::unit(y)))) val.axpy(-c, eval2(phi, x, z));
      for (const auto& [t, c] : val) out.add({x, y}, t, c);
    }
  return out;
}

// Checks a claimed complement against im d using only the evaluation oracle
// for the action.
void check_complement(const GradedLieAlgebra& g, const std::vector<Cochain>& n) {
  CochainSpace c1(g, 1, true), c2(g, 2, true);
  std::vector<SparseVector> nv, iv;
  for (const auto& c : n) nv.push_back(c2.to_vector(c));
  for (Index i = 0; i < c1.size(); ++i) iv.push_back(c2.to_vector(coboundary(c1.basis(i), g)));
  const std::size_t rn = rank(nv), ri = rank(iv);
  REQUIRE(rn == n.size());
  REQUIRE(rn + ri == c2.size());
  std::vector<SparseVector> both = nv;
  both.insert(both.end(), iv.begin(), iv.end());
  REQUIRE(rank(both) == c2.size());
  RowSpace span;
  for (const auto& v : nv) span.add(v);
  for (Index a = 0; a < g.dim(); ++a) {
    if (g.weight(a) < 0) continue;
    for (const auto& c : n) REQUIRE(span.contains(c2.to_vector(act_by_evaluation(a, c, g))));
  }
}

Rational h_eigen(const GradedLieAlgebra& g, Index h, const CochainKey& k) {
  auto diag = [&](Index i) { return g.bracket(SparseVector::unit(h), SparseVector::unit(i)).get(i); };
  Rational s = diag(k.target);
  for (Index a : k.args) s -= diag(a);
  return s;
}

}  // namespace

TEST_CASE("Morimoto conditions for gl2 semidirect heis") {
  for (int n = 6; n <= 8; ++n) {
    auto g = grade(build_gl2_semidirect_heis(n), GradingScheme::symp);
    auto rep = check_morimoto(g, standard_morimoto_data(n));
    INFO("n=" << n << " " << rep.adjoint.witness);
    REQUIRE(rep.graded_orthogonal.pass);
    REQUIRE(rep.weight_flip.pass);
    REQUIRE(rep.adjoint.pass);
  }
  REQUIRE_THROWS_AS(standard_morimoto_data(5), Error);
}

TEST_CASE("perturbed eps_2 norm breaks adjointness at A=Y") {
  auto g = grade(build_gl2_semidirect_heis(6), GradingScheme::symp);
  auto d = standard_morimoto_data(6);
  Index e2 = g.index_of("e2");
  d.form.set(e2, e2, 1);
  auto rep = check_morimoto(g, d);
  REQUIRE(rep.graded_orthogonal.pass);
  REQUIRE(rep.weight_flip.pass);
  REQUIRE_FALSE(rep.adjoint.pass);
  REQUIRE(rep.adjoint.witness.rfind("A=Y,", 0) == 0);
}

TEST_CASE("form validation") {
  auto g = grade(build_gl2_semidirect_heis(6), GradingScheme::symp);
  auto d = standard_morimoto_data(6);
  auto bad = d;
  bad.form.set(0, 1, 1);
  REQUIRE_THROWS_AS(check_morimoto(g, bad), Error);
  bad = d;
  bad.form.set(2, 2, -1);
  REQUIRE_THROWS_AS(check_morimoto(g, bad), Error);
  bad = d;
  bad.form.set(0, 1, 2);
  bad.form.set(1, 0, 2);
  REQUIRE_THROWS_AS(check_morimoto(g, bad), Error);  // 1*2 - 4 < 0
}

TEST_CASE("transport along the identity is the identity") {
  auto g = grade(build_gl2_semidirect_heis(6), GradingScheme::symp);
  auto d = standard_morimoto_data(6, g);
  LinearMap id;
  for (Index i = 0; i < g.dim(); ++i) id.push_back(SparseVector::unit(i));
  auto t = transport_morimoto(d, g, id);
  REQUIRE(t.form == d.form);
  REQUIRE(t.tau == d.tau);
  REQUIRE(t.k_subalg == d.k_subalg);
}

TEST_CASE("no invariant complement for s^{k,n}, k <= n-5") {
  for (int n = 6; n <= 7; ++n)
    for (int k = 0; k <= n - 5; ++k) {
      INFO("n=" << n << " k=" << k);
      auto g = tanaka_prolong(build_skn(k, n)).full;
      auto d = normalization_exists(g);
      REQUIRE(d.status == NormStatus::not_exists);
      REQUIRE_FALSE(d.exists);
      REQUIRE(d.obstruction);
      const auto& ob = *d.obstruction;
      REQUIRE(ob.single_word);
      // generator sits in a block (weight, toral eigenvalues) with no C^1_+ cochain
      REQUIRE(ob.generator.terms().size() == 1);
      const auto& gk = ob.generator.terms().begin()->first;
      std::vector<Index> toral;
      for (Index i = 0; i < g.dim(); ++i) {
        if (g.weight(i) != 0) continue;
        bool diag = true;
        for (Index j = 0; j < g.dim() && diag; ++j) {
          auto v = g.bracket(SparseVector::unit(i), SparseVector::unit(j));
          diag = v.is_zero() || (v.nnz() == 1 && v.leading() == j);
        }
        if (diag) toral.push_back(i);
      }
      REQUIRE(toral.size() >= 2);
      CochainSpace c1(g, 1, true);
      for (Index i = 0; i < c1.size(); ++i) {
        bool same = c1.weight(i) == Cochain::key_weight(g, gk);
        for (Index t : toral) same = same && h_eigen(g, t, c1.key(i)) == h_eigen(g, t, gk);
        REQUIRE_FALSE(same);
      }
      Cochain cur = ob.generator;
      REQUIRE(ob.chain.size() == ob.steps.size());
      for (std::size_t s = 0; s < ob.chain.size(); ++s) {
        cur = act_by_evaluation(g.index_of(ob.chain[s]), cur, g);
        REQUIRE(cur == ob.steps[s]);
      }
      REQUIRE(cur == ob.result);
      REQUIRE_FALSE(cur.is_zero());
      REQUIRE(*ob.preimage.weight(g) >= 1);
      REQUIRE(coboundary(ob.preimage, g) == cur);
    }
}

TEST_CASE("invariant complement for s^{n-4,n} from transported form data") {
  for (int n = 6; n <= 7; ++n) {
    auto g = tanaka_prolong(build_skn(n - 4, n)).full;
    NormOptions opt;
    opt.hint = standard_morimoto_data_for(g, n);
    REQUIRE(opt.hint);
    auto d = normalization_exists(g, opt);
    REQUIRE(d.status == NormStatus::exists);
    REQUIRE(d.method == "morimoto-orthogonal");
    REQUIRE(d.complement.size() + d.dim_image == d.dim_c2);
    check_complement(g, d.complement);
  }
}

TEST_CASE("Symp gl2 semidirect heis: form data decide, none is not a refutation") {
  auto g = grade(build_gl2_semidirect_heis(6), GradingScheme::symp);
  NormOptions opt;
  opt.hint = standard_morimoto_data(6);
  auto d = normalization_exists(g, opt);
  REQUIRE(d.status == NormStatus::exists);
  REQUIRE(d.complement.size() == 215);
  check_complement(g, d.complement);
  auto bare = normalization_exists(g);
  REQUIRE(bare.status != NormStatus::not_exists);
  auto pert = opt;
  pert.hint->form.set(g.index_of("e2"), g.index_of("e2"), 1);
  auto dp = normalization_exists(g, pert);
  REQUIRE(dp.status != NormStatus::not_exists);
  REQUIRE(dp.method != "morimoto-orthogonal");
}

TEST_CASE("G2 complement from the codifferential") {
  auto g = tanaka_prolong(symp_symbol(5)).full;
  auto d = normalization_exists(g);
  REQUIRE(d.status == NormStatus::exists);
  REQUIRE(d.method == "kostant-codifferential");
  check_complement(g, d.complement);
}

TEST_CASE("toral-only level zero goes through the projection system") {
  AlgebraBuilder b;
  Index z = b.add("Z", 0), x = b.add("x", -1), y = b.add("y", -1), t = b.add("t", -2);
  b.add_bracket(x, y, t, 1);
  b.add_bracket(z, x, x, -1);
  b.add_bracket(z, y, y, -1);
  b.add_bracket(z, t, t, -2);
  auto g = b.build();
  REQUIRE(validate(g).ok());
  auto d = normalization_exists(g);
  REQUIRE(d.status == NormStatus::exists);
  REQUIRE(d.method == "equivariant-projection");
  check_complement(g, d.complement);
}

TEST_CASE("explicit nonexistence witness") {
  for (int n = 6; n <= 8; ++n)
    for (int k = 0; k <= n - 5; ++k) {
      INFO("n=" << n << " k=" << k);
      auto c = nonexistence_witness(k, n);
      auto g = skn_full(k, n);
      Index H = g.index_of("H");
      REQUIRE(c.lambda == Rational(2 * (n + k - 3)));
      // oracle: largest H-eigenvalue over all C^1 basis cochains
      Rational top;
      bool first = true;
      for (Index a : negatives(g))
        for (Index t = 0; t < g.dim(); ++t) {
          Rational l = h_eigen(g, H, CochainKey{{a}, t});
          if (first || l > top) top = l;
          first = false;
        }
      REQUIRE(top == c.lambda);
      REQUIRE(c.eigenspace_dim == 1);
      REQUIRE(c.eigenspace_dim_positive == 0);
      REQUIRE(c.eigen_cochain_closed);
      REQUIRE(c.start_weight == 1);
      REQUIRE(c.start_block_image_dim == 0);
      Cochain cur = c.start;
      for (int a : {n - 4 - k, n - 4 - k, 1}) cur = act_by_evaluation(g.index_of(eps_label(a)), cur, g);
      REQUIRE(cur == c.result);
      REQUIRE_FALSE(cur.is_zero());
      REQUIRE(coboundary(c.preimage, g) == cur);
      // the preimage is a multiple of X* (x) e_1
      REQUIRE(c.preimage.terms().size() == 1);
      REQUIRE(c.preimage.terms().begin()->first == CochainKey{{g.index_of("X")}, g.index_of("e1")});
      REQUIRE_FALSE(c.literal_identity);
    }
  REQUIRE_THROWS_AS(nonexistence_witness(2, 6), Error);
  REQUIRE_THROWS_AS(nonexistence_witness(0, 5), Error);
}

TEST_CASE("empty subalgebra passes vacuously") {
  auto g = grade(build_gl2_semidirect_heis(6), GradingScheme::symp);
  MorimotoData d;
  d.form = standard_morimoto_data(6).form;
  d.tau = Matrix(g.dim(), 0);
  REQUIRE(check_morimoto(g, d).ok());
}

TEST_CASE("standard inner product values") {
  auto g = grade(build_gl2_semidirect_heis(6), GradingScheme::symp);
  auto d = standard_morimoto_data(6);
  REQUIRE(d.form.get(g.index_of("e1"), g.index_of("e1")) == Rational(1, 120));
  REQUIRE(d.form.get(g.index_of("e6"), g.index_of("e6")) == Rational(120));
  REQUIRE(d.tau.get(g.index_of("H"), 1) == Rational(1));
}
