#include "catch_amalgamated.hpp"

#include "tanaka/frames.hpp"
#include "tanaka/vf.hpp"

using namespace tanaka;

namespace {

SymbolAlgebra heis3() {
  AlgebraBuilder b;
  Index x = b.add("x", -1), y = b.add("y", -1), z = b.add("z", -2);
  b.add_bracket(x, y, z, 1);
  return SymbolAlgebra(b.build());
}

std::vector<Rational> origin(std::size_t d) { return std::vector<Rational>(d); }

// Bracket-preservation check written out directly over basis pairs.
bool preserves_brackets(const GradedLieAlgebra& src, const GradedLieAlgebra& dst, const LinearMap& map) {
  if (map.size() != src.dim() || rank(map) != dst.dim()) return false;
  for (Index i = 0; i < src.dim(); ++i)
    for (Index j = 0; j < src.dim(); ++j) {
      SparseVector lhs;
      for (const auto& [k, c] : src.bracket(SparseVector::unit(i), SparseVector::unit(j))) lhs.axpy(c, map[k]);
      if (lhs != dst.bracket(map[i], map[j])) return false;
    }
  return true;
}

std::vector<std::size_t> weight_tally_cumulative(const GradedLieAlgebra& g) {
  std::vector<std::size_t> out;
  std::size_t s = 0;
  for (int w = -1; w >= g.min_weight(); --w) {
    s += g.graded_component(w).size();
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("flat model frames") {
  auto h = flat_model_frame(heis3());
  REQUIRE(h.coords == std::vector<std::string>{"x", "y", "z"});
  PolyVectorField e1 = PolyVectorField::coordinate(h.coords, 0) -
                       Polynomial::variable(3, 1) * PolyVectorField::coordinate(h.coords, 2);
  REQUIRE(h.fields[0] == e1);
  REQUIRE(h.fields[1] == PolyVectorField::coordinate(h.coords, 1));

  AlgebraBuilder b;
  b.add("p", -1);
  b.add("q", -1);
  auto ab = flat_model_frame(SymbolAlgebra(b.build()));
  REQUIRE(ab.fields[0] == PolyVectorField::coordinate(ab.coords, 0));
  REQUIRE(ab.fields[1] == PolyVectorField::coordinate(ab.coords, 1));
  auto rep = weak_derived_flag(ab, origin(2));
  REQUIRE(rep.dims == std::vector<std::size_t>{2});
  REQUIRE(rep.stabilized);
}

TEST_CASE("flat frame brackets at the origin reproduce the algebra") {
  for (auto [k, n] : std::vector<std::pair<int, int>>{{0, 6}, {1, 6}, {2, 6}, {0, 7}}) {
    auto m = build_skn(k, n);
    const auto& g = m.alg();
    auto f = flat_model_frame(m);
    // coordinate p corresponds to basis element with label coords[p]
    auto to_coords = [&](const SparseVector& v) {
      std::vector<Rational> out(f.dim());
      for (const auto& [i, c] : v) out[f.index_of(g.label(i))] = c;
      return out;
    };
    auto m1 = g.graded_component(-1);
    // words up to length 5, evaluated both ways
    std::vector<std::pair<PolyVectorField, SparseVector>> cur;
    for (int l = 0; l < 2; ++l) cur.push_back({f.fields[l], SparseVector::unit(m1[l])});
    for (int len = 1; len <= 5; ++len) {
      std::vector<std::pair<PolyVectorField, SparseVector>> next;
      for (const auto& [field, elem] : cur) {
        REQUIRE(field.evaluate(origin(f.dim())) == to_coords(elem));
        for (int l = 0; l < 2; ++l)
          next.push_back({lie_bracket(f.fields[l], field), g.bracket(SparseVector::unit(m1[l]), elem)});
      }
      cur = std::move(next);
    }
  }
}

TEST_CASE("growth vectors and symbols of flat models") {
  auto m = build_skn(0, 6);
  auto f = flat_model_frame(m);
  FlagReport rep;
  auto s = tanaka_symbol_at(f, origin(6), 0, &rep);
  REQUIRE(rep.dims == std::vector<std::size_t>{2, 3, 5, 6});
  REQUIRE(rep.dims == weight_tally_cumulative(m.alg()));
  auto r = recognize_skn(s, 0, 6);
  REQUIRE(r.status == Recognition::yes);
  REQUIRE(preserves_brackets(m.alg(), s.alg(), r.map));
  // symbol weight dims are the successive differences of the growth vector
  std::size_t prev = 0;
  for (std::size_t i = 0; i < rep.dims.size(); ++i) {
    REQUIRE(s.alg().graded_component(-static_cast<int>(i) - 1).size() == rep.dims[i] - prev);
    prev = rep.dims[i];
  }
  auto h = flat_model_frame(heis3());
  PointSampler ps(3);
  for (int t = 0; t < 3; ++t) {
    auto sh = tanaka_symbol_at(h, ps.point(3));
    REQUIRE(sh.alg().weight_dims() == heis3().alg().weight_dims());
  }
}

TEST_CASE("growth vector is invariant under constant frame changes") {
  auto f = monge_frame(6, 1);
  PointSampler ps(5);
  for (int t = 0; t < 3; ++t) {
    auto q = ps.point(6);
    PolyFrame g(f.coords, {f.fields[0] + Rational(2) * f.fields[1], Rational(3) * f.fields[1] - f.fields[0]});
    REQUIRE(weak_derived_flag(f, q).dims == weak_derived_flag(g, q).dims);
  }
}

TEST_CASE("Monge frames") {
  auto m1 = monge_frame(6, 1);
  REQUIRE(m1.coords == std::vector<std::string>{"x", "y", "y1", "y2", "y3", "z"});
  // X1 = d/dx + y1 d/dy + y2 d/dy1 + y3 d/dy2 + y3^2 d/dz
  PolyVectorField x1(m1.coords);
  x1.set_component(0, Polynomial::constant(6, 1));
  for (int j = 1; j <= 3; ++j) x1.set_component(j, Polynomial::variable(6, j + 1));
  x1.set_component(5, Polynomial::variable(6, 4) * Polynomial::variable(6, 4));
  REQUIRE(m1.fields[0] == x1);
  REQUIRE(m1.fields[1] == PolyVectorField::coordinate(m1.coords, 4));
  PolyVectorField expect = Rational(-1) * PolyVectorField::coordinate(m1.coords, 3) -
                           Polynomial::variable(6, 4, 2) * PolyVectorField::coordinate(m1.coords, 5);
  REQUIRE(lie_bracket(m1.fields[0], m1.fields[1]) == expect);
  auto m2 = monge_frame(6, 2);
  REQUIRE(m2.dim() == 6);
  REQUIRE(monge_frame(8, 2).dim() == 8);
  REQUIRE_THROWS_AS(monge_frame(5, 1), Error);
  REQUIRE_THROWS_AS(monge_frame(6, 3), Error);
  PointSampler ps(0);
  for (int which = 1; which <= 2; ++which)
    for (int t = 0; t < 3; ++t) {
      auto f = monge_frame(6, which);
      auto rep = weak_derived_flag(f, ps.point(6));
      REQUIRE(rep.dims == std::vector<std::size_t>{2, 3, 5, 6});
    }
}

TEST_CASE("Monge symbols differ and unify after one prolongation") {
  PointSampler ps(0);
  auto s1 = tanaka_symbol_at(monge_frame(6, 1), ps.point(6));
  auto s2 = tanaka_symbol_at(monge_frame(6, 2), ps.point(6));
  REQUIRE(centralizer_invariant(s1) == 1);
  REQUIRE(centralizer_invariant(s2) == 0);
  REQUIRE(recognize_skn(s1, 0, 6).status == Recognition::yes);
  REQUIRE(recognize_skn(s2, 0, 6).status == Recognition::no);
  for (int which = 1; which <= 2; ++which) {
    auto t = iterate_prolong(monge_frame(6, which), 1);
    auto s = tanaka_symbol_at(t.top(), ps.point(7));
    auto r = recognize_skn(s, 1, 6);
    REQUIRE(r.status == Recognition::yes);
    REQUIRE(preserves_brackets(build_skn(1, 6).alg(), s.alg(), r.map));
  }
}

TEST_CASE("Cartan prolongation chart") {
  std::vector<std::string> c{"x", "y", "p"};
  PolyVectorField x1 = PolyVectorField::coordinate(c, 0) + Polynomial::variable(3, 2) * PolyVectorField::coordinate(c, 1);
  PolyFrame f(c, {x1, PolyVectorField::coordinate(c, 2)});
  auto pf = cartan_prolong_chart(f);
  REQUIRE(pf.coords == std::vector<std::string>{"x", "y", "p", "a"});
  PolyVectorField want = PolyVectorField::coordinate(pf.coords, 0) +
                         Polynomial::variable(4, 2) * PolyVectorField::coordinate(pf.coords, 1) +
                         Polynomial::variable(4, 3) * PolyVectorField::coordinate(pf.coords, 2);
  REQUIRE(pf.fields[0] == want);
  REQUIRE(pf.fields[1] == PolyVectorField::coordinate(pf.coords, 3));
  auto shifted = cartan_prolong_chart(f, "a", Rational(1, 2));
  REQUIRE(shifted.fields[0].evaluate(origin(4))[2] == Rational(1, 2));
  // a coordinate name already in use is renamed
  REQUIRE(cartan_prolong_chart(pf, "a").coords.back() == "a_");
}

TEST_CASE("prolongation towers") {
  auto f = flat_model_frame(build_skn(0, 6));
  PointSampler ps(1);
  for (int k = 1; k <= 2; ++k) {
    auto t = iterate_prolong(f, k);
    REQUIRE(t.top().dim() == static_cast<std::size_t>(6 + k));
    REQUIRE(t.levels.size() == static_cast<std::size_t>(k));
    auto q = ps.point(6 + k);
    auto s = tanaka_symbol_at(t.top(), q);
    auto r = recognize_skn(s, k, 6);
    REQUIRE(r.status == Recognition::yes);
    REQUIRE(preserves_brackets(build_skn(k, 6).alg(), s.alg(), r.map));
  }
  auto t1 = iterate_prolong(f, 1);
  auto q = ps.point(7);
  auto rep = weak_derived_flag(t1.top(), q);
  REQUIRE(rep.dims.size() >= 3);
  REQUIRE(std::vector<std::size_t>(rep.dims.begin(), rep.dims.begin() + 3) == std::vector<std::size_t>{2, 3, 4});
  // (pr D)^{-2} has rank 3 and projects onto D at the projected point
  RowSpace proj, base;
  for (std::size_t w = 0; w < rep.words.size(); ++w)
    if (rep.levels[w] <= 2) {
      auto v = rep.values[w];
      v.pop_back();
      proj.add(SparseVector::from_dense(v));
    }
  std::vector<Rational> qb(q.begin(), q.end() - 1);
  for (const auto& fld : f.fields) base.add(SparseVector::from_dense(fld.evaluate(qb)));
  REQUIRE(rep.dims[1] == 3);
  REQUIRE(proj.dim() == 2);
  for (const auto& v : proj.basis()) REQUIRE(base.contains(v));
  REQUIRE_THROWS_AS(iterate_prolong(f, 0), Error);
}

TEST_CASE("involutivity of vertical flags") {
  PointSampler ps(2);
  for (int which = 0; which <= 1; ++which) {
    PolyFrame base = which == 0 ? flat_model_frame(build_skn(0, 6)) : monge_frame(6, 1);
    auto t = iterate_prolong(base, 2);
    for (int s = 0; s < 3; ++s) {
      auto rep = check_involutivity_flags(t, ps.point(8));
      REQUIRE(rep.ok());
      REQUIRE(rep.paired.size() == 2);
      REQUIRE(rep.paired[0].v_dim == 2);
      REQUIRE(rep.paired[0].j_level == 4);
      for (const auto& c : rep.indexed) REQUIRE(c.vv);
      // the i-dimensional pairing fails at i = 2
      REQUIRE(rep.indexed[0].vj);
      REQUIRE_FALSE(rep.indexed[1].vj);
    }
  }
}

TEST_CASE("recognition") {
  for (int n = 6; n <= 8; ++n)
    for (int k = 0; k <= n - 4; ++k) {
      auto m = build_skn(k, n);
      auto r = recognize_skn(m, k, n);
      INFO("n=" << n << " k=" << k << " " << r.failure);
      REQUIRE(r.status == Recognition::yes);
      REQUIRE(preserves_brackets(m.alg(), m.alg(), r.map));
      if (k > 0) REQUIRE(recognize_skn(m, k - 1, n).status == Recognition::no);
    }
  // same weight dimensions, different brackets: drop [X, e_{2n-6}]-type rigidity
  auto m = build_skn(1, 6);
  AlgebraBuilder b;
  for (const auto& e : m.alg().basis()) b.add(e.label, e.weight);
  const auto& g = m.alg();
  for (Index i = 0; i < g.dim(); ++i)
    for (Index j = i + 1; j < g.dim(); ++j)
      for (const auto& [r, c] : g.bracket_basis(i, j))
        if (g.label(r) != "eta") b.add_bracket(i, j, r, c);
  auto broken = SymbolAlgebra(b.build());
  auto r = recognize_skn(broken, 1, 6);
  REQUIRE(r.status == Recognition::no);
  REQUIRE_FALSE(r.failure.empty());
}

TEST_CASE("singular and degenerate points") {
  std::vector<std::string> c{"x", "y", "z"};
  // Martinet-type frame: growth drops on x = 0
  PolyFrame f(c, {PolyVectorField::coordinate(c, 0),
                  PolyVectorField::coordinate(c, 1) +
                      Polynomial::variable(3, 0) * Polynomial::variable(3, 0) * PolyVectorField::coordinate(c, 2)});
  REQUIRE_THROWS_WITH(tanaka_symbol_at(f, origin(3)), Catch::Matchers::ContainsSubstring("not equiregular"));
  REQUIRE_NOTHROW(tanaka_symbol_at(f, {Rational(1), Rational(0), Rational(0)}));
  PolyFrame flat2(c, {PolyVectorField::coordinate(c, 0), PolyVectorField::coordinate(c, 1)});
  REQUIRE_THROWS_WITH(tanaka_symbol_at(flat2, origin(3)), Catch::Matchers::ContainsSubstring("bracket generating"));
  PolyFrame deg(c, {PolyVectorField::coordinate(c, 0), Polynomial::variable(3, 1) * PolyVectorField::coordinate(c, 1)});
  REQUIRE_THROWS_AS(weak_derived_flag(deg, origin(3)), Error);
  REQUIRE_THROWS_AS(weak_derived_flag(flat2, origin(2)), Error);
}
