#pragma once

#include <algorithm>
#include <numeric>

#include "tanaka/catalog.hpp"
#include "tanaka/poly.hpp"

namespace tanaka {

/// Left-invariant frame of m_{-1} on the simply connected group of m, in
/// exponential coordinates of the second kind g = exp(x_1 e_1)...exp(x_d e_d)
/// with the basis ordered by descending weight.
inline PolyFrame flat_model_frame(const SymbolAlgebra& m) {
  const auto& g = m.alg();
  const std::size_t d = g.dim();
  if (g.graded_component(-1).size() != 2) throw Error("flat model needs a rank 2 weight -1 component");
  std::vector<Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return g.weight(a) > g.weight(b); });
  std::vector<std::size_t> pos(d);
  for (std::size_t p = 0; p < d; ++p) pos[order[p]] = p;
  std::vector<std::string> coords;
  for (Index i : order) coords.push_back(g.label(i));

  using PolyVec = std::vector<Polynomial>;  // components in position order
  auto zero = [&] { return PolyVec(d, Polynomial(d)); };
  auto ad = [&](Index e, const PolyVec& v) {
    PolyVec out = zero();
    for (std::size_t l = 0; l < d; ++l) {
      if (v[l].is_zero()) continue;
      for (const auto& [r, c] : g.bracket_basis(e, order[l])) out[pos[r]] += c * v[l];
    }
    return out;
  };
  auto is_zero = [](const PolyVec& v) {
    return std::all_of(v.begin(), v.end(), [](const Polynomial& p) { return p.is_zero(); });
  };
  // rows b_p of the Maurer-Cartan matrix
  std::vector<PolyVec> B;
  for (std::size_t p = 0; p < d; ++p) {
    PolyVec v = zero();
    v[p] = Polynomial::constant(d, 1);
    for (std::size_t r = p + 1; r < d; ++r) {
      // exp(-x_r ad e_r) v
      PolyVec acc = v, term = v;
      Polynomial coef = Polynomial::constant(d, 1);
      for (int s = 1;; ++s) {
        term = ad(order[r], term);
        if (is_zero(term)) break;
        coef = (Rational(-1) / Rational(s)) * (coef * Polynomial::variable(d, r));
        for (std::size_t l = 0; l < d; ++l) acc[l] += coef * term[l];
      }
      v = std::move(acc);
    }
    B.push_back(std::move(v));
  }
  // C = B^{-1} = sum_s (-N)^s with N = B - I nilpotent
  std::vector<PolyVec> N = B, C, P;
  for (std::size_t p = 0; p < d; ++p) N[p][p] -= Polynomial::constant(d, 1);
  auto mul = [&](const std::vector<PolyVec>& a, const std::vector<PolyVec>& b) {
    std::vector<PolyVec> out(d, zero());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t l = 0; l < d; ++l) {
        if (a[i][l].is_zero()) continue;
        for (std::size_t j = 0; j < d; ++j)
          if (!b[l][j].is_zero()) out[i][j] += a[i][l] * b[l][j];
      }
    return out;
  };
  std::vector<PolyVec> negN = N;
  for (auto& row : negN)
    for (auto& x : row) x = Rational(-1) * x;
  C.assign(d, zero());
  P.assign(d, zero());
  for (std::size_t p = 0; p < d; ++p) P[p][p] = Polynomial::constant(d, 1);
  for (std::size_t s = 0; s <= d; ++s) {
    bool all_zero = true;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        if (P[i][j].is_zero()) continue;
        all_zero = false;
        C[i][j] += P[i][j];
      }
    if (all_zero) break;
    P = mul(P, negN);
  }
  std::vector<PolyVectorField> fields;
  for (std::size_t i = 0; i < 2; ++i) {
    PolyVectorField v(coords);
    for (std::size_t p = 0; p < d; ++p) v.set_component(p, C[i][p]);
    fields.push_back(std::move(v));
  }
  return PolyFrame(coords, fields);
}

/// Control-system encoding of z' = (y^{(n-3)})^2 (which = 1) or
/// z'' = (y^{(n-4)})^2 (which = 2), with x independent and the top
/// derivative of y as the free direction.
inline PolyFrame monge_frame(int n, int which) {
  if (n < 6) throw Error("Monge frames need n >= 6 (got " + std::to_string(n) + ")");
  if (which != 1 && which != 2) throw Error("Monge frame selector must be 1 or 2");
  const int top = which == 1 ? n - 3 : n - 4;
  auto yname = [](int j) { return j == 0 ? std::string("y") : "y" + std::to_string(j); };
  std::vector<std::string> coords{"x"};
  for (int j = 0; j <= top; ++j) coords.push_back(yname(j));
  coords.push_back("z");
  if (which == 2) coords.push_back("z1");
  const std::size_t d = coords.size();
  auto idx = [&](const std::string& s) { return static_cast<std::size_t>(std::find(coords.begin(), coords.end(), s) - coords.begin()); };
  PolyVectorField x1(coords);
  x1.set_component(0, Polynomial::constant(d, 1));
  for (int j = 0; j < top; ++j) x1.set_component(idx(yname(j)), Polynomial::variable(d, idx(yname(j + 1))));
  Polynomial sq = Polynomial::variable(d, idx(yname(top))) * Polynomial::variable(d, idx(yname(top)));
  if (which == 1) {
    x1.set_component(idx("z"), sq);
  } else {
    x1.set_component(idx("z"), Polynomial::variable(d, idx("z1")));
    x1.set_component(idx("z1"), sq);
  }
  return PolyFrame(coords, {x1, PolyVectorField::coordinate(coords, idx(yname(top)))});
}

}  // namespace tanaka
