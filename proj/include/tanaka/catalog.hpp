#pragma once

#include <string>
#include <vector>

#include "tanaka/glie.hpp"

namespace tanaka {

inline std::string eps_label(int i) { return "e" + std::to_string(i); }

inline void require_n(int n, int min_n) {
  if (n < min_n) throw Error("n must be at least " + std::to_string(min_n) + " (got " + std::to_string(n) + ")");
}

/// heis_{2n-5}: basis e1..e_{2n-6}, eta with [e_i, e_{2n-5-i}] = (-1)^i eta.
/// Weights are the Symp ones (e_i: -i, eta: -(2n-5)).
inline GradedLieAlgebra build_heisenberg(int n) {
  require_n(n, 5);
  const int m = 2 * n - 6;
  AlgebraBuilder b;
  std::vector<Index> e(m + 1);
  for (int i = 1; i <= m; ++i) e[i] = b.add(eps_label(i), -i);
  Index eta = b.add("eta", -(2 * n - 5));
  for (int i = 1; i <= m; ++i) {
    int j = 2 * n - 5 - i;
    if (i < j) b.add_bracket(e[i], e[j], eta, i % 2 == 0 ? 1 : -1);
  }
  return b.build();
}

/// gl_2 ⋉ heis_{2n-5} in the basis Y, H, E, X, e1..e_{2n-6}, eta, graded by
/// the Symp weights.
inline GradedLieAlgebra build_gl2_semidirect_heis(int n) {
  require_n(n, 5);
  const int m = 2 * n - 6;
  AlgebraBuilder b;
  Index Y = b.add("Y", 1), H = b.add("H", 0), E = b.add("E", 0), X = b.add("X", -1);
  std::vector<Index> e(m + 1);
  for (int i = 1; i <= m; ++i) e[i] = b.add(eps_label(i), -i);
  Index eta = b.add("eta", -(2 * n - 5));

  b.add_bracket(X, Y, H, 1);
  b.add_bracket(H, X, X, 2);
  b.add_bracket(H, Y, Y, -2);
  for (int i = 1; i <= m; ++i) {
    b.add_bracket(H, e[i], e[i], 2 * i + 5 - 2 * n);
    b.add_bracket(E, e[i], e[i], 1);
    if (i <= m - 1) b.add_bracket(X, e[i], e[i + 1], 1);
    if (i >= 2) b.add_bracket(Y, e[i], e[i - 1], (i - 1) * (2 * n - 5 - i));
    int j = 2 * n - 5 - i;
    if (i < j) b.add_bracket(e[i], e[j], eta, i % 2 == 0 ? 1 : -1);
  }
  b.add_bracket(E, eta, eta, 2);
  return b.build();
}

enum class GradingScheme { symp, skn };

/// Parameters (n, k) recovered from the size of a gl2 ⋉ heis algebra.
inline int gl2_heis_n(const GradedLieAlgebra& g) {
  if (g.dim() < 9 || (g.dim() + 1) % 2) throw Error("not a gl2 ⋉ heis algebra");
  return static_cast<int>((g.dim() + 1) / 2);
}

/// Reweights gl2 ⋉ heis_{2n-5}. For skn: e_i -> n-4-k-i, eta -> -3-2k.
inline GradedLieAlgebra grade(const GradedLieAlgebra& g, GradingScheme scheme, int k = 0) {
  const int n = gl2_heis_n(g);
  if (scheme == GradingScheme::skn && (k < 0 || k > n - 4))
    throw Error("k must satisfy 0 <= k <= n-4");
  std::vector<int> w(g.dim());
  for (Index i = 0; i < g.dim(); ++i) {
    const std::string& l = g.label(i);
    if (l == "Y") w[i] = 1;
    else if (l == "H" || l == "E") w[i] = 0;
    else if (l == "X") w[i] = -1;
    else if (l == "eta") w[i] = scheme == GradingScheme::symp ? -(2 * n - 5) : -3 - 2 * k;
    else if (l.size() > 1 && l[0] == 'e') {
      int idx = std::stoi(l.substr(1));
      w[i] = scheme == GradingScheme::symp ? -idx : n - 4 - k - idx;
    } else {
      throw Error("unexpected basis label '" + l + "'");
    }
  }
  GradedLieAlgebra r = g.reweighted(w);
  if (!validate(r).grading_violations.empty())
    throw Error("grading is incompatible with the brackets");
  return r;
}

inline void require_skn_range(int k, int n) {
  require_n(n, 5);
  if (k < 0 || k > n - 4)
    throw Error("need 0 <= k <= n-4 (got k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
}

/// s^{k,n}: negative part of gl2 ⋉ heis_{2n-5} under the k-shifted grading.
inline SymbolAlgebra build_skn(int k, int n) {
  require_skn_range(k, n);
  return SymbolAlgebra(negative_part(grade(build_gl2_semidirect_heis(n), GradingScheme::skn, k)));
}

/// The Symp symbol <X> ⋉ heis_{2n-5}.
inline SymbolAlgebra symp_symbol(int n) {
  require_n(n, 5);
  return SymbolAlgebra(negative_part(grade(build_gl2_semidirect_heis(n), GradingScheme::symp)));
}

struct EigenRow {
  std::string label;
  int weight;
  Rational lh;
  Rational le;
};

/// Weight and ad(H), ad(E) eigenvalues read from adjoint matrices, checked
/// against the closed forms.
inline std::vector<EigenRow> eigen_table(int n, int k) {
  require_skn_range(k, n);
  GradedLieAlgebra g = grade(build_gl2_semidirect_heis(n), GradingScheme::skn, k);
  Matrix adH = adjoint_matrix(g, g.element("H"));
  Matrix adE = adjoint_matrix(g, g.element("E"));
  const Matrix cols[2] = {adH.transpose(), adE.transpose()};
  std::vector<EigenRow> rows;
  for (Index i = 0; i < g.dim(); ++i) {
    for (const auto& t : cols)
      for (const auto& [r, _] : t.row(i))
        if (r != i) throw Error("ad(H) or ad(E) is not diagonal at " + g.label(i));
    EigenRow row{g.label(i), g.weight(i), adH.get(i, i), adE.get(i, i)};
    const std::string& l = row.label;
    int w = 0;
    long lh = 0, le = 0;
    if (l == "Y") { w = 1; lh = -2; }
    else if (l == "H" || l == "E") { w = 0; }
    else if (l == "X") { w = -1; lh = 2; }
    else if (l == "eta") { w = -3 - 2 * k; le = 2; }
    else {
      int idx = std::stoi(l.substr(1));
      w = n - 4 - k - idx;
      lh = 2 * idx + 5 - 2 * n;
      le = 1;
    }
    if (row.weight != w || row.lh != Rational(lh) || row.le != Rational(le))
      throw Error("eigen table mismatch at " + l);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tanaka
