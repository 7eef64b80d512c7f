#pragma once

#include <map>
#include <string>
#include <vector>

#include "tanaka/rational.hpp"

namespace tanaka {

using Exponents = std::vector<int>;

/// Sparse multivariate polynomial over Q on a fixed number of variables.
/// Terms are kept in lexicographic order of exponent vectors.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c) {
    Polynomial p(nvars);
    p.add_term(Exponents(nvars, 0), c);
    return p;
  }
  static Polynomial variable(std::size_t nvars, std::size_t i, const Rational& c = 1) {
    Exponents e(nvars, 0);
    e.at(i) = 1;
    Polynomial p(nvars);
    p.add_term(e, c);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const std::map<Exponents, Rational>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }

  void add_term(const Exponents& e, const Rational& c) {
    if (e.size() != nvars_) throw Error("monomial has " + std::to_string(e.size()) + " exponents, expected " + std::to_string(nvars_));
    for (int x : e)
      if (x < 0) throw Error("negative exponent");
    if (c.is_zero()) return;
    auto [it, fresh] = t_.try_emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    same(o);
    for (const auto& [e, c] : o.t_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    same(o);
    for (const auto& [e, c] : o.t_) add_term(e, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Rational& c, const Polynomial& p) {
    Polynomial out(p.nvars_);
    if (c.is_zero()) return out;
    for (const auto& [e, x] : p.t_) out.t_.emplace(e, c * x);
    return out;
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.same(b);
    Polynomial out(a.nvars_);
    Exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.t_)
      for (const auto& [eb, cb] : b.t_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.nvars_ == b.nvars_ && a.t_ == b.t_; }

  Polynomial derivative(std::size_t i) const {
    Polynomial out(nvars_);
    for (const auto& [e, c] : t_) {
      if (e.at(i) == 0) continue;
      Exponents f = e;
      --f[i];
      out.add_term(f, c * Rational(e[i]));
    }
    return out;
  }

  Rational evaluate(const std::vector<Rational>& q) const {
    if (q.size() != nvars_) throw Error("point has wrong dimension");
    Rational s;
    for (const auto& [e, c] : t_) {
      Rational m = c;
      for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) m *= q[i];
      s += m;
    }
    return s;
  }

  int degree() const {
    int d = 0;
    for (const auto& [e, _] : t_) {
      int s = 0;
      for (int x : e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  /// Same polynomial on nvars + extra variables appended at the end.
  Polynomial extended(std::size_t extra) const {
    Polynomial out(nvars_ + extra);
    for (const auto& [e, c] : t_) {
      Exponents f = e;
      f.resize(nvars_ + extra, 0);
      out.t_.emplace(std::move(f), c);
    }
    return out;
  }

  /// Substitutes x_i -> x_i + c.
  Polynomial shifted(std::size_t i, const Rational& c) const {
    if (c.is_zero()) return *this;
    Polynomial out(nvars_);
    for (const auto& [e, x] : t_) {
      // (x_i + c)^m expanded binomially
      Rational binom = 1;
      const int m = e.at(i);
      for (int j = 0; j <= m; ++j) {
        Exponents f = e;
        f[i] = m - j;
        Rational cj = 1;
        for (int r = 0; r < j; ++r) cj *= c;
        out.add_term(f, x * binom * cj);
        binom = binom * Rational(m - j) / Rational(j + 1);
      }
    }
    return out;
  }

  std::string format(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
      const auto& [e, c] = *it;
      std::string mono;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += names.at(i);
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      Rational a = c.sign() < 0 ? -c : c;
      std::string coef = a.str();
      std::string term = mono.empty() ? coef : (coef == "1" ? mono : coef + "*" + mono);
      if (first) s += (c.sign() < 0 ? "-" : "") + term;
      else s += (c.sign() < 0 ? " - " : " + ") + term;
      first = false;
    }
    return s;
  }

 private:
  void same(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw Error("polynomials live on different variable sets");
  }

  std::size_t nvars_ = 0;
  std::map<Exponents, Rational> t_;
};

/// Vector field sum_i f_i ∂_{x_i} with polynomial coefficients.
class PolyVectorField {
 public:
  PolyVectorField() = default;
  explicit PolyVectorField(std::vector<std::string> coords)
      : coords_(std::move(coords)), comp_(coords_.size(), Polynomial(coords_.size())) {}

  static PolyVectorField coordinate(std::vector<std::string> coords, std::size_t i) {
    PolyVectorField v(std::move(coords));
    v.comp_.at(i) = Polynomial::constant(v.dim(), 1);
    return v;
  }

  std::size_t dim() const { return coords_.size(); }
  const std::vector<std::string>& coords() const { return coords_; }
  const Polynomial& component(std::size_t i) const { return comp_.at(i); }
  void set_component(std::size_t i, Polynomial p) {
    if (p.nvars() != dim()) throw Error("component lives on the wrong variable set");
    comp_.at(i) = std::move(p);
  }
  bool is_zero() const {
    for (const auto& p : comp_)
      if (!p.is_zero()) return false;
    return true;
  }

  /// Derivative of a polynomial along the field.
  Polynomial apply(const Polynomial& f) const {
    Polynomial out(dim());
    for (std::size_t i = 0; i < dim(); ++i)
      if (!comp_[i].is_zero()) out += comp_[i] * f.derivative(i);
    return out;
  }

  std::vector<Rational> evaluate(const std::vector<Rational>& q) const {
    std::vector<Rational> v;
    for (const auto& p : comp_) v.push_back(p.evaluate(q));
    return v;
  }

  PolyVectorField& operator+=(const PolyVectorField& o) {
    same(o);
    for (std::size_t i = 0; i < dim(); ++i) comp_[i] += o.comp_[i];
    return *this;
  }
  PolyVectorField& operator-=(const PolyVectorField& o) {
    same(o);
    for (std::size_t i = 0; i < dim(); ++i) comp_[i] -= o.comp_[i];
    return *this;
  }
  friend PolyVectorField operator+(PolyVectorField a, const PolyVectorField& b) { return a += b; }
  friend PolyVectorField operator-(PolyVectorField a, const PolyVectorField& b) { return a -= b; }
  friend PolyVectorField operator*(const Polynomial& f, const PolyVectorField& v) {
    PolyVectorField out(v.coords_);
    for (std::size_t i = 0; i < v.dim(); ++i) out.comp_[i] = f * v.comp_[i];
    return out;
  }
  friend PolyVectorField operator*(const Rational& c, const PolyVectorField& v) {
    return Polynomial::constant(v.dim(), c) * v;
  }
  friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) {
    return a.coords_ == b.coords_ && a.comp_ == b.comp_;
  }

  /// Same field on extra trailing coordinates (no components along them).
  PolyVectorField extended(const std::vector<std::string>& extra) const {
    std::vector<std::string> c = coords_;
    c.insert(c.end(), extra.begin(), extra.end());
    PolyVectorField out(c);
    for (std::size_t i = 0; i < dim(); ++i) out.comp_[i] = comp_[i].extended(extra.size());
    return out;
  }

  PolyVectorField shifted(std::size_t i, const Rational& c) const {
    PolyVectorField out(coords_);
    for (std::size_t j = 0; j < dim(); ++j) out.comp_[j] = comp_[j].shifted(i, c);
    return out;
  }

  std::string format() const {
    std::string s;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (comp_[i].is_zero()) continue;
      std::string p = comp_[i].format(coords_);
      bool simple = comp_[i].terms().size() == 1;
      bool neg = simple && p[0] == '-';
      if (neg) p = p.substr(1);
      if (!s.empty()) s += neg ? " - " : " + ";
      else if (neg) s += "-";
      if (p == "1") s += "d/d" + coords_[i];
      else s += (simple ? p : "(" + p + ")") + "*d/d" + coords_[i];
    }
    return s.empty() ? "0" : s;
  }

 private:
  void same(const PolyVectorField& o) const {
    if (o.coords_ != coords_) throw Error("vector fields live on different coordinates");
  }

  std::vector<std::string> coords_;
  std::vector<Polynomial> comp_;
};

inline PolyVectorField lie_bracket(const PolyVectorField& v, const PolyVectorField& w) {
  if (v.coords() != w.coords()) throw Error("vector fields live on different coordinates");
  PolyVectorField out(v.coords());
  for (std::size_t j = 0; j < v.dim(); ++j) out.set_component(j, v.apply(w.component(j)) - w.apply(v.component(j)));
  return out;
}

/// Rank-2 distribution given by two polynomial fields on named coordinates.
struct PolyFrame {
  std::vector<std::string> coords;
  std::vector<PolyVectorField> fields;

  PolyFrame() = default;
  PolyFrame(std::vector<std::string> c, std::vector<PolyVectorField> f) : coords(std::move(c)), fields(std::move(f)) {
    check();
  }
  void check() const {
    if (fields.size() != 2) throw Error("a frame has exactly two fields");
    for (const auto& f : fields)
      if (f.coords() != coords) throw Error("frame field coordinates differ from the frame's");
  }
  std::size_t dim() const { return coords.size(); }
  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] == name) return i;
    throw Error("unknown coordinate '" + name + "'");
  }
};

}  // namespace tanaka
