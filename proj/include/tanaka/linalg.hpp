#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tanaka/rational.hpp"

namespace tanaka {

using Index = std::size_t;

/// Sparse vector with entries sorted by index; zeros are never stored.
class SparseVector {
 public:
  using Entry = std::pair<Index, Rational>;

  SparseVector() = default;
  SparseVector(std::initializer_list<Entry> init) {
    for (const auto& [i, c] : init) add_to(i, c);
  }
  static SparseVector unit(Index i, Rational c = 1) {
    SparseVector v;
    v.add_to(i, c);
    return v;
  }
  static SparseVector from_dense(const std::vector<Rational>& d) {
    SparseVector v;
    for (Index i = 0; i < d.size(); ++i)
      if (!d[i].is_zero()) v.e_.emplace_back(i, d[i]);
    return v;
  }
  std::vector<Rational> dense(std::size_t n) const {
    std::vector<Rational> d(n);
    for (const auto& [i, c] : e_) {
      if (i >= n) throw Error("sparse vector index out of range");
      d[i] = c;
    }
    return d;
  }

  const std::vector<Entry>& entries() const { return e_; }
  auto begin() const { return e_.begin(); }
  auto end() const { return e_.end(); }
  std::size_t nnz() const { return e_.size(); }
  bool is_zero() const { return e_.empty(); }
  Index leading() const { return e_.front().first; }
  Index max_index() const { return e_.back().first; }

  Rational get(Index i) const {
    auto it = find(i);
    return it != e_.end() && it->first == i ? it->second : Rational();
  }
  void set(Index i, const Rational& c) {
    auto it = find(i);
    if (it != e_.end() && it->first == i) {
      if (c.is_zero()) e_.erase(it);
      else it->second = c;
    } else if (!c.is_zero()) {
      e_.insert(it, {i, c});
    }
  }
  void add_to(Index i, const Rational& c) {
    if (c.is_zero()) return;
    auto it = find(i);
    if (it != e_.end() && it->first == i) {
      it->second += c;
      if (it->second.is_zero()) e_.erase(it);
    } else {
      e_.insert(it, {i, c});
    }
  }

  /// this += c * o
  void axpy(const Rational& c, const SparseVector& o) {
    if (c.is_zero() || o.e_.empty()) return;
    std::vector<Entry> out;
    out.reserve(e_.size() + o.e_.size());
    auto a = e_.begin();
    auto b = o.e_.begin();
    while (a != e_.end() || b != o.e_.end()) {
      if (b == o.e_.end() || (a != e_.end() && a->first < b->first)) {
        out.push_back(std::move(*a++));
      } else if (a == e_.end() || b->first < a->first) {
        out.emplace_back(b->first, c * b->second);
        ++b;
      } else {
        Rational s = a->second + c * b->second;
        if (!s.is_zero()) out.emplace_back(a->first, std::move(s));
        ++a;
        ++b;
      }
    }
    e_ = std::move(out);
  }
  SparseVector& operator*=(const Rational& c) {
    if (c.is_zero()) e_.clear();
    else for (auto& en : e_) en.second *= c;
    return *this;
  }
  SparseVector& operator+=(const SparseVector& o) { axpy(1, o); return *this; }
  SparseVector& operator-=(const SparseVector& o) { axpy(-1, o); return *this; }
  friend SparseVector operator+(SparseVector a, const SparseVector& b) { return a += b; }
  friend SparseVector operator-(SparseVector a, const SparseVector& b) { return a -= b; }
  friend SparseVector operator*(const Rational& c, SparseVector v) { return v *= c; }
  SparseVector operator-() const { SparseVector v = *this; return v *= Rational(-1); }
  friend bool operator==(const SparseVector& a, const SparseVector& b) { return a.e_ == b.e_; }
  friend bool operator<(const SparseVector& a, const SparseVector& b) { return a.e_ < b.e_; }

  Rational dot(const SparseVector& o) const {
    Rational s;
    auto a = e_.begin();
    auto b = o.e_.begin();
    while (a != e_.end() && b != o.e_.end()) {
      if (a->first < b->first) ++a;
      else if (b->first < a->first) ++b;
      else { s += a->second * b->second; ++a; ++b; }
    }
    return s;
  }

  /// Re-index entries through `map` (entries mapping to npos are dropped).
  template <class F>
  SparseVector remap(F&& map) const {
    SparseVector v;
    for (const auto& [i, c] : e_) {
      Index j = map(i);
      if (j != static_cast<Index>(-1)) v.add_to(j, c);
    }
    return v;
  }

 private:
  std::vector<Entry>::iterator find(Index i) {
    return std::lower_bound(e_.begin(), e_.end(), i,
                            [](const Entry& en, Index k) { return en.first < k; });
  }
  std::vector<Entry>::const_iterator find(Index i) const {
    return std::lower_bound(e_.begin(), e_.end(), i,
                            [](const Entry& en, Index k) { return en.first < k; });
  }
  std::vector<Entry> e_;
};

/// Row-sparse rational matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows) {}
  Matrix(std::initializer_list<std::initializer_list<long>> rows) {
    for (const auto& r : rows) {
      cols_ = std::max(cols_, r.size());
      SparseVector v;
      Index j = 0;
      for (long x : r) v.add_to(j++, Rational(x));
      data_.push_back(std::move(v));
    }
  }
  static Matrix from_rows(std::vector<SparseVector> rows, std::size_t cols) {
    Matrix m;
    m.cols_ = cols;
    for (const auto& r : rows)
      if (!r.is_zero() && r.max_index() >= cols) throw Error("row entry beyond column count");
    m.data_ = std::move(rows);
    return m;
  }
  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) m.data_[i].set(i, 1);
    return m;
  }

  std::size_t rows() const { return data_.size(); }
  std::size_t cols() const { return cols_; }
  Rational get(Index r, Index c) const { return data_.at(r).get(c); }
  void set(Index r, Index c, const Rational& v) {
    if (c >= cols_) throw Error("matrix column out of range");
    data_.at(r).set(c, v);
  }
  const SparseVector& row(Index r) const { return data_.at(r); }
  SparseVector& row(Index r) { return data_.at(r); }
  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : data_) n += r.nnz();
    return n;
  }
  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const auto& r) { return r.is_zero(); });
  }

  SparseVector apply(const SparseVector& x) const {
    SparseVector y;
    for (Index r = 0; r < data_.size(); ++r) y.add_to(r, data_[r].dot(x));
    return y;
  }
  Matrix transpose() const {
    Matrix t(cols_, rows());
    for (Index r = 0; r < rows(); ++r)
      for (const auto& [c, v] : data_[r]) t.data_[c].add_to(r, v);
    return t;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows()) throw Error("matrix product dimension mismatch");
    Matrix p(a.rows(), b.cols_);
    for (Index r = 0; r < a.rows(); ++r)
      for (const auto& [k, v] : a.data_[r]) p.data_[r].axpy(v, b.data_[k]);
    return p;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<SparseVector> data_;
};

/// Incrementally maintained reduced row echelon basis of a span.
/// With tracking enabled every basis row remembers its expression in the
/// inserted generators, so membership tests also return coordinates.
class RowSpace {
 public:
  explicit RowSpace(bool track = false) : track_(track) {}

  std::size_t dim() const { return rows_.size(); }
  const std::map<Index, SparseVector>& rows() const { return rows_; }
  std::vector<Index> pivots() const {
    std::vector<Index> p;
    for (const auto& [k, _] : rows_) p.push_back(k);
    return p;
  }

  SparseVector reduce(const SparseVector& v) const {
    SparseVector r = v;
    for (const auto& [i, c] : v) {
      auto it = rows_.find(i);
      if (it != rows_.end()) r.axpy(-c, it->second);
    }
    return r;
  }
  bool contains(const SparseVector& v) const { return reduce(v).is_zero(); }

  /// Coordinates of v over the inserted generators, if v lies in the span.
  std::optional<SparseVector> coordinates(const SparseVector& v) const {
    if (!track_) throw Error("RowSpace built without coordinate tracking");
    SparseVector r = v, combo;
    for (const auto& [i, c] : v) {
      auto it = rows_.find(i);
      if (it != rows_.end()) {
        r.axpy(-c, it->second);
        combo.axpy(c, combos_.at(i));
      }
    }
    if (!r.is_zero()) return std::nullopt;
    return combo;
  }

  /// Inserts v; returns false when v was already in the span.
  bool add(const SparseVector& v) {
    Index gen = generators_++;
    SparseVector r = v, combo;
    if (track_) combo = SparseVector::unit(gen);
    for (const auto& [i, c] : v) {
      auto it = rows_.find(i);
      if (it != rows_.end()) {
        r.axpy(-c, it->second);
        if (track_) combo.axpy(-c, combos_.at(i));
      }
    }
    if (r.is_zero()) return false;
    Index p = r.leading();
    Rational inv = Rational(1) / r.get(p);
    r *= inv;
    if (track_) combo *= inv;
    for (auto& [q, row] : rows_) {
      Rational f = row.get(p);
      if (f.is_zero()) continue;
      row.axpy(-f, r);
      if (track_) combos_.at(q).axpy(-f, combo);
    }
    rows_.emplace(p, std::move(r));
    if (track_) combos_.emplace(p, std::move(combo));
    return true;
  }

  std::vector<SparseVector> basis() const {
    std::vector<SparseVector> b;
    for (const auto& [_, r] : rows_) b.push_back(r);
    return b;
  }

 private:
  bool track_;
  Index generators_ = 0;
  std::map<Index, SparseVector> rows_;
  std::map<Index, SparseVector> combos_;
};

inline RowSpace row_space(const Matrix& m) {
  RowSpace rs;
  for (Index r = 0; r < m.rows(); ++r) rs.add(m.row(r));
  return rs;
}

inline std::size_t rank(const Matrix& m) { return row_space(m).dim(); }

inline std::size_t rank(const std::vector<SparseVector>& vs) {
  RowSpace rs;
  for (const auto& v : vs) rs.add(v);
  return rs.dim();
}

/// Null space basis from the reduced row echelon form: one vector per free
/// column in ascending order, with a 1 in that column.
inline std::vector<SparseVector> kernel_basis(const Matrix& m) {
  RowSpace rs = row_space(m);
  std::vector<SparseVector> out;
  const auto& rows = rs.rows();
  for (Index f = 0; f < m.cols(); ++f) {
    if (rows.count(f)) continue;
    SparseVector x = SparseVector::unit(f);
    for (const auto& [p, row] : rows) {
      Rational c = row.get(f);
      if (!c.is_zero()) x.set(p, -c);
    }
    out.push_back(std::move(x));
  }
  return out;
}

/// One solution of m x = b with free variables set to zero.
inline std::optional<SparseVector> solve(const Matrix& m, const SparseVector& b) {
  if (!b.is_zero() && b.max_index() >= m.rows()) throw Error("solve: right-hand side dimension mismatch");
  RowSpace rs;
  const Index aug = m.cols();
  for (Index r = 0; r < m.rows(); ++r) {
    SparseVector row = m.row(r);
    row.add_to(aug, b.get(r));
    rs.add(row);
  }
  SparseVector x;
  for (const auto& [p, row] : rs.rows()) {
    if (p == aug) return std::nullopt;
    x.add_to(p, row.get(aug));
  }
  return x;
}

inline std::optional<SparseVector> solve(const Matrix& m, const std::vector<Rational>& b) {
  if (b.size() != m.rows()) throw Error("solve: right-hand side dimension mismatch");
  return solve(m, SparseVector::from_dense(b));
}

/// Dimension of span(a) ∩ span(b).
inline std::size_t intersection_dim(const std::vector<SparseVector>& a, const std::vector<SparseVector>& b) {
  RowSpace s;
  for (const auto& v : a) s.add(v);
  std::size_t da = s.dim();
  std::size_t db = rank(b);
  for (const auto& v : b) s.add(v);
  return da + db - s.dim();
}

}  // namespace tanaka
