#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tanaka {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact rational in lowest terms, positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : v_(v) {}  // NOLINT implicit from integer literals
  Rational(long num, long den) {
    if (den == 0) throw Error("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Parses "p/q" or "p" with optional sign. Denominator zero is rejected.
  static Rational parse(std::string_view s) {
    std::string t(s);
    auto bad = [&] { return Error("malformed rational '" + t + "'"); };
    if (t.empty()) throw bad();
    auto slash = t.find('/');
    auto check_int = [&](const std::string& part, bool allow_sign) {
      std::size_t i = 0;
      if (allow_sign && !part.empty() && (part[0] == '-' || part[0] == '+')) i = 1;
      if (i >= part.size()) throw bad();
      for (; i < part.size(); ++i)
        if (part[i] < '0' || part[i] > '9') throw bad();
    };
    std::string num = t.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : t.substr(slash + 1);
    check_int(num, true);
    check_int(den, false);
    if (num[0] == '+') num = num.substr(1);
    mpz_class n(num), d(den);
    if (d == 0) throw Error("rational with zero denominator '" + t + "'");
    mpq_class q(n, d);
    q.canonicalize();
    return Rational(q);
  }

  std::string str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }
  const mpq_class& raw() const { return v_; }
  std::string numerator() const { return v_.get_num().get_str(); }
  std::string denominator() const { return v_.get_den().get_str(); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw Error("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const { return Rational(mpq_class(-v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class v_{0};
};

inline Rational factorial(int n) {
  if (n < 0) throw Error("factorial of negative number");
  mpz_class r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return Rational(mpq_class(r));
}

}  // namespace tanaka
