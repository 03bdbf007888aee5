#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "selfsim/errors.hpp"

namespace selfsim {

// Exact arbitrary-precision rational, always in canonical reduced form
// (gcd(|num|, den) = 1, den >= 1).  Thin value wrapper over GMP's mpq.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}  // NOLINT: implicit by design, mirrors integers
  Rational(long num, long den);
  Rational(const mpz_class& num, const mpz_class& den);
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // Accepts "p", "p/q" and "-p/q"; throws validation_error on anything else
  // (including zero denominators).
  static Rational parse(std::string_view text);

  // Exact conversion; every finite double is a dyadic rational.
  static Rational from_double(double x);

  const mpq_class& raw() const { return v_; }
  mpz_class numerator() const { return v_.get_num(); }
  mpz_class denominator() const { return v_.get_den(); }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  bool is_integer() const { return v_.get_den() == 1; }

  double to_double() const { return v_.get_d(); }
  std::string str() const;

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational abs() const { return sign() < 0 ? -*this : *this; }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  // base^e with e possibly negative (base must be nonzero then).
  static Rational pow(const Rational& base, long e);

  // Index k of the half-open grid cell [k*eps, (k+1)*eps) containing *this.
  mpz_class floor_div(const Rational& eps) const;

 private:
  mpq_class v_;
};

// log2 as a double, robust for values far outside double range.
double log2_of(const Rational& x);

// Grid of half-open cells [k*eps, (k+1)*eps), k integer, anchored at 0.
struct GridSpec {
  Rational epsilon;  // > 0
};

}  // namespace selfsim
