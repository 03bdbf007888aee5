#include "selfsim/rational.hpp"

#include <cctype>
#include <cmath>

namespace selfsim {

Rational::Rational(long num, long den) {
  if (den == 0) throw_error(errc::validation_error, "rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw_error(errc::validation_error, "rational with zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  auto bad = [&](const char* why) -> Rational {
    throw error(errc::validation_error,
                "invalid rational '" + std::string(text) + "': " + why);
  };
  if (text.empty()) return bad("empty");
  std::string num, den;
  std::size_t i = 0;
  if (text[i] == '-' || text[i] == '+') num += text[i++];
  std::size_t digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    num += text[i++];
    ++digits;
  }
  if (digits == 0) return bad("missing numerator digits");
  if (i < text.size()) {
    if (text[i] != '/') return bad("unexpected character");
    ++i;
    digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      den += text[i++];
      ++digits;
    }
    if (digits == 0 || i != text.size()) return bad("malformed denominator");
  } else {
    den = "1";
  }
  mpz_class n(num), d(den);
  if (d == 0) return bad("denominator is zero");
  return Rational(n, d);
}

Rational Rational::from_double(double x) {
  if (!std::isfinite(x))
    throw_error(errc::validation_error, "non-finite value is not a rational");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), x);
  return Rational(q);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw_error(errc::validation_error, "division by zero");
  v_ /= o.v_;
  return *this;
}

std::string Rational::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational Rational::pow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  if (e < 0) {
    if (base.is_zero()) throw_error(errc::invalid_param, "0 raised to a negative power");
    return Rational(1) / pow(base, -e);
  }
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.numerator().get_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), base.denominator().get_mpz_t(), static_cast<unsigned long>(e));
  return Rational(num, den);  // already reduced since base was
}

mpz_class Rational::floor_div(const Rational& eps) const {
  if (eps.sign() <= 0) throw_error(errc::invalid_param, "grid cell width must be positive");
  mpq_class q = v_ / eps.raw();
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return out;
}

double log2_of(const Rational& x) {
  if (x.sign() <= 0) throw_error(errc::invalid_param, "log2 of non-positive rational");
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, x.numerator().get_mpz_t());
  double md = mpz_get_d_2exp(&ed, x.denominator().get_mpz_t());
  return (std::log2(mn) + static_cast<double>(en)) -
         (std::log2(md) + static_cast<double>(ed));
}

}  // namespace selfsim
