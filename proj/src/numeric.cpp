#include "k2/numeric.hpp"

#include <limits>

#include "k2/errors.hpp"

namespace k2 {

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw ValidationError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace {

Integer parse_integer(std::string_view text) {
  if (text.empty()) throw ValidationError("empty number");
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) throw ValidationError("sign without digits");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw ValidationError("not a number: '" + std::string(text) + "'");
    }
  }
  std::string digits(text[0] == '+' ? text.substr(1) : text);
  return Integer(digits, 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  return make_rational(parse_integer(text.substr(0, slash)), parse_integer(text.substr(slash + 1)));
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const Integer& n) { return n.get_str(); }

Nat parse_nat(std::string_view text) {
  Integer v = parse_integer(text);
  if (v < 0 || text[0] == '-') throw ValidationError("expected a natural, got '" + std::string(text) + "'");
  return v;
}

Rational pow2(long e) {
  Integer p;
  unsigned long magnitude = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  mpz_ui_pow_ui(p.get_mpz_t(), 2, magnitude);
  if (e >= 0) return Rational(p);
  return Rational(Integer(1), p);
}

std::size_t to_size(const Nat& n) {
  if (n < 0 || !n.fits_ulong_p()) throw ValidationError("natural " + n.get_str() + " too large for an index");
  return static_cast<std::size_t>(n.get_ui());
}

Rational abs_value(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace k2
