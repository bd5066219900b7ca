#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

namespace k2 {

/// Arbitrary-precision natural number. Sequence codes outgrow any machine word
/// after a handful of appends, so every index into Baire space is a Nat.
using Nat = mpz_class;
using Integer = mpz_class;

/// Exact rational; gmp keeps it canonical (gcd 1, positive denominator).
using Rational = mpq_class;

Rational make_rational(const Integer& num, const Integer& den);

/// Parses "p/q" or "p" (optionally signed). Throws ValidationError.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers print without a denominator ("3", "-1").
std::string to_string(const Rational& q);
std::string to_string(const Integer& n);

/// Parses a decimal natural. Throws ValidationError.
Nat parse_nat(std::string_view text);

/// 2^e for any (possibly negative) exponent.
Rational pow2(long e);

/// Narrows to size_t, throwing ValidationError when the value does not fit.
std::size_t to_size(const Nat& n);

inline Nat nat(std::size_t v) { return Nat(static_cast<unsigned long>(v)); }

Rational abs_value(const Rational& q);

}  // namespace k2
