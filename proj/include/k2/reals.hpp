#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "k2/json_io.hpp"
#include "k2/numeric.hpp"

namespace k2 {

/// Integer part plus a memoized stream of digits in {-1, 0, 1}; digit n has
/// weight 2^-n for n >= 1. Copies share the memo.
class SignedDigitReal {
 public:
  /// Digit generator, called once for n = 1, 2, ... in order with the sum of
  /// the integer part and digits 1..n-1.
  using DigitFn = std::function<int(std::size_t n, const Rational& partial)>;

  SignedDigitReal(std::function<Integer()> integer_part, DigitFn digits);
  static SignedDigitReal make(Integer integer_part, DigitFn digits);

  const Integer& integer_part() const;
  int digit(std::size_t n) const;
  /// integer_part + sum_{n=1..k} digit(n) 2^-n.
  Rational approx(std::size_t k) const;
  /// Digits produced so far.
  std::size_t materialized() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

SignedDigitReal from_rational(const Rational& q);

/// Builds a stream from approximations with |q(k) - x| <= 2^-k. Digit n reads
/// q(n + 2); the integer part reads q(2).
SignedDigitReal from_approximations(std::function<Rational(std::size_t)> q);

SignedDigitReal max_star(const SignedDigitReal& x, const SignedDigitReal& y);

/// 2^-n for the least n with witness(n), 0 when there is none. Digit m reads
/// witness(0..m).
SignedDigitReal first_diff_real(std::function<bool(std::size_t)> witness);

/// Integer part, a finite digit prefix and a tail rule.
struct DigitTail {
  enum class Kind { Zero, Constant, Periodic, None };
  Kind kind = Kind::Zero;
  std::vector<int> pattern;  // Constant: one digit; Periodic: the period
};
SignedDigitReal from_digits(Integer integer_part, std::vector<int> prefix, DigitTail tail);

enum class Gap { BelowGap, AboveGap, WithinGap };
std::string to_string(Gap g);

/// BelowGap iff approx(x, k+2) + 2^-(k+2) < q - 2^-k; AboveGap symmetric.
Gap compare_prec(const SignedDigitReal& x, const Rational& q, std::size_t k);

Json real_to_json(const SignedDigitReal& x, std::size_t digits);
SignedDigitReal real_from_json(const Json& j);

}  // namespace k2
