#include "k2/reals.hpp"

#include <optional>

#include "k2/errors.hpp"

namespace k2 {

struct SignedDigitReal::State {
  std::function<Integer()> integer_fn;
  DigitFn digit_fn;
  std::optional<Integer> integer_part;
  std::vector<int> digits;
  std::vector<Rational> partials;  // partials[n] = integer part + digits 1..n

  void ensure_integer() {
    if (integer_part) return;
    integer_part = integer_fn();
    partials.push_back(Rational(*integer_part));
  }

  void ensure(std::size_t n) {
    ensure_integer();
    while (digits.size() < n) {
      std::size_t next = digits.size() + 1;
      int d = digit_fn(next, partials.back());
      if (d < -1 || d > 1) throw ValidationError("signed digit out of range: " + std::to_string(d));
      digits.push_back(d);
      partials.push_back(partials.back() + Rational(d) * pow2(-static_cast<long>(next)));
    }
  }
};

SignedDigitReal::SignedDigitReal(std::function<Integer()> integer_part, DigitFn digits)
    : state_(std::make_shared<State>()) {
  state_->integer_fn = std::move(integer_part);
  state_->digit_fn = std::move(digits);
}

SignedDigitReal SignedDigitReal::make(Integer integer_part, DigitFn digits) {
  return SignedDigitReal([ip = std::move(integer_part)] { return ip; }, std::move(digits));
}

const Integer& SignedDigitReal::integer_part() const {
  state_->ensure_integer();
  return *state_->integer_part;
}

int SignedDigitReal::digit(std::size_t n) const {
  if (n == 0) throw ValidationError("digits are indexed from 1");
  state_->ensure(n);
  return state_->digits[n - 1];
}

Rational SignedDigitReal::approx(std::size_t k) const {
  state_->ensure(k);
  return state_->partials[k];
}

std::size_t SignedDigitReal::materialized() const { return state_->digits.size(); }

namespace {

Integer round_half_up(const Rational& q) {
  Rational shifted = q + Rational(1, 2);
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
  return out;
}

}  // namespace

SignedDigitReal from_approximations(std::function<Rational(std::size_t)> q) {
  auto integer = [q] { return round_half_up(q(2)); };
  auto digits = [q](std::size_t n, const Rational& partial) {
    Rational e = (q(n + 2) - partial) * pow2(static_cast<long>(n));
    if (e > Rational(1, 2)) return 1;
    if (e < Rational(-1, 2)) return -1;
    return 0;
  };
  return SignedDigitReal(integer, digits);
}

SignedDigitReal from_rational(const Rational& q) {
  return from_approximations([q](std::size_t) { return q; });
}

SignedDigitReal max_star(const SignedDigitReal& x, const SignedDigitReal& y) {
  return from_approximations([x, y](std::size_t k) {
    Rational a = x.approx(k), b = y.approx(k);
    return a < b ? b : a;
  });
}

SignedDigitReal first_diff_real(std::function<bool(std::size_t)> witness) {
  auto found = std::make_shared<bool>(false);
  auto integer = [witness, found] {
    *found = witness(0);
    return Integer(*found ? 1 : 0);
  };
  auto digits = [witness, found](std::size_t m, const Rational&) {
    if (*found) return 0;
    if (witness(m)) {
      *found = true;
      return 1;
    }
    return 0;
  };
  return SignedDigitReal(integer, digits);
}

SignedDigitReal from_digits(Integer integer_part, std::vector<int> prefix, DigitTail tail) {
  for (int d : prefix) {
    if (d < -1 || d > 1) throw ValidationError("signed digit out of range");
  }
  if ((tail.kind == DigitTail::Kind::Constant && tail.pattern.size() != 1) ||
      (tail.kind == DigitTail::Kind::Periodic && tail.pattern.empty())) {
    throw ValidationError("malformed digit tail");
  }
  for (int d : tail.pattern) {
    if (d < -1 || d > 1) throw ValidationError("signed digit out of range");
  }
  return SignedDigitReal::make(std::move(integer_part), [prefix = std::move(prefix), tail](std::size_t n, const Rational&) {
    if (n <= prefix.size()) return prefix[n - 1];
    std::size_t offset = n - prefix.size() - 1;
    switch (tail.kind) {
      case DigitTail::Kind::Zero:
        return 0;
      case DigitTail::Kind::Constant:
        return tail.pattern[0];
      case DigitTail::Kind::Periodic:
        return tail.pattern[offset % tail.pattern.size()];
      case DigitTail::Kind::None:
        break;
    }
    throw HorizonError("digit " + std::to_string(n) + " lies past the declared prefix");
  });
}

std::string to_string(Gap g) {
  switch (g) {
    case Gap::BelowGap:
      return "below";
    case Gap::AboveGap:
      return "above";
    case Gap::WithinGap:
      return "within";
  }
  return "within";
}

Gap compare_prec(const SignedDigitReal& x, const Rational& q, std::size_t k) {
  Rational a = x.approx(k + 2);
  Rational slack = pow2(-static_cast<long>(k + 2));
  Rational gap = pow2(-static_cast<long>(k));
  if (a + slack < q - gap) return Gap::BelowGap;
  if (a - slack > q + gap) return Gap::AboveGap;
  return Gap::WithinGap;
}

Json real_to_json(const SignedDigitReal& x, std::size_t digits) {
  Json out;
  out["integer_part"] = to_string(x.integer_part());
  Json ds = Json::array();
  for (std::size_t n = 1; n <= digits; ++n) ds.push_back(x.digit(n));
  out["digits"] = ds;
  out["tail"] = {{"kind", "none"}};
  return out;
}

SignedDigitReal real_from_json(const Json& j) {
  Integer ip = json_rational(json_field(j, "integer_part", "real"), "integer_part").get_num();
  if (json_rational(j.at("integer_part"), "integer_part").get_den() != 1) {
    throw ValidationError("integer_part must be an integer");
  }
  std::vector<int> prefix;
  if (j.contains("digits")) {
    for (const auto& d : j.at("digits")) prefix.push_back(d.get<int>());
  }
  DigitTail tail;
  if (j.contains("tail")) {
    std::string kind = json_field(j.at("tail"), "kind", "digit tail").get<std::string>();
    if (kind == "zero") {
      tail.kind = DigitTail::Kind::Zero;
    } else if (kind == "constant") {
      tail.kind = DigitTail::Kind::Constant;
      tail.pattern = {json_field(j.at("tail"), "digit", "constant tail").get<int>()};
    } else if (kind == "periodic") {
      tail.kind = DigitTail::Kind::Periodic;
      tail.pattern = json_field(j.at("tail"), "pattern", "periodic tail").get<std::vector<int>>();
    } else if (kind == "none") {
      tail.kind = DigitTail::Kind::None;
    } else {
      throw ValidationError("unknown digit tail '" + kind + "'");
    }
  }
  return from_digits(std::move(ip), std::move(prefix), std::move(tail));
}

}  // namespace k2
