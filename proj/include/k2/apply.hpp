#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "k2/numeric.hpp"
#include "k2/oracle.hpp"

namespace k2 {

struct Fuel {
  std::size_t budget = 0;
};

/// Value(v) | Exhausted(spent).
class PartialResult {
 public:
  static PartialResult value(Nat v) { return PartialResult(std::move(v)); }
  static PartialResult exhausted(std::size_t spent) { return PartialResult(Spent{spent}); }

  bool has_value() const { return std::holds_alternative<Nat>(outcome_); }
  /// Throws BudgetError when exhausted.
  const Nat& value() const;
  std::size_t spent() const;

  friend bool operator==(const PartialResult& a, const PartialResult& b) {
    if (a.has_value() != b.has_value()) return false;
    return a.has_value() ? a.value() == b.value() : a.spent() == b.spent();
  }

 private:
  struct Spent {
    std::size_t fuel;
  };
  explicit PartialResult(Nat v) : outcome_(std::move(v)) {}
  explicit PartialResult(Spent s) : outcome_(s) {}
  std::variant<Nat, Spent> outcome_;
};

struct StarResult {
  PartialResult result;
  /// Least n with f(gbar(n)) > 0, when found.
  std::optional<std::size_t> firing_index;
};

/// Code of <f(0), ..., f(n-1)>.
Nat bar(const Oracle& f, std::size_t n);

/// <n, g>: 0 -> n, k+1 -> g(k).
Oracle cons(const Nat& head, Oracle tail);

/// Generic star: probe(prefix) is the value of the applied function at the
/// code of the prefix (nullopt = exhausted inside the probe).
StarResult star_by(const std::function<std::optional<Nat>(std::span<const Nat>)>& probe, const Oracle& g,
                   Fuel fuel);

/// f * g = f(gbar(n)) - 1 for the least n < fuel with f(gbar(n)) > 0.
StarResult star(const Oracle& f, const Oracle& g, Fuel fuel);

/// Lazy f . g: query(k) = f * <k, g>.
class Application {
 public:
  Application(Oracle f, Oracle g) : f_(std::move(f)), g_(std::move(g)) {}

  StarResult at(const Nat& k, Fuel fuel) const;
  PartialResult operator()(const Nat& k, Fuel fuel) const { return at(k, fuel).result; }
  PartialResult operator()(std::size_t k, Fuel fuel) const { return at(nat(k), fuel).result; }

  /// Total view with a per-query budget; exhaustion throws BudgetError.
  Oracle total(Fuel fuel) const;

  const Oracle& function() const { return f_; }
  const Oracle& argument() const { return g_; }

 private:
  Oracle f_;
  Oracle g_;
};

Application bullet(Oracle f, Oracle g);

/// (f . h) * g, each inner query of f . h running with `inner` fuel.
StarResult star(const Application& fh, const Oracle& g, Fuel outer, Fuel inner);

}  // namespace k2
