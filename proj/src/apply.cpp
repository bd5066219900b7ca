#include "k2/apply.hpp"

#include "k2/errors.hpp"
#include "k2/seq_code.hpp"

namespace k2 {

const Nat& PartialResult::value() const {
  if (!has_value()) throw BudgetError("exhausted after " + std::to_string(spent()) + " steps");
  return std::get<Nat>(outcome_);
}

std::size_t PartialResult::spent() const {
  if (has_value()) return 0;
  return std::get<Spent>(outcome_).fuel;
}

Nat bar(const Oracle& f, std::size_t n) {
  Nat code = 0;
  for (std::size_t i = 0; i < n; ++i) code = append_code(code, f(i));
  return code;
}

namespace {

class ConsOracle final : public OracleImpl {
 public:
  ConsOracle(Nat head, Oracle tail) : head_(std::move(head)), tail_(std::move(tail)) {}
  Nat at(const Nat& k) const override { return k == 0 ? head_ : tail_(Nat(k - 1)); }
  std::string describe() const override { return "cons(" + head_.get_str() + "," + tail_.describe() + ")"; }

 private:
  Nat head_;
  Oracle tail_;
};

}  // namespace

Oracle cons(const Nat& head, Oracle tail) { return Oracle(std::make_shared<ConsOracle>(head, std::move(tail))); }

StarResult star_by(const std::function<std::optional<Nat>(std::span<const Nat>)>& probe, const Oracle& g,
                   Fuel fuel) {
  std::vector<Nat> prefix;
  for (std::size_t n = 0; n < fuel.budget; ++n) {
    if (n > 0) prefix.push_back(g(n - 1));
    auto v = probe(prefix);
    if (!v) return {PartialResult::exhausted(fuel.budget), std::nullopt};
    if (*v > 0) return {PartialResult::value(Nat(*v - 1)), n};
  }
  return {PartialResult::exhausted(fuel.budget), std::nullopt};
}

StarResult star(const Oracle& f, const Oracle& g, Fuel fuel) {
  return star_by([&f](std::span<const Nat> p) -> std::optional<Nat> { return f.on_sequence(p); }, g, fuel);
}

StarResult Application::at(const Nat& k, Fuel fuel) const { return star(f_, cons(k, g_), fuel); }

Oracle Application::total(Fuel fuel) const {
  Application self = *this;
  return function_oracle(
      [self, fuel](const Nat& k) { return self(k, fuel).value(); },
      "(" + f_.describe() + ")*(" + g_.describe() + ")");
}

Application bullet(Oracle f, Oracle g) { return Application(std::move(f), std::move(g)); }

StarResult star(const Application& fh, const Oracle& g, Fuel outer, Fuel inner) {
  return star_by(
      [&fh, inner](std::span<const Nat> p) -> std::optional<Nat> {
        auto r = fh(encode_sequence(p), inner);
        if (!r.has_value()) return std::nullopt;
        return r.value();
      },
      g, outer);
}

}  // namespace k2
