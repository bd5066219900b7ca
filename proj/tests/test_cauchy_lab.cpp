#include <doctest.h>

#include <algorithm>

#include "gen.hpp"
#include "oracles.hpp"
#include "k2/cauchy_lab.hpp"
#include "k2/errors.hpp"
#include "k2/oracle_spec.hpp"

using namespace k2;
using oracles::brute_f_a_bar;
using oracles::brute_modulus;
using oracles::random_finite;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

RationalSeq powers_of_half() { return RationalSeq::geometric_tail({q(1)}, 1, q(1, 2)); }

Oracle fn(std::function<std::size_t(std::size_t)> f) {
  return function_oracle([f](const Nat& n) { return nat(f(to_size(n))); }, "test");
}

RationalSeq constant_one() { return RationalSeq::constant_tail({q(1)}, 1); }

}  // namespace

TEST_CASE("sequence specs") {
  auto x = RationalSeq::from_json(Json::parse(R"({"prefix":["1/2","3/4"],"tail":{"kind":"zero"}})"));
  CHECK(x.at(1) == q(3, 4));
  CHECK(x.at(7) == 0);
  CHECK(RationalSeq::from_json(x.to_json()).take(5) == x.take(5));

  auto g = RationalSeq::from_json(Json::parse(R"({"prefix":["1/2"],"tail":{"kind":"geometric","ratio":"1/2","limit":"1"}})"));
  CHECK(g.at(1) == q(3, 4));
  CHECK(g.at(2) == q(7, 8));
  CHECK_NOTHROW(g.with_flags({true, true, true}));
  CHECK_THROWS_AS(RationalSeq::from_json(Json::parse(R"({"prefix":["1"],"tail":{"kind":"geometric","ratio":"2"}})")),
                  ValidationError);
  CHECK_THROWS_AS(RationalSeq::from_json(Json::parse(R"({"prefix":["1","1/2"],"tail":{"kind":"zero"},"flags":["increasing"]})")),
                  ValidationError);
  CHECK_THROWS_AS(RationalSeq::from_json(Json::parse(R"({"prefix":["1"],"tail":{"kind":"zero"},"flags":["infinitely_positive"]})")),
                  ValidationError);
  CHECK_THROWS_AS(RationalSeq::from_json(Json::parse(R"({"tail":{"kind":"spiral"}})")), ValidationError);
}

TEST_CASE("difference sequences and tail sums") {
  gen::Rng rng(3);
  auto a = RationalSeq::geometric_tail({q(1, 3), q(1, 2)}, q(1, 2), q(1, 4), q(1));
  auto x = difference_sequence(a);
  Rational partial = 0;
  for (std::size_t i = 0; i < 30; ++i) {
    partial += x.at(i);
    CHECK(partial == a.at(i));
  }
  for (std::size_t from = 0; from < 6; ++from) {
    Rational expected = *a.limit() - (from == 0 ? Rational(0) : a.at(from - 1));
    CHECK(*x.abs_tail_sum(from) == expected);
  }
  CHECK_FALSE(RationalSeq::constant_tail({}, 1).abs_tail_sum(0));
  auto c = difference_sequence(constant_one());
  CHECK(c.take(4) == std::vector<Rational>{1, 0, 0, 0});
  CHECK(c.zero_from(1));
}

TEST_CASE("diam_window") {
  auto x = RationalSeq::zero_tail({q(1, 2), q(1, 4), q(1, 8)});
  CHECK(diam_window(x, 1, 1) == 0);
  CHECK(diam_window(x, 0, 2) == q(3, 8));
  gen::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto y = random_finite(rng, 8);
    std::size_t lo = gen::below(rng, 10), hi = lo + gen::below(rng, 6);
    Rational best = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
      for (std::size_t j = lo; j <= hi; ++j) best = std::max(best, abs_value(y.at(i) - y.at(j)));
    }
    CHECK(diam_window(y, lo, hi) == best);
  }
}

TEST_CASE("is_modulus") {
  CHECK_FALSE(is_modulus(constant_oracle(0), RationalSeq::constant_tail({}, 3), 40));
  auto x = powers_of_half();
  CHECK_FALSE(is_modulus(formulas::successor(1), x, 40));
  auto bad = is_modulus(fn([](std::size_t n) { return n == 0 ? 0 : n - 1; }), x, 40);
  REQUIRE(bad);
  CHECK(abs_value(x.at(bad->i) - x.at(bad->j)) >= pow2(-static_cast<long>(bad->n)));

  gen::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto y = random_finite(rng, 6);
    std::size_t shift = gen::below(rng, 3);
    auto f = fn([&y, shift](std::size_t n) {
      std::size_t s = brute_modulus(y, n, 12);
      return s > shift ? s - shift : 0;
    });
    bool brute = true;
    for (std::size_t n = 0; n <= 12; ++n) {
      if (to_size(f(n)) > brute_modulus(y, n, 12)) continue;
      if (to_size(f(n)) < brute_modulus(y, n, 12)) brute = false;
    }
    CHECK(!is_modulus(f, y, 12).has_value() == brute);
  }
}

TEST_CASE("k_consistent") {
  auto x = RationalSeq::constant_tail({q(1), q(2)}, 2);
  CHECK_FALSE(k_consistent({{1, 1, 5}, {q(1), q(2)}}, x, 20));
  auto jump = RationalSeq::zero_tail({q(0), q(0), q(1)});
  auto w = k_consistent({{0}, {}}, jump, 20);
  REQUIRE(w);
  REQUIRE(w->oscillation);
  CHECK(w->oscillation->n == 0);
  CHECK(k_consistent({{}, {q(5)}}, jump, 20)->mismatch == std::optional<std::size_t>(0));

  gen::Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto y = random_finite(rng, 5);
    KConstraint k;
    std::size_t known = gen::below(rng, 3), levels = gen::below(rng, 4), idx = 0;
    for (std::size_t i = 0; i < known; ++i) k.xs.push_back(gen::coin(rng) ? y.at(i) : q(9));
    for (std::size_t n = 0; n < levels; ++n) k.sigma.push_back(idx += gen::below(rng, 3));
    bool brute = true;
    for (std::size_t i = 0; i < k.xs.size(); ++i) brute = brute && y.at(i) == k.xs[i];
    for (std::size_t n = 0; n < k.sigma.size(); ++n) {
      for (std::size_t i = k.sigma[n]; i <= 10; ++i) {
        for (std::size_t j = k.sigma[n]; j <= 10; ++j) {
          brute = brute && abs_value(y.at(i) - y.at(j)) < pow2(-static_cast<long>(n));
        }
      }
    }
    CHECK(!k_consistent(k, y, 10).has_value() == brute);
  }
}

TEST_CASE("pc_realizer") {
  auto x = powers_of_half();
  auto f = formulas::successor(1);
  for (std::size_t n = 0; n < 12; ++n) {
    CHECK(pc_realizer(x, f, identity_oracle(), n) == 0);
    CHECK(pc_realizer(x, f, formulas::successor(1), n) == n);
  }
  CHECK(pc_realizer(RationalSeq::constant_tail({}, q(2, 3)), constant_oracle(0), formulas::successor(7), 4) == 0);
  CHECK_THROWS_AS(pc_realizer(x, f, constant_oracle(0), 3), ValidationError);

  gen::Rng rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    auto y = random_finite(rng, 7);
    std::size_t horizon = y.prefix().size() + 2;
    auto mod = fn([&y, horizon](std::size_t n) { return brute_modulus(y, n, horizon); });
    std::vector<std::size_t> extra;
    for (int i = 0; i < 12; ++i) extra.push_back(gen::below(rng, 4));
    auto g = fn([extra](std::size_t m) { return m + (m < extra.size() ? extra[m] : 0); });
    std::size_t n = gen::below(rng, 5);
    std::size_t expected = 0;
    for (std::size_t k = 0;; ++k) {
      bool ok = true;
      for (std::size_t m = k; m <= horizon + 4 && ok; ++m) {
        std::size_t end = to_size(g(m));
        for (std::size_t i = m; i <= end && ok; ++i) {
          for (std::size_t j = m; j <= end && ok; ++j) ok = abs_value(y.at(i) - y.at(j)) < pow2(-static_cast<long>(n));
        }
      }
      if (ok) {
        expected = k;
        break;
      }
    }
    CHECK(pc_realizer(y, mod, g, n) == expected);
  }
}

TEST_CASE("protected splitting hand traces") {
  auto b_one = RationalSeq::constant_tail({}, 1);
  auto l1 = protected_split(RationalSeq::zero_tail({q(1)}), b_one, 1);
  REQUIRE(l1.stages.size() == 1);
  CHECK(l1.stages[0].case2 == 1);
  CHECK(l1.stages[0].t == std::optional<Rational>(q(1, 2)));
  CHECK(l1.stages[0].k == 5);
  CHECK(l1.stages[0].y == std::vector<Rational>{q(1, 5), q(-1, 5), q(1, 5), q(-1, 5), q(1, 5)});
  REQUIRE(l1.protections.size() == 1);
  CHECK(l1.protections.begin()->second.r == q(1, 2));

  auto l2 = protected_split(RationalSeq::zero_tail({q(1)}), RationalSeq::zero_tail({}), 1);
  CHECK(l2.stages[0].case3 == 1);
  CHECK_FALSE(l2.stages[0].t);
  CHECK(l2.stages[0].k == 1);
  CHECK(l2.stages[0].y == std::vector<Rational>{q(1)});
  CHECK(l2.protections.begin()->second.r == q(1, 2));

  auto l3 = protected_split(RationalSeq::zero_tail({q(0), q(1)}), dyadic_sequence(), 2);
  CHECK(l3.stages[0].skipped);
  CHECK(l3.stages[0].k == 1);
  CHECK(l3.stages[0].y == std::vector<Rational>{q(0)});

  auto dyadic = protected_split(RationalSeq::zero_tail({q(1)}), dyadic_sequence(), 1);
  CHECK(dyadic.stages[0].k == 5);
  CHECK(verify_dagger(l1).ok());
  CHECK(verify_dagger(l2).ok());
}

TEST_CASE("protected splitting invariants") {
  std::vector<std::pair<RationalSeq, RationalSeq>> inputs = {
      {RationalSeq::geometric_tail({}, 8, q(1, 64)), dyadic_sequence()},
      {RationalSeq::geometric_tail({}, q(1, 2), q(1, 32)), dyadic_sequence()},
      {RationalSeq::zero_tail({q(1), q(0), q(0), q(1, 640)}), dyadic_sequence()},
      {RationalSeq::zero_tail({q(1, 3), q(1, 3)}), RationalSeq::constant_tail({}, q(1, 3))},
      {RationalSeq::geometric_tail({}, 8, q(1, 64)), RationalSeq::geometric_tail({}, 3, q(1, 3))},
  };
  for (const auto& [x, b] : inputs) {
    auto ledger = protected_split(x, b, 11);
    auto longer = protected_split(x, b, 12);
    for (const auto& st : ledger.stages) {
      Rational total = 0;
      for (const auto& y : st.y) total += abs_value(y);
      CHECK(total == st.x);
      CHECK(st.k % 2 == 1);
      if (st.t && st.k >= 3) CHECK(st.x / static_cast<unsigned long>(st.k - 2) >= *st.t / 2);
      if (st.t) CHECK(st.x / static_cast<unsigned long>(st.k) < *st.t / 2);
    }
    for (const auto& [pair, p] : ledger.protections) {
      auto it = longer.protections.find(pair);
      REQUIRE(it != longer.protections.end());
      CHECK(it->second.r == p.r);
      CHECK(it->second.stage == p.stage);
    }
    CHECK(verify_dagger(ledger).ok());
    CHECK(verify_dagger(longer).ok());
  }
}

TEST_CASE("dagger verification catches tampering and certifies finite tails") {
  auto x = RationalSeq::zero_tail({q(1)});
  auto ledger = protected_split(x, dyadic_sequence(), 4);
  auto report = verify_dagger(ledger, Rational(0));
  CHECK(report.ok());
  CHECK(report.certified_limit == report.checked);
  ledger.stages[0].y[0] = q(1);
  CHECK_FALSE(verify_dagger(ledger).ok());
}

TEST_CASE("splitter budgets") {
  CHECK_THROWS_AS(protected_split(RationalSeq::zero_tail({q(1)}), dyadic_sequence(), 13), BudgetError);
  SplitOptions tight;
  tight.max_positions = 3;
  CHECK_THROWS_AS(protected_split(RationalSeq::zero_tail({q(1), q(1)}), dyadic_sequence(), 2, tight), BudgetError);
  CHECK_THROWS_AS(protected_split(RationalSeq::zero_tail({q(-1)}), dyadic_sequence(), 1), ValidationError);
}

TEST_CASE("permutations") {
  PermutationSpec p({2, 0, 1});
  CHECK(p(0) == 2);
  CHECK(p.inverse(2) == 0);
  CHECK(p(9) == 9);
  CHECK(p.covering_length(1) == 2);
  CHECK(p.covering_length(3) == 3);
  CHECK_THROWS_AS(PermutationSpec({0, 0}), ValidationError);
  CHECK(PermutationSpec::from_json(p.to_json())(1) == 0);

  auto ledger = protected_split(RationalSeq::zero_tail({q(1), q(1, 2)}), dyadic_sequence(), 3);
  auto z = ledger.flattened();
  gen::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> table(z.size());
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = i;
    std::shuffle(table.begin(), table.end(), rng);
    PermutationSpec perm(table);
    Rational a = 0, b = 0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      a += abs_value(z[k]);
      b += abs_value(ledger.z(perm(k)));
    }
    CHECK(a == b);
  }
}

TEST_CASE("case decision and F on the constant example") {
  auto a = constant_one();
  auto ledger = protected_split(difference_sequence(a), dyadic_sequence(), 2);
  CHECK(ledger.flattened() == std::vector<Rational>{q(1, 5), q(-1, 5), q(1, 5), q(-1, 5), q(1, 5), q(0)});
  RptInput in{ledger, PermutationSpec::identity(), constant_oracle(0)};
  auto c = decide_case(in, 4, 3);
  REQUIRE(std::holds_alternative<CaseI>(c));
  CHECK(std::get<CaseI>(c).i == 4);
  CHECK(std::get<CaseI>(c).j == 4);
  CHECK(std::holds_alternative<CaseII>(decide_case(in, 5, 3)));
  CHECK(std::holds_alternative<CaseII>(decide_case(in, 0, 0)));
  CHECK(f_a_bar(in, 3) == 5);
  CHECK(brute_f_a_bar(ledger, in.p, 3, 20) == 5);
  CHECK(f_a_bar(in, 0) == 0);
  RptInput swapped{ledger, PermutationSpec::swap(7, 9), constant_oracle(0)};
  CHECK(f_a_bar(swapped, 3) == 5);
}

TEST_CASE("F matches brute force on finite supports") {
  gen::Rng rng(9);
  for (int trial = 0; trial < 6; ++trial) {
    auto a = oracles::jump_sequence(rng);
    auto x = difference_sequence(a);
    auto ledger = protected_split(x, dyadic_sequence(), x.prefix().size());
    std::size_t support = ledger.flattened().size();
    auto f = fn([&a](std::size_t n) { return brute_modulus(a, n, a.prefix().size() + 2); });
    for (int perm = 0; perm < 5; ++perm) {
      auto table = oracles::shuffled(rng, support + 3);
      RptInput in{ledger, PermutationSpec(table), f};
      for (std::size_t n = 0; n < 5; ++n) CHECK(f_a_bar(in, n) == brute_f_a_bar(ledger, in.p, n, table.size() + 2));
    }
  }
}

TEST_CASE("modulus transfer") {
  auto one = constant_one();
  auto l1 = protected_split(difference_sequence(one), dyadic_sequence(), 2);
  auto fg = modulus_from_absz(l1, absz_modulus(l1));
  CHECK_FALSE(is_modulus(fg, one, 40));
  for (std::size_t n = 0; n < 20; ++n) CHECK(to_size(fg(n)) <= 1);

  auto geo = RationalSeq::geometric_tail({q(1, 8)}, q(1, 8), q(1, 64), q(8, 63));
  auto x = difference_sequence(geo);
  auto l2 = protected_split(x, dyadic_sequence(), 10);
  CHECK_FALSE(is_modulus(modulus_from_absz(l2, absz_modulus(l2)), geo, 40));
}
