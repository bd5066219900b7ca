#include <doctest.h>

#include "fixtures.hpp"
#include "gen.hpp"
#include "k2/anti_specker.hpp"
#include "k2/errors.hpp"
#include "k2/seq_code.hpp"

using namespace k2;
using fixtures::name_from;

namespace {

CoverAtom atom(std::initializer_list<std::pair<std::size_t, unsigned long>> entries, std::size_t n) {
  CoverAtom a;
  for (auto [i, v] : entries) a.sigma.set(i, Nat(v));
  a.n = n;
  return a;
}

Theta all_cylinders(std::size_t len, std::size_t n) {
  Theta out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << len); ++bits) {
    CoverAtom a;
    for (std::size_t i = 0; i < len; ++i) a.sigma.set(i, Nat(((bits >> i) & 1u) + 1));
    a.n = n;
    out.push_back(a);
  }
  return out;
}

// Brute-force point check: a point's canonical name lies in some atom.
bool point_covered(const Theta& theta, const MetricNaming& space, const FinPartialFn& cell) {
  for (const auto& a : theta) {
    if (space.classify(a.sigma, a.n, cell) == Membership::Inside) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("covers on small examples") {
  auto cantor = cantor_space();
  CHECK(covers(all_cylinders(1, 1), cantor).verdict == CoverVerdict::Covered);

  auto r = covers({atom({{0, 1}}, 3)}, cantor);
  CHECK(r.verdict == CoverVerdict::NotCovered);
  REQUIRE(r.witness);
  CHECK(r.witness->get(0) == Nat(2));

  auto two = finite_space(2);
  CHECK(covers({atom({{0, 1}}, 1), atom({{0, 2}}, 1)}, two).verdict == CoverVerdict::Covered);
  CHECK(covers({atom({{0, 1}}, 1)}, two).verdict == CoverVerdict::NotCovered);
  CHECK(covers({atom({}, 0)}, cantor).verdict == CoverVerdict::Covered);
  CHECK(covers(all_cylinders(2, 2), cantor, 1).verdict == CoverVerdict::InsufficientDepth);
}

TEST_CASE("covers agrees with an exhaustive cylinder check") {
  gen::Rng rng(11);
  auto cantor = cantor_space();
  for (int trial = 0; trial < 200; ++trial) {
    Theta theta;
    std::size_t atoms = gen::between(rng, 1, 5);
    for (std::size_t j = 0; j < atoms; ++j) {
      CoverAtom a;
      std::size_t len = gen::below(rng, 4);
      for (std::size_t i = 0; i < len; ++i) a.sigma.set(i, Nat(gen::between(rng, 1, 2)));
      a.n = gen::below(rng, 4);
      theta.push_back(a);
    }
    // Every atom is a union of cylinders of length max(|sigma|, n), so checking
    // all cylinders of length 4 decides the cover.
    bool expected = true;
    for (std::size_t bits = 0; bits < 16; ++bits) {
      FinPartialFn cell;
      for (std::size_t i = 0; i < 4; ++i) cell.set(i, Nat(((bits >> i) & 1u) + 1));
      if (!point_covered(theta, cantor, cell)) expected = false;
    }
    auto verdict = covers(theta, cantor).verdict;
    CHECK(verdict != CoverVerdict::InsufficientDepth);
    CHECK((verdict == CoverVerdict::Covered) == expected);
  }
}

TEST_CASE("theta json round trip") {
  Theta t = {atom({{0, 1}, {2, 2}}, 3), atom({}, 0)};
  CHECK(theta_from_json(theta_to_json(t)) == t);
  CHECK_THROWS_AS(theta_from_json(Json::array()), ValidationError);
  CHECK_THROWS_AS(atom_from_json(Json::parse(R"({"sigma":[[0,1],[0,2]],"n":1})")), ValidationError);
}

TEST_CASE("subcovers") {
  Theta t = {atom({{0, 1}, {1, 1}}, 4), atom({{0, 2}}, 2)};
  Theta listed = {atom({{0, 1}}, 1), atom({{0, 2}}, 2)};
  auto listing = [&listed](std::size_t i) -> std::optional<CoverAtom> {
    if (i < listed.size()) return listed[i];
    return std::nullopt;
  };
  CHECK(subcovers(t, listing, 10));
  auto own = [&t](std::size_t i) -> std::optional<CoverAtom> {
    if (i < t.size()) return t[i];
    return std::nullopt;
  };
  CHECK(subcovers(t, own, 10));
  auto unrelated = [](std::size_t) -> std::optional<CoverAtom> { return atom({{0, 3}}, 0); };
  CHECK_FALSE(subcovers(t, unrelated, 100));
}

TEST_CASE("builtin bases cover and subcover the cylinder coverings") {
  auto cantor = cantor_space();
  auto b = builtin_base(cantor);
  for (std::size_t k = 0; k <= 6; ++k) {
    auto t = b->theta(k);
    REQUIRE(t);
    CHECK(t->size() == (std::size_t{1} << k));
    CHECK(covers(*t, cantor).verdict == CoverVerdict::Covered);
  }
  CHECK(covers(*b->theta(2), cantor, 2).verdict == CoverVerdict::Covered);
  Theta length3 = all_cylinders(3, 3);
  auto listing = [&length3](std::size_t i) -> std::optional<CoverAtom> {
    if (i < length3.size()) return length3[i];
    return std::nullopt;
  };
  CHECK(subcovers(*b->theta(3), listing, 100));

  auto two = finite_space(2);
  auto bf = builtin_base(two);
  for (std::size_t k = 0; k <= 4; ++k) CHECK(covers(*bf->theta(k), two).verdict == CoverVerdict::Covered);
  CHECK_THROWS_AS(builtin_base(nat_naming()), ValidationError);
}

TEST_CASE("product atoms factor membership") {
  auto ax = atom({{0, 1}}, 3);
  auto ay = atom({{0, 2}, {1, 2}}, 5);
  auto p = product_atom(ax, ay);
  CHECK(p.n == 3);
  CHECK(p.sigma == interleave(ax.sigma, ay.sigma));
  CHECK(product_atom(atom({}, 2), atom({}, 2)) == atom({}, 2));

  auto cantor = cantor_space();
  auto z = product_metric_naming(cantor, cantor);
  gen::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = gen::below(rng, 4);
    CoverAtom x, y;
    std::size_t lx = gen::below(rng, 3), ly = gen::below(rng, 3);
    for (std::size_t i = 0; i < lx; ++i) x.sigma.set(i, Nat(gen::between(rng, 1, 2)));
    for (std::size_t i = 0; i < ly; ++i) y.sigma.set(i, Nat(gen::between(rng, 1, 2)));
    x.n = y.n = n;
    FinPartialFn cx, cy;
    for (std::size_t i = 0; i < 5; ++i) {
      cx.set(i, Nat(gen::between(rng, 1, 2)));
      cy.set(i, Nat(gen::between(rng, 1, 2)));
    }
    bool left = cantor.classify(x.sigma, n, cx) == Membership::Inside;
    bool right = cantor.classify(y.sigma, n, cy) == Membership::Inside;
    auto both = product_atom(x, y);
    CHECK((z.classify(both.sigma, both.n, interleave(cx, cy)) == Membership::Inside) == (left && right));
  }
}

TEST_CASE("product base") {
  auto cantor = cantor_space();
  auto cc = product_base(builtin_base(cantor), builtin_base(cantor));
  auto z = product_metric_naming(cantor, cantor);
  for (std::size_t e = 0; e < 24; ++e) {
    auto t = cc->theta(e);
    if (t) CHECK(covers(*t, z).verdict == CoverVerdict::Covered);
  }

  auto two = finite_space(2);
  auto ff = product_base(builtin_base(two), builtin_base(two));
  auto t0 = ff->theta(0);
  REQUIRE(t0);
  CHECK(t0->size() == 4);
  auto z2 = product_metric_naming(two, two);
  for (unsigned long a = 1; a <= 2; ++a) {
    for (unsigned long b = 1; b <= 2; ++b) {
      FinPartialFn point = interleave(FinPartialFn::from_sequence({a}), FinPartialFn::from_sequence({b}));
      CHECK(point_covered(*t0, z2, point));
    }
  }

  // A product covering built from component coverings is subcovered.
  Theta target;
  Theta tx = *builtin_base(two)->theta(1);
  Theta ty = *builtin_base(two)->theta(2);
  for (const auto& ax : tx) {
    for (const auto& ay : ty) target.push_back(product_atom(ax, ay));
  }
  bool found = false;
  for (std::size_t e = 0; e < 200 && !found; ++e) {
    auto t = ff->theta(e);
    if (!t) continue;
    auto listing = [&t](std::size_t i) -> std::optional<CoverAtom> {
      if (i < t->size()) return (*t)[i];
      return std::nullopt;
    };
    found = subcovers(target, listing, 100);
  }
  CHECK(found);
}

TEST_CASE("answer codec") {
  CHECK_FALSE(decode_answer(0));
  auto a = decode_answer(encode_answer(3, 7));
  REQUIRE(a);
  CHECK(a->n == 3);
  CHECK(a->m == 7);
  CHECK_THROWS_AS(decode_answer(encode_sequence({1, 2, 3}) + 1), ValidationError);
}

TEST_CASE("realizer from base on the basic examples") {
  auto cantor = cantor_space();
  auto m = realizer_from_base(builtin_base(cantor));
  auto ev = m->evaluate(NameSequence::all_star(), formulas::avoid_const(0, 0, 0), Fuel{8});
  REQUIRE(ev.has_value());
  CHECK(ev.value == 0);

  NameSequence one({name_from({1, 2}, 1)});
  ev = m->evaluate(one, formulas::avoid_const(0, 1, 0), Fuel{8});
  REQUIRE(ev.has_value());
  CHECK(ev.value == 1);
  CHECK(ev.bound == std::optional<std::size_t>(1));

  ev = m->evaluate(one, constant_oracle(0), Fuel{8});
  CHECK(ev.status == Evaluation::Status::Exhausted);
  CHECK(ev.slots_tried == 8);

  ev = m->evaluate(one, constant_oracle(encode_sequence({1, 2, 3}) + 1), Fuel{8});
  CHECK(ev.status == Evaluation::Status::Malformed);

  // Overshooting bounds still scan down to the exact value.
  NameSequence gap({name_from({2}, 1), PointedSpace::star_name()});
  ev = m->evaluate(gap, formulas::avoid_const(0, 9, 0), Fuel{8});
  REQUIRE(ev.has_value());
  CHECK(ev.value == 1);
}

TEST_CASE("realizer from base is exact on random eventually-star sequences") {
  gen::Rng rng(21);
  for (auto space : {cantor_space(), finite_space(3)}) {
    PointedSpace pointed(space);
    auto m = realizer_from_base(builtin_base(space));
    for (int trial = 0; trial < 20; ++trial) {
      auto seq = fixtures::eventually_star(rng, space, 6);
      std::size_t expected = fixtures::last_real_plus_one(seq);
      for (const auto& h : fixtures::avoidance_names(pointed, seq, 5)) {
        CHECK(check_avoidance(pointed, seq, h, 6).valid);
        auto ev = m->evaluate(seq, h, Fuel{12});
        REQUIRE(ev.has_value());
        CHECK(ev.value == expected);
        CHECK(*ev.bound >= expected);
      }
    }
  }
}

TEST_CASE("avoidance names") {
  auto cantor = cantor_space();
  PointedSpace pointed(cantor);
  auto all_star = NameSequence::all_star();
  auto h = avoidance_realizer_concrete(pointed, all_star, 0, std::nullopt);
  CHECK(decode_answer(h.on_sequence({}))->m == 0);
  CHECK(check_avoidance(pointed, all_star, h, 3).valid);

  NameSequence one({name_from({1, 1, 2}, 1)});
  h = avoidance_realizer_concrete(pointed, one, 1, std::nullopt);
  CHECK(decode_answer(h.on_sequence({}))->m == 1);
  CHECK(check_avoidance(pointed, one, h, 3).valid);
  CHECK_THROWS_AS(avoidance_realizer_concrete(pointed, one, 0, std::nullopt), ValidationError);
  CHECK_FALSE(check_avoidance(pointed, one, formulas::avoid_const(0, 0, 0), 3).valid);

  // Repeating the name 1,1,1,... forever: cylinders starting with 2 stay at distance 1,
  // cylinders 1,2 at distance 1/2 >= 1/4.
  NameSequence cyc({}, {name_from({}, 1)});
  CHECK_THROWS_AS(avoidance_realizer_concrete(pointed, cyc, std::nullopt, std::nullopt), ValidationError);
  AvoidanceWitness w;
  w.entries.push_back({{2}, 0, 0});
  w.entries.push_back({{1, 2}, 2, 0});
  h = avoidance_realizer_concrete(pointed, cyc, std::nullopt, w);
  auto check = check_avoidance(pointed, cyc, h, 4);
  CHECK(check.valid);
  CHECK(check.answered == 2);
  CHECK(check.unanswered == 4);

  AvoidanceWitness bad;
  bad.entries.push_back({{1, 1}, 3, 0});
  CHECK_THROWS_AS(avoidance_realizer_concrete(pointed, cyc, std::nullopt, bad), ValidationError);
}

TEST_CASE("base from realizer round trip") {
  for (auto space : {cantor_space(), finite_space(2)}) {
    PointedSpace pointed(space);
    auto m = realizer_from_base(builtin_base(space));
    ProbeOptions options;
    options.probe_budget = 80;
    auto report = base_from_realizer(*m, pointed, options);
    REQUIRE(report.emitted > 0);
    CHECK(report.budget_exhausted);
    for (std::size_t i = 0; i < *report.base->size(); ++i) {
      CHECK(covers(*report.base->theta(i), space).verdict == CoverVerdict::Covered);
    }
    auto again = realizer_from_base(report.base);
    gen::Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
      auto seq = fixtures::eventually_star(rng, space, 5);
      for (const auto& h : fixtures::avoidance_names(pointed, seq, 4)) {
        auto a = m->evaluate(seq, h, Fuel{12});
        auto b = again->evaluate(seq, h, Fuel{200});
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(a.value == b.value);
      }
    }
  }
}

TEST_CASE("product anti-specker") {
  auto cantor = cantor_space();
  auto two = finite_space(2);
  auto z = product_metric_naming(cantor, two);
  PointedSpace pointed(z);
  ProbeOptions options;
  options.probe_budget = 40;
  auto m = product_anti_specker(*realizer_from_base(builtin_base(cantor)), *realizer_from_base(builtin_base(two)),
                                options);
  CHECK(m->provenance() == "product");
  auto reference = realizer_from_base(product_base(builtin_base(cantor), builtin_base(two)));

  auto ev = m->evaluate(NameSequence::all_star(), formulas::avoid_const(0, 0, 0), Fuel{64});
  REQUIRE(ev.has_value());
  CHECK(ev.value == 0);

  gen::Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    auto seq = fixtures::eventually_star(rng, z, 4);
    std::size_t expected = fixtures::last_real_plus_one(seq);
    for (const auto& h : fixtures::avoidance_names(pointed, seq, 3)) {
      auto a = m->evaluate(seq, h, Fuel{4000});
      auto b = reference->evaluate(seq, h, Fuel{4000});
      REQUIRE(a.has_value());
      REQUIRE(b.has_value());
      CHECK(a.value == expected);
      CHECK(b.value == expected);
      CHECK(covers(*a.certificate, z).verdict == CoverVerdict::Covered);
    }
  }

  struct Silent final : AntiSpeckerRealizer {
    MetricNaming s = cantor_space();
    Evaluation evaluate(const NameSequence&, const Oracle&, Fuel) const override { return {}; }
    std::string provenance() const override { return "silent"; }
    const MetricNaming& space() const override { return s; }
  } silent;
  options.probe_budget = 4;
  CHECK_THROWS_AS(product_anti_specker(silent, silent, options), BudgetError);
}

TEST_CASE("transport along a digit swap") {
  auto cantor = cantor_space();
  PointedSpace pointed(cantor);
  // <k, f...> -> 3 - f(k) + 1: swaps the digits 1 and 2.
  Oracle swap = sequence_oracle(
      [](std::span<const Nat> s) -> Nat {
        if (s.empty() || !s[0].fits_ulong_p() || s.size() < s[0].get_ui() + 2) return 0;
        return Nat(3 - s[s[0].get_ui() + 1] + 1);
      },
      "swap");
  Oracle id_track = formulas::pointwise_tracking({}, 0);
  auto m = realizer_from_base(builtin_base(cantor));
  auto same = transport_realizer(m, id_track, id_track, cantor, Fuel{32});
  auto swapped = transport_realizer(m, swap, swap, cantor, Fuel{32});
  CHECK(swapped->provenance() == "transported");

  auto ev = swapped->evaluate(NameSequence::all_star(), formulas::avoid_const(0, 0, 0), Fuel{8});
  REQUIRE(ev.has_value());
  CHECK(ev.value == 0);

  gen::Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    auto seq = fixtures::eventually_star(rng, cantor, 5);
    std::size_t expected = fixtures::last_real_plus_one(seq);
    for (const auto& h : fixtures::avoidance_names(pointed, seq, 3)) {
      for (const auto& r : {same, swapped}) {
        auto e = r->evaluate(seq, h, Fuel{12});
        REQUIRE(e.has_value());
        CHECK(e.value == expected);
      }
    }
  }
}

TEST_CASE("direct scan realizer") {
  auto r = direct_scan_realizer(cantor_space());
  NameSequence seq({PointedSpace::star_name(), name_from({1}, 2)});
  auto ev = r->evaluate(seq, constant_oracle(0), Fuel{10});
  REQUIRE(ev.has_value());
  CHECK(ev.value == 2);
  CHECK_FALSE(r->evaluate(NameSequence({}, {name_from({}, 1)}), constant_oracle(0), Fuel{10}).has_value());
}
