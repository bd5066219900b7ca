#include "k2/bdn.hpp"

#include "k2/errors.hpp"
#include "k2/oracle_spec.hpp"
#include "k2/seq_code.hpp"

namespace k2 {

namespace {

constexpr std::size_t kSpotCheck = 64;
constexpr std::size_t kTranscriptCap = 64;

Json meter_json(const UsageMeter& m) {
  Json entries = Json::array();
  for (const auto& [i, v] : m.transcript) {
    if (entries.size() == kTranscriptCap) break;
    entries.push_back(Json::array({nat_json(i), nat_json(v)}));
  }
  return {{"queries", m.queries},
          {"segment", nat_json(m.segment_length())},
          {"transcript", entries},
          {"truncated", m.transcript.size() > kTranscriptCap}};
}

Json opt_nat(const std::optional<Nat>& v) { return v ? nat_json(*v) : Json(nullptr); }

/// h_k: 0 if lh <= k + 1, else 2.
Oracle threshold_name(const Nat& k) {
  return sequence_oracle([k](std::span<const Nat> s) -> Nat { return nat(s.size()) <= k + 1 ? 0 : 2; },
                         "bdn_threshold(" + k.get_str() + ")");
}

/// Evaluates (alpha . h) * g with h and g tracked; `replay_ok` is false when
/// alpha answers differently on a second query of an index it already answered.
BdnRun tracked_run(const Oracle& alpha, std::string label, const Oracle& h, const Oracle& g, Fuel fuel,
                   bool& replay_ok) {
  auto ta = with_usage_tracking(alpha);
  auto th = with_usage_tracking(h);
  auto tg = with_usage_tracking(g);
  StarResult r = star(bullet(ta.oracle, th.oracle), tg.oracle, fuel, fuel);
  BdnRun run;
  run.label = std::move(label);
  run.h = h.describe();
  run.g = g.describe();
  if (r.result.has_value()) {
    run.decoded = r.result.value();
    run.raw = *run.decoded + 1;
  }
  run.firing_index = r.firing_index;
  run.h_usage = *th.meter;
  run.g_usage = *tg.meter;
  run.alpha_queries = ta.meter->queries;
  replay_ok = true;
  for (const auto& [i, v] : ta.meter->transcript) {
    if (alpha(i) != v) {
      replay_ok = false;
      break;
    }
  }
  return run;
}

}  // namespace

Nat extract_bound(const Oracle& g, const Oracle& h, Fuel fuel) {
  StarResult r = star(h, identity_oracle(), fuel);
  const Nat& n = r.result.value();
  Nat t = nat(*r.firing_index);
  for (std::size_t j = 0; j < kSpotCheck; ++j) {
    Nat k = n + j;
    if (g(k) >= k) {
      throw ValidationError("extract_bound: h is not a valid name for g (g(" + k.get_str() +
                            ") >= " + k.get_str() + ")");
    }
  }
  return std::max(t, n);
}

Oracle make_valid_realizer(const Oracle& g, const Nat& bound, std::size_t t, std::size_t horizon) {
  for (std::size_t m = 0; m < horizon; ++m) {
    Nat v = g(m);
    if (v >= bound) {
      throw ValidationError("make_valid_realizer: g(" + std::to_string(m) + ") = " + v.get_str() +
                            " is not below " + bound.get_str());
    }
  }
  return formulas::prefix_threshold(t, bound + 1);
}

std::optional<ValidityCounterexample> check_intensional(const Oracle& g, const Oracle& h,
                                                        const std::vector<Oracle>& samples, std::size_t horizon,
                                                        Fuel fuel) {
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Oracle& f = samples[s];
    StarResult r = star(h, f, fuel);
    if (!r.result.has_value()) return ValidityCounterexample{s, horizon, 0};
    const Nat& n = r.result.value();
    if (n > horizon) continue;
    for (std::size_t k = to_size(n); k <= horizon; ++k) {
      Nat v = g(f(k));
      if (v >= k) return ValidityCounterexample{s, k, v};
    }
  }
  return std::nullopt;
}

AdversaryPair AdversaryPair::build(const Nat& k, const Nat& a) {
  std::string tag = "(k=" + k.get_str() + ", a=" + a.get_str() + ")";
  Oracle g1 = function_oracle([k, a](const Nat& n) -> Nat { return n < a ? Nat(0) : Nat(k + 1); }, "bdn_g1" + tag);
  Oracle h1 = sequence_oracle(
      [k, a](std::span<const Nat> s) -> Nat {
        if (nat(s.size()) <= k + 1) return 0;
        std::size_t head = to_size(k) + 2;
        for (std::size_t i = 0; i < head; ++i) {
          if (s[i] >= a) return a + 2;
        }
        return 2;
      },
      "bdn_h1" + tag);
  return AdversaryPair{k, a, std::move(g1), std::move(h1)};
}

Nat AdversaryPair::F1(const Oracle& f) const {
  std::size_t head = to_size(k) + 2;
  for (std::size_t i = 0; i < head; ++i) {
    if (f(i) >= a) return a + 1;
  }
  return 1;
}

Json AdversaryPair::to_json() const {
  return {{"k", nat_json(k)},
          {"a", nat_json(a)},
          {"g1", {{"below_a", 0}, {"from_a", nat_json(k + 1)}}},
          {"h1", {{"short", 0}, {"head_below_a", 2}, {"otherwise", nat_json(a + 2)}, {"head_length", nat_json(k + 2)}}},
          {"F1", {{"head_below_a", 1}, {"otherwise", nat_json(a + 1)}}}};
}

Json BdnRun::to_json() const {
  return {{"label", label},
          {"h", h},
          {"g", g},
          {"raw", opt_nat(raw)},
          {"decoded", opt_nat(decoded)},
          {"firing_index", firing_index ? Json(*firing_index) : Json(nullptr)},
          {"alpha_queries", alpha_queries},
          {"h_usage", meter_json(h_usage)},
          {"g_usage", meter_json(g_usage)}};
}

std::string to_string(AdversaryReport::Verdict v) {
  switch (v) {
    case AdversaryReport::Verdict::Refuted:
      return "refuted";
    case AdversaryReport::Verdict::Inconclusive:
      return "inconclusive";
    case AdversaryReport::Verdict::Malformed:
      return "malformed";
  }
  return "?";
}

Json AdversaryReport::to_json() const {
  Json out = {{"verdict", to_string(verdict)},
              {"reason", reason},
              {"fuel", fuel},
              {"k", opt_nat(k)},
              {"a", opt_nat(a)},
              {"pair", pair ? pair->to_json() : Json(nullptr)}};
  Json rs = Json::array();
  for (const auto& r : runs) rs.push_back(r.to_json());
  out["runs"] = rs;
  return out;
}

AdversaryReport adversary_refute(const Oracle& alpha, Fuel fuel) {
  AdversaryReport rep;
  rep.fuel = fuel.budget;
  Oracle zero = constant_oracle(0);
  bool replay_ok = true;

  auto exhausted = [&](const BdnRun& run) {
    rep.verdict = AdversaryReport::Verdict::Inconclusive;
    rep.reason = run.label + " evaluation exhausted its fuel";
    return rep;
  };
  auto nondeterministic = [&](const BdnRun& run) {
    rep.verdict = AdversaryReport::Verdict::Malformed;
    rep.reason = "alpha answered a repeated query differently during the " + run.label + " evaluation";
    return rep;
  };

  rep.runs.push_back(tracked_run(alpha, "bootstrap", constant_oracle(2), zero, fuel, replay_ok));
  if (!replay_ok) return nondeterministic(rep.runs.back());
  if (!rep.runs.back().decoded) return exhausted(rep.runs.back());
  Nat k = *rep.runs.back().decoded;
  rep.k = k;

  rep.runs.push_back(tracked_run(alpha, "threshold", threshold_name(k), zero, fuel, replay_ok));
  if (!replay_ok) return nondeterministic(rep.runs.back());
  if (!rep.runs.back().decoded) return exhausted(rep.runs.back());
  bool extensional = *rep.runs.back().decoded == k;

  Nat a = k + 1;
  for (const auto& run : rep.runs) a = std::max(a, run.g_usage.segment_length());
  a = std::max(a, rep.runs.back().h_usage.segment_length());
  rep.a = a;
  rep.pair = AdversaryPair::build(k, a);

  rep.runs.push_back(tracked_run(alpha, "adversary", rep.pair->h1, rep.pair->g1, fuel, replay_ok));
  if (!replay_ok) return nondeterministic(rep.runs.back());
  const BdnRun& last = rep.runs.back();

  if (!extensional) {
    rep.verdict = AdversaryReport::Verdict::Refuted;
    rep.reason = "not extensional: two names of the constant-1 functional gave " + k.get_str() + " and " +
                 rep.runs[1].decoded->get_str();
    return rep;
  }
  if (!last.decoded) return exhausted(last);
  if (*last.decoded == k) {
    rep.verdict = AdversaryReport::Verdict::Refuted;
    rep.reason = "answered " + k.get_str() + " for (F1, g1), but g1(" + a.get_str() + ") = " + Nat(k + 1).get_str();
    return rep;
  }
  rep.verdict = AdversaryReport::Verdict::Malformed;
  rep.reason = "continuity violated: identical observed prefixes gave " + k.get_str() + " and " +
               last.decoded->get_str();
  return rep;
}

}  // namespace k2
