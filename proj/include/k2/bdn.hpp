#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "k2/apply.hpp"
#include "k2/json_io.hpp"
#include "k2/numeric.hpp"
#include "k2/oracle.hpp"

namespace k2 {

/// An intensional name h for g: h(fbar(t)) = n + 1 asserts g(f'(k)) < k for
/// every f' extending fbar(t) and every k >= n.

/// With f = identity: the least t with h(fbar(t)) > 0, n = h(fbar(t)) - 1,
/// result max(t, n). Spot-checks g(k) < k for k in [n, n + 64) on the identity.
/// Throws BudgetError when h stays silent for `fuel` prefixes.
Nat extract_bound(const Oracle& g, const Oracle& h, Fuel fuel);

/// h answering <bound> + 1 on every prefix of length >= t.
/// Throws ValidationError unless g(m) < bound for all m < horizon.
Oracle make_valid_realizer(const Oracle& g, const Nat& bound, std::size_t t = 0, std::size_t horizon = 1000);

struct ValidityCounterexample {
  std::size_t sample = 0;
  std::size_t k = 0;
  Nat g_value;
};

/// For each f in `samples`: n = h * f, then g(f(k)) < k for every k in [n, horizon].
/// An f on which h stays silent within `fuel` counts as a counterexample at k = horizon.
std::optional<ValidityCounterexample> check_intensional(const Oracle& g, const Oracle& h,
                                                        const std::vector<Oracle>& samples, std::size_t horizon,
                                                        Fuel fuel = Fuel{4096});

/// g1 and h1 built from the candidate bound k and segment length a.
struct AdversaryPair {
  Nat k;
  Nat a;
  /// 0 below a, k + 1 from a on.
  Oracle g1;
  /// 0 if lh <= k + 1; 2 if the first k + 2 values are < a; a + 2 otherwise.
  Oracle h1;

  static AdversaryPair build(const Nat& k, const Nat& a);
  /// 1 if f(0), ..., f(k+1) are all < a, else a + 1.
  Nat F1(const Oracle& f) const;
  Json to_json() const;
};

/// One tracked evaluation of (alpha . h) * g.
struct BdnRun {
  std::string label;
  std::string h;
  std::string g;
  std::optional<Nat> raw;
  std::optional<Nat> decoded;
  std::optional<std::size_t> firing_index;
  UsageMeter h_usage;
  UsageMeter g_usage;
  std::size_t alpha_queries = 0;

  Json to_json() const;
};

struct AdversaryReport {
  enum class Verdict { Refuted, Inconclusive, Malformed };

  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  std::size_t fuel = 0;
  std::optional<Nat> k;
  std::optional<Nat> a;
  std::optional<AdversaryPair> pair;
  std::vector<BdnRun> runs;

  Json to_json() const;
};

std::string to_string(AdversaryReport::Verdict v);

/// Runs alpha against g = 0 with h0 = 2 everywhere, then with the threshold
/// name h_k, then against (g1, h1). Every application runs with `fuel`.
AdversaryReport adversary_refute(const Oracle& alpha, Fuel fuel);

}  // namespace k2
