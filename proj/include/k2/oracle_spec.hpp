#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "k2/json_io.hpp"
#include "k2/oracle.hpp"

namespace k2 {

// Registry formulas. Associates read their argument as a decoded sequence.
namespace formulas {

/// k -> k + add.
Oracle successor(const Nat& add);
/// k -> min(k, max).
Oracle clamp(const Nat& max);
/// k -> k mod m.
Oracle modulo(const Nat& m);
/// k -> pattern[k mod |pattern|].
Oracle periodic(std::vector<Nat> pattern);
/// sigma -> sigma[index] + add when |sigma| > index, else 0.
Oracle element_plus(std::size_t index, const Nat& add);
/// sigma -> value when |sigma| >= min_length, else 0.
Oracle prefix_threshold(std::size_t min_length, const Nat& value);
/// Tracking of the pointwise map v -> map(v) + add: on <k, f(0), ..., f(L-2)>
/// answers map(f(k)) + add + 1 once L >= k + 2. Unlisted values map to themselves.
Oracle pointwise_tracking(std::map<Nat, Nat> map, const Nat& add);
/// Avoidance answer <n, m> + 1 on every sequence of length >= depth.
Oracle avoid_const(const Nat& n, const Nat& m, std::size_t depth);

struct AvoidEntry {
  std::vector<Nat> prefix;
  Nat n;
  Nat m;
};
/// Answers <n, m> + 1 for the first entry whose prefix is a prefix of sigma.
Oracle avoid_prefixes(std::vector<AvoidEntry> entries);

/// A finite strategy posing as an extensional BD-N realizer. On
/// <c, h(0), ..., h(L-2)>: 0 until h_reads values of h are present, 1 while
/// decode(c) is shorter than g_len, then M + 2 with
/// M = base + [add_max_g] max(decode(c)) + h_weight * sum of the h values read.
struct BdnCandidate {
  std::size_t h_reads = 1;
  std::size_t g_len = 1;
  Nat base = 0;
  bool add_max_g = false;
  Nat h_weight = 0;
};
Oracle bdn_candidate(const BdnCandidate& c);

}  // namespace formulas

/// {"table": [[i, v], ...], "tail": {"kind": "constant", "value": v}
///                                 | {"kind": "registry", "name": ..., "params": {...}}}
Oracle oracle_from_json(const Json& spec);

/// Command-line form: "const:V", "id", "registry:NAME" or a JSON oracle spec.
Oracle parse_oracle_arg(std::string_view text);

Oracle registry_oracle(const std::string& name, const Json& params);
std::vector<std::string> registry_names();

}  // namespace k2
