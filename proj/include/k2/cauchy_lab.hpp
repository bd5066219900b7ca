#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "k2/apply.hpp"
#include "k2/json_io.hpp"
#include "k2/numeric.hpp"
#include "k2/oracle.hpp"

namespace k2 {

/// Finite prefix followed by a tail rule, indices counted from the end of the prefix:
///   zero       x_{L+j} = 0
///   constant   x_{L+j} = value
///   geometric  x_{L+j} = limit + (base - limit) * ratio^(j+1), |ratio| < 1
class RationalSeq {
 public:
  enum class Tail { Zero, Constant, Geometric };

  struct Flags {
    bool nonneg = false;
    bool increasing = false;
    bool infinitely_positive = false;
  };

  static RationalSeq zero_tail(std::vector<Rational> prefix);
  static RationalSeq constant_tail(std::vector<Rational> prefix, Rational value);
  static RationalSeq geometric_tail(std::vector<Rational> prefix, Rational base, Rational ratio, Rational limit = 0);
  /// {"prefix": ["1/2", ...], "tail": {"kind": "zero" | "constant" | "geometric", ...},
  ///  "flags": ["nonneg", "increasing", "infinitely_positive"]}
  static RationalSeq from_json(const Json& spec);
  Json to_json() const;

  Rational at(std::size_t i) const;
  std::vector<Rational> take(std::size_t n) const;
  const std::vector<Rational>& prefix() const { return prefix_; }
  Tail tail() const { return tail_; }
  std::optional<Rational> limit() const;
  /// Whether x_i = 0 for every i >= from.
  bool zero_from(std::size_t from) const;
  /// sum_{i >= from} |x_i| in closed form; nullopt when it diverges.
  std::optional<Rational> abs_tail_sum(std::size_t from) const;

  /// Declares flags; throws ValidationError if the prefix or tail rule refutes one.
  RationalSeq with_flags(Flags flags) const;
  const Flags& flags() const { return flags_; }

 private:
  std::vector<Rational> prefix_;
  Tail tail_ = Tail::Zero;
  Rational value_;
  Rational base_;
  Rational ratio_;
  Rational limit_;
  Flags flags_;
};

/// x_0 = a_0, x_{i+1} = a_{i+1} - a_i.
RationalSeq difference_sequence(const RationalSeq& a);

/// max - min over x_lo, ..., x_hi.
Rational diam_window(const RationalSeq& x, std::size_t lo, std::size_t hi);

struct ModulusCounterexample {
  std::size_t n = 0;
  std::size_t i = 0;
  std::size_t j = 0;
};

/// forall n <= horizon, i, j in [f(n), horizon]: |x_i - x_j| < 2^-n.
std::optional<ModulusCounterexample> is_modulus(const Oracle& f, const RationalSeq& x, std::size_t horizon);

struct KConstraint {
  std::vector<std::size_t> sigma;
  std::vector<Rational> xs;
};

struct KWitness {
  /// Set when x disagrees with xs at this index.
  std::optional<std::size_t> mismatch;
  std::optional<ModulusCounterexample> oscillation;
};

/// nullopt when x lies in K(sigma, xs) as far as the horizon shows.
std::optional<KWitness> k_consistent(const KConstraint& k, const RationalSeq& x, std::size_t horizon);

/// mu k. forall m >= k: diam{x_m, ..., x_g(m)} < 2^-n, using K = f(n+1) as the search bound.
std::size_t pc_realizer(const RationalSeq& x, const Oracle& f, const Oracle& g, std::size_t n);

class PermutationSpec {
 public:
  PermutationSpec() = default;
  /// p(i) = table[i] below the table length, identity beyond. Throws unless a bijection.
  explicit PermutationSpec(std::vector<std::size_t> table);
  static PermutationSpec identity() { return {}; }
  static PermutationSpec swap(std::size_t i, std::size_t j);
  static PermutationSpec from_json(const Json& spec);
  Json to_json() const;

  std::size_t operator()(std::size_t i) const;
  std::size_t inverse(std::size_t i) const;
  std::size_t support() const { return table_.size(); }
  /// Least k0 such that {p(0), ..., p(k0 - 1)} contains [0, n).
  std::size_t covering_length(std::size_t n) const;

 private:
  std::vector<std::size_t> table_;
  std::vector<std::size_t> inverse_;
};

struct StageRecord {
  std::size_t stage = 0;
  Rational x;
  bool skipped = false;
  std::size_t case1 = 0;
  std::size_t case2 = 0;
  std::size_t case3 = 0;
  /// nullopt for t = +infinity.
  std::optional<Rational> t;
  std::size_t k = 1;
  std::vector<Rational> y;
};

struct Protection {
  Rational r;
  std::size_t stage = 0;
};

/// Protected pair (A, n); A is a bitmask over the flattened positions of B.
using ProtectedPair = std::pair<std::uint64_t, std::size_t>;

struct SplitterLedger {
  RationalSeq x;
  RationalSeq b;
  std::vector<StageRecord> stages;
  std::map<ProtectedPair, Protection> protections;

  std::size_t stages_done() const { return stages.size(); }
  /// Flattened start of block i; blocks past the computed stages count as
  /// single zeros when x vanishes from there on.
  std::size_t block_start(std::size_t i) const;
  /// z_k, the flattened y values; zero past the computed blocks when x vanishes.
  Rational z(std::size_t k) const;
  std::vector<Rational> flattened() const;
  Json to_json() const;
};

struct SplitOptions {
  std::size_t stage_cap = 12;
  /// Largest |B_s| materialized at a positive stage.
  std::size_t max_positions = 20;
};

/// Runs stages 0..stages-1 of the protected splitting of x against b.
/// Throws InvariantError (with the ledger dump) if a stage ends with a protected
/// pair not strictly cleared, BudgetError past the caps.
SplitterLedger protected_split(const RationalSeq& x, const RationalSeq& b, std::size_t stages,
                            const SplitOptions& options = {});

/// 2^-n.
RationalSeq dyadic_sequence();

/// Projected number of pairs (A, n) classified at a stage with this many positions.
double projected_pairs(std::size_t positions, std::size_t stage);

struct DaggerReport {
  std::size_t checked = 0;
  std::vector<std::string> discrepancies;
  /// Pairs whose limit inequality is certified by clearance - tail > 0.
  std::size_t certified_limit = 0;
  bool ok() const { return discrepancies.empty(); }
  Json to_json() const;
};

/// Recomputes every protected sum from the block values and checks strict
/// clearance; with a tail bound, certifies the limit inequality where possible.
DaggerReport verify_dagger(const SplitterLedger& ledger, std::optional<Rational> tail_bound = std::nullopt);

/// The z-sequence, splitting data and modulus for the windows of a rearranged series.
struct RptInput {
  const SplitterLedger& ledger;
  PermutationSpec p;
  Oracle f;
};

struct CaseI {
  std::size_t i = 0;
  std::size_t j = 0;
};

struct CaseII {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  std::size_t k0 = 0;
};

using CaseDecision = std::variant<CaseI, CaseII>;

/// Dovetails a search for a window [i, j], i >= m, with |sum z_p(k)| >= 2^-n
/// against a certificate n0 >= n, n1 = f(n0+1)+1, k0 covering blocks < n1,
/// with every window inside [m, k0) clearing 2^-n by 2^-n0.
CaseDecision decide_case(const RptInput& in, std::size_t m, std::size_t n, Fuel rounds = Fuel{4096});

/// Least m for which decide_case answers Case II.
std::size_t f_a_bar(const RptInput& in, std::size_t n, Fuel rounds = Fuel{4096});

/// f_g(n) = least block index i with block_start(i+1) >= g(n).
Oracle modulus_from_absz(const SplitterLedger& ledger, const Oracle& g);

/// Exact modulus of the partial sums of sum |z_k|, from the closed-form tail of x.
Oracle absz_modulus(const SplitterLedger& ledger);

}  // namespace k2
