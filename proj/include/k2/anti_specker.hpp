#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "k2/apply.hpp"
#include "k2/fin_partial_fn.hpp"
#include "k2/json_io.hpp"
#include "k2/naming.hpp"
#include "k2/oracle_spec.hpp"

namespace k2 {

/// (sigma, n), denoting O_{sigma,n}.
struct CoverAtom {
  FinPartialFn sigma;
  std::size_t n = 0;

  friend bool operator==(const CoverAtom&, const CoverAtom&) = default;
  friend bool operator<(const CoverAtom& a, const CoverAtom& b) {
    if (a.n != b.n) return a.n < b.n;
    return a.sigma < b.sigma;
  }
};

using Theta = std::vector<CoverAtom>;

Json atom_to_json(const CoverAtom& a);
CoverAtom atom_from_json(const Json& j);
Json theta_to_json(const Theta& t);
Theta theta_from_json(const Json& j);
/// Sorted, duplicate-free.
Theta normalize(Theta t);

enum class CoverVerdict { Covered, NotCovered, InsufficientDepth };
std::string to_string(CoverVerdict v);

struct CoverReport {
  CoverVerdict verdict = CoverVerdict::Covered;
  std::size_t depth = 0;
  /// A cell outside every atom (NotCovered) or undecided at depth (InsufficientDepth).
  std::optional<FinPartialFn> witness;
};

/// Decides whether the atoms cover the space by refining cells down to
/// `depth` levels (default: max atom resolution + 1).
CoverReport covers(const Theta& theta, const MetricNaming& space, std::optional<std::size_t> depth = std::nullopt);
std::size_t max_resolution(const Theta& theta, const MetricNaming& space);

/// Enumerated base covering: nullopt ends a finite listing.
using CoveringEnum = std::function<std::optional<CoverAtom>(std::size_t)>;

/// Every atom (sigma_j, n_j) has some i <= horizon with tau_i below sigma_j and m_i <= n_j.
bool subcovers(const Theta& theta, const CoveringEnum& covering, std::size_t horizon);

/// (sigma, n) (x) (tau, m) = (<sigma, tau>, min(n, m)).
CoverAtom product_atom(const CoverAtom& ax, const CoverAtom& ay);

class CompactnessBase {
 public:
  virtual ~CompactnessBase() = default;
  /// The Theta at slot i; nullopt for an empty slot or past the end.
  virtual std::optional<Theta> theta(std::size_t i) const = 0;
  /// Number of slots for finite listings.
  virtual std::optional<std::size_t> size() const { return std::nullopt; }
  virtual const MetricNaming& space() const = 0;
  virtual Json describe() const = 0;
};

using BasePtr = std::shared_ptr<const CompactnessBase>;

/// Cantor: slot k is all (sigma, k) with sigma in {1,2}^k.
/// finite(N): slot k is all (<v, ..., v> of length k+1, k).
/// product: product_base of the component builtins.
BasePtr builtin_base(const MetricNaming& space);
BasePtr list_base(const MetricNaming& space, std::vector<Theta> thetas, Json meta);
/// Alternates a uniform stream (one Theta^Y for every atom of Theta^X) with a
/// general stream (one Theta^Y per atom, indices by iterated unpairing).
BasePtr product_base(BasePtr bx, BasePtr by);

/// Avoidance answer decoding: h(sigma) = <n, m> + 1.
struct AvoidanceAnswer {
  std::size_t n = 0;
  std::size_t m = 0;
};
/// nullopt for 0; throws ValidationError when the answer does not decode to a pair.
std::optional<AvoidanceAnswer> decode_answer(const Nat& raw);
Nat encode_answer(std::size_t n, std::size_t m);

struct Evaluation {
  enum class Status { Value, Exhausted, Malformed };
  Status status = Status::Exhausted;
  std::size_t value = 0;
  std::optional<Theta> certificate;
  std::optional<std::size_t> bound;
  std::size_t slots_tried = 0;
  std::string detail;

  bool has_value() const { return status == Status::Value; }
  Json to_json() const;
};

class AntiSpeckerRealizer {
 public:
  virtual ~AntiSpeckerRealizer() = default;
  /// Fuel counts Theta slots (or the analogous search steps).
  virtual Evaluation evaluate(const NameSequence& seq, const Oracle& h, Fuel fuel) const = 0;
  virtual std::string provenance() const = 0;
  virtual const MetricNaming& space() const = 0;
};

using RealizerPtr = std::shared_ptr<const AntiSpeckerRealizer>;

RealizerPtr realizer_from_base(BasePtr base);
/// mu m. forall i >= m (f_i = f_*) read straight off an eventually-star sequence.
RealizerPtr direct_scan_realizer(const MetricNaming& space);

struct ProbeOptions {
  std::size_t probe_budget = 64;
  Fuel eval_fuel{64};
  /// Dialogue probes answer with <n, m> + 1, n + m <= level, for levels up to this.
  std::size_t max_dialogue_level = 2;
};

struct ProbeReport {
  BasePtr base;
  std::size_t probes = 0;
  std::size_t determined = 0;
  std::size_t emitted = 0;
  std::size_t rejected_cover = 0;
  bool budget_exhausted = false;
};

/// Harvests coverings from m's behaviour on the all-star sequence.
ProbeReport base_from_realizer(const AntiSpeckerRealizer& m, const PointedSpace& space, const ProbeOptions& options);

/// base_from_realizer on both factors, product_base, realizer_from_base.
RealizerPtr product_anti_specker(const AntiSpeckerRealizer& mx, const AntiSpeckerRealizer& my,
                                 const ProbeOptions& options);

/// M'(g, H) = M(psi(g), lambda f. H(phi(f))); stars map to stars.
RealizerPtr transport_realizer(RealizerPtr m, Oracle phi, Oracle psi, const MetricNaming& target, Fuel translation);

/// Avoidance names for concrete sequences.
struct AvoidanceWitness {
  std::vector<formulas::AvoidEntry> entries;
};

/// Eventually-star sequences (with declared onset) get the constant answer
/// <0, onset>; other sequences need a witness table, which is verified
/// against the registry metric.
Oracle avoidance_realizer_concrete(const PointedSpace& space, const NameSequence& seq,
                                   std::optional<std::size_t> onset, const std::optional<AvoidanceWitness>& witness,
                                   std::size_t horizon = 64);

/// Table answer for every cylinder of length `depth`: n = depth, m = one past
/// the last sequence element inside the cylinder (eventually-star sequences).
AvoidanceWitness cylinder_witness(const MetricNaming& space, const NameSequence& seq, std::size_t depth,
                                  std::size_t horizon = 64);

struct AvoidanceCheck {
  bool valid = true;
  std::size_t answered = 0;
  std::size_t unanswered = 0;
  std::vector<std::string> violations;
};

/// Walks the name-prefix tree to `depth`, checking every first answer
/// <n, m> against d(nu(f), nu(f_i)) >= 2^-n for i >= m.
AvoidanceCheck check_avoidance(const PointedSpace& space, const NameSequence& seq, const Oracle& h, std::size_t depth,
                               std::size_t horizon = 64);

}  // namespace k2
