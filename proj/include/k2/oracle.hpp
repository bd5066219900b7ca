#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "k2/numeric.hpp"

namespace k2 {

/// Backing implementation of a total function N -> N.
class OracleImpl {
 public:
  virtual ~OracleImpl() = default;

  virtual Nat at(const Nat& k) const = 0;

  /// Fast path for associates that are naturally functions of a decoded
  /// sequence: returns the value at code(seq) without building the code.
  /// nullopt means "no fast path"; callers fall back to at(encode(seq)).
  virtual std::optional<Nat> at_sequence(std::span<const Nat> seq) const {
    (void)seq;
    return std::nullopt;
  }

  virtual std::string describe() const = 0;
};

/// An element of Baire space presented as a deterministic, queryable oracle.
/// Cheap to copy; untracked oracles are immutable and shareable.
class Oracle {
 public:
  explicit Oracle(std::shared_ptr<const OracleImpl> impl);

  Nat operator()(const Nat& k) const { return impl_->at(k); }
  Nat operator()(std::size_t k) const { return impl_->at(nat(k)); }

  /// Value at the code of `seq`.
  Nat on_sequence(std::span<const Nat> seq) const;

  std::vector<Nat> prefix(std::size_t n) const;
  std::string describe() const { return impl_->describe(); }
  const OracleImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const OracleImpl> impl_;
};

Oracle constant_oracle(const Nat& value);
Oracle identity_oracle();
/// Finite table in front of a tail oracle.
Oracle table_oracle(std::map<Nat, Nat> table, Oracle tail);
Oracle function_oracle(std::function<Nat(const Nat&)> fn, std::string description);
/// An oracle defined on decoded sequences: at(k) = fn(decode(k)).
Oracle sequence_oracle(std::function<Nat(std::span<const Nat>)> fn, std::string description);

/// Observed segment of an oracle: the largest index queried plus the full
/// transcript of answers.
struct UsageMeter {
  Nat max_index = 0;
  std::size_t queries = 0;
  std::map<Nat, Nat> transcript;

  bool touched() const { return queries != 0; }
  /// Length of the observed initial segment (max index + 1, or 0).
  Nat segment_length() const { return touched() ? Nat(max_index + 1) : Nat(0); }
  void note(const Nat& index, const Nat& value);
};

struct TrackedOracle {
  Oracle oracle;
  std::shared_ptr<UsageMeter> meter;
};

/// Wraps `f` so that every query is recorded. The wrapper answers exactly as
/// `f` does; it carries mutable state and must stay on one thread.
TrackedOracle with_usage_tracking(Oracle f);

}  // namespace k2
