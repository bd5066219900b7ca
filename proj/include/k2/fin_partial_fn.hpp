#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "k2/numeric.hpp"

namespace k2 {

/// A finite partial function N -> N. Finite sequences are the special case
/// whose domain is an initial segment.
class FinPartialFn {
 public:
  FinPartialFn() = default;

  static FinPartialFn from_sequence(std::span<const Nat> seq);
  static FinPartialFn from_sequence(std::initializer_list<unsigned long> seq);
  /// Throws ValidationError on a repeated index.
  static FinPartialFn from_entries(std::span<const std::pair<std::size_t, Nat>> entries);

  bool contains(std::size_t index) const { return entries_.count(index) != 0; }
  std::optional<Nat> get(std::size_t index) const;
  /// Adds an entry; throws ValidationError if the index is bound to another value.
  void set(std::size_t index, Nat value);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::size_t, Nat>& entries() const { return entries_; }

  /// Largest L with [0, L) inside the domain.
  std::size_t initial_segment_length() const;
  /// Values on [0, len); requires len <= initial_segment_length().
  std::vector<Nat> prefix(std::size_t len) const;
  bool is_sequence() const { return initial_segment_length() == entries_.size(); }
  /// One past the largest index in the domain (0 when empty).
  std::size_t extent() const;

  /// Subfunction order: every entry of *this is an entry of other.
  bool is_sub_of(const FinPartialFn& other) const;
  /// Whether the two functions agree on their common domain.
  bool compatible_with(const FinPartialFn& other) const;

  std::string to_string() const;

  friend bool operator==(const FinPartialFn&, const FinPartialFn&) = default;
  friend bool operator<(const FinPartialFn& a, const FinPartialFn& b) { return a.entries_ < b.entries_; }

 private:
  std::map<std::size_t, Nat> entries_;
};

/// Interleaving <s, t>(2n) = s(n), <s, t>(2n+1) = t(n), on partial data.
FinPartialFn interleave(const FinPartialFn& even, const FinPartialFn& odd);
FinPartialFn even_part(const FinPartialFn& f);
FinPartialFn odd_part(const FinPartialFn& f);

}  // namespace k2
