#include "k2/fin_partial_fn.hpp"

#include "k2/errors.hpp"

namespace k2 {

FinPartialFn FinPartialFn::from_sequence(std::span<const Nat> seq) {
  FinPartialFn f;
  for (std::size_t i = 0; i < seq.size(); ++i) f.entries_.emplace(i, seq[i]);
  return f;
}

FinPartialFn FinPartialFn::from_sequence(std::initializer_list<unsigned long> seq) {
  FinPartialFn f;
  std::size_t i = 0;
  for (unsigned long v : seq) f.entries_.emplace(i++, Nat(v));
  return f;
}

FinPartialFn FinPartialFn::from_entries(std::span<const std::pair<std::size_t, Nat>> entries) {
  FinPartialFn f;
  for (const auto& [index, value] : entries) {
    if (!f.entries_.emplace(index, value).second) {
      throw ValidationError("duplicate index " + std::to_string(index) + " in finite partial function");
    }
  }
  return f;
}

std::optional<Nat> FinPartialFn::get(std::size_t index) const {
  auto it = entries_.find(index);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FinPartialFn::set(std::size_t index, Nat value) {
  auto [it, inserted] = entries_.emplace(index, value);
  if (!inserted && it->second != value) {
    throw ValidationError("conflicting values at index " + std::to_string(index));
  }
}

std::size_t FinPartialFn::initial_segment_length() const {
  std::size_t len = 0;
  for (const auto& [index, value] : entries_) {
    if (index != len) break;
    ++len;
  }
  return len;
}

std::vector<Nat> FinPartialFn::prefix(std::size_t len) const {
  std::vector<Nat> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    auto it = entries_.find(i);
    if (it == entries_.end()) throw ValidationError("prefix beyond the initial segment");
    out.push_back(it->second);
  }
  return out;
}

std::size_t FinPartialFn::extent() const { return entries_.empty() ? 0 : entries_.rbegin()->first + 1; }

bool FinPartialFn::is_sub_of(const FinPartialFn& other) const {
  if (entries_.size() > other.entries_.size()) return false;
  for (const auto& [index, value] : entries_) {
    auto it = other.entries_.find(index);
    if (it == other.entries_.end() || it->second != value) return false;
  }
  return true;
}

bool FinPartialFn::compatible_with(const FinPartialFn& other) const {
  for (const auto& [index, value] : entries_) {
    auto it = other.entries_.find(index);
    if (it != other.entries_.end() && it->second != value) return false;
  }
  return true;
}

std::string FinPartialFn::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [index, value] : entries_) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(index) + "->" + value.get_str();
  }
  return out + "}";
}

FinPartialFn interleave(const FinPartialFn& even, const FinPartialFn& odd) {
  FinPartialFn out;
  for (const auto& [index, value] : even.entries()) out.set(2 * index, value);
  for (const auto& [index, value] : odd.entries()) out.set(2 * index + 1, value);
  return out;
}

FinPartialFn even_part(const FinPartialFn& f) {
  FinPartialFn out;
  for (const auto& [index, value] : f.entries()) {
    if (index % 2 == 0) out.set(index / 2, value);
  }
  return out;
}

FinPartialFn odd_part(const FinPartialFn& f) {
  FinPartialFn out;
  for (const auto& [index, value] : f.entries()) {
    if (index % 2 == 1) out.set(index / 2, value);
  }
  return out;
}

}  // namespace k2
