#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "k2/numeric.hpp"

namespace k2 {

// Sequence numbering used everywhere a finite sequence is identified with a
// natural:
//   code(<>)      = 0
//   code(s ^ <a>) = pair(code(s), a) + 1
// with the Cantor pairing pair(x, y) = (x + y)(x + y + 1)/2 + y. Every natural
// decodes, so the codec is a bijection between N and N^{<N}.

Nat cantor_pair(const Nat& x, const Nat& y);
std::pair<Nat, Nat> cantor_unpair(const Nat& z);

/// Machine-word variants for enumeration bookkeeping.
std::size_t pair_index(std::size_t x, std::size_t y);
std::pair<std::size_t, std::size_t> unpair_index(std::size_t z);

Nat encode_sequence(std::span<const Nat> seq);
Nat encode_sequence(std::initializer_list<unsigned long> seq);
std::vector<Nat> decode_sequence(const Nat& code);
std::size_t sequence_length(const Nat& code);

/// code(s ^ <a>) given code(s).
Nat append_code(const Nat& code, const Nat& value);

}  // namespace k2
