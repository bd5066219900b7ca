#include "k2/seq_code.hpp"

#include <algorithm>

#include "k2/errors.hpp"

namespace k2 {

Nat cantor_pair(const Nat& x, const Nat& y) {
  Nat s = x + y;
  Nat t = s * (s + 1) / 2;
  return t + y;
}

std::pair<Nat, Nat> cantor_unpair(const Nat& z) {
  if (z < 0) throw ValidationError("cannot unpair a negative number");
  // w = floor((sqrt(8z + 1) - 1) / 2)
  Nat disc = 8 * z + 1;
  Nat root = sqrt(disc);
  Nat w = (root - 1) / 2;
  Nat t = w * (w + 1) / 2;
  Nat y = z - t;
  Nat x = w - y;
  return {x, y};
}

std::size_t pair_index(std::size_t x, std::size_t y) {
  std::size_t s = x + y;
  return s * (s + 1) / 2 + y;
}

std::pair<std::size_t, std::size_t> unpair_index(std::size_t z) {
  auto [x, y] = cantor_unpair(nat(z));
  return {to_size(x), to_size(y)};
}

Nat append_code(const Nat& code, const Nat& value) { return cantor_pair(code, value) + 1; }

Nat encode_sequence(std::span<const Nat> seq) {
  Nat code = 0;
  for (const Nat& a : seq) {
    if (a < 0) throw ValidationError("sequence entries must be naturals");
    code = append_code(code, a);
  }
  return code;
}

Nat encode_sequence(std::initializer_list<unsigned long> seq) {
  std::vector<Nat> values;
  values.reserve(seq.size());
  for (unsigned long v : seq) values.emplace_back(v);
  return encode_sequence(values);
}

std::vector<Nat> decode_sequence(const Nat& code) {
  if (code < 0) throw ValidationError("sequence codes are naturals");
  std::vector<Nat> out;
  Nat c = code;
  while (c > 0) {
    auto [rest, last] = cantor_unpair(c - 1);
    out.push_back(std::move(last));
    c = std::move(rest);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::size_t sequence_length(const Nat& code) {
  std::size_t len = 0;
  Nat c = code;
  while (c > 0) {
    c = cantor_unpair(c - 1).first;
    ++len;
  }
  return len;
}

}  // namespace k2
