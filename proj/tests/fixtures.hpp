#pragma once

#include <map>
#include <vector>

#include "gen.hpp"
#include "k2/anti_specker.hpp"
#include "k2/naming.hpp"
#include "k2/oracle.hpp"

namespace fixtures {

inline k2::Oracle name_from(std::initializer_list<unsigned long> prefix, unsigned long tail) {
  std::map<k2::Nat, k2::Nat> table;
  std::size_t i = 0;
  for (unsigned long v : prefix) table.emplace(k2::nat(i++), k2::Nat(v));
  return k2::table_oracle(std::move(table), k2::constant_oracle(k2::Nat(tail)));
}

/// Eventually-star sequence: up to max_len entries, each star with probability 1/3.
inline k2::NameSequence eventually_star(gen::Rng& rng, const k2::MetricNaming& space, std::size_t max_len) {
  std::vector<k2::Oracle> prefix;
  std::size_t len = gen::below(rng, max_len + 1);
  for (std::size_t i = 0; i < len; ++i) {
    prefix.push_back(gen::below(rng, 3) == 0 ? k2::PointedSpace::star_name() : space.sample_name(rng));
  }
  return k2::NameSequence(std::move(prefix));
}

/// Brute force: one past the last real name.
inline std::size_t last_real_plus_one(const k2::NameSequence& seq) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < seq.prefix_size(); ++i) {
    if (seq.prefix()[i](std::size_t{0}) != 0) m = i + 1;
  }
  return m;
}

/// Five valid avoidance names: shallow, late onset, deep constant, and two
/// cylinder tables (the deepest answers only at length `deep`).
inline std::vector<k2::Oracle> avoidance_names(const k2::PointedSpace& space, const k2::NameSequence& seq,
                                               std::size_t deep) {
  std::size_t onset = last_real_plus_one(seq);
  std::vector<k2::Oracle> out;
  out.push_back(k2::avoidance_realizer_concrete(space, seq, onset, std::nullopt));
  out.push_back(k2::avoidance_realizer_concrete(space, seq, onset + 3, std::nullopt));
  out.push_back(k2::formulas::avoid_const(0, k2::nat(onset), deep));
  out.push_back(k2::avoidance_realizer_concrete(space, seq, std::nullopt,
                                                k2::cylinder_witness(space.base(), seq, 2)));
  out.push_back(k2::avoidance_realizer_concrete(space, seq, std::nullopt,
                                                k2::cylinder_witness(space.base(), seq, deep)));
  return out;
}

}  // namespace fixtures
