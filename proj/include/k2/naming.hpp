#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "k2/apply.hpp"
#include "k2/fin_partial_fn.hpp"
#include "k2/json_io.hpp"
#include "k2/oracle.hpp"
#include "k2/reals.hpp"

namespace k2 {

/// Canonical point of a registry space, read up to a horizon.
struct Point {
  std::vector<Nat> coords;
  std::vector<Point> parts;

  friend bool operator==(const Point&, const Point&) = default;
  std::string to_string() const;
};

enum class Membership { Inside, Outside, Partial };

/// A metric naming of a registry space:
///   cantor     names in {1,2}^N, point = name - 1, d = 2^-(first difference)
///   finite(N)  constant names 1..N, discrete metric
///   nat        names (v, 0, 0, ...), discrete metric (not compact)
///   product    interleaved names, max metric
/// Name-level reads stop at a horizon; dist is exact for names that differ
/// below it.
class MetricNaming {
 public:
  enum class Kind { Cantor, Finite, Nat, Product };

  static MetricNaming cantor();
  static MetricNaming finite(std::size_t n);
  static MetricNaming naturals();
  static MetricNaming product(const MetricNaming& left, const MetricNaming& right);
  static MetricNaming from_json(const Json& spec);

  Kind kind() const;
  std::size_t finite_size() const;
  const MetricNaming& left() const;
  const MetricNaming& right() const;
  std::string id() const;
  Json to_json() const;
  bool is_compact() const;
  /// Every name is positive at index 0.
  bool names_positive() const;

  bool in_domain(const Oracle& f, std::size_t horizon) const;
  Point point_of(const Oracle& f, std::size_t horizon) const;
  Rational dist(const Oracle& f, const Oracle& g, std::size_t horizon) const;
  Rational dist_points(const Point& x, const Point& y) const;
  SignedDigitReal dist_hat(const Oracle& f, const Oracle& g) const;

  Oracle sample_name(std::mt19937_64& rng) const;
  /// Some name extending `cell` (a cell produced by children()).
  Oracle name_extending(const FinPartialFn& cell) const;

  // Cells: sets of names extending a finite partial function, refined by
  // children(). Compact spaces only.

  std::vector<FinPartialFn> children(const FinPartialFn& cell) const;
  /// Position of the cell relative to O_{sigma,n}.
  Membership classify(const FinPartialFn& sigma, std::size_t n, const FinPartialFn& cell) const;
  /// Refinement depth at which classify never answers Partial for this atom.
  std::size_t resolution(const FinPartialFn& sigma, std::size_t n) const;
  /// Infimum of d(nu(f), nu(g)) over names f extending `cell`; nullopt when
  /// no name extends it.
  std::optional<Rational> inf_dist(const FinPartialFn& cell, const Oracle& g, std::size_t horizon) const;
  /// Values v such that prefix ^ <v> still extends to a name.
  std::vector<Nat> next_values(std::span<const Nat> prefix) const;

  friend bool operator==(const MetricNaming& a, const MetricNaming& b) { return a.id() == b.id(); }

 private:
  struct Node;
  explicit MetricNaming(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

MetricNaming nat_naming();
MetricNaming cantor_space();
MetricNaming finite_space(std::size_t n);
MetricNaming product_metric_naming(const MetricNaming& x, const MetricNaming& y);

/// <f, g>(2n) = f(n), <f, g>(2n+1) = g(n).
Oracle pair_names(const Oracle& f, const Oracle& g);
std::pair<Oracle, Oracle> project_names(const Oracle& h);

/// X* = X plus the constant-zero name.
class PointedSpace {
 public:
  explicit PointedSpace(MetricNaming base);

  const MetricNaming& base() const { return base_; }
  static Oracle star_name() { return constant_oracle(0); }
  /// Reads index 0 only.
  static bool is_star(const Oracle& f);

  bool in_domain(const Oracle& f, std::size_t horizon) const;
  Rational dist(const Oracle& f, const Oracle& g, std::size_t horizon) const;
  SignedDigitReal dist_hat(const Oracle& f, const Oracle& g) const;

 private:
  MetricNaming base_;
};

/// Throws ValidationError unless every name of m is positive at index 0.
PointedSpace star_extension(const MetricNaming& m);

/// A sequence of names from X*: an explicit prefix followed either by stars
/// or by a repeating cycle of names.
class NameSequence {
 public:
  NameSequence() = default;
  NameSequence(std::vector<Oracle> prefix, std::vector<Oracle> cycle = {});
  static NameSequence all_star() { return {}; }
  /// {"names": [oracle spec | "star", ...], "tail": "star" | {"kind": "cycle", "names": [...]}}
  static NameSequence from_json(const Json& spec);

  Oracle at(std::size_t i) const;
  bool eventually_star() const { return cycle_.empty(); }
  std::size_t prefix_size() const { return prefix_.size(); }
  const std::vector<Oracle>& prefix() const { return prefix_; }
  const std::vector<Oracle>& cycle() const { return cycle_; }
  /// mu m. forall i >= m (f_i = f_*); requires eventually_star().
  std::size_t direct_scan() const;

 private:
  std::vector<Oracle> prefix_;
  std::vector<Oracle> cycle_;
};

struct ReductionReport {
  enum class Status { Success, Counterexample, Inconclusive };
  Status status = Status::Success;
  std::size_t sample = 0;
  std::string detail;
};
std::string to_string(ReductionReport::Status s);

/// Checks that h . f lands in `to` and names point_map(point of f) for each sample.
ReductionReport verify_reduction(const Oracle& h, const MetricNaming& from, const MetricNaming& to,
                                 const std::function<Point(const Point&)>& point_map,
                                 const std::vector<Oracle>& samples, Fuel fuel, std::size_t horizon);

}  // namespace k2
