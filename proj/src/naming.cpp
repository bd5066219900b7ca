#include "k2/naming.hpp"

#include <algorithm>
#include <map>

#include "k2/errors.hpp"
#include "k2/oracle_spec.hpp"

namespace k2 {

std::string Point::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) out += (i ? "," : "") + coords[i].get_str();
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ";" : "") + parts[i].to_string();
  return out + ")";
}

struct MetricNaming::Node {
  Kind kind;
  std::size_t n = 0;
  std::optional<MetricNaming> left;
  std::optional<MetricNaming> right;
};

MetricNaming MetricNaming::cantor() { return MetricNaming(std::make_shared<Node>(Node{Kind::Cantor, 0, {}, {}})); }

MetricNaming MetricNaming::finite(std::size_t n) {
  if (n == 0) throw ValidationError("finite space needs at least one point");
  return MetricNaming(std::make_shared<Node>(Node{Kind::Finite, n, {}, {}}));
}

MetricNaming MetricNaming::naturals() { return MetricNaming(std::make_shared<Node>(Node{Kind::Nat, 0, {}, {}})); }

MetricNaming MetricNaming::product(const MetricNaming& left, const MetricNaming& right) {
  return MetricNaming(std::make_shared<Node>(Node{Kind::Product, 0, left, right}));
}

MetricNaming MetricNaming::from_json(const Json& spec) {
  std::string kind = json_field(spec, "kind", "space spec").get<std::string>();
  if (kind == "cantor") return cantor();
  if (kind == "finite") return finite(json_size(json_field(spec, "n", "finite space"), "n"));
  if (kind == "nat") return naturals();
  if (kind == "product") {
    return product(from_json(json_field(spec, "left", "product space")),
                   from_json(json_field(spec, "right", "product space")));
  }
  throw ValidationError("unknown space kind '" + kind + "'");
}

MetricNaming::Kind MetricNaming::kind() const { return node_->kind; }
std::size_t MetricNaming::finite_size() const { return node_->n; }

const MetricNaming& MetricNaming::left() const {
  if (!node_->left) throw ValidationError("not a product space");
  return *node_->left;
}

const MetricNaming& MetricNaming::right() const {
  if (!node_->right) throw ValidationError("not a product space");
  return *node_->right;
}

std::string MetricNaming::id() const {
  switch (kind()) {
    case Kind::Cantor:
      return "cantor";
    case Kind::Finite:
      return "finite(" + std::to_string(node_->n) + ")";
    case Kind::Nat:
      return "nat";
    case Kind::Product:
      return "product(" + left().id() + "," + right().id() + ")";
  }
  return "";
}

Json MetricNaming::to_json() const {
  switch (kind()) {
    case Kind::Cantor:
      return {{"kind", "cantor"}};
    case Kind::Finite:
      return {{"kind", "finite"}, {"n", node_->n}};
    case Kind::Nat:
      return {{"kind", "nat"}};
    case Kind::Product:
      return {{"kind", "product"}, {"left", left().to_json()}, {"right", right().to_json()}};
  }
  return {};
}

bool MetricNaming::is_compact() const {
  if (kind() == Kind::Nat) return false;
  if (kind() == Kind::Product) return left().is_compact() && right().is_compact();
  return true;
}

bool MetricNaming::names_positive() const {
  if (kind() == Kind::Nat) return false;
  if (kind() == Kind::Product) return left().names_positive();
  return true;
}

namespace {

Oracle even_oracle(const Oracle& h) {
  return function_oracle([h](const Nat& k) { return h(Nat(2 * k)); }, "even(" + h.describe() + ")");
}

Oracle odd_oracle(const Oracle& h) {
  return function_oracle([h](const Nat& k) { return h(Nat(2 * k + 1)); }, "odd(" + h.describe() + ")");
}

bool cantor_value(const Nat& v) { return v == 1 || v == 2; }

void require_compact(const MetricNaming& m) {
  if (!m.is_compact()) throw ValidationError("cell operations need a compact registry space, got " + m.id());
}

// Common value of sigma when all its values are equal and in 1..n.
enum class FiniteShape { Empty, Constant, Invalid };
FiniteShape finite_shape(const FinPartialFn& sigma, std::size_t n, Nat& value) {
  if (sigma.empty()) return FiniteShape::Empty;
  value = sigma.entries().begin()->second;
  if (value < 1 || value > nat(n)) return FiniteShape::Invalid;
  for (const auto& [i, v] : sigma.entries()) {
    if (v != value) return FiniteShape::Invalid;
  }
  return FiniteShape::Constant;
}

Membership combine(Membership a, Membership b) {
  if (a == Membership::Outside || b == Membership::Outside) return Membership::Outside;
  if (a == Membership::Inside && b == Membership::Inside) return Membership::Inside;
  return Membership::Partial;
}

}  // namespace

Oracle pair_names(const Oracle& f, const Oracle& g) {
  return function_oracle(
      [f, g](const Nat& k) {
        Nat half = k / 2;
        return k % 2 == 0 ? f(half) : g(half);
      },
      "pair(" + f.describe() + "," + g.describe() + ")");
}

std::pair<Oracle, Oracle> project_names(const Oracle& h) { return {even_oracle(h), odd_oracle(h)}; }

bool MetricNaming::in_domain(const Oracle& f, std::size_t horizon) const {
  switch (kind()) {
    case Kind::Cantor:
      for (std::size_t i = 0; i < horizon; ++i) {
        if (!cantor_value(f(i))) return false;
      }
      return true;
    case Kind::Finite: {
      Nat v = f(std::size_t{0});
      if (v < 1 || v > nat(node_->n)) return false;
      for (std::size_t i = 1; i < horizon; ++i) {
        if (f(i) != v) return false;
      }
      return true;
    }
    case Kind::Nat:
      for (std::size_t i = 1; i < horizon; ++i) {
        if (f(i) != 0) return false;
      }
      return true;
    case Kind::Product: {
      auto [a, b] = project_names(f);
      return left().in_domain(a, horizon) && right().in_domain(b, horizon);
    }
  }
  return false;
}

Point MetricNaming::point_of(const Oracle& f, std::size_t horizon) const {
  Point p;
  switch (kind()) {
    case Kind::Cantor:
      for (std::size_t i = 0; i < horizon; ++i) p.coords.push_back(f(i) - 1);
      break;
    case Kind::Finite:
    case Kind::Nat:
      p.coords.push_back(f(std::size_t{0}));
      break;
    case Kind::Product: {
      auto [a, b] = project_names(f);
      p.parts = {left().point_of(a, horizon), right().point_of(b, horizon)};
      break;
    }
  }
  return p;
}

Rational MetricNaming::dist_points(const Point& x, const Point& y) const {
  switch (kind()) {
    case Kind::Cantor: {
      std::size_t len = std::min(x.coords.size(), y.coords.size());
      for (std::size_t i = 0; i < len; ++i) {
        if (x.coords[i] != y.coords[i]) return pow2(-static_cast<long>(i));
      }
      return 0;
    }
    case Kind::Finite:
    case Kind::Nat:
      return x.coords.at(0) == y.coords.at(0) ? Rational(0) : Rational(1);
    case Kind::Product: {
      Rational a = left().dist_points(x.parts.at(0), y.parts.at(0));
      Rational b = right().dist_points(x.parts.at(1), y.parts.at(1));
      return a < b ? b : a;
    }
  }
  return 0;
}

Rational MetricNaming::dist(const Oracle& f, const Oracle& g, std::size_t horizon) const {
  switch (kind()) {
    case Kind::Cantor:
      for (std::size_t i = 0; i < horizon; ++i) {
        if (f(i) != g(i)) return pow2(-static_cast<long>(i));
      }
      return 0;
    case Kind::Finite:
    case Kind::Nat:
      return f(std::size_t{0}) == g(std::size_t{0}) ? Rational(0) : Rational(1);
    case Kind::Product: {
      auto [fa, fb] = project_names(f);
      auto [ga, gb] = project_names(g);
      Rational a = left().dist(fa, ga, horizon), b = right().dist(fb, gb, horizon);
      return a < b ? b : a;
    }
  }
  return 0;
}

SignedDigitReal MetricNaming::dist_hat(const Oracle& f, const Oracle& g) const {
  switch (kind()) {
    case Kind::Cantor:
      return first_diff_real([f, g](std::size_t i) { return f(i) != g(i); });
    case Kind::Finite:
    case Kind::Nat:
      return from_rational(f(std::size_t{0}) == g(std::size_t{0}) ? 0 : 1);
    case Kind::Product: {
      auto [fa, fb] = project_names(f);
      auto [ga, gb] = project_names(g);
      return max_star(left().dist_hat(fa, ga), right().dist_hat(fb, gb));
    }
  }
  return from_rational(0);
}

Oracle MetricNaming::sample_name(std::mt19937_64& rng) const {
  auto pick = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  switch (kind()) {
    case Kind::Cantor: {
      std::size_t len = pick(0, 10);
      std::map<Nat, Nat> table;
      for (std::size_t i = 0; i < len; ++i) table.emplace(nat(i), nat(pick(1, 2)));
      std::vector<Nat> pattern;
      std::size_t period = pick(1, 3);
      for (std::size_t i = 0; i < period; ++i) pattern.push_back(nat(pick(1, 2)));
      return table_oracle(std::move(table), formulas::periodic(std::move(pattern)));
    }
    case Kind::Finite:
      return constant_oracle(nat(pick(1, node_->n)));
    case Kind::Nat:
      return table_oracle({{0, nat(pick(0, 50))}}, constant_oracle(0));
    case Kind::Product: {
      Oracle a = left().sample_name(rng);
      Oracle b = right().sample_name(rng);
      return pair_names(a, b);
    }
  }
  return constant_oracle(0);
}

Oracle MetricNaming::name_extending(const FinPartialFn& cell) const {
  switch (kind()) {
    case Kind::Cantor: {
      std::map<Nat, Nat> table;
      for (const auto& [i, v] : cell.entries()) table.emplace(nat(i), v);
      return table_oracle(std::move(table), constant_oracle(1));
    }
    case Kind::Finite: {
      auto v = cell.get(0);
      return constant_oracle(v ? *v : Nat(1));
    }
    case Kind::Nat: {
      auto v = cell.get(0);
      return table_oracle({{0, v ? *v : Nat(0)}}, constant_oracle(0));
    }
    case Kind::Product:
      return pair_names(left().name_extending(even_part(cell)), right().name_extending(odd_part(cell)));
  }
  return constant_oracle(0);
}

std::vector<FinPartialFn> MetricNaming::children(const FinPartialFn& cell) const {
  require_compact(*this);
  std::vector<FinPartialFn> out;
  switch (kind()) {
    case Kind::Cantor: {
      std::size_t len = cell.initial_segment_length();
      for (unsigned long v : {1ul, 2ul}) {
        FinPartialFn child = cell;
        child.set(len, Nat(v));
        out.push_back(std::move(child));
      }
      break;
    }
    case Kind::Finite:
      if (cell.empty()) {
        for (std::size_t v = 1; v <= node_->n; ++v) {
          FinPartialFn child;
          child.set(0, nat(v));
          out.push_back(std::move(child));
        }
      }
      break;
    case Kind::Nat:
      break;
    case Kind::Product: {
      FinPartialFn cx = even_part(cell), cy = odd_part(cell);
      auto kx = left().children(cx);
      auto ky = right().children(cy);
      if (kx.empty()) kx = {cx};
      if (ky.empty()) ky = {cy};
      if (kx.size() == 1 && ky.size() == 1 && kx[0] == cx && ky[0] == cy) break;
      for (const auto& a : kx) {
        for (const auto& b : ky) out.push_back(interleave(a, b));
      }
      break;
    }
  }
  return out;
}

Membership MetricNaming::classify(const FinPartialFn& sigma, std::size_t n, const FinPartialFn& cell) const {
  require_compact(*this);
  switch (kind()) {
    case Kind::Cantor: {
      for (const auto& [i, v] : sigma.entries()) {
        if (!cantor_value(v)) return Membership::Outside;
      }
      std::size_t len = cell.initial_segment_length();
      bool decided = true;
      for (const auto& [i, v] : sigma.entries()) {
        if (i > n) break;
        if (i < len) {
          if (*cell.get(i) != v) return Membership::Outside;
        } else {
          decided = false;
        }
      }
      return decided ? Membership::Inside : Membership::Partial;
    }
    case Kind::Finite: {
      Nat v;
      FiniteShape shape = finite_shape(sigma, node_->n, v);
      if (shape == FiniteShape::Invalid) return Membership::Outside;
      if (shape == FiniteShape::Empty) return Membership::Inside;
      auto w = cell.get(0);
      if (!w) return node_->n == 1 ? Membership::Inside : Membership::Partial;
      return *w == v ? Membership::Inside : Membership::Outside;
    }
    case Kind::Nat:
      break;
    case Kind::Product:
      return combine(left().classify(even_part(sigma), n, even_part(cell)),
                     right().classify(odd_part(sigma), n, odd_part(cell)));
  }
  return Membership::Partial;
}

std::size_t MetricNaming::resolution(const FinPartialFn& sigma, std::size_t n) const {
  switch (kind()) {
    case Kind::Cantor: {
      std::size_t r = 0;
      for (const auto& [i, v] : sigma.entries()) {
        if (i <= n) r = i + 1;
      }
      return r;
    }
    case Kind::Finite:
    case Kind::Nat:
      return 1;
    case Kind::Product:
      return std::max(left().resolution(even_part(sigma), n), right().resolution(odd_part(sigma), n));
  }
  return 0;
}

std::optional<Rational> MetricNaming::inf_dist(const FinPartialFn& cell, const Oracle& g, std::size_t horizon) const {
  switch (kind()) {
    case Kind::Cantor: {
      for (const auto& [i, v] : cell.entries()) {
        if (!cantor_value(v)) return std::nullopt;
      }
      for (const auto& [i, v] : cell.entries()) {
        if (i >= horizon) break;
        if (g(i) != v) return pow2(-static_cast<long>(i));
      }
      return Rational(0);
    }
    case Kind::Finite: {
      Nat v;
      switch (finite_shape(cell, node_->n, v)) {
        case FiniteShape::Invalid:
          return std::nullopt;
        case FiniteShape::Empty:
          return Rational(0);
        case FiniteShape::Constant:
          return g(std::size_t{0}) == v ? Rational(0) : Rational(1);
      }
      return std::nullopt;
    }
    case Kind::Nat: {
      for (const auto& [i, v] : cell.entries()) {
        if (i > 0 && v != 0) return std::nullopt;
      }
      auto v = cell.get(0);
      if (!v) return Rational(0);
      return *v == g(std::size_t{0}) ? Rational(0) : Rational(1);
    }
    case Kind::Product: {
      auto [ga, gb] = project_names(g);
      auto a = left().inf_dist(even_part(cell), ga, horizon);
      auto b = right().inf_dist(odd_part(cell), gb, horizon);
      if (!a || !b) return std::nullopt;
      return *a < *b ? *b : *a;
    }
  }
  return std::nullopt;
}

std::vector<Nat> MetricNaming::next_values(std::span<const Nat> prefix) const {
  require_compact(*this);
  switch (kind()) {
    case Kind::Cantor:
      return {1, 2};
    case Kind::Finite: {
      if (!prefix.empty()) return {prefix[0]};
      std::vector<Nat> out;
      for (std::size_t v = 1; v <= node_->n; ++v) out.push_back(nat(v));
      return out;
    }
    case Kind::Nat:
      break;
    case Kind::Product: {
      std::size_t pos = prefix.size();
      std::vector<Nat> side;
      for (std::size_t i = pos % 2; i < pos; i += 2) side.push_back(prefix[i]);
      return pos % 2 == 0 ? left().next_values(side) : right().next_values(side);
    }
  }
  return {};
}

MetricNaming nat_naming() { return MetricNaming::naturals(); }
MetricNaming cantor_space() { return MetricNaming::cantor(); }
MetricNaming finite_space(std::size_t n) { return MetricNaming::finite(n); }
MetricNaming product_metric_naming(const MetricNaming& x, const MetricNaming& y) {
  return MetricNaming::product(x, y);
}

PointedSpace::PointedSpace(MetricNaming base) : base_(std::move(base)) {
  if (!base_.names_positive()) {
    throw ValidationError("star extension needs names positive at index 0; " + base_.id() + " has a name with 0 there");
  }
}

bool PointedSpace::is_star(const Oracle& f) { return f(std::size_t{0}) == 0; }

bool PointedSpace::in_domain(const Oracle& f, std::size_t horizon) const {
  if (is_star(f)) {
    for (std::size_t i = 1; i < horizon; ++i) {
      if (f(i) != 0) return false;
    }
    return true;
  }
  return base_.in_domain(f, horizon);
}

Rational PointedSpace::dist(const Oracle& f, const Oracle& g, std::size_t horizon) const {
  bool sf = is_star(f), sg = is_star(g);
  if (sf && sg) return 0;
  if (sf || sg) return 1;
  return base_.dist(f, g, horizon);
}

SignedDigitReal PointedSpace::dist_hat(const Oracle& f, const Oracle& g) const {
  bool sf = is_star(f), sg = is_star(g);
  if (sf && sg) return from_rational(0);
  if (sf || sg) return from_rational(1);
  return base_.dist_hat(f, g);
}

PointedSpace star_extension(const MetricNaming& m) { return PointedSpace(m); }

NameSequence::NameSequence(std::vector<Oracle> prefix, std::vector<Oracle> cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {}

NameSequence NameSequence::from_json(const Json& spec) {
  auto read_names = [](const Json& list) {
    if (!list.is_array()) throw ValidationError("name sequence: expected a list of names");
    std::vector<Oracle> out;
    for (const auto& item : list) {
      if (item.is_string() && item.get<std::string>() == "star") {
        out.push_back(PointedSpace::star_name());
      } else if (item.is_string()) {
        out.push_back(parse_oracle_arg(item.get<std::string>()));
      } else {
        out.push_back(oracle_from_json(item));
      }
    }
    return out;
  };
  std::vector<Oracle> prefix = spec.contains("names") ? read_names(spec.at("names")) : std::vector<Oracle>{};
  std::vector<Oracle> cycle;
  if (spec.contains("tail")) {
    const Json& tail = spec.at("tail");
    if (tail.is_string() && tail.get<std::string>() == "star") {
      // default
    } else if (tail.is_object() && tail.value("kind", "") == "cycle") {
      cycle = read_names(json_field(tail, "names", "cycle tail"));
      if (cycle.empty()) throw ValidationError("cycle tail needs names");
    } else {
      throw ValidationError("name sequence tail must be \"star\" or a cycle");
    }
  }
  return NameSequence(std::move(prefix), std::move(cycle));
}

Oracle NameSequence::at(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  if (cycle_.empty()) return PointedSpace::star_name();
  return cycle_[(i - prefix_.size()) % cycle_.size()];
}

std::size_t NameSequence::direct_scan() const {
  if (!eventually_star()) throw ValidationError("direct scan needs an eventually-star sequence");
  std::size_t m = prefix_.size();
  while (m > 0 && PointedSpace::is_star(prefix_[m - 1])) --m;
  return m;
}

std::string to_string(ReductionReport::Status s) {
  switch (s) {
    case ReductionReport::Status::Success:
      return "success";
    case ReductionReport::Status::Counterexample:
      return "counterexample";
    case ReductionReport::Status::Inconclusive:
      return "inconclusive";
  }
  return "";
}

ReductionReport verify_reduction(const Oracle& h, const MetricNaming& from, const MetricNaming& to,
                                 const std::function<Point(const Point&)>& point_map,
                                 const std::vector<Oracle>& samples, Fuel fuel, std::size_t horizon) {
  ReductionReport report;
  bool inconclusive = false;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const Oracle& f = samples[s];
    if (!from.in_domain(f, horizon)) throw ValidationError("sample " + std::to_string(s) + " is not a name");
    Application image = bullet(h, f);
    std::map<Nat, Nat> values;
    bool exhausted = false;
    for (std::size_t k = 0; k < horizon; ++k) {
      auto r = image(k, fuel);
      if (!r.has_value()) {
        exhausted = true;
        break;
      }
      values.emplace(nat(k), r.value());
    }
    if (exhausted) {
      if (!inconclusive) {
        report.sample = s;
        report.detail = "fuel exhausted on sample " + std::to_string(s);
      }
      inconclusive = true;
      continue;
    }
    Oracle g = table_oracle(std::move(values), constant_oracle(0));
    if (!to.in_domain(g, horizon)) {
      return {ReductionReport::Status::Counterexample, s, "image of sample " + std::to_string(s) + " is not a name"};
    }
    Point expected = point_map(from.point_of(f, horizon));
    Point got = to.point_of(g, horizon);
    if (!(expected == got)) {
      return {ReductionReport::Status::Counterexample, s,
              "sample " + std::to_string(s) + ": expected " + expected.to_string() + ", got " + got.to_string()};
    }
  }
  if (inconclusive) report.status = ReductionReport::Status::Inconclusive;
  return report;
}

}  // namespace k2
