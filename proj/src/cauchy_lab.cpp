#include "k2/cauchy_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "k2/errors.hpp"

namespace k2 {

namespace {

Rational power(const Rational& q, std::size_t e) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
  return make_rational(num, den);
}

Rational min3(const Rational& a, const Rational& b, const Rational& c) { return std::min({a, b, c}); }

}  // namespace

RationalSeq RationalSeq::zero_tail(std::vector<Rational> prefix) {
  RationalSeq s;
  s.prefix_ = std::move(prefix);
  return s;
}

RationalSeq RationalSeq::constant_tail(std::vector<Rational> prefix, Rational value) {
  RationalSeq s;
  s.prefix_ = std::move(prefix);
  s.tail_ = Tail::Constant;
  s.value_ = std::move(value);
  return s;
}

RationalSeq RationalSeq::geometric_tail(std::vector<Rational> prefix, Rational base, Rational ratio, Rational limit) {
  if (abs_value(ratio) >= 1) throw ValidationError("geometric tail: |ratio| must be below 1");
  RationalSeq s;
  s.prefix_ = std::move(prefix);
  s.tail_ = Tail::Geometric;
  s.base_ = std::move(base);
  s.ratio_ = std::move(ratio);
  s.limit_ = std::move(limit);
  return s;
}

RationalSeq RationalSeq::from_json(const Json& spec) {
  if (!spec.is_object()) throw ValidationError("sequence spec must be an object");
  for (const auto& [key, value] : spec.items()) {
    if (key != "prefix" && key != "tail" && key != "flags") {
      throw ValidationError("sequence spec: unknown field '" + key + "'");
    }
  }
  std::vector<Rational> prefix;
  if (spec.contains("prefix")) {
    if (!spec.at("prefix").is_array()) throw ValidationError("sequence prefix must be a list");
    for (const auto& v : spec.at("prefix")) prefix.push_back(json_rational(v, "sequence prefix"));
  }
  Rational last = prefix.empty() ? Rational(0) : prefix.back();
  const Json& tail = json_field(spec, "tail", "sequence spec");
  std::string kind = json_field(tail, "kind", "sequence tail").get<std::string>();
  auto opt = [&tail](const char* key, const Rational& fallback) {
    return tail.contains(key) ? json_rational(tail.at(key), key) : fallback;
  };
  RationalSeq out;
  if (kind == "zero") {
    out = zero_tail(std::move(prefix));
  } else if (kind == "constant") {
    out = constant_tail(std::move(prefix), opt("value", last));
  } else if (kind == "geometric") {
    Rational base = opt("base", prefix.empty() ? Rational(1) : last);
    out = geometric_tail(std::move(prefix), base, json_rational(json_field(tail, "ratio", "geometric tail"), "ratio"),
                         opt("limit", 0));
  } else {
    throw ValidationError("sequence tail: unknown kind '" + kind + "'");
  }
  if (spec.contains("flags")) {
    Flags f;
    for (const auto& flag : spec.at("flags")) {
      std::string name = flag.get<std::string>();
      if (name == "nonneg") {
        f.nonneg = true;
      } else if (name == "increasing") {
        f.increasing = true;
      } else if (name == "infinitely_positive") {
        f.infinitely_positive = true;
      } else {
        throw ValidationError("sequence flags: unknown flag '" + name + "'");
      }
    }
    out = out.with_flags(f);
  }
  return out;
}

Json RationalSeq::to_json() const {
  Json prefix = Json::array();
  for (const auto& q : prefix_) prefix.push_back(rational_json(q));
  Json tail;
  switch (tail_) {
    case Tail::Zero:
      tail = {{"kind", "zero"}};
      break;
    case Tail::Constant:
      tail = {{"kind", "constant"}, {"value", rational_json(value_)}};
      break;
    case Tail::Geometric:
      tail = {{"kind", "geometric"},
              {"base", rational_json(base_)},
              {"ratio", rational_json(ratio_)},
              {"limit", rational_json(limit_)}};
      break;
  }
  Json out = {{"prefix", prefix}, {"tail", tail}};
  Json flags = Json::array();
  if (flags_.nonneg) flags.push_back("nonneg");
  if (flags_.increasing) flags.push_back("increasing");
  if (flags_.infinitely_positive) flags.push_back("infinitely_positive");
  if (!flags.empty()) out["flags"] = flags;
  return out;
}

Rational RationalSeq::at(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  std::size_t j = i - prefix_.size();
  switch (tail_) {
    case Tail::Zero:
      return 0;
    case Tail::Constant:
      return value_;
    case Tail::Geometric:
      return limit_ + (base_ - limit_) * power(ratio_, j + 1);
  }
  return 0;
}

std::vector<Rational> RationalSeq::take(std::size_t n) const {
  std::vector<Rational> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(at(i));
  return out;
}

std::optional<Rational> RationalSeq::limit() const {
  switch (tail_) {
    case Tail::Zero:
      return Rational(0);
    case Tail::Constant:
      return value_;
    case Tail::Geometric:
      return limit_;
  }
  return std::nullopt;
}

bool RationalSeq::zero_from(std::size_t from) const {
  for (std::size_t i = from; i < prefix_.size(); ++i) {
    if (prefix_[i] != 0) return false;
  }
  switch (tail_) {
    case Tail::Zero:
      return true;
    case Tail::Constant:
      return value_ == 0;
    case Tail::Geometric:
      return base_ == 0 && limit_ == 0;
  }
  return false;
}

std::optional<Rational> RationalSeq::abs_tail_sum(std::size_t from) const {
  Rational sum = 0;
  for (std::size_t i = from; i < prefix_.size(); ++i) sum += abs_value(prefix_[i]);
  std::size_t j0 = from > prefix_.size() ? from - prefix_.size() : 0;
  switch (tail_) {
    case Tail::Zero:
      return sum;
    case Tail::Constant:
      if (value_ != 0) return std::nullopt;
      return sum;
    case Tail::Geometric: {
      if (limit_ != 0) return std::nullopt;
      Rational r = abs_value(ratio_);
      return sum + abs_value(base_) * power(r, j0 + 1) / (1 - r);
    }
  }
  return std::nullopt;
}

RationalSeq RationalSeq::with_flags(Flags flags) const {
  auto first_tail = at(prefix_.size());
  if (flags.nonneg) {
    if (std::any_of(prefix_.begin(), prefix_.end(), [](const Rational& q) { return q < 0; })) {
      throw ValidationError("flag nonneg: negative prefix entry");
    }
    bool ok = tail_ == Tail::Zero || (tail_ == Tail::Constant && value_ >= 0) ||
              (tail_ == Tail::Geometric && min3(limit_, first_tail, at(prefix_.size() + 1)) >= 0);
    if (!ok) throw ValidationError("flag nonneg: tail takes negative values");
  }
  if (flags.increasing) {
    for (std::size_t i = 1; i <= prefix_.size(); ++i) {
      if (at(i) < at(i - 1)) throw ValidationError("flag increasing: decrease at index " + std::to_string(i));
    }
    if (tail_ == Tail::Geometric && base_ != limit_ && ratio_ != 0 && !(ratio_ > 0 && base_ < limit_)) {
      throw ValidationError("flag increasing: geometric tail is not nondecreasing");
    }
  }
  if (flags.infinitely_positive) {
    bool ok = (tail_ == Tail::Constant && value_ > 0) ||
              (tail_ == Tail::Geometric &&
               (limit_ > 0 || (limit_ == 0 && ratio_ != 0 && (base_ > 0 || (base_ < 0 && ratio_ < 0)))));
    if (!ok) throw ValidationError("flag infinitely_positive: tail is eventually nonpositive");
  }
  RationalSeq out = *this;
  out.flags_ = flags;
  return out;
}

RationalSeq difference_sequence(const RationalSeq& a) {
  std::size_t len = a.prefix().size() + 1;
  std::vector<Rational> prefix;
  for (std::size_t i = 0; i < len; ++i) prefix.push_back(i == 0 ? a.at(0) : a.at(i) - a.at(i - 1));
  if (a.tail() != RationalSeq::Tail::Geometric) return RationalSeq::zero_tail(std::move(prefix));
  // a_{L+j} = lim + c r^(j+1), so a_{L+1+j} - a_{L+j} = c (r - 1) r^(j+1).
  Rational lim = *a.limit();
  Rational cr = a.at(len - 1) - lim;
  Rational cr2 = a.at(len) - lim;
  if (cr == 0 || cr2 == 0) return RationalSeq::zero_tail(std::move(prefix));
  Rational ratio = cr2 / cr;
  Rational c = cr / ratio;
  return RationalSeq::geometric_tail(std::move(prefix), c * (ratio - 1), ratio, 0);
}

Rational diam_window(const RationalSeq& x, std::size_t lo, std::size_t hi) {
  if (lo > hi) throw ValidationError("diam_window: empty window");
  Rational mx = x.at(lo), mn = mx;
  for (std::size_t i = lo + 1; i <= hi; ++i) {
    Rational v = x.at(i);
    if (v > mx) mx = v;
    if (v < mn) mn = v;
  }
  return mx - mn;
}

std::optional<ModulusCounterexample> is_modulus(const Oracle& f, const RationalSeq& x, std::size_t horizon) {
  auto xs = x.take(horizon + 1);
  std::vector<std::size_t> arg_max(horizon + 1), arg_min(horizon + 1);
  arg_max[horizon] = arg_min[horizon] = horizon;
  for (std::size_t i = horizon; i-- > 0;) {
    arg_max[i] = xs[i] > xs[arg_max[i + 1]] ? i : arg_max[i + 1];
    arg_min[i] = xs[i] < xs[arg_min[i + 1]] ? i : arg_min[i + 1];
  }
  for (std::size_t n = 0; n <= horizon; ++n) {
    Nat start = f(n);
    if (start > nat(horizon)) continue;
    std::size_t s = to_size(start);
    if (xs[arg_max[s]] - xs[arg_min[s]] >= pow2(-static_cast<long>(n))) {
      return ModulusCounterexample{n, arg_max[s], arg_min[s]};
    }
  }
  return std::nullopt;
}

std::optional<KWitness> k_consistent(const KConstraint& k, const RationalSeq& x, std::size_t horizon) {
  for (std::size_t i = 0; i < k.xs.size(); ++i) {
    if (x.at(i) != k.xs[i]) return KWitness{i, std::nullopt};
  }
  for (std::size_t n = 0; n < k.sigma.size(); ++n) {
    std::size_t lo = k.sigma[n];
    if (lo > horizon) continue;
    std::size_t imax = lo, imin = lo;
    Rational mx = x.at(lo), mn = mx;
    for (std::size_t i = lo + 1; i <= horizon; ++i) {
      Rational v = x.at(i);
      if (v > mx) mx = v, imax = i;
      if (v < mn) mn = v, imin = i;
    }
    if (mx - mn >= pow2(-static_cast<long>(n))) return KWitness{std::nullopt, ModulusCounterexample{n, imax, imin}};
  }
  return std::nullopt;
}

std::size_t pc_realizer(const RationalSeq& x, const Oracle& f, const Oracle& g, std::size_t n) {
  std::size_t bound = to_size(f(n + 1));
  std::vector<std::size_t> ends;
  for (std::size_t m = 0; m <= bound; ++m) {
    Nat gm = g(m);
    if (gm < nat(m)) throw ValidationError("pc_realizer: g(" + std::to_string(m) + ") < " + std::to_string(m));
    ends.push_back(to_size(gm));
  }
  Rational eps = pow2(-static_cast<long>(n));
  for (std::size_t m = bound + 1; m-- > 0;) {
    if (diam_window(x, m, ends[m]) >= eps) return m + 1;
  }
  return 0;
}

PermutationSpec::PermutationSpec(std::vector<std::size_t> table) : table_(std::move(table)) {
  inverse_.assign(table_.size(), table_.size());
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i] >= table_.size() || inverse_[table_[i]] != table_.size()) {
      throw ValidationError("permutation table is not a bijection of [0, " + std::to_string(table_.size()) + ")");
    }
    inverse_[table_[i]] = i;
  }
}

PermutationSpec PermutationSpec::swap(std::size_t i, std::size_t j) {
  std::vector<std::size_t> table(std::max(i, j) + 1);
  for (std::size_t k = 0; k < table.size(); ++k) table[k] = k;
  std::swap(table[i], table[j]);
  return PermutationSpec(std::move(table));
}

PermutationSpec PermutationSpec::from_json(const Json& spec) {
  const Json& table = spec.is_array() ? spec : json_field(spec, "table", "permutation");
  std::vector<std::size_t> out;
  for (const auto& v : table) out.push_back(json_size(v, "permutation entry"));
  return PermutationSpec(std::move(out));
}

Json PermutationSpec::to_json() const { return {{"table", table_}}; }

std::size_t PermutationSpec::operator()(std::size_t i) const { return i < table_.size() ? table_[i] : i; }

std::size_t PermutationSpec::inverse(std::size_t i) const { return i < inverse_.size() ? inverse_[i] : i; }

std::size_t PermutationSpec::covering_length(std::size_t n) const {
  std::size_t k0 = 0;
  for (std::size_t v = 0; v < n; ++v) k0 = std::max(k0, inverse(v) + 1);
  return k0;
}

std::size_t SplitterLedger::block_start(std::size_t i) const {
  std::size_t start = 0;
  for (std::size_t s = 0; s < std::min(i, stages.size()); ++s) start += stages[s].k;
  if (i <= stages.size()) return start;
  if (!x.zero_from(stages.size())) {
    throw BudgetError("block " + std::to_string(i) + " lies past the " + std::to_string(stages.size()) +
                      " computed stages");
  }
  return start + (i - stages.size());
}

Rational SplitterLedger::z(std::size_t k) const {
  for (const auto& st : stages) {
    if (k < st.y.size()) return st.y[k];
    k -= st.y.size();
  }
  if (!x.zero_from(stages.size())) throw BudgetError("z index lies past the computed stages");
  return 0;
}

std::vector<Rational> SplitterLedger::flattened() const {
  std::vector<Rational> out;
  for (const auto& st : stages) out.insert(out.end(), st.y.begin(), st.y.end());
  return out;
}

Json SplitterLedger::to_json() const {
  Json st = Json::array();
  for (const auto& r : stages) {
    Json y = Json::array();
    for (const auto& v : r.y) y.push_back(rational_json(v));
    st.push_back({{"stage", r.stage},
                  {"x", rational_json(r.x)},
                  {"skipped", r.skipped},
                  {"cases", {{"protected", r.case1}, {"cleared", r.case2}, {"hit", r.case3}}},
                  {"t", r.t ? rational_json(*r.t) : Json("inf")},
                  {"k", r.k},
                  {"y", y}});
  }
  Json prot = Json::array();
  for (const auto& [pair, p] : protections) {
    Json a = Json::array();
    for (std::uint64_t m = pair.first; m; m &= m - 1) a.push_back(std::countr_zero(m));
    prot.push_back({{"A", a}, {"n", pair.second}, {"r", rational_json(p.r)}, {"stage", p.stage}});
  }
  return {{"x", x.to_json()}, {"b", b.to_json()}, {"stages", st}, {"protections", prot}};
}

RationalSeq dyadic_sequence() { return RationalSeq::geometric_tail({Rational(1)}, 1, Rational(1, 2)); }

double projected_pairs(std::size_t positions, std::size_t stage) {
  return std::ldexp(1.0, static_cast<int>(positions)) * static_cast<double>(stage + 1);
}

namespace {

std::size_t mask_width(const std::map<ProtectedPair, Protection>& prot) {
  std::size_t w = 0;
  for (const auto& [pair, p] : prot) w = std::max<std::size_t>(w, std::bit_width(pair.first));
  return w;
}

// sums[mask] = sum of ys over the positions in mask, for masks below 2^width.
std::vector<Rational> subset_sums(const std::vector<Rational>& ys, std::size_t width) {
  std::vector<Rational> sums(std::size_t{1} << width);
  for (std::size_t mask = 1; mask < sums.size(); ++mask) {
    sums[mask] = sums[mask & (mask - 1)] + ys[static_cast<std::size_t>(std::countr_zero(mask))];
  }
  return sums;
}

Rational clearance(const Rational& rest, const Rational& bn) { return abs_value(abs_value(rest) - bn); }

std::optional<std::string> first_uncleared(const std::vector<Rational>& ys, const SplitterLedger& ledger) {
  Rational total = 0;
  for (const auto& y : ys) total += y;
  auto sums = subset_sums(ys, mask_width(ledger.protections));
  for (const auto& [pair, p] : ledger.protections) {
    Rational c = clearance(total - sums[pair.first], ledger.b.at(pair.second));
    if (!(c > p.r)) {
      return "pair (A=" + std::to_string(pair.first) + ", n=" + std::to_string(pair.second) + ") clearance " +
             to_string(c) + " <= protection " + to_string(p.r);
    }
  }
  return std::nullopt;
}

}  // namespace

SplitterLedger protected_split(const RationalSeq& x, const RationalSeq& b, std::size_t stages,
                            const SplitOptions& options) {
  if (stages > options.stage_cap) {
    throw BudgetError("splitter: " + std::to_string(stages) + " stages exceed the cap of " +
                      std::to_string(options.stage_cap));
  }
  SplitterLedger ledger{x, b, {}, {}};
  std::vector<Rational> ys;
  for (std::size_t s = 0; s < stages; ++s) {
    StageRecord rec;
    rec.stage = s;
    rec.x = x.at(s);
    if (rec.x < 0) throw ValidationError("splitter: x_" + std::to_string(s) + " is negative");
    if (b.at(s) < 0) throw ValidationError("splitter: b_" + std::to_string(s) + " is negative");
    if (rec.x == 0) {
      rec.skipped = true;
      rec.y = {Rational(0)};
    } else {
      std::size_t positions = ys.size();
      if (positions > options.max_positions) {
        throw BudgetError("splitter: stage " + std::to_string(s) + " would classify " +
                          std::to_string(projected_pairs(positions, s)) + " pairs (|B_s| = " +
                          std::to_string(positions) + ")");
      }
      auto sums = subset_sums(ys, positions);
      Rational total = 0;
      for (const auto& y : ys) total += y;
      std::vector<ProtectedPair> hits;
      for (std::size_t n = 0; n <= s; ++n) {
        Rational bn = b.at(n);
        for (std::uint64_t mask = 0; mask < sums.size(); ++mask) {
          Rational c = clearance(total - sums[mask], bn);
          Rational slack;
          auto it = ledger.protections.find({mask, n});
          if (it != ledger.protections.end()) {
            ++rec.case1;
            slack = c - it->second.r;
          } else if (c != 0) {
            ++rec.case2;
            slack = c / 2;
            ledger.protections.emplace(ProtectedPair{mask, n}, Protection{slack, s});
          } else {
            ++rec.case3;
            hits.push_back({mask, n});
            continue;
          }
          if (!rec.t || slack < *rec.t) rec.t = slack;
        }
      }
      if (rec.t) {
        // least odd k with x/k < t/2, i.e. k > 2x/t
        Rational q = 2 * rec.x / *rec.t;
        Integer fl = q.get_num() / q.get_den();
        Integer k = fl + 1;
        if (k % 2 == 0) k += 1;
        rec.k = to_size(k);
      }
      Rational piece = rec.x / static_cast<unsigned long>(rec.k);
      for (std::size_t j = 1; j <= rec.k; ++j) rec.y.push_back(j % 2 == 1 ? piece : Rational(-piece));
      for (const auto& pair : hits) ledger.protections.emplace(pair, Protection{piece / 2, s});
    }
    ys.insert(ys.end(), rec.y.begin(), rec.y.end());
    ledger.stages.push_back(std::move(rec));
    if (auto failure = first_uncleared(ys, ledger)) {
      throw InvariantError("stage " + std::to_string(s) + ": " + *failure, ledger.to_json().dump(2));
    }
  }
  return ledger;
}

Json DaggerReport::to_json() const {
  return {{"checked", checked}, {"certified_limit", certified_limit}, {"discrepancies", discrepancies}};
}

DaggerReport verify_dagger(const SplitterLedger& ledger, std::optional<Rational> tail_bound) {
  DaggerReport report;
  auto ys = ledger.flattened();
  for (const auto& [pair, p] : ledger.protections) {
    ++report.checked;
    Rational rest = 0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      if (k >= 64 || !((pair.first >> k) & 1u)) rest += ys[k];
    }
    Rational c = abs_value(abs_value(rest) - ledger.b.at(pair.second));
    if (!(c > p.r)) {
      report.discrepancies.push_back("pair (A=" + std::to_string(pair.first) + ", n=" + std::to_string(pair.second) +
                                     "): clearance " + to_string(c) + " not above " + to_string(p.r));
    }
    if (tail_bound && c - *tail_bound > 0) ++report.certified_limit;
  }
  return report;
}

namespace {

struct WindowScan {
  const RptInput& in;
  Rational zp(std::size_t k) const { return in.ledger.z(in.p(k)); }
};

}  // namespace

CaseDecision decide_case(const RptInput& in, std::size_t m, std::size_t n, Fuel rounds) {
  WindowScan scan{in};
  Rational eps = pow2(-static_cast<long>(n));
  for (std::size_t r = 0; r < rounds.budget; ++r) {
    std::size_t j = m + r;
    Rational sum = 0;
    for (std::size_t i = j + 1; i-- > m;) {
      sum += scan.zp(i);
      if (abs_value(sum) >= eps) return CaseI{i, j};
    }

    std::size_t n0 = n + r;
    std::size_t n1 = to_size(in.f(n0 + 1)) + 1;
    std::size_t k0 = in.p.covering_length(in.ledger.block_start(n1));
    bool clear = true;
    if (k0 > m) {
      // Window sums are differences of partial sums P[m..k0].
      Rational partial = 0, hi = 0, lo = 0;
      for (std::size_t k = m; k < k0; ++k) {
        partial += scan.zp(k);
        hi = std::max(hi, partial);
        lo = std::min(lo, partial);
      }
      clear = hi - lo + pow2(-static_cast<long>(n0)) < eps;
    }
    if (clear) return CaseII{n0, n1, k0};
  }
  throw BudgetError("decide_case: no witness within " + std::to_string(rounds.budget) + " rounds");
}

std::size_t f_a_bar(const RptInput& in, std::size_t n, Fuel rounds) {
  for (std::size_t m = 0; m < rounds.budget; ++m) {
    if (std::holds_alternative<CaseII>(decide_case(in, m, n, rounds))) return m;
  }
  throw BudgetError("f_a_bar: no Case II start within " + std::to_string(rounds.budget) + " candidates");
}

Oracle modulus_from_absz(const SplitterLedger& ledger, const Oracle& g) {
  auto shared = std::make_shared<SplitterLedger>(ledger);
  return function_oracle(
      [shared, g](const Nat& n) {
        std::size_t target = to_size(g(n));
        std::size_t i = 0;
        while (shared->block_start(i + 1) < target) ++i;
        return nat(i);
      },
      "f_g");
}

Oracle absz_modulus(const SplitterLedger& ledger) {
  auto shared = std::make_shared<SplitterLedger>(ledger);
  return function_oracle(
      [shared](const Nat& n) {
        Rational eps = pow2(-static_cast<long>(to_size(n)));
        for (std::size_t i = 0;; ++i) {
          auto tail = shared->x.abs_tail_sum(i);
          if (!tail) throw ValidationError("absz_modulus: sum of |x_i| diverges");
          if (*tail < eps) return nat(shared->block_start(i));
        }
      },
      "absz_modulus");
}

}  // namespace k2
