#include "k2/anti_specker.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "k2/errors.hpp"
#include "k2/seq_code.hpp"

namespace k2 {

Json atom_to_json(const CoverAtom& a) {
  Json sigma = Json::array();
  for (const auto& [i, v] : a.sigma.entries()) sigma.push_back(Json::array({i, nat_json(v)}));
  return {{"sigma", sigma}, {"n", a.n}};
}

CoverAtom atom_from_json(const Json& j) {
  CoverAtom a;
  for (const auto& entry : json_field(j, "sigma", "atom")) {
    if (!entry.is_array() || entry.size() != 2) throw ValidationError("atom sigma entries are [index, value]");
    if (a.sigma.contains(json_size(entry[0], "index"))) throw ValidationError("atom sigma: duplicate index");
    a.sigma.set(json_size(entry[0], "index"), json_nat(entry[1], "value"));
  }
  a.n = json_size(json_field(j, "n", "atom"), "n");
  return a;
}

Json theta_to_json(const Theta& t) {
  Json out = Json::array();
  for (const auto& a : t) out.push_back(atom_to_json(a));
  return out;
}

Theta theta_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("theta must be a nonempty list of atoms");
  Theta t;
  for (const auto& a : j) t.push_back(atom_from_json(a));
  return t;
}

Theta normalize(Theta t) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::string to_string(CoverVerdict v) {
  switch (v) {
    case CoverVerdict::Covered:
      return "covered";
    case CoverVerdict::NotCovered:
      return "not_covered";
    case CoverVerdict::InsufficientDepth:
      return "insufficient_depth";
  }
  return "";
}

std::size_t max_resolution(const Theta& theta, const MetricNaming& space) {
  std::size_t r = 0;
  for (const auto& a : theta) r = std::max(r, space.resolution(a.sigma, a.n));
  return r;
}

namespace {

// Returns the first failing cell, with the verdict it forces.
std::optional<std::pair<CoverVerdict, FinPartialFn>> walk_cover(const Theta& theta, const MetricNaming& space,
                                                                const FinPartialFn& cell, std::size_t level,
                                                                std::size_t depth) {
  bool all_outside = true;
  for (const auto& a : theta) {
    Membership m = space.classify(a.sigma, a.n, cell);
    if (m == Membership::Inside) return std::nullopt;
    if (m == Membership::Partial) all_outside = false;
  }
  if (all_outside) return std::make_pair(CoverVerdict::NotCovered, cell);
  auto kids = space.children(cell);
  if (kids.empty() || level >= depth) return std::make_pair(CoverVerdict::InsufficientDepth, cell);
  std::optional<std::pair<CoverVerdict, FinPartialFn>> undecided;
  for (const auto& kid : kids) {
    auto r = walk_cover(theta, space, kid, level + 1, depth);
    if (!r) continue;
    if (r->first == CoverVerdict::NotCovered) return r;
    if (!undecided) undecided = r;
  }
  return undecided;
}

}  // namespace

CoverReport covers(const Theta& theta, const MetricNaming& space, std::optional<std::size_t> depth) {
  CoverReport report;
  report.depth = depth.value_or(max_resolution(theta, space) + 1);
  auto r = walk_cover(theta, space, FinPartialFn{}, 0, report.depth);
  if (r) {
    report.verdict = r->first;
    report.witness = r->second;
  }
  return report;
}

bool subcovers(const Theta& theta, const CoveringEnum& covering, std::size_t horizon) {
  std::vector<CoverAtom> listed;
  for (std::size_t i = 0; i <= horizon; ++i) {
    auto a = covering(i);
    if (!a) break;
    listed.push_back(std::move(*a));
  }
  for (const auto& atom : theta) {
    bool found = std::any_of(listed.begin(), listed.end(), [&atom](const CoverAtom& c) {
      return c.sigma.is_sub_of(atom.sigma) && c.n <= atom.n;
    });
    if (!found) return false;
  }
  return true;
}

CoverAtom product_atom(const CoverAtom& ax, const CoverAtom& ay) {
  return {interleave(ax.sigma, ay.sigma), std::min(ax.n, ay.n)};
}

namespace {

constexpr std::size_t kMaxCantorSlot = 20;

class CantorBase final : public CompactnessBase {
 public:
  explicit CantorBase(MetricNaming space) : space_(std::move(space)) {}

  std::optional<Theta> theta(std::size_t k) const override {
    if (k > kMaxCantorSlot) throw BudgetError("cantor base slot " + std::to_string(k) + " exceeds the size cap");
    Theta out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
      FinPartialFn sigma;
      for (std::size_t i = 0; i < k; ++i) sigma.set(i, Nat(((bits >> (k - 1 - i)) & 1u) + 1));
      out.push_back({std::move(sigma), k});
    }
    return out;
  }

  const MetricNaming& space() const override { return space_; }
  Json describe() const override { return {{"kind", "builtin"}, {"space", space_.to_json()}}; }

 private:
  MetricNaming space_;
};

class FiniteBase final : public CompactnessBase {
 public:
  explicit FiniteBase(MetricNaming space) : space_(std::move(space)) {}

  std::optional<Theta> theta(std::size_t k) const override {
    Theta out;
    for (std::size_t v = 1; v <= space_.finite_size(); ++v) {
      FinPartialFn sigma;
      for (std::size_t i = 0; i <= k; ++i) sigma.set(i, nat(v));
      out.push_back({std::move(sigma), k});
    }
    return out;
  }

  const MetricNaming& space() const override { return space_; }
  Json describe() const override { return {{"kind", "builtin"}, {"space", space_.to_json()}}; }

 private:
  MetricNaming space_;
};

class ListBase final : public CompactnessBase {
 public:
  ListBase(MetricNaming space, std::vector<Theta> thetas, Json meta)
      : space_(std::move(space)), thetas_(std::move(thetas)), meta_(std::move(meta)) {}

  std::optional<Theta> theta(std::size_t i) const override {
    if (i >= thetas_.size()) return std::nullopt;
    return thetas_[i];
  }
  std::optional<std::size_t> size() const override { return thetas_.size(); }
  const MetricNaming& space() const override { return space_; }
  Json describe() const override {
    Json out = {{"kind", "probed"}, {"space", space_.to_json()}, {"size", thetas_.size()}};
    for (const auto& [key, value] : meta_.items()) out[key] = value;
    return out;
  }

 private:
  MetricNaming space_;
  std::vector<Theta> thetas_;
  Json meta_;
};

std::vector<std::size_t> unpair_tuple(std::size_t z, std::size_t k) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    auto [x, y] = unpair_index(z);
    out.push_back(x);
    z = y;
  }
  out.push_back(z);
  return out;
}

class ProductBase final : public CompactnessBase {
 public:
  ProductBase(BasePtr bx, BasePtr by)
      : bx_(std::move(bx)), by_(std::move(by)), space_(MetricNaming::product(bx_->space(), by_->space())) {}

  std::optional<Theta> theta(std::size_t e) const override {
    auto [a, rest] = unpair_index(e / 2);
    auto tx = bx_->theta(a);
    if (!tx) return std::nullopt;
    std::vector<Theta> per_atom;
    if (e % 2 == 0) {
      auto ty = by_->theta(rest);
      if (!ty) return std::nullopt;
      per_atom.assign(tx->size(), *ty);
    } else {
      if (tx->size() > 16) return std::nullopt;  // general tuples this wide sit far past any desk-scale budget
      for (std::size_t b : unpair_tuple(rest, tx->size())) {
        auto ty = by_->theta(b);
        if (!ty) return std::nullopt;
        per_atom.push_back(std::move(*ty));
      }
    }
    Theta out;
    for (std::size_t i = 0; i < tx->size(); ++i) {
      for (const auto& ay : per_atom[i]) out.push_back(product_atom((*tx)[i], ay));
    }
    return normalize(std::move(out));
  }

  const MetricNaming& space() const override { return space_; }
  Json describe() const override { return {{"kind", "product"}, {"left", bx_->describe()}, {"right", by_->describe()}}; }

 private:
  BasePtr bx_;
  BasePtr by_;
  MetricNaming space_;
};

}  // namespace

BasePtr builtin_base(const MetricNaming& space) {
  switch (space.kind()) {
    case MetricNaming::Kind::Cantor:
      return std::make_shared<CantorBase>(space);
    case MetricNaming::Kind::Finite:
      return std::make_shared<FiniteBase>(space);
    case MetricNaming::Kind::Product:
      return product_base(builtin_base(space.left()), builtin_base(space.right()));
    case MetricNaming::Kind::Nat:
      break;
  }
  throw ValidationError("no compactness base for " + space.id());
}

BasePtr list_base(const MetricNaming& space, std::vector<Theta> thetas, Json meta) {
  return std::make_shared<ListBase>(space, std::move(thetas), std::move(meta));
}

BasePtr product_base(BasePtr bx, BasePtr by) { return std::make_shared<ProductBase>(std::move(bx), std::move(by)); }

std::optional<AvoidanceAnswer> decode_answer(const Nat& raw) {
  if (raw == 0) return std::nullopt;
  auto pair = decode_sequence(Nat(raw - 1));
  if (pair.size() != 2) throw ValidationError("avoidance answer " + raw.get_str() + " is not <n,m>+1");
  if (!pair[0].fits_ulong_p() || !pair[1].fits_ulong_p()) throw ValidationError("avoidance answer out of range");
  return AvoidanceAnswer{to_size(pair[0]), to_size(pair[1])};
}

Nat encode_answer(std::size_t n, std::size_t m) { return encode_sequence(std::vector<Nat>{nat(n), nat(m)}) + 1; }

Json Evaluation::to_json() const {
  Json out;
  switch (status) {
    case Status::Value:
      out["status"] = "value";
      out["value"] = value;
      break;
    case Status::Exhausted:
      out["status"] = "exhausted";
      out["value"] = "exhausted";
      break;
    case Status::Malformed:
      out["status"] = "malformed";
      out["value"] = nullptr;
      break;
  }
  out["certificate"] = certificate ? theta_to_json(*certificate) : Json(nullptr);
  out["bound"] = bound ? Json(*bound) : Json(nullptr);
  out["slots_tried"] = slots_tried;
  if (!detail.empty()) out["detail"] = detail;
  return out;
}

namespace {

std::size_t scan_below(const NameSequence& seq, std::size_t bound) {
  std::size_t m = bound;
  while (m > 0 && PointedSpace::is_star(seq.at(m - 1))) --m;
  return m;
}

class BaseRealizer final : public AntiSpeckerRealizer {
 public:
  BaseRealizer(BasePtr base, std::string provenance) : base_(std::move(base)), provenance_(std::move(provenance)) {}

  Evaluation evaluate(const NameSequence& seq, const Oracle& h, Fuel fuel) const override {
    Evaluation ev;
    std::map<std::vector<Nat>, Nat> memo;
    auto ask = [&](std::vector<Nat> tau) -> const Nat& {
      auto it = memo.find(tau);
      if (it == memo.end()) {
        Nat v = h.on_sequence(tau);
        it = memo.emplace(std::move(tau), std::move(v)).first;
      }
      return it->second;
    };
    auto limit = base_->size();
    for (std::size_t slot = 0; slot < fuel.budget; ++slot) {
      if (limit && slot >= *limit) break;
      ev.slots_tried = slot + 1;
      auto theta = base_->theta(slot);
      if (!theta) continue;
      bool certified = true;
      std::size_t bound = 0;
      for (const auto& atom : *theta) {
        std::size_t len = atom.sigma.initial_segment_length();
        auto sigma = atom.sigma.prefix(len);
        bool found = false;
        for (std::size_t t = 0; t <= len; ++t) {
          const Nat& raw = ask(std::vector<Nat>(sigma.begin(), sigma.begin() + t));
          if (raw == 0) continue;
          std::optional<AvoidanceAnswer> answer;
          try {
            answer = decode_answer(raw);
          } catch (const ValidationError& e) {
            ev.status = Evaluation::Status::Malformed;
            ev.detail = e.what();
            return ev;
          }
          if (answer->n <= atom.n) {
            found = true;
            bound = std::max(bound, answer->m);
          }
          break;
        }
        if (!found) {
          certified = false;
          break;
        }
      }
      if (!certified) continue;
      ev.status = Evaluation::Status::Value;
      ev.bound = bound;
      ev.certificate = std::move(*theta);
      ev.value = scan_below(seq, bound);
      return ev;
    }
    ev.status = Evaluation::Status::Exhausted;
    ev.detail = "no Theta certified within " + std::to_string(ev.slots_tried) + " slots";
    return ev;
  }

  std::string provenance() const override { return provenance_; }
  const MetricNaming& space() const override { return base_->space(); }

 private:
  BasePtr base_;
  std::string provenance_;
};

class DirectScanRealizer final : public AntiSpeckerRealizer {
 public:
  explicit DirectScanRealizer(MetricNaming space) : space_(std::move(space)) {}

  Evaluation evaluate(const NameSequence& seq, const Oracle&, Fuel fuel) const override {
    Evaluation ev;
    if (!seq.eventually_star()) {
      ev.detail = "direct scan needs an eventually-star sequence";
      return ev;
    }
    std::size_t m = seq.direct_scan();
    ev.slots_tried = m;
    if (m > fuel.budget) {
      ev.detail = "scan longer than the fuel budget";
      return ev;
    }
    ev.status = Evaluation::Status::Value;
    ev.value = m;
    ev.bound = m;
    return ev;
  }

  std::string provenance() const override { return "direct_scan"; }
  const MetricNaming& space() const override { return space_; }

 private:
  MetricNaming space_;
};

}  // namespace

RealizerPtr realizer_from_base(BasePtr base) { return std::make_shared<BaseRealizer>(std::move(base), "from_base"); }

RealizerPtr direct_scan_realizer(const MetricNaming& space) { return std::make_shared<DirectScanRealizer>(space); }

namespace {

struct ProbeEscape {};

// Avoidance name used while probing: answers from a fixed rule or from a
// script consumed one fresh question at a time, and records every exchange.
class ProbeAvoidance final : public OracleImpl {
 public:
  struct Log {
    std::map<std::vector<Nat>, Nat> answers;
    std::vector<Nat> script;
    std::size_t used = 0;
  };

  ProbeAvoidance(std::optional<Oracle> rule, std::shared_ptr<Log> log) : rule_(std::move(rule)), log_(std::move(log)) {}

  Nat at(const Nat& k) const override { return *at_sequence(decode_sequence(k)); }

  std::optional<Nat> at_sequence(std::span<const Nat> seq) const override {
    std::vector<Nat> key(seq.begin(), seq.end());
    auto it = log_->answers.find(key);
    if (it != log_->answers.end()) return it->second;
    Nat v;
    if (rule_) {
      v = rule_->on_sequence(seq);
    } else {
      if (log_->used >= log_->script.size()) throw ProbeEscape{};
      v = log_->script[log_->used++];
    }
    log_->answers.emplace(std::move(key), v);
    return v;
  }

  std::string describe() const override { return "probe"; }

 private:
  std::optional<Oracle> rule_;
  std::shared_ptr<Log> log_;
};

bool is_proper_prefix(const std::vector<Nat>& a, const std::vector<Nat>& b) {
  return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// Theta from the minimal answered sequences of a completed probe.
std::optional<Theta> harvest(const std::map<std::vector<Nat>, Nat>& answers) {
  std::vector<const std::vector<Nat>*> answered;
  for (const auto& [seq, v] : answers) {
    if (v > 0) answered.push_back(&seq);
  }
  Theta theta;
  for (const auto* s : answered) {
    bool minimal = std::none_of(answered.begin(), answered.end(),
                                [s](const std::vector<Nat>* t) { return is_proper_prefix(*t, *s); });
    if (!minimal) continue;
    std::optional<AvoidanceAnswer> a;
    try {
      a = decode_answer(answers.at(*s));
    } catch (const ValidationError&) {
      return std::nullopt;
    }
    theta.push_back({FinPartialFn::from_sequence(*s), a->n});
  }
  if (theta.empty()) return std::nullopt;
  return normalize(std::move(theta));
}

class DialogueEnumerator {
 public:
  explicit DialogueEnumerator(std::size_t max_level) : max_level_(max_level) { start_level(); }

  bool done() const { return level_ > max_level_; }

  std::vector<Nat> next() {
    auto s = std::move(stack_.back());
    stack_.pop_back();
    return s;
  }

  void escaped(const std::vector<Nat>& script) {
    if (script.size() < level_ + 1) {
      for (auto it = values_.rbegin(); it != values_.rend(); ++it) {
        auto child = script;
        child.push_back(*it);
        stack_.push_back(std::move(child));
      }
    }
    advance();
  }

  void finished() { advance(); }

 private:
  void start_level() {
    values_ = {Nat(0)};
    for (std::size_t s = 0; s <= level_; ++s) {
      for (std::size_t n = 0; n <= s; ++n) values_.push_back(encode_answer(n, s - n));
    }
    stack_ = {{}};
  }

  void advance() {
    while (stack_.empty() && !done()) {
      ++level_;
      if (!done()) start_level();
    }
  }

  std::size_t level_ = 0;
  std::size_t max_level_;
  std::vector<Nat> values_;
  std::vector<std::vector<Nat>> stack_;
};

// Canonical probe parameters in shells of max(depth, n), diagonal first.
std::pair<std::size_t, std::size_t> canonical_probe(std::size_t c) {
  std::size_t s = 0;
  while ((s + 1) * (s + 1) <= c) ++s;
  std::size_t r = c - s * s;
  if (r == 0) return {s, s};
  if (r <= s) return {s, s - r};
  return {r - s - 1, s};
}

}  // namespace

ProbeReport base_from_realizer(const AntiSpeckerRealizer& m, const PointedSpace& space, const ProbeOptions& options) {
  const MetricNaming& base_space = space.base();
  ProbeReport report;
  std::vector<Theta> emitted;
  std::set<Theta> seen;
  NameSequence all_star = NameSequence::all_star();
  DialogueEnumerator dialogues(options.max_dialogue_level);
  std::size_t canonical = 0;

  auto consider = [&](const std::shared_ptr<ProbeAvoidance::Log>& log, const Evaluation& ev) {
    if (!ev.has_value() || ev.value != 0) return;
    ++report.determined;
    auto theta = harvest(log->answers);
    if (!theta || seen.count(*theta)) return;
    seen.insert(*theta);
    if (covers(*theta, base_space).verdict == CoverVerdict::Covered) {
      emitted.push_back(std::move(*theta));
    } else {
      ++report.rejected_cover;
    }
  };

  for (std::size_t probe = 0; probe < options.probe_budget; ++probe) {
    report.probes = probe + 1;
    auto log = std::make_shared<ProbeAvoidance::Log>();
    if (probe % 2 == 1 && !dialogues.done()) {
      log->script = dialogues.next();
      Oracle h(std::make_shared<ProbeAvoidance>(std::nullopt, log));
      try {
        Evaluation ev = m.evaluate(all_star, h, options.eval_fuel);
        dialogues.finished();
        consider(log, ev);
      } catch (const ProbeEscape&) {
        dialogues.escaped(log->script);
      }
    } else {
      auto [depth, n] = canonical_probe(canonical++);
      Oracle rule = formulas::prefix_threshold(depth, encode_answer(n, 0));
      Oracle h(std::make_shared<ProbeAvoidance>(rule, log));
      consider(log, m.evaluate(all_star, h, options.eval_fuel));
    }
  }
  report.budget_exhausted = true;
  report.emitted = emitted.size();
  Json meta = {{"probes", report.probes}, {"truncated", true}};
  report.base = list_base(base_space, std::move(emitted), meta);
  return report;
}

RealizerPtr product_anti_specker(const AntiSpeckerRealizer& mx, const AntiSpeckerRealizer& my,
                                 const ProbeOptions& options) {
  auto px = base_from_realizer(mx, PointedSpace(mx.space()), options);
  if (px.emitted == 0) {
    throw BudgetError("probe stage (left factor): no covering harvested within " + std::to_string(px.probes) +
                      " probes");
  }
  auto py = base_from_realizer(my, PointedSpace(my.space()), options);
  if (py.emitted == 0) {
    throw BudgetError("probe stage (right factor): no covering harvested within " + std::to_string(py.probes) +
                      " probes");
  }
  return std::make_shared<BaseRealizer>(product_base(px.base, py.base), "product");
}

namespace {

// Longest initial segment of phi . f determined by the prefix sigma of f.
std::vector<Nat> determined_image(const Oracle& phi, std::span<const Nat> sigma, std::size_t cap) {
  std::vector<Nat> image;
  std::vector<Nat> arg(sigma.size() + 1);
  std::copy(sigma.begin(), sigma.end(), arg.begin() + 1);
  for (std::size_t k = 0; k < cap; ++k) {
    arg[0] = nat(k);
    std::optional<Nat> value;
    for (std::size_t n = 0; n <= arg.size(); ++n) {
      Nat v = phi.on_sequence(std::span<const Nat>(arg.data(), n));
      if (v > 0) {
        value = Nat(v - 1);
        break;
      }
    }
    if (!value) break;
    image.push_back(std::move(*value));
  }
  return image;
}

class TransportRealizer final : public AntiSpeckerRealizer {
 public:
  TransportRealizer(RealizerPtr m, Oracle phi, Oracle psi, MetricNaming target, Fuel translation)
      : m_(std::move(m)), phi_(std::move(phi)), psi_(std::move(psi)), target_(std::move(target)),
        translation_(translation) {}

  Evaluation evaluate(const NameSequence& seq, const Oracle& h, Fuel fuel) const override {
    auto translate = [this](const Oracle& g) {
      if (PointedSpace::is_star(g)) return PointedSpace::star_name();
      return bullet(psi_, g).total(translation_);
    };
    std::vector<Oracle> prefix, cycle;
    for (const auto& g : seq.prefix()) prefix.push_back(translate(g));
    for (const auto& g : seq.cycle()) cycle.push_back(translate(g));
    Oracle phi = phi_;
    std::size_t cap = translation_.budget;
    Oracle pulled = sequence_oracle(
        [phi, h, cap](std::span<const Nat> sigma) -> Nat {
          auto image = determined_image(phi, sigma, cap);
          for (std::size_t t = 0; t <= image.size(); ++t) {
            Nat v = h.on_sequence(std::span<const Nat>(image.data(), t));
            if (v > 0) return v;
          }
          return 0;
        },
        "pullback(" + h.describe() + ")");
    return m_->evaluate(NameSequence(std::move(prefix), std::move(cycle)), pulled, fuel);
  }

  std::string provenance() const override { return "transported"; }
  const MetricNaming& space() const override { return target_; }

 private:
  RealizerPtr m_;
  Oracle phi_;
  Oracle psi_;
  MetricNaming target_;
  Fuel translation_;
};

}  // namespace

RealizerPtr transport_realizer(RealizerPtr m, Oracle phi, Oracle psi, const MetricNaming& target, Fuel translation) {
  return std::make_shared<TransportRealizer>(std::move(m), std::move(phi), std::move(psi), target, translation);
}

namespace {

// Real names of the sequence that occur at some index >= m.
std::vector<Oracle> real_names_from(const NameSequence& seq, std::size_t m) {
  std::vector<Oracle> out;
  for (std::size_t i = m; i < seq.prefix_size(); ++i) {
    if (!PointedSpace::is_star(seq.prefix()[i])) out.push_back(seq.prefix()[i]);
  }
  for (const auto& g : seq.cycle()) {
    if (!PointedSpace::is_star(g)) out.push_back(g);
  }
  return out;
}

bool separated(const MetricNaming& space, const FinPartialFn& cell, const std::vector<Oracle>& names, std::size_t n,
               std::size_t horizon) {
  Rational radius = pow2(-static_cast<long>(n));
  for (const auto& g : names) {
    auto d = space.inf_dist(cell, g, horizon);
    if (d && *d < radius) return false;
  }
  return true;
}

}  // namespace

Oracle avoidance_realizer_concrete(const PointedSpace& space, const NameSequence& seq,
                                   std::optional<std::size_t> onset, const std::optional<AvoidanceWitness>& witness,
                                   std::size_t horizon) {
  if (witness) {
    for (const auto& e : witness->entries) {
      if (!separated(space.base(), FinPartialFn::from_sequence(e.prefix), real_names_from(seq, to_size(e.m)),
                     to_size(e.n), horizon)) {
        throw ValidationError("separation witness fails on a prefix of length " + std::to_string(e.prefix.size()));
      }
    }
    return formulas::avoid_prefixes(witness->entries);
  }
  if (!seq.eventually_star()) throw ValidationError("sequence is neither eventually star nor witnessed");
  std::size_t scan = seq.direct_scan();
  std::size_t m0 = onset.value_or(scan);
  if (m0 < scan) throw ValidationError("declared star onset " + std::to_string(m0) + " precedes a real name");
  return formulas::avoid_const(0, nat(m0), 0);
}

AvoidanceWitness cylinder_witness(const MetricNaming& space, const NameSequence& seq, std::size_t depth,
                                  std::size_t horizon) {
  AvoidanceWitness w;
  Rational radius = pow2(-static_cast<long>(depth));
  std::vector<std::vector<Nat>> frontier = {{}};
  for (std::size_t level = 0; level < depth; ++level) {
    std::vector<std::vector<Nat>> next;
    for (const auto& p : frontier) {
      for (const auto& v : space.next_values(p)) {
        auto child = p;
        child.push_back(v);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  for (const auto& p : frontier) {
    FinPartialFn cell = FinPartialFn::from_sequence(p);
    bool cycle_hit = false;
    for (const auto& g : seq.cycle()) {
      auto d = space.inf_dist(cell, g, horizon);
      if (!PointedSpace::is_star(g) && d && *d < radius) cycle_hit = true;
    }
    if (cycle_hit) continue;
    std::size_t m = 0;
    for (std::size_t i = 0; i < seq.prefix_size(); ++i) {
      const Oracle& g = seq.prefix()[i];
      if (PointedSpace::is_star(g)) continue;
      auto d = space.inf_dist(cell, g, horizon);
      if (d && *d < radius) m = i + 1;
    }
    w.entries.push_back({p, nat(depth), nat(m)});
  }
  return w;
}

AvoidanceCheck check_avoidance(const PointedSpace& space, const NameSequence& seq, const Oracle& h, std::size_t depth,
                               std::size_t horizon) {
  AvoidanceCheck check;
  std::vector<std::vector<Nat>> stack = {{}};
  while (!stack.empty()) {
    auto p = std::move(stack.back());
    stack.pop_back();
    Nat raw = h.on_sequence(p);
    if (raw > 0) {
      ++check.answered;
      std::optional<AvoidanceAnswer> a;
      try {
        a = decode_answer(raw);
      } catch (const ValidationError& e) {
        check.valid = false;
        check.violations.push_back(e.what());
        continue;
      }
      if (!separated(space.base(), FinPartialFn::from_sequence(p), real_names_from(seq, a->m), a->n, horizon)) {
        check.valid = false;
        check.violations.push_back("answer <" + std::to_string(a->n) + "," + std::to_string(a->m) +
                                   "> on a prefix of length " + std::to_string(p.size()) + " is not separated");
      }
      continue;
    }
    if (p.size() >= depth) {
      ++check.unanswered;
      continue;
    }
    for (const auto& v : space.base().next_values(p)) {
      auto child = p;
      child.push_back(v);
      stack.push_back(std::move(child));
    }
  }
  return check;
}

}  // namespace k2
