// k2lab: command-line front end. Every command prints one JSON document
// {"schema_version", "command", "result", "meta"} on standard output.
// Exit codes: 0 success, 2 invalid input, 3 budget exhausted.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "acceptance.hpp"
#include "k2/anti_specker.hpp"
#include "k2/apply.hpp"
#include "k2/bdn.hpp"
#include "k2/cauchy_lab.hpp"
#include "k2/errors.hpp"
#include "k2/json_io.hpp"
#include "k2/naming.hpp"
#include "k2/oracle_spec.hpp"
#include "k2/reals.hpp"
#include "k2/seq_code.hpp"

using namespace k2;

namespace {

constexpr double kLedgerWarning = 1024.0 * 11;

struct Command {
  std::string name;
  std::function<Json()> run;
};

bool trace = false;

void note(const std::string& line) {
  if (trace) std::cerr << line << '\n';
}

Json cell_json(const FinPartialFn& cell) {
  Json out = Json::array();
  for (const auto& [i, v] : cell.entries()) out.push_back(Json::array({i, nat_json(v)}));
  return out;
}

MetricNaming parse_space(const std::string& text) { return MetricNaming::from_json(parse_json(text, "space")); }

NameSequence parse_sequence(const std::string& text) {
  if (text == "all-star") return NameSequence::all_star();
  return NameSequence::from_json(parse_json(text, "sequence"));
}

RationalSeq parse_rseq(const std::string& text, const char* what) {
  if (text == "dyadic") return dyadic_sequence();
  return RationalSeq::from_json(parse_json(text, what));
}

Json eval_json(const Evaluation& ev) {
  Json j = ev.to_json();
  note("status " + j["status"].get<std::string>() + ", slots tried " + std::to_string(ev.slots_tried));
  return j;
}

Json theta_list(const CompactnessBase& base, std::size_t slots) {
  Json out = Json::array();
  for (std::size_t i = 0; i < slots; ++i) {
    auto t = base.theta(i);
    out.push_back(t ? theta_to_json(*t) : Json(nullptr));
  }
  return out;
}

Json cover_json(const CoverReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"depth", r.depth},
          {"witness", r.witness ? cell_json(*r.witness) : Json(nullptr)}};
}

void add_k2(CLI::App& app, std::optional<Command>& cmd) {
  auto* k2 = app.add_subcommand("k2", "star, bullet and the sequence codec");
  k2->require_subcommand(1);

  static std::string f, g;
  static std::size_t fuel = 1000, at = 0;
  auto* s = k2->add_subcommand("star", "f * g");
  s->add_option("--f", f, "oracle spec")->required();
  s->add_option("--g", g, "oracle spec")->required();
  s->add_option("--fuel", fuel, "prefixes to try");
  s->callback([&cmd] {
    cmd = Command{"k2 star", [] {
                    StarResult r = star(parse_oracle_arg(f), parse_oracle_arg(g), Fuel{fuel});
                    return Json{{"value", nat_json(r.result.value())}, {"firing_index", *r.firing_index}};
                  }};
  });

  auto* b = k2->add_subcommand("apply", "(f . g)(k)");
  b->add_option("--f", f, "oracle spec")->required();
  b->add_option("--g", g, "oracle spec")->required();
  b->add_option("--at", at, "argument k")->required();
  b->add_option("--fuel", fuel, "prefixes to try");
  b->callback([&cmd] {
    cmd = Command{"k2 apply", [] {
                    StarResult r = bullet(parse_oracle_arg(f), parse_oracle_arg(g)).at(nat(at), Fuel{fuel});
                    return Json{{"value", nat_json(r.result.value())}, {"firing_index", *r.firing_index}};
                  }};
  });

  static std::vector<std::string> values;
  auto* e = k2->add_subcommand("encode", "code of a finite sequence");
  e->add_option("values", values, "naturals")->delimiter(',');
  e->callback([&cmd] {
    cmd = Command{"k2 encode", [] {
                    std::vector<Nat> seq;
                    for (const auto& v : values) seq.push_back(json_nat(Json(v), "value"));
                    return Json{{"code", nat_json(encode_sequence(seq))}};
                  }};
  });

  static std::string code;
  auto* d = k2->add_subcommand("decode", "sequence of a code");
  d->add_option("code", code, "natural")->required();
  d->callback([&cmd] {
    cmd = Command{"k2 decode", [] {
                    Json out = Json::array();
                    for (const auto& v : decode_sequence(json_nat(Json(code), "code"))) out.push_back(nat_json(v));
                    return Json{{"sequence", out}};
                  }};
  });
}

void add_reals(CLI::App& app, std::optional<Command>& cmd) {
  auto* reals = app.add_subcommand("reals", "signed-digit reals");
  reals->require_subcommand(1);
  static std::string x, y;
  static std::size_t k = 20;

  auto* a = reals->add_subcommand("approx", "digits and approximation of a rational");
  a->add_option("--q", x, "rational p/q")->required();
  a->add_option("--k", k, "precision");
  a->callback([&cmd] {
    cmd = Command{"reals approx", [] {
                    auto r = from_rational(parse_rational(x));
                    return Json{{"real", real_to_json(r, k)}, {"approx", rational_json(r.approx(k))}};
                  }};
  });

  auto* m = reals->add_subcommand("max", "max of two rationals as streams");
  m->add_option("--x", x, "rational")->required();
  m->add_option("--y", y, "rational")->required();
  m->add_option("--k", k, "precision");
  m->callback([&cmd] {
    cmd = Command{"reals max", [] {
                    auto r = max_star(from_rational(parse_rational(x)), from_rational(parse_rational(y)));
                    return Json{{"real", real_to_json(r, k)}, {"approx", rational_json(r.approx(k))}};
                  }};
  });
}

void add_spaces(CLI::App& app, std::optional<Command>& cmd) {
  auto* spaces = app.add_subcommand("spaces", "metric namings");
  spaces->require_subcommand(1);
  static std::string space, f, g, theta;
  static std::size_t k = 20, horizon = 64, slots = 4;
  static std::optional<std::size_t> depth;

  auto* d = spaces->add_subcommand("dist", "distance of two names");
  d->add_option("--space", space, "space spec")->required();
  d->add_option("--f", f, "oracle spec")->required();
  d->add_option("--g", g, "oracle spec")->required();
  d->add_option("--k", k, "precision of the approximation");
  d->add_option("--horizon", horizon, "name reads");
  d->callback([&cmd] {
    cmd = Command{"spaces dist", [] {
                    auto s = parse_space(space);
                    Oracle a = parse_oracle_arg(f), b = parse_oracle_arg(g);
                    if (!s.in_domain(a, horizon) || !s.in_domain(b, horizon)) {
                      throw ValidationError("names outside the domain of " + s.id());
                    }
                    return Json{{"space", s.id()},
                                {"dist", rational_json(s.dist(a, b, horizon))},
                                {"approx", rational_json(s.dist_hat(a, b).approx(k))},
                                {"k", k}};
                  }};
  });

  auto* c = spaces->add_subcommand("covers", "does a finite family of atoms cover the space");
  c->add_option("--space", space, "space spec")->required();
  c->add_option("--theta", theta, "list of atoms")->required();
  c->add_option("--depth", depth, "refinement depth");
  c->callback([&cmd] {
    cmd = Command{"spaces covers", [] {
                    return cover_json(covers(theta_from_json(parse_json(theta, "theta")), parse_space(space), depth));
                  }};
  });

  auto* b = spaces->add_subcommand("base", "slots of the builtin compactness base");
  b->add_option("--space", space, "space spec")->required();
  b->add_option("--slots", slots, "number of slots");
  b->callback([&cmd] {
    cmd = Command{"spaces base", [] {
                    auto base = builtin_base(parse_space(space));
                    return Json{{"base", base->describe()}, {"thetas", theta_list(*base, slots)}};
                  }};
  });
}

Oracle default_name(const MetricNaming& space, const NameSequence& seq) {
  if (!seq.eventually_star()) throw ValidationError("--h is required for sequences with a cycle tail");
  return avoidance_realizer_concrete(PointedSpace(space), seq, seq.direct_scan(), std::nullopt);
}

void add_antispecker(CLI::App& app, std::optional<Command>& cmd) {
  auto* as = app.add_subcommand("antispecker", "anti-Specker realizers");
  as->require_subcommand(1);
  static std::string space, left, right, sequence, h;
  static std::size_t fuel = 64, budget = 64, depth = 4;

  auto* demo = as->add_subcommand("demo", "realizer from the builtin base");
  demo->add_option("--space", space, "space spec")->required();
  demo->add_option("--sequence", sequence, "\"all-star\" or a sequence spec")->required();
  demo->add_option("--h", h, "avoidance name (default: the constant answer at the star onset)");
  demo->add_option("--fuel", fuel, "base slots to try");
  demo->callback([&cmd] {
    cmd = Command{"antispecker demo", [] {
                    auto s = parse_space(space);
                    auto seq = parse_sequence(sequence);
                    Oracle name = h.empty() ? default_name(s, seq) : parse_oracle_arg(h);
                    Json out = eval_json(realizer_from_base(builtin_base(s))->evaluate(seq, name, Fuel{fuel}));
                    if (seq.eventually_star()) out["direct_scan"] = seq.direct_scan();
                    return out;
                  }};
  });

  auto* check = as->add_subcommand("check", "check an avoidance name on the prefix tree");
  check->add_option("--space", space, "space spec")->required();
  check->add_option("--sequence", sequence, "sequence spec")->required();
  check->add_option("--h", h, "avoidance name")->required();
  check->add_option("--depth", depth, "prefix depth");
  check->callback([&cmd] {
    cmd = Command{"antispecker check", [] {
                    auto c = check_avoidance(PointedSpace(parse_space(space)), parse_sequence(sequence),
                                             parse_oracle_arg(h), depth);
                    return Json{{"valid", c.valid},
                                {"answered", c.answered},
                                {"unanswered", c.unanswered},
                                {"violations", c.violations}};
                  }};
  });

  auto* probe = as->add_subcommand("probe", "harvest a base from the builtin realizer");
  probe->add_option("--space", space, "space spec")->required();
  probe->add_option("--budget", budget, "probes");
  probe->callback([&cmd] {
    cmd = Command{"antispecker probe", [] {
                    auto s = parse_space(space);
                    ProbeOptions options;
                    options.probe_budget = budget;
                    auto r = base_from_realizer(*realizer_from_base(builtin_base(s)), PointedSpace(s), options);
                    note("harvested " + std::to_string(r.emitted) + " coverings in " + std::to_string(r.probes) +
                         " probes");
                    return Json{{"base", r.base->describe()},
                                {"probes", r.probes},
                                {"determined", r.determined},
                                {"emitted", r.emitted},
                                {"rejected_cover", r.rejected_cover},
                                {"budget_exhausted", r.budget_exhausted},
                                {"thetas", theta_list(*r.base, r.emitted)}};
                  }};
  });

  auto* product = as->add_subcommand("product", "product realizer from the two builtin realizers");
  product->add_option("--left", left, "space spec")->required();
  product->add_option("--right", right, "space spec")->required();
  product->add_option("--sequence", sequence, "\"all-star\" or a sequence spec")->required();
  product->add_option("--h", h, "avoidance name");
  product->add_option("--budget", budget, "probes per factor");
  product->add_option("--fuel", fuel, "base slots to try");
  product->callback([&cmd] {
    cmd = Command{"antispecker product", [] {
                    auto l = parse_space(left), r = parse_space(right);
                    auto z = product_metric_naming(l, r);
                    auto seq = parse_sequence(sequence);
                    Oracle name = h.empty() ? default_name(z, seq) : parse_oracle_arg(h);
                    ProbeOptions options;
                    options.probe_budget = budget;
                    auto m = product_anti_specker(*realizer_from_base(builtin_base(l)),
                                                  *realizer_from_base(builtin_base(r)), options);
                    Json out = eval_json(m->evaluate(seq, name, Fuel{fuel}));
                    if (seq.eventually_star()) out["direct_scan"] = seq.direct_scan();
                    return out;
                  }};
  });
}

void add_splitter(CLI::App& app, std::optional<Command>& cmd) {
  auto* sp = app.add_subcommand("splitter", "protected splitting");
  sp->require_subcommand(1);
  static std::string x, b = "dyadic", tail_bound;
  static std::size_t stages = 1;
  static bool verify = false;

  auto* run = sp->add_subcommand("run", "split x against b");
  run->add_option("--x", x, "sequence spec")->required();
  run->add_option("--b", b, "\"dyadic\" or a sequence spec");
  run->add_option("--stages", stages, "stages to run");
  run->add_flag("--verify", verify, "recompute every protected clearance");
  run->add_option("--tail-bound", tail_bound, "bound on the remaining sum of |x_i|");
  run->callback([&cmd] {
    cmd = Command{"splitter run", [] {
                    auto ledger = protected_split(parse_rseq(x, "x"), parse_rseq(b, "b"), stages);
                    for (const auto& st : ledger.stages) {
                      note("stage " + std::to_string(st.stage) + ": k = " + std::to_string(st.k) + ", cases " +
                           std::to_string(st.case1) + "/" + std::to_string(st.case2) + "/" +
                           std::to_string(st.case3));
                    }
                    double next = projected_pairs(ledger.block_start(ledger.stages_done()), ledger.stages_done());
                    if (next > kLedgerWarning) {
                      std::cerr << "warning: the next stage would classify about " << next << " pairs\n";
                    }
                    Json out = {{"ledger", ledger.to_json()}};
                    if (verify) {
                      std::optional<Rational> bound;
                      if (!tail_bound.empty()) bound = parse_rational(tail_bound);
                      auto report = verify_dagger(ledger, bound);
                      out["dagger"] = report.to_json();
                      if (!report.ok()) throw InvariantError("clearance check failed", report.to_json().dump(2));
                    }
                    return out;
                  }};
  });
}

void add_rpt(CLI::App& app, std::optional<Command>& cmd) {
  auto* rpt = app.add_subcommand("rpt", "windows of rearranged series");
  rpt->require_subcommand(1);
  static std::string a, perm, f;
  static std::size_t stages = 4, m = 0, n = 0, horizon = 40, rounds = 4096;

  auto common = [](CLI::App* c) {
    c->add_option("--a", a, "partial sums (sequence spec)")->required();
    c->add_option("--stages", stages, "splitting stages");
  };
  auto with_windows = [](CLI::App* c) {
    c->add_option("--perm", perm, "permutation table");
    c->add_option("--f", f, "modulus of a (oracle spec)")->required();
    c->add_option("--n", n, "precision")->required();
    c->add_option("--rounds", rounds, "dovetailing rounds");
  };

  auto* d = rpt->add_subcommand("decide", "Case I window or Case II certificate at m");
  common(d);
  with_windows(d);
  d->add_option("--m", m, "start index")->required();
  d->callback([&cmd] {
    cmd = Command{"rpt decide", [] {
                    auto ledger = protected_split(difference_sequence(parse_rseq(a, "a")), dyadic_sequence(), stages);
                    PermutationSpec p = perm.empty() ? PermutationSpec::identity()
                                                     : PermutationSpec::from_json(parse_json(perm, "perm"));
                    RptInput in{ledger, p, parse_oracle_arg(f)};
                    auto c = decide_case(in, m, n, Fuel{rounds});
                    if (auto* one = std::get_if<CaseI>(&c)) return Json{{"case", "I"}, {"i", one->i}, {"j", one->j}};
                    auto two = std::get<CaseII>(c);
                    return Json{{"case", "II"}, {"n0", two.n0}, {"n1", two.n1}, {"k0", two.k0}};
                  }};
  });

  auto* fa = rpt->add_subcommand("f", "least m answered by Case II");
  common(fa);
  with_windows(fa);
  fa->callback([&cmd] {
    cmd = Command{"rpt f", [] {
                    auto ledger = protected_split(difference_sequence(parse_rseq(a, "a")), dyadic_sequence(), stages);
                    PermutationSpec p = perm.empty() ? PermutationSpec::identity()
                                                     : PermutationSpec::from_json(parse_json(perm, "perm"));
                    RptInput in{ledger, p, parse_oracle_arg(f)};
                    return Json{{"n", n}, {"m", f_a_bar(in, n, Fuel{rounds})}};
                  }};
  });

  auto* mod = rpt->add_subcommand("modulus", "modulus of a from the splitting of its differences");
  common(mod);
  mod->add_option("--horizon", horizon, "levels to emit and check");
  mod->callback([&cmd] {
    cmd = Command{"rpt modulus", [] {
                    auto seq = parse_rseq(a, "a");
                    auto ledger = protected_split(difference_sequence(seq), dyadic_sequence(), stages);
                    auto fg = modulus_from_absz(ledger, absz_modulus(ledger));
                    Json values = Json::array();
                    for (std::size_t i = 0; i <= horizon; ++i) values.push_back(nat_json(fg(i)));
                    auto cx = is_modulus(fg, seq, horizon);
                    Json check = cx ? Json{{"n", cx->n}, {"i", cx->i}, {"j", cx->j}} : Json(nullptr);
                    return Json{{"modulus", values}, {"counterexample", check}};
                  }};
  });
}

void add_pc(CLI::App& app, std::optional<Command>& cmd) {
  auto* pc = app.add_subcommand("pc", "partially-Cauchy realizer");
  pc->require_subcommand(1);
  static std::string x, f, g;
  static std::size_t n = 0;
  auto* run = pc->add_subcommand("run", "least k with small windows from k on");
  run->add_option("--x", x, "sequence spec")->required();
  run->add_option("--f", f, "modulus of x (oracle spec)")->required();
  run->add_option("--g", g, "window ends, g(m) >= m (oracle spec)")->required();
  run->add_option("--n", n, "precision")->required();
  run->callback([&cmd] {
    cmd = Command{"pc run", [] {
                    return Json{{"k", pc_realizer(parse_rseq(x, "x"), parse_oracle_arg(f), parse_oracle_arg(g), n)}};
                  }};
  });
}

void add_bdn(CLI::App& app, std::optional<Command>& cmd) {
  auto* bdn = app.add_subcommand("bdn", "bound extraction and the continuity adversary");
  bdn->require_subcommand(1);
  static std::string g, h, alpha;
  static std::size_t fuel = 1000;

  auto* ex = bdn->add_subcommand("extract", "bound of g from an intensional name h");
  ex->add_option("--g", g, "oracle spec")->required();
  ex->add_option("--h", h, "oracle spec")->required();
  ex->add_option("--fuel", fuel, "prefixes to try");
  ex->callback([&cmd] {
    cmd = Command{"bdn extract", [] {
                    return Json{{"bound", nat_json(extract_bound(parse_oracle_arg(g), parse_oracle_arg(h), Fuel{fuel}))}};
                  }};
  });

  auto* adv = bdn->add_subcommand("adversary", "refute a candidate extensional name");
  adv->add_option("--alpha", alpha, "oracle spec")->required();
  adv->add_option("--fuel", fuel, "fuel per application");
  adv->callback([&cmd] {
    cmd = Command{"bdn adversary", [] {
                    auto rep = adversary_refute(parse_oracle_arg(alpha), Fuel{fuel});
                    note(to_string(rep.verdict) + ": " + rep.reason);
                    return rep.to_json();
                  }};
  });
}

int run_selftest(bool as_json) {
  Json rows = Json::array();
  int failed = 0;
  double total = 0;
  for (const auto& c : acceptance::criteria()) {
    auto o = acceptance::run(c);
    total += o.seconds;
    if (!o.passed) ++failed;
    if (as_json) {
      rows.push_back({{"id", o.id}, {"name", o.name}, {"passed", o.passed}, {"detail", o.detail}});
    } else {
      std::cout << acceptance::format(o) << std::endl;
    }
  }
  if (as_json) {
    Json doc = {{"schema_version", "1"},
                {"command", "selftest"},
                {"result", {{"criteria", rows}, {"failed", failed}}},
                {"meta", {{"seconds", total}}}};
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workbench for Kleene's second model: K2 application, namings, anti-Specker realizers, "
               "protected splitting and BD-N."};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  app.add_flag("--trace", trace, "human-readable trace on standard error");

  std::optional<Command> cmd;
  add_k2(app, cmd);
  add_reals(app, cmd);
  add_spaces(app, cmd);
  add_antispecker(app, cmd);
  add_splitter(app, cmd);
  add_rpt(app, cmd);
  add_pc(app, cmd);
  add_bdn(app, cmd);

  bool selftest_json = false;
  auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria and print a scorecard");
  selftest->add_flag("--json", selftest_json, "scorecard as a JSON document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (selftest->parsed()) return run_selftest(selftest_json);
  if (!cmd) return 2;

  auto start = std::chrono::steady_clock::now();
  try {
    Json result = cmd->run();
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json doc = {{"schema_version", "1"}, {"command", cmd->name}, {"result", result}, {"meta", {{"seconds", seconds}}}};
    std::cout << doc.dump(2) << '\n';
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return 3;
  } catch (const HorizonError& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return 3;
  } catch (const InvariantError& e) {
    std::cerr << "internal invariant failed: " << e.what() << '\n' << e.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
