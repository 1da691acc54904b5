#include "secref/campaign.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "secref/errors.hpp"
#include "secref/sampling.hpp"

namespace secref {

namespace {

RunOutcome finish(Execution exec, MonitorPtr mon, const ScenarioInstance& inst) {
  RunOutcome o{std::move(exec), std::move(mon), std::nullopt, inst.log->contract_error};
  if (o.ok()) o.psi_failure = inst.iface.psi(o.exec.start, *o.exec.run.result, o.exec.run.world);
  return o;
}

bool failed_with(const RunOutcome& o, ErrorCode code) {
  return o.exec.run.failure && o.exec.run.failure->code == code;
}

}  // namespace

RunOutcome run_target(ScenarioInstance inst, const TargetContext& c, const RunConfig& cfg) {
  auto mon = std::make_shared<Monitor>();
  WholeProgram wp = link_target(compile(inst.program, inst.iface, mon), c, mon);
  return finish(execute(wp, cfg), mon, inst);
}

RunOutcome run_source(ScenarioInstance inst, const TargetContext& c, const RunConfig& cfg) {
  auto mon = std::make_shared<Monitor>();
  WholeProgram wp = link_source(inst.program, back_translate(c, inst.iface, mon));
  return finish(execute(wp, cfg), mon, inst);
}

RunOutcome run_target(const Scenario& s, std::int64_t param, const TargetContext& c, const RunConfig& cfg) {
  return run_target(s.instance(param), c, cfg);
}

RunOutcome run_source(const Scenario& s, std::int64_t param, const TargetContext& c, const RunConfig& cfg) {
  return run_source(s.instance(param), c, cfg);
}

RunOutcome run_dual(const DualScenario& d, const TargetContext& c, const RunConfig& cfg) {
  auto mon = std::make_shared<Monitor>();
  RunOutcome o{execute(link_dual(d.program, c, mon), cfg, dual_start_world()), mon, std::nullopt, false};
  const World& w0 = o.exec.start;
  const World& w1 = o.exec.run.world;
  if (!modif_only_shareable_and_encaps(w0, w1)) {
    o.psi_failure = "a private cell of the start world changed";
  } else if (!same_labels(w0, w1)) {
    o.psi_failure = "labels of the start world changed";
  }
  return o;
}

std::optional<std::string> expectation_failure(const RunOutcome& o, Expectation e) {
  if (!o.mon->relation_violations().empty()) return o.mon->relation_violations().front();
  if (!o.mon->exported_violations().empty()) return o.mon->exported_violations().front();
  if (e == Expectation::BoundaryError) {
    if (o.ok()) return std::string("terminated normally");
    if (!failed_with(o, ErrorCode::BoundaryViolation)) return "aborted with " + o.exec.behavior.outcome;
    return std::nullopt;
  }
  if (!o.ok()) return "aborted: " + o.exec.behavior.outcome;
  if (o.psi_failure) return "psi: " + *o.psi_failure;
  if (e == Expectation::Ok && o.contract_error) return std::string("unexpected contract error");
  if (e == Expectation::ContractError && !o.contract_error) return std::string("no contract error observed");
  return std::nullopt;
}

// ---- stability -------------------------------------------------------------

StabilityObserver StabilityObserver::registered() {
  return StabilityObserver({shareable_token, encapsulated_token, contained_token});
}

StabilityObserver StabilityObserver::private_control() { return StabilityObserver({private_token}); }

void StabilityObserver::on_transition(const World& before, const World& after) {
  ++transitions_;
  for (const auto& [addr, cell] : before.heap.cells()) {
    for (const auto& family : families_) {
      const StablePredicate p = family(addr);
      if (p.test(before) && !p.test(after)) {
        if (!first_violation_) first_violation_ = transitions_;
        violations_.push_back(p.name + " broken at transition " + std::to_string(transitions_));
      }
    }
  }
}

namespace {

// Labels never move down.
class LabelObserver : public StepObserver {
 public:
  void on_transition(const World& before, const World& after) override {
    ++transitions;
    for (const auto& [addr, cell] : before.heap.cells()) {
      if (!label_leq(before.labels.at(addr), after.labels.at(addr))) ++violations;
    }
  }
  std::uint64_t transitions = 0;
  std::uint64_t violations = 0;
};

// Fans one transition out to several observers.
class Fanout : public StepObserver {
 public:
  explicit Fanout(std::vector<StepObserver*> all) {
    for (auto* o : all) {
      if (o != nullptr) all_.push_back(o);
    }
  }
  void on_transition(const World& before, const World& after) override {
    for (auto* o : all_) o->on_transition(before, after);
  }

 private:
  std::vector<StepObserver*> all_;
};

// Observers of one run: the caller's plus the campaign's extra one.
struct Observed {
  Observed(const CampaignConfig& cfg, StepObserver* own) : fan({own, cfg.extra_observer}) {
    rc.check_level = cfg.paranoid ? CheckLevel::Paranoid : CheckLevel::Fast;
    rc.fuel = cfg.fuel;
    rc.observer = &fan;
  }
  Observed(const Observed&) = delete;
  Observed& operator=(const Observed&) = delete;

  Fanout fan;
  RunConfig rc;
};

std::vector<const Scenario*> selected(const CampaignConfig& cfg) {
  std::vector<const Scenario*> out;
  for (const auto& s : all_scenarios()) {
    if (cfg.scenarios.empty() || std::find(cfg.scenarios.begin(), cfg.scenarios.end(), s.name) != cfg.scenarios.end()) {
      out.push_back(&s);
    }
  }
  if (out.empty()) fail(ErrorCode::InterfaceMismatch, "no scenario matches the filter");
  return out;
}

// Sizes above the type's minimum, in [min_size, max_size].
int trial_size(const CampaignConfig& cfg, const SrcType& t, std::uint64_t ts) {
  const int span = std::max(1, cfg.max_size - cfg.min_size + 1);
  return minimal_size(t) + cfg.min_size + static_cast<int>(ts % static_cast<std::uint64_t>(span));
}

void tally_run(FuzzTally& t, const RunOutcome& o) {
  ++t.runs;
  const auto& st = o.mon->stats();
  t.context_calls += st.context_calls;
  t.relation_violations += o.mon->relation_violations().size();
  t.exported_violations += o.mon->exported_violations().size();
  t.contract_checks += st.contract_checks;
  t.purity_violations += st.purity_violations;
  if (failed_with(o, ErrorCode::InvariantViolation)) ++t.invariant_violations;
  if (failed_with(o, ErrorCode::StabilityViolation)) ++t.stability_violations;
  if (!o.ok()) ++t.aborted_runs;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  // splitmix64 of (seed, trial)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

TrialResult run_trial(const Scenario& s, std::int64_t param, const ExprPtr& ctx, const CampaignConfig& cfg) {
  TrialResult out{};
  const Observed obs(cfg, &out.observer);
  const TargetContext c = elaborate(ctx, s.context_type, "generated");
  out.target = run_target(s, param, c, obs.rc);
  out.source = run_source(s, param, c, obs.rc);
  return out;
}

std::optional<std::string> trial_failure(const TrialResult& t) {
  for (const RunOutcome* o : {&t.target, &t.source}) {
    if (!o->mon->relation_violations().empty()) return "context relation: " + o->mon->relation_violations().front();
    if (!o->mon->exported_violations().empty()) return "callback relation: " + o->mon->exported_violations().front();
    if (failed_with(*o, ErrorCode::InvariantViolation) || failed_with(*o, ErrorCode::StabilityViolation)) {
      return o->exec.behavior.outcome;
    }
    if (o->mon->stats().purity_violations != 0) return std::string("impure contract");
  }
  if (!t.observer.violations().empty()) return "stability: " + t.observer.violations().front();
  if (!beh_equal(t.target.exec.behavior, t.source.exec.behavior)) {
    return "behaviors differ: " + t.target.exec.behavior.outcome + " vs " + t.source.exec.behavior.outcome;
  }
  if (t.target.psi_failure) return "psi: " + *t.target.psi_failure;
  return std::nullopt;
}

FuzzTally fuzz(const CampaignConfig& cfg, std::vector<TrialFailure>* failures) {
  FuzzTally tally;
  const auto scen = selected(cfg);
  auto record = [&](TrialFailure f) {
    if (failures != nullptr) failures->push_back(std::move(f));
  };

  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    const Scenario& s = *scen[i % scen.size()];
    const std::uint64_t ts = trial_seed(cfg.seed, i);
    const std::int64_t param = s.random_param(ts);
    const int size = trial_size(cfg, s.context_type, ts);
    const ExprPtr ctx = gen_random_context(s.context_type, ts, size);
    TrialResult tr = run_trial(s, param, ctx, cfg);
    tally_run(tally, tr.target);
    tally_run(tally, tr.source);
    ++tally.pairs;
    tally.transitions += tr.observer.transitions();
    tally.stability_violations += tr.observer.violations().size();
    if (!beh_equal(tr.target.exec.behavior, tr.source.exec.behavior)) ++tally.beh_mismatches;
    if (tr.target.ok()) {
      ++tally.psi_runs;
      if (tr.target.psi_failure) ++tally.psi_violations;
    }
    if (auto why = trial_failure(tr)) {
      auto still_fails = [&](const ExprPtr& e) { return trial_failure(run_trial(s, param, e, cfg)).has_value(); };
      const Shrunk small = shrink(s.context_type, ts, size, still_fails);
      record({ts, s.name, param, small.size, *why, print(small.term)});
    }
  }

  for (std::uint64_t i = 0; i < cfg.dual_trials; ++i) {
    const auto& duals = dual_scenarios();
    const DualScenario& d = duals[i % duals.size()];
    const std::uint64_t ts = trial_seed(cfg.seed ^ 0xD0A1D0A1ULL, i);
    const int size = trial_size(cfg, d.context_type, ts);
    const ExprPtr ctx = gen_random_context(d.context_type, ts, size);
    StabilityObserver obs = StabilityObserver::registered();
    const Observed observed(cfg, &obs);
    RunOutcome o = run_dual(d, elaborate(ctx, d.context_type, "generated"), observed.rc);
    tally_run(tally, o);
    ++tally.dual_runs;
    tally.transitions += obs.transitions();
    tally.stability_violations += obs.violations().size();
    if (o.psi_failure) {
      ++tally.dual_violations;
      record({ts, "dual-" + d.program.name, 0, size, "dual: " + *o.psi_failure, print(ctx)});
    }
  }

  // In-repo contexts, including the address forgers, in both pipelines.
  for (const Scenario* s : scen) {
    for (const auto& nc : s->contexts) {
      StabilityObserver obs = StabilityObserver::registered();
      const Observed observed(cfg, &obs);
      const RunConfig& rc = observed.rc;
      const TargetContext c = nc.make();
      RunOutcome t = run_target(*s, nc.param, c, rc);
      RunOutcome src = run_source(*s, nc.param, c, rc);
      tally_run(tally, t);
      tally_run(tally, src);
      tally.transitions += obs.transitions();
      tally.stability_violations += obs.violations().size();
      ++tally.pairs;
      if (!beh_equal(t.exec.behavior, src.exec.behavior)) ++tally.beh_mismatches;
      if (t.ok()) {
        ++tally.psi_runs;
        if (t.psi_failure) ++tally.psi_violations;
      }
      ++tally.named_runs;
      if (auto why = expectation_failure(t, nc.expect)) {
        ++tally.expectation_failures;
        record({0, s->name, nc.param, 0, nc.name + ": " + *why, nc.name});
      }
    }
  }
  for (const auto& d : dual_scenarios()) {
    for (const auto& nc : d.contexts) {
      StabilityObserver obs = StabilityObserver::registered();
      const Observed observed(cfg, &obs);
      RunOutcome o = run_dual(d, nc.make(), observed.rc);
      tally_run(tally, o);
      ++tally.dual_runs;
      tally.transitions += obs.transitions();
      tally.stability_violations += obs.violations().size();
      if (o.psi_failure) ++tally.dual_violations;
      ++tally.named_runs;
      if (auto why = expectation_failure(o, nc.expect)) {
        ++tally.expectation_failures;
        record({0, "dual-" + d.program.name, 0, 0, nc.name + ": " + *why, nc.name});
      }
    }
  }
  return tally;
}

// ---- reports ---------------------------------------------------------------

bool Report::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string Report::text() const {
  std::ostringstream out;
  for (const auto& c : checks) out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  for (const auto& f : failures) {
    out << "  failing case: scenario=" << f.scenario << " seed=" << f.seed << " param=" << f.param
        << " size=" << f.size << " reason=" << f.reason << "\n";
  }
  out << (passed() ? "all checks passed" : "some checks failed") << "\n";
  return out.str();
}

std::string Report::json() const {
  using nlohmann::json;
  json j;
  j["command"] = command;
  j["config"] = {{"seed", config.seed},         {"trials", config.trials},     {"dual_trials", config.dual_trials},
                 {"fuel", config.fuel},         {"paranoid", config.paranoid}, {"scenarios", config.scenarios},
                 {"min_size", config.min_size}, {"max_size", config.max_size}};
  j["checks"] = json::array();
  for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["counts"] = counts;
  j["failures"] = json::array();
  for (const auto& f : failures) {
    j["failures"].push_back({{"seed", f.seed},
                             {"scenario", f.scenario},
                             {"param", f.param},
                             {"size", f.size},
                             {"reason", f.reason},
                             {"context", f.context}});
  }
  j["passed"] = passed();
  return j.dump(2) + "\n";
}

namespace {

std::map<std::string, std::uint64_t> counts_of(const FuzzTally& t) {
  return {{"runs", t.runs},
          {"context_calls", t.context_calls},
          {"relation_violations", t.relation_violations},
          {"exported_violations", t.exported_violations},
          {"invariant_violations", t.invariant_violations},
          {"stability_violations", t.stability_violations},
          {"transitions", t.transitions},
          {"pairs", t.pairs},
          {"beh_mismatches", t.beh_mismatches},
          {"psi_runs", t.psi_runs},
          {"psi_violations", t.psi_violations},
          {"contract_checks", t.contract_checks},
          {"purity_violations", t.purity_violations},
          {"dual_runs", t.dual_runs},
          {"dual_violations", t.dual_violations},
          {"named_runs", t.named_runs},
          {"expectation_failures", t.expectation_failures},
          {"aborted_runs", t.aborted_runs}};
}

CheckLine zero(const std::string& name, std::uint64_t bad, std::uint64_t out_of, const std::string& unit) {
  return {name, bad == 0, std::to_string(bad) + " violations over " + std::to_string(out_of) + " " + unit};
}

void write_repro(const CampaignConfig& cfg, const std::vector<TrialFailure>& failures) {
  if (cfg.repro_path.empty() || failures.empty()) return;
  // Generated failures carry a term; named ones (size 0) only a context name.
  auto it = std::find_if(failures.begin(), failures.end(), [](const TrialFailure& f) { return f.size > 0; });
  const TrialFailure& f = it != failures.end() ? *it : failures.front();
  std::ofstream out(cfg.repro_path);
  out << "; scenario " << f.scenario << ", seed " << f.seed << ", param " << f.param << ", size " << f.size << "\n";
  out << "; " << f.reason << "\n";
  if (f.size > 0) {
    out << f.context << "\n";
  } else {
    out << "; replay: secref run " << f.scenario << " " << f.context << " --paranoid\n";
  }
}

}  // namespace

Report fuzz_report(const CampaignConfig& cfg) {
  Report r;
  r.command = "fuzz";
  r.config = cfg;
  const FuzzTally t = fuzz(cfg, &r.failures);
  r.counts = counts_of(t);
  r.checks.push_back(zero("context relation", t.relation_violations + t.exported_violations, t.context_calls,
                          "context calls"));
  r.checks.push_back(zero("lr_inv", t.invariant_violations, t.runs, "runs"));
  r.checks.push_back(zero("beh_equal", t.beh_mismatches, t.pairs, "pairs"));
  r.checks.push_back(zero("psi", t.psi_violations, t.psi_runs, "terminating runs"));
  r.checks.push_back(zero("dual relation", t.dual_violations, t.dual_runs, "dual runs"));
  r.checks.push_back(zero("stability", t.stability_violations, t.transitions, "transitions"));
  r.checks.push_back(zero("contract purity", t.purity_violations, t.contract_checks, "contract invocations"));
  r.checks.push_back(zero("named contexts", t.expectation_failures, t.named_runs, "runs"));
  write_repro(cfg, r.failures);
  return r;
}

Report props_report(const CampaignConfig& cfg) {
  Report r;
  r.command = "props";
  r.config = cfg;

  {
    ValueSampler sampler(cfg.seed);
    std::string detail;
    bool ok = true;
    for (const auto& rp : registered_preorders()) {
      if (auto bad = preorder_law_violation(rp.preorder, sampler.samples(rp.domain, 60))) {
        ok = false;
        detail += rp.preorder.name() + ": " + *bad + "; ";
      }
    }
    r.checks.push_back({"preorder laws", ok,
                        ok ? std::to_string(registered_preorders().size()) + " preorders lawful" : detail});
  }
  {
    // Not transitive: 0 ~ 1 ~ 2 but not 0 ~ 2.
    Preorder broken("within_one",
                    [](const Value& a, const Value& b) { return std::llabs(a.as_int() - b.as_int()) <= 1; });
    ValueSampler sampler(cfg.seed);
    auto bad = preorder_law_violation(broken, sampler.samples(TypeTag::integer(), 60));
    r.checks.push_back({"broken preorder flagged", bad.has_value(), bad.value_or("not flagged")});
  }
  {
    const bool ok = lr_inv(initial_world()) && lr_inv(dual_start_world());
    r.checks.push_back({"initial world invariants", ok, ok ? "lr_inv holds" : "lr_inv fails"});
  }

  // Corpus: every in-repo context plus `trials` generated ones.
  StabilityObserver registered = StabilityObserver::registered();
  StabilityObserver control = StabilityObserver::private_control();
  LabelObserver labels;
  Fanout fan({&registered, &control, &labels});
  const Observed observed(cfg, &fan);
  const RunConfig& rc = observed.rc;
  std::uint64_t checks = 0;
  std::uint64_t impure = 0;
  auto account = [&](const RunOutcome& o) {
    checks += o.mon->stats().contract_checks;
    impure += o.mon->stats().purity_violations;
  };
  const auto scen = selected(cfg);
  for (const Scenario* s : scen) {
    for (const auto& nc : s->contexts) account(run_target(*s, nc.param, nc.make(), rc));
  }
  for (const auto& d : dual_scenarios()) {
    for (const auto& nc : d.contexts) account(run_dual(d, nc.make(), rc));
  }
  for (std::uint64_t i = 0; i < cfg.trials; ++i) {
    const Scenario& s = *scen[i % scen.size()];
    const std::uint64_t ts = trial_seed(cfg.seed, i);
    const ExprPtr ctx = gen_random_context(s.context_type, ts, trial_size(cfg, s.context_type, ts));
    account(run_target(s, s.random_param(ts), elaborate(ctx, s.context_type, "generated"), rc));
  }

  r.checks.push_back(zero("stability of registered predicates", registered.violations().size(),
                          registered.transitions(), "transitions"));
  const bool flagged = control.first_violation() && *control.first_violation() <= 1000;
  r.checks.push_back({"is_private flagged as unstable", flagged,
                      control.first_violation()
                          ? "flagged at transition " + std::to_string(*control.first_violation())
                          : "not flagged in " + std::to_string(control.transitions()) + " transitions"});
  r.checks.push_back(zero("contract purity", impure, checks, "contract invocations"));
  r.checks.push_back(zero("label monotonicity", labels.violations, labels.transitions, "transitions"));
  r.counts = {{"transitions", registered.transitions()}, {"contract_checks", checks}};
  return r;
}

}  // namespace secref
