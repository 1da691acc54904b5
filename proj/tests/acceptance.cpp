// Acceptance checks 1-11. One PASS/FAIL line per criterion; exit status 0 iff
// all pass. The oracles below are written against the heap directly and do
// not reuse the library's checkers.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "secref/campaign.hpp"
#include "secref/mutation.hpp"

using namespace secref;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t campaign_seed() {
  if (const char* env = std::getenv("SECREF_SEED")) return std::strtoull(env, nullptr, 10);
  return 20261016;
}

RunConfig paranoid() {
  RunConfig rc;
  rc.check_level = CheckLevel::Paranoid;
  return rc;
}

Verdict timed(Verdict v, double elapsed, double limit) {
  std::ostringstream out;
  out << v.detail << "; " << elapsed << " s (limit " << limit << " s)";
  v.detail = out.str();
  if (elapsed >= limit) v.pass = false;
  return v;
}

// ---- heap oracles ----------------------------------------------------------

void refs_in(const Value& v, std::vector<Addr>& out) {
  if (v.is<Value::Ref>()) out.push_back(v.as_addr());
  if (v.is<Value::LLCons>()) {
    refs_in(v.as<Value::LLCons>().head, out);
    out.push_back(v.as<Value::LLCons>().tail);
  }
  if (v.is<Value::Pair>()) {
    refs_in(v.as<Value::Pair>().first, out);
    refs_in(v.as<Value::Pair>().second, out);
  }
  if (v.is<Value::Inl>()) refs_in(v.as<Value::Inl>().payload, out);
  if (v.is<Value::Inr>()) refs_in(v.as<Value::Inr>().payload, out);
  if (v.is<Value::Seq>()) {
    for (const auto& x : v.as<Value::Seq>().items) refs_in(x, out);
  }
}

// Shareable cells reach only contained shareable cells; labels only name
// allocated cells.
std::optional<std::string> invariant_broken(const World& w) {
  for (const auto& [addr, label] : w.labels.entries()) {
    if (label != Label::Private && !w.heap.contains(addr)) return "label on a free address";
  }
  for (const auto& [addr, cell] : w.heap.cells()) {
    if (addr.value == 0 || addr >= w.heap.next_addr()) return "bad address";
    std::vector<Addr> refs;
    refs_in(cell.value, refs);
    for (Addr r : refs) {
      if (!w.heap.contains(r)) return "dangling reference";
      if (w.labels.at(addr) == Label::Shareable && w.labels.at(r) != Label::Shareable) return "shareable leak";
    }
  }
  return std::nullopt;
}

// Runs the invariant oracle on every world and watches Private labels, which
// must eventually be seen to change (they are not stable).
class CorpusOracle : public StepObserver {
 public:
  void on_transition(const World& before, const World& after) override {
    ++transitions;
    if (auto why = invariant_broken(after); why && invariant_failures++ == 0) first_invariant_failure = *why;
    if (!private_flagged_at) {
      for (const auto& [addr, cell] : before.heap.cells()) {
        if (before.labels.at(addr) == Label::Private && after.labels.at(addr) != Label::Private) {
          private_flagged_at = transitions;
          break;
        }
      }
    }
  }
  std::uint64_t transitions = 0;
  std::uint64_t invariant_failures = 0;
  std::string first_invariant_failure;
  std::optional<std::uint64_t> private_flagged_at;
};

// Cells of w0 that were Private must be unchanged, with unchanged labels.
bool private_cells_kept(const World& w0, const World& w1) {
  for (const auto& [addr, cell] : w0.heap.cells()) {
    const Label l0 = w0.labels.at(addr);
    if (w1.labels.at(addr) != l0) return false;
    if (l0 != Label::Private) continue;
    if (!w1.heap.contains(addr) || w1.heap.cell(addr).value.to_string() != cell.value.to_string()) return false;
  }
  return true;
}

// ---- criterion 1 -----------------------------------------------------------

Verdict criterion1() {
  const auto t0 = Clock::now();
  const Scenario& s = find_scenario("safe_prog");
  const TargetContext lib = s.context("adversarial").make();
  Verdict v;

  ScenarioInstance inst = safe_prog_instance(SafeProgVariant::Labeled);
  auto log = inst.log;
  RunOutcome o = run_target(std::move(inst), lib, paranoid());
  const Addr secret = log->cells.at("secret");
  const World& w = o.exec.run.world;
  const bool secret_ok = o.ok() && *o.exec.run.result == Value::integer(42) && w.heap.contains(secret) &&
                         w.heap.cell(secret).value == Value::integer(42);
  if (!secret_ok) v = {false, "secret is not 42: " + o.exec.behavior.outcome};

  ScenarioInstance bad = safe_prog_instance(SafeProgVariant::Unlabeled);
  auto bad_log = bad.log;
  RunOutcome u = run_target(std::move(bad), lib, paranoid());
  // The fresh cell of `r := alloc 1` is the last one allocated.
  const World& uw = u.exec.run.world;
  const Addr fresh{uw.heap.next_addr().value - 1};
  const Addr r = bad_log->cells.at("r");
  const std::string want = "writing ref#" + std::to_string(fresh.value) + " into shareable cell " + std::to_string(r.value);
  const bool leak_ok = u.exec.run.failure && u.exec.run.failure->code == ErrorCode::ShareLeak &&
                       u.exec.run.failure->message == want && uw.heap.cell(fresh).value == Value::integer(1);
  if (!leak_ok) v = {false, "unlabeled variant: " + u.exec.behavior.outcome};
  if (v.pass) v.detail = "secret = 42; unlabeled variant: " + u.exec.behavior.outcome;
  return timed(v, seconds_since(t0), 1.0);
}

// ---- criterion 2 -----------------------------------------------------------

std::vector<std::int64_t> random_list(std::mt19937_64& rng, std::size_t min_len) {
  std::vector<std::int64_t> out(min_len + rng() % (11 - min_len));
  for (auto& x : out) x = static_cast<std::int64_t>(rng() % 61) - 30;
  return out;
}

// Unsorted lists of length >= 2.
std::vector<std::int64_t> unsorted_list(std::mt19937_64& rng) {
  auto xs = random_list(rng, 2);
  if (std::is_sorted(xs.begin(), xs.end())) {
    std::reverse(xs.begin(), xs.end());
    if (xs.front() == xs.back()) xs.front() += 1;
  }
  return xs;
}

// Records every distinct value the grade cell takes.
class GradeWatch : public StepObserver {
 public:
  explicit GradeWatch(std::shared_ptr<InstanceLog> log) : log_(std::move(log)) {}
  void on_transition(const World&, const World& after) override {
    auto it = log_->cells.find("grade");
    if (it == log_->cells.end() || !after.heap.contains(it->second)) return;
    const std::string now = after.heap.cell(it->second).value.to_string();
    if (values.empty() || values.back() != now) values.push_back(now);
  }
  std::vector<std::string> values;

 private:
  std::shared_ptr<InstanceLog> log_;
};

struct ListWalk {
  bool cycle = false;
  std::vector<std::int64_t> items;
};

ListWalk walk(const Heap& h, Addr head) {
  ListWalk out;
  std::set<Addr> seen;
  Addr at = head;
  while (true) {
    if (!seen.insert(at).second) {
      out.cycle = true;
      return out;
    }
    const Value& v = h.cell(at).value;
    if (v.is<Value::LLNil>()) return out;
    out.items.push_back(v.as<Value::LLCons>().head.as_int());
    at = v.as<Value::LLCons>().tail;
  }
}

Verdict criterion2() {
  const auto t0 = Clock::now();
  const Scenario& s = find_scenario("autograder");
  std::mt19937_64 rng(campaign_seed());
  int good = 0;
  int runs = 0;
  std::string first_bad;
  auto run_one = [&](const std::string& context, const std::vector<std::int64_t>& xs) {
    ++runs;
    ScenarioInstance inst = autograder_instance(xs);
    auto log = inst.log;
    GradeWatch watch(log);
    RunConfig rc = paranoid();
    rc.observer = &watch;
    RunOutcome o = run_target(std::move(inst), s.context(context).make(), rc);
    const bool honest = context == "honest";
    const std::int64_t grade = honest ? kGradePass : kGradeFail;
    bool ok = o.ok() && !o.psi_failure && *o.exec.run.result == Value::integer(grade);
    // The grade changes once, from None straight to its final value.
    ok = ok && watch.values.size() == 2 && watch.values[0] == Value::inl(Value::unit()).to_string() &&
         watch.values[1] == Value::inr(Value::integer(grade)).to_string();
    if (ok && honest) {
      ListWalk l = walk(o.exec.run.world.heap, log->cells.at("list"));
      auto sorted = xs;
      std::sort(sorted.begin(), sorted.end());
      ok = !l.cycle && l.items == sorted && !log->contract_error;
    }
    if (ok && !honest) ok = log->contract_error && log->error_code == ErrCode::PostViolation;
    if (ok) {
      ++good;
    } else if (first_bad.empty()) {
      first_bad = context + ": " + o.exec.behavior.outcome;
    }
  };
  for (int i = 0; i < 50; ++i) run_one("honest", random_list(rng, 0));
  for (const char* adv : {"cycler", "mutator", "nonsorter"}) {
    for (int i = 0; i < 50; ++i) run_one(adv, unsorted_list(rng));
  }
  Verdict v{good == runs, std::to_string(good) + "/" + std::to_string(runs) + " runs as expected"};
  if (!first_bad.empty()) v.detail += "; first mismatch " + first_bad;
  return timed(v, seconds_since(t0), 5.0);
}

// ---- criteria 3-9: one corpus ----------------------------------------------

struct Corpus {
  FuzzTally tally;
  CorpusOracle oracle;
  double seconds = 0;
};

Corpus run_corpus() {
  Corpus c;
  CampaignConfig cfg;
  cfg.seed = campaign_seed();
  cfg.trials = 1000;
  cfg.dual_trials = 0;  // criterion 7 runs its own loop
  cfg.paranoid = true;
  cfg.extra_observer = &c.oracle;
  const auto t0 = Clock::now();
  c.tally = fuzz(cfg);
  c.seconds = seconds_since(t0);
  return c;
}

Verdict criterion3(const Corpus& c) {
  const auto& t = c.tally;
  const std::uint64_t bad = t.relation_violations + t.exported_violations;
  Verdict v{bad == 0 && t.pairs >= 1000,
            std::to_string(bad) + " violations around " + std::to_string(t.context_calls) + " context calls in " +
                std::to_string(t.pairs) + " contexts"};
  return timed(v, c.seconds, 60.0);
}

Verdict criterion4(const Corpus& c) {
  const auto& t = c.tally;
  Verdict v{t.invariant_violations == 0 && c.oracle.invariant_failures == 0 && c.oracle.transitions > 0,
            std::to_string(t.invariant_violations) + " interpreter and " + std::to_string(c.oracle.invariant_failures) +
                " oracle violations over " + std::to_string(c.oracle.transitions) + " steps"};
  if (!c.oracle.first_invariant_failure.empty()) v.detail += " (" + c.oracle.first_invariant_failure + ")";
  return v;
}

Verdict criterion5(const Corpus& c) {
  const auto& t = c.tally;
  Verdict v{t.beh_mismatches == 0 && t.pairs >= 500,
            std::to_string(t.beh_mismatches) + " mismatches over " + std::to_string(t.pairs) + " pairs"};
  return timed(v, c.seconds, 60.0);
}

Verdict criterion6(const Corpus& c) {
  const auto& t = c.tally;
  return {t.psi_violations == 0 && t.psi_runs > 0,
          std::to_string(t.psi_violations) + " violations over " + std::to_string(t.psi_runs) + " terminating runs"};
}

Verdict criterion7() {
  const auto t0 = Clock::now();
  const auto& duals = dual_scenarios();
  int bad = 0;
  int runs = 0;
  std::string first;
  auto judge = [&](const DualScenario& d, const TargetContext& ctx) {
    ++runs;
    RunOutcome o = run_dual(d, ctx, paranoid());
    if (!private_cells_kept(o.exec.start, o.exec.run.world) || !o.mon->relation_violations().empty()) {
      if (bad++ == 0) first = d.program.name + " with " + ctx.name;
    }
  };
  for (std::uint64_t i = 0; i < 200; ++i) {
    const DualScenario& d = duals[i % duals.size()];
    const std::uint64_t ts = trial_seed(campaign_seed() ^ 0xD0A1ULL, i);
    const ExprPtr e = gen_random_context(d.context_type, ts, minimal_size(d.context_type) + 1 + static_cast<int>(ts % 6));
    judge(d, elaborate(e, d.context_type, "generated"));
  }
  for (const auto& d : duals) {
    for (const auto& nc : d.contexts) judge(d, nc.make());
  }
  Verdict v{bad == 0, std::to_string(bad) + " violations over " + std::to_string(runs) + " context-first runs"};
  if (!first.empty()) v.detail += " (first: " + first + ")";
  return timed(v, seconds_since(t0), 60.0);
}

// Bare recalls after assorted prefixes.
std::pair<int, int> bare_recalls() {
  int flagged = 0;
  const int cases = 100;
  for (int n = 0; n < cases; ++n) {
    // Never witnessed below; the decoy witness names a fresh cell instead.
    const Addr target{static_cast<std::uint64_t>(n % 3 + 4)};
    const StablePredicate preds[] = {shareable_token(target), encapsulated_token(target), contained_token(target),
                                     private_token(target)};
    const StablePredicate& p = preds[n % 4];
    Program m = recall_op(p);
    if (n % 2 == 1) {
      m = bind(alloc_op(TypeTag::integer(), Preorder::trivial(), Value::integer(0)),
               [m](const Value& r) { return then(witness_op(contained_token(r.as_addr())), m); });
    }
    for (int i = n % 5; i > 0; --i) {
      m = bind(alloc_op(TypeTag::integer(), Preorder::trivial(), Value::integer(i)), [m, i](const Value& r) {
        return then(i % 2 == 0 ? relabel_op(r.as_addr(), Label::Shareable) : ret(Value::unit()), m);
      });
    }
    RunResult r = run_closed(m, paranoid());
    if (r.failure && r.failure->code == ErrorCode::RecallUnwitnessed) ++flagged;
  }
  return {flagged, cases};
}

Verdict criterion8(const Corpus& c) {
  const auto [flagged, cases] = bare_recalls();
  const bool recall_ok = flagged == cases;
  const bool stable_ok = c.tally.stability_violations == 0;
  const bool control_ok = c.oracle.private_flagged_at && *c.oracle.private_flagged_at <= 1000;
  // The library's negative control over the same in-repo contexts.
  StabilityObserver control = StabilityObserver::private_control();
  RunConfig rc = paranoid();
  rc.observer = &control;
  for (const auto& s : all_scenarios()) {
    for (const auto& nc : s.contexts) {
      if (control.transitions() < 1000) (void)run_target(s, nc.param, nc.make(), rc);
    }
  }
  const bool lib_control_ok = control.first_violation() && *control.first_violation() <= 1000;
  std::ostringstream d;
  d << flagged << "/" << cases << " bare recalls rejected; " << c.tally.stability_violations
    << " stability violations; is_private flagged at transition "
    << (c.oracle.private_flagged_at ? std::to_string(*c.oracle.private_flagged_at) : "never") << " (suite: "
    << (control.first_violation() ? std::to_string(*control.first_violation()) : "never") << ")";
  return {recall_ok && stable_ok && control_ok && lib_control_ok, d.str()};
}

Verdict criterion9(const Corpus& c) {
  const auto& t = c.tally;
  return {t.purity_violations == 0 && t.contract_checks > 0,
          std::to_string(t.purity_violations) + " impure invocations over " + std::to_string(t.contract_checks) +
              " contract invocations"};
}

// ---- criterion 10 ----------------------------------------------------------

// History of a round-robin run, simulated directly.
std::vector<std::int64_t> round_robin(const std::vector<int>& yields) {
  const int k = static_cast<int>(yields.size());
  std::vector<int> left(yields.begin(), yields.end());
  for (auto& x : left) x += 1;
  std::vector<std::int64_t> hist;
  int at = 0;
  int alive = k;
  while (alive > 0) {
    hist.push_back(at);
    if (--left[at] == 0) --alive;
    for (int d = 1; d <= k && alive > 0; ++d) {
      if (left[(at + d) % k] > 0) {
        at = (at + d) % k;
        break;
      }
    }
  }
  return hist;
}

bool fair(int k, const std::vector<std::int64_t>& hist) {
  std::map<std::int64_t, std::vector<std::size_t>> pos;
  for (std::size_t i = 0; i < hist.size(); ++i) pos[hist[i]].push_back(i);
  if (static_cast<int>(pos.size()) != k) return false;
  for (const auto& [task, ps] : pos) {
    for (std::size_t n = 1; n < ps.size(); ++n) {
      for (const auto& [other, qs] : pos) {
        if (other == task || qs.back() < ps[n]) continue;
        const bool between = std::any_of(qs.begin(), qs.end(), [&](std::size_t q) { return q > ps[n - 1] && q < ps[n]; });
        if (!between) return false;
      }
    }
  }
  return true;
}

// Each recorded counter history extends the previous one.
class PrefixWatch : public StepObserver {
 public:
  explicit PrefixWatch(std::shared_ptr<InstanceLog> log) : log_(std::move(log)) {}
  void on_transition(const World&, const World& after) override {
    auto it = log_->cells.find("counter");
    if (it == log_->cells.end() || !after.heap.contains(it->second)) return;
    const auto& items = after.heap.cell(it->second).value.as<Value::Pair>().first.as<Value::Seq>().items;
    std::vector<std::string> now;
    for (const auto& x : items) now.push_back(x.to_string());
    if (now.size() < last_.size() || !std::equal(last_.begin(), last_.end(), now.begin())) monotone = false;
    if (after.labels.at(it->second) != Label::Private) monotone = false;
    last_ = std::move(now);
    ++snapshots;
  }
  bool monotone = true;
  std::uint64_t snapshots = 0;

 private:
  std::shared_ptr<InstanceLog> log_;
  std::vector<std::string> last_;
};

Verdict criterion10() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(campaign_seed() + 10);
  int good = 0;
  std::uint64_t snapshots = 0;
  std::string first_bad;
  const SrcType t = find_scenario("scheduler").context_type;
  for (int n = 0; n < 100; ++n) {
    const int k = 1 + static_cast<int>(rng() % 8);
    std::vector<int> yields(static_cast<std::size_t>(k));
    for (auto& y : yields) y = static_cast<int>(rng() % 17);
    ScenarioInstance inst = scheduler_instance(k);
    auto log = inst.log;
    PrefixWatch watch(log);
    RunConfig rc = paranoid();
    rc.observer = &watch;
    RunOutcome o = run_target(std::move(inst), elaborate(scheduler_tasks(yields), t, "tasks"), rc);
    snapshots += watch.snapshots;
    bool ok = o.ok() && !o.psi_failure && watch.monotone;
    if (ok) {
      const auto& counter = o.exec.run.world.heap.cell(log->cells.at("counter")).value.as<Value::Pair>();
      std::vector<std::int64_t> hist;
      for (const auto& x : counter.first.as<Value::Seq>().items) hist.push_back(x.as_int());
      std::int64_t shared = 0;
      for (int i = 0; i < k; ++i) shared += static_cast<std::int64_t>(i + 1) * (yields[i] + 1);
      ok = hist == round_robin(yields) && fair(k, hist) &&
           counter.second.as<Value::Pair>().second == Value::integer(k) &&
           *o.exec.run.result == Value::integer(shared);
    }
    if (ok) {
      ++good;
    } else if (first_bad.empty()) {
      first_bad = "k=" + std::to_string(k) + ": " + o.exec.behavior.outcome;
    }
  }
  Verdict v{good == 100, std::to_string(good) + "/100 task sets fair and complete; " + std::to_string(snapshots) +
                             " counter snapshots checked"};
  if (!first_bad.empty()) v.detail += "; first mismatch " + first_bad;
  return timed(v, seconds_since(t0), 10.0);
}

// ---- driver ----------------------------------------------------------------

std::vector<Verdict> criteria_1_to_10() {
  std::vector<Verdict> out;
  out.push_back(criterion1());
  out.push_back(criterion2());
  const Corpus corpus = run_corpus();
  out.push_back(criterion3(corpus));
  out.push_back(criterion4(corpus));
  out.push_back(criterion5(corpus));
  out.push_back(criterion6(corpus));
  out.push_back(criterion7());
  out.push_back(criterion8(corpus));
  out.push_back(criterion9(corpus));
  out.push_back(criterion10());
  return out;
}

Verdict criterion11() {
  Verdict v;
  for (Mutant m : {Mutant::CtxWriteNoShareCheck, Mutant::LabelShareableNoPointsTo, Mutant::ImportNoPost}) {
    ScopedMutant scoped(m);
    std::vector<int> failed;
    const auto verdicts = criteria_1_to_10();
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
      if (!verdicts[i].pass) failed.push_back(static_cast<int>(i) + 1);
    }
    std::string list;
    for (int f : failed) list += (list.empty() ? "" : ",") + std::to_string(f);
    v.detail += std::string(v.detail.empty() ? "" : "; ") + std::string(to_string(m)) + " fails " +
                (list.empty() ? "nothing" : list);
    if (failed.empty()) v.pass = false;
  }
  return v;
}

}  // namespace

int main() {
  std::vector<Verdict> all = criteria_1_to_10();
  all.push_back(criterion11());
  bool pass = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::cout << (all[i].pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << all[i].detail << std::endl;
    pass = pass && all[i].pass;
  }
  return pass ? 0 : 1;
}
