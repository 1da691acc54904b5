#pragma once

// Linked runs of scenarios and the randomized campaigns built on them.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "secref/scenarios.hpp"

namespace secref {

struct RunOutcome {
  Execution exec;
  MonitorPtr mon;
  std::optional<std::string> psi_failure;  // only judged on normal termination
  bool contract_error = false;

  bool ok() const { return exec.run.ok(); }
};

// link_target(compile(P, I), C)
RunOutcome run_target(const Scenario& s, std::int64_t param, const TargetContext& c, const RunConfig& cfg);
// link_source(P, back_translate(C, I))
RunOutcome run_source(const Scenario& s, std::int64_t param, const TargetContext& c, const RunConfig& cfg);
// The same two pipelines for a prepared instance.
RunOutcome run_target(ScenarioInstance inst, const TargetContext& c, const RunConfig& cfg);
RunOutcome run_source(ScenarioInstance inst, const TargetContext& c, const RunConfig& cfg);

// Context-first run from dual_start_world(). psi_failure reports a broken
// modif_only_shareable_and_encaps or same_labels between start and end.
RunOutcome run_dual(const DualScenario& d, const TargetContext& c, const RunConfig& cfg);

// nullopt when the outcome matches, otherwise why not.
std::optional<std::string> expectation_failure(const RunOutcome& o, Expectation e);

// Watches transitions and checks that a family of predicates, instantiated
// at every address of the earlier world, is stable.
class StabilityObserver : public StepObserver {
 public:
  using Family = std::function<StablePredicate(Addr)>;

  explicit StabilityObserver(std::vector<Family> families) : families_(std::move(families)) {}
  static StabilityObserver registered();       // shareable, encapsulated, contains
  static StabilityObserver private_control();  // is_private; must be flagged

  void on_transition(const World& before, const World& after) override;

  std::uint64_t transitions() const { return transitions_; }
  // Transition index at which the first violation was seen.
  std::optional<std::uint64_t> first_violation() const { return first_violation_; }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<Family> families_;
  std::uint64_t transitions_ = 0;
  std::optional<std::uint64_t> first_violation_;
  std::vector<std::string> violations_;
};

struct CampaignConfig {
  std::uint64_t seed = 0;
  std::uint64_t trials = 200;       // generated contexts in the program-first direction
  std::uint64_t dual_trials = 100;  // generated contexts in the context-first direction
  std::uint64_t fuel = kDefaultFuel;
  bool paranoid = true;
  std::vector<std::string> scenarios;  // empty selects all
  int min_size = 1;  // generated sizes, above the smallest term of the type
  int max_size = 6;
  std::string repro_path;              // empty disables repro files
  // Also notified of every transition of every run; not owned.
  StepObserver* extra_observer = nullptr;
};

// Per-criterion tallies of a fuzz campaign.
struct FuzzTally {
  std::uint64_t runs = 0;                 // linked runs, both sides counted
  std::uint64_t context_calls = 0;
  std::uint64_t relation_violations = 0;  // around context calls
  std::uint64_t exported_violations = 0;  // around verified callbacks
  std::uint64_t invariant_violations = 0;
  std::uint64_t stability_violations = 0;  // interpreter and observer
  std::uint64_t transitions = 0;
  std::uint64_t pairs = 0;                 // program-first trials
  std::uint64_t beh_mismatches = 0;
  std::uint64_t psi_runs = 0;
  std::uint64_t psi_violations = 0;
  std::uint64_t contract_checks = 0;
  std::uint64_t purity_violations = 0;
  std::uint64_t dual_runs = 0;
  std::uint64_t dual_violations = 0;
  std::uint64_t named_runs = 0;            // in-repo contexts and forgers
  std::uint64_t expectation_failures = 0;
  std::uint64_t aborted_runs = 0;  // any abort, for information
};

struct TrialFailure {
  std::uint64_t seed;
  std::string scenario;
  std::int64_t param;
  int size;
  std::string reason;
  std::string context;  // printed shrunk context
};

struct CheckLine {
  std::string name;
  bool passed;
  std::string detail;
};

struct Report {
  std::string command;
  CampaignConfig config;
  std::vector<CheckLine> checks;
  std::map<std::string, std::uint64_t> counts;
  std::vector<TrialFailure> failures;

  bool passed() const;
  std::string text() const;
  std::string json() const;  // byte-identical for identical inputs
};

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

// Everything one generated program-first trial yields, before judging.
struct TrialResult {
  RunOutcome target;
  RunOutcome source;
  StabilityObserver observer = StabilityObserver::registered();
};

TrialResult run_trial(const Scenario& s, std::int64_t param, const ExprPtr& ctx, const CampaignConfig& cfg);
// First broken property of a trial, if any.
std::optional<std::string> trial_failure(const TrialResult& t);

FuzzTally fuzz(const CampaignConfig& cfg, std::vector<TrialFailure>* failures = nullptr);
Report fuzz_report(const CampaignConfig& cfg);
Report props_report(const CampaignConfig& cfg);

}  // namespace secref
