#pragma once

// Worked examples: each verified program with its interface, post-condition
// and a set of honest and adversarial contexts.
//
// A ScenarioInstance is single-use. Programs keep host-side bookkeeping (call
// counts, addresses of their private cells) that psi reads, so every linked
// run needs a fresh instance.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secref/linker.hpp"
#include "secref/target_lang.hpp"

namespace secref {

// `.sref` files shipped in contexts/, keyed by file stem.
const std::map<std::string, std::string>& embedded_contexts();
// Throws InterfaceMismatch for an unknown name.
const std::string& embedded_context(const std::string& name);

struct InstanceLog {
  bool contract_error = false;  // the program observed an Inr from the context
  std::optional<ErrCode> error_code;
  std::vector<std::string> notes;
  // Addresses of the program's own cells by role, e.g. "grade" or "counter".
  std::map<std::string, Addr> cells;
};

struct ScenarioInstance {
  SourceInterface iface;
  SourceProgram program;
  std::shared_ptr<InstanceLog> log;
};

enum class Expectation {
  Ok,             // normal termination and psi
  ContractError,  // normal termination, psi, and a contract error was observed
  BoundaryError,  // the run aborts with BoundaryViolation
};

std::string_view to_string(Expectation e);

struct NamedContext {
  std::string name;
  std::function<TargetContext()> make;
  Expectation expect = Expectation::Ok;
  std::int64_t param = 0;  // instance parameter; 0 picks the scenario default
  bool forger = false;     // host code that fabricates addresses
};

struct Scenario {
  std::string name;
  InterfaceSpec spec;
  SrcType context_type;
  std::function<ScenarioInstance(std::int64_t param)> instance;
  // Parameter drawn from a seed, for campaigns.
  std::function<std::int64_t(std::uint64_t seed)> random_param;
  std::vector<NamedContext> contexts;

  const NamedContext& context(const std::string& name) const;
};

const std::vector<Scenario>& all_scenarios();
// Throws InterfaceMismatch for an unknown name.
const Scenario& find_scenario(const std::string& name);

// ---- safe_prog -------------------------------------------------------------

enum class SafeProgVariant {
  Labeled,    // r := alloc 1 with the fresh cell labeled first
  Unlabeled,  // the fresh cell stays Private
};

ScenarioInstance safe_prog_instance(SafeProgVariant variant = SafeProgVariant::Labeled);

// ---- autograder ------------------------------------------------------------

inline constexpr std::int64_t kGradePass = 10;
inline constexpr std::int64_t kGradeFail = 0;

InterfaceSpec autograder_spec();
ScenarioInstance autograder_instance(std::vector<std::int64_t> test);
// Deterministic list for a parameter; used by the registry.
std::vector<std::int64_t> autograder_list(std::int64_t param);

// ---- prng ------------------------------------------------------------------

std::int64_t generate_nr(std::int64_t seed, std::int64_t i);
ScenarioInstance prng_instance(std::int64_t seed);

// ---- guess -----------------------------------------------------------------

// The oracle answers -1 when pick < guess, 1 when pick > guess, 0 on a hit.
ScenarioInstance guess_instance(std::int64_t lo, std::int64_t pick, std::int64_t hi);

// ---- scheduler -------------------------------------------------------------

inline constexpr std::uint64_t kSchedulerBudget = 160;

ScenarioInstance scheduler_instance(int k, std::uint64_t budget = kSchedulerBudget);
// Between consecutive occurrences of a task, every other task still active
// after the second one occurs. With at least k entries every task occurs.
bool fairness(int k, const std::vector<std::int64_t>& hist);
// Task set whose task i yields yields[i] times and then returns. Each step
// adds i + 1 to the shared cell.
ExprPtr scheduler_tasks(const std::vector<int>& yields);

// ---- dual direction --------------------------------------------------------

struct DualScenario {
  DualProgram program;
  SrcType context_type;  // (-> exported int)
  std::vector<NamedContext> contexts;
};

const std::vector<DualScenario>& dual_scenarios();
// Start world for dual runs: one Private cell the context must not reach.
World dual_start_world();

// ---- forgers ---------------------------------------------------------------

enum class ForgeAction { Read, Write, Alloc };

// Host context of type t that, whenever one of its functions is called, uses
// a fabricated reference ref#target:int. Expected to abort with
// BoundaryViolation.
TargetContext forger_context(const SrcType& t, ForgeAction action, Addr target);
std::vector<NamedContext> forger_contexts(const SrcType& t);

}  // namespace secref
