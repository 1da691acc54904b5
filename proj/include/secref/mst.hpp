#pragma once

// Monotonic-state computations as a free monad over heap operations plus
// witness/recall, and the state-passing interpreter that runs them.
//
// The interpreter's state is a World (heap plus label map). A witnessed
// predicate is identified by its name; `run` keeps the set of witnessed names
// and checks on the executed path that every recall was preceded by a
// witness of the same name.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "secref/errors.hpp"
#include "secref/labeled_refs.hpp"

namespace secref {

struct StablePredicate {
  std::string name;
  std::function<bool(const World&)> test;
  std::string stability_hint;
};

StablePredicate shareable_token(Addr r);     // "is_shareable@r"
StablePredicate encapsulated_token(Addr r);  // "is_encapsulated@r"
StablePredicate contained_token(Addr r);     // "contains@r"
// Not stable: a private cell may later be labeled. Negative control only.
StablePredicate private_token(Addr r);       // "is_private@r"

class WitnessSet {
 public:
  bool contains(const std::string& name) const { return preds_.count(name) != 0; }
  void insert(const StablePredicate& p) { preds_.insert_or_assign(p.name, p); }
  std::size_t size() const { return preds_.size(); }
  // Name of the first member whose test fails on w.
  std::optional<std::string> first_failing(const World& w) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, StablePredicate> preds_;
};

class Program {
 public:
  using Cont = std::function<Program(const Value&)>;

  struct Return;
  struct Bind;
  struct Read;
  struct Write;
  struct Alloc;
  struct Witness;
  struct Recall;
  struct Relabel;
  struct Observe;
  struct Fail;
  struct Tick;
  struct Node;

  const Node& node() const { return *node_; }
  bool is_return() const;
  // Payload of a Return node.
  const Value& returned() const;

  template <typename T>
  static Program make(T alternative);

 private:
  explicit Program(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Program::Return { Value value; };
struct Program::Bind { Program first; Cont rest; };
struct Program::Read { Addr addr; Cont k; };
struct Program::Write { Addr addr; Value value; Cont k; };
struct Program::Alloc { TypeTag tag; Preorder rel; Value init; std::function<Program(Addr)> k; };
struct Program::Witness { StablePredicate pred; Cont k; };
struct Program::Recall { StablePredicate pred; Cont k; };
struct Program::Relabel { Addr addr; Label label; Cont k; };
// Read-only view of the current world; the continuation cannot change it.
struct Program::Observe { std::function<Program(const World&)> k; };
struct Program::Fail { ErrorCode code; std::string message; };
// No-op step; burns one unit of fuel. Emitted by recursive host code.
struct Program::Tick { Cont k; };

struct Program::Node {
  std::variant<Return, Bind, Read, Write, Alloc, Witness, Recall, Relabel, Observe, Fail, Tick> alt;
};

template <typename T>
Program Program::make(T alternative) {
  return Program(std::make_shared<const Node>(Node{std::move(alternative)}));
}

// ---- smart constructors ---------------------------------------------------

Program ret(Value v);
// Left unit is applied eagerly: bind(ret(v), k) == k(v).
Program bind(Program m, Program::Cont k);
Program then(Program m, Program next);
Program then(Program m, std::function<Program()> next);

Program read_op(Addr r);
Program write_op(Addr r, Value v);
Program alloc_op(TypeTag tag, Preorder rel, Value init);  // yields Ref
Program witness_op(StablePredicate p);
Program recall_op(StablePredicate p);
Program relabel_op(Addr r, Label l);
Program observe(std::function<Program(const World&)> k);
Program fail_op(ErrorCode code, std::string message);
Program tick();

// Closure backed by a host function, and application of any closure value.
Value host_closure(std::string name, std::function<Program(const Value&)> body);
Program call(const Value& f, const Value& arg);

// ---- interpreter ----------------------------------------------------------

enum class CheckLevel { Fast, Paranoid };

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  // Called after every step that changed the world.
  virtual void on_transition(const World& before, const World& after) = 0;
};

struct RunConfig {
  CheckLevel check_level = CheckLevel::Fast;
  std::uint64_t fuel = kDefaultFuel;
  StepObserver* observer = nullptr;
};

struct Failure {
  ErrorCode code;
  std::string message;
};

struct RunResult {
  std::optional<Value> result;  // empty when the run aborted
  std::optional<Failure> failure;
  World world;                  // final world, or the world at the abort point
  WitnessSet witnessed;
  std::uint64_t steps = 0;
  std::uint64_t invariant_checks = 0;

  bool ok() const { return result.has_value(); }
};

// Empty heap, next address 1, empty label map.
World initial_world();

RunResult run(const Program& m, World w0, WitnessSet witnessed, const RunConfig& cfg);
RunResult run_closed(const Program& m, const RunConfig& cfg);

}  // namespace secref
