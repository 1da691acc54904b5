#pragma once

// Linking verified programs with unverified contexts.
//
// A target context only sees three operations (ContextOps). They enforce
// that every address reaching unverified code is Shareable and that every
// context allocation is labeled Shareable. compile and back_translate put the
// same import wrapper on the two sides of the link, so
//   link_target(compile(P, I), C)  and  link_source(P, back_translate(C, I))
// unfold to the same computation.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "secref/contract.hpp"

namespace secref {

// World-level context operations. Throw BoundaryViolation when a
// non-shareable or ill-typed address reaches them.
std::pair<Addr, World> ctx_alloc(const World& w, const TypeTag& tag, const Value& init);
Value ctx_read(const World& w, const Value& ref);
World ctx_write(const World& w, const Value& ref, const Value& v);

// The same operations as computations, for use inside a run.
struct ContextOps {
  std::function<Program(const TypeTag&, const Value&)> alloc;  // yields a Ref
  std::function<Program(const Value&)> read;
  std::function<Program(const Value&, const Value&)> write;
};

ContextOps context_ops();

using Psi = std::function<std::optional<std::string>(const World& w0, const Value& result, const World& w1)>;

struct SourceInterface {
  std::string name;
  InterfaceSpec spec;  // spec of the context value
  ContractTree hocs;
  Psi psi;             // nullopt when the post-condition holds
};

SourceInterface make_interface(std::string name, InterfaceSpec spec, Psi psi);

struct SourceProgram {
  std::string name;
  std::function<Program(const Value& ctx)> body;  // yields Int
};

struct TargetContext {
  std::string name;
  std::function<Program(const ContextOps&)> builder;  // yields the context value
};

using TargetProgram = std::function<Program(const Value& target_ctx)>;

struct WholeProgram {
  std::function<Program()> thunk;
};

// Runs the context's builder as unverified code.
Program instantiate(const TargetContext& c, const MonitorPtr& mon);

TargetProgram compile(const SourceProgram& p, const SourceInterface& i, const MonitorPtr& mon);
// Yields Inl source_ctx or Inr err.
Program back_translate(const TargetContext& c, const SourceInterface& i, const MonitorPtr& mon);

WholeProgram link_target(const TargetProgram& pt, const TargetContext& c, const MonitorPtr& mon);
WholeProgram link_source(const SourceProgram& p, Program source_ctx);

// Context-first direction: the context value is a function that receives the
// exported program.
struct DualProgram {
  std::string name;
  InterfaceSpec spec;                  // spec of the exported value
  std::function<Program()> make;       // yields the source value
};

WholeProgram link_dual(const DualProgram& p, const TargetContext& c, const MonitorPtr& mon);

struct BehaviorRecord {
  std::string outcome;            // "ok <value>" or "error <Code>: <detail>"
  std::vector<std::string> dump;  // "<addr> <tag> <label> <value>" in address order

  bool operator==(const BehaviorRecord&) const = default;
  std::string to_string() const;
};

BehaviorRecord behavior_of(const RunResult& r);

struct Execution {
  World start;
  RunResult run;
  BehaviorRecord behavior;
};

Execution execute(const WholeProgram& wp, const RunConfig& cfg, World start = initial_world());
BehaviorRecord beh(const WholeProgram& wp, const RunConfig& cfg);
bool beh_equal(const BehaviorRecord& a, const BehaviorRecord& b);

}  // namespace secref
