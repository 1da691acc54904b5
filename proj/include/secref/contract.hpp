#pragma once

// Higher-order contracts at the verified/unverified boundary.
//
// A boundary value is a Value that may contain closures. `import` takes a
// value produced by unverified code and yields Inl v' or Inr err; `export`
// hands a verified value to unverified code. Arrows are wrapped lazily: their
// checks run at call time, inside the interpreter, through read-only Observe
// nodes.
//
// An error crossing the boundary is the value Inr (Int code).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "secref/mst.hpp"

namespace secref {

enum class ErrCode { PreViolation = 1, PostViolation = 2, RefinementViolation = 3, ImportFailure = 4 };

std::string_view to_string(ErrCode code);

struct Err {
  ErrCode code;
  std::string message;
};

Value err_value(ErrCode code);
// nullopt unless v is Inr (Int code) with a known code.
std::optional<ErrCode> err_code_of(const Value& v);

struct Refinement {
  std::string name;
  std::function<bool(const Value&)> check;
};

using CheckResult = std::optional<Err>;  // nullopt means the check passed

// Precondition on the argument of an exported arrow. Must only read the world.
struct ExecPre {
  std::string name;
  std::function<CheckResult(const Value& arg, const World&)> check;
};

// Stateful postcondition of an imported arrow: select captures what verify
// needs before the call; verify judges the result after it.
struct ExecPost {
  std::string name;
  std::function<Value(const Value& arg, const World&)> select;
  std::function<CheckResult(const Value& captured, const Value& result, const World&)> verify;
};

class InterfaceSpec {
 public:
  enum class Kind { Base, Pair, Sum, Ref, LList, Arrow };

  static InterfaceSpec base(TypeTag t);  // unit, int or bool
  static InterfaceSpec pair(InterfaceSpec a, InterfaceSpec b);
  static InterfaceSpec sum(InterfaceSpec a, InterfaceSpec b);
  static InterfaceSpec ref(TypeTag payload);
  static InterfaceSpec llist(TypeTag element);
  static InterfaceSpec arrow(InterfaceSpec arg, InterfaceSpec res, std::optional<ExecPre> pre = std::nullopt,
                             std::optional<ExecPost> post = std::nullopt);

  // Throws InterfaceMismatch on arrows.
  InterfaceSpec refined(Refinement r) const;

  Kind kind() const { return node_->kind; }
  // Base type, Ref payload or LList element.
  const TypeTag& tag() const { return *node_->tag; }
  const InterfaceSpec& left() const { return node_->children.at(0); }
  const InterfaceSpec& right() const { return node_->children.at(1); }
  const InterfaceSpec& arg() const { return node_->children.at(0); }
  const InterfaceSpec& res() const { return node_->children.at(1); }
  const std::optional<Refinement>& refinement() const { return node_->refinement; }
  const std::optional<ExecPre>& pre() const { return node_->pre; }
  const std::optional<ExecPost>& post() const { return node_->post; }

  // Full ground type of a first-order spec; throws InterfaceMismatch on arrows.
  TypeTag ground_tag() const;
  bool is_first_order() const;

  // Contract names are included, e.g. "(-> (ref int) unit post:sorted)".
  std::string to_string() const;

 private:
  struct Node {
    Kind kind;
    std::optional<TypeTag> tag;
    std::vector<InterfaceSpec> children;
    std::optional<Refinement> refinement;
    std::optional<ExecPre> pre;
    std::optional<ExecPost> post;
  };
  explicit InterfaceSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Can importing a value of this spec fail immediately (refinements only).
bool import_can_fail(const InterfaceSpec& spec);
// Whether an exported arrow answers with a sum: Inl result or Inr error.
bool export_is_fallible(const InterfaceSpec& arrow);

// The checks of a spec arranged in its shape. Base/Ref/LList nodes are leaves.
class ContractTree {
 public:
  static ContractTree of(const InterfaceSpec& spec);

  const std::optional<ExecPre>& pre() const { return pre_; }
  const std::optional<ExecPost>& post() const { return post_; }
  const std::optional<Refinement>& refinement() const { return refinement_; }
  const std::vector<ContractTree>& children() const { return children_; }
  const ContractTree& child(std::size_t i) const { return children_.at(i); }

 private:
  std::optional<ExecPre> pre_;
  std::optional<ExecPost> post_;
  std::optional<Refinement> refinement_;
  std::vector<ContractTree> children_;
};

bool shape_matches(const InterfaceSpec& spec, const ContractTree& tree);

// Observations of one linked run: calls into unverified code, the
// context relation around each of them, and contract invocations.
class Monitor : public std::enable_shared_from_this<Monitor> {
 public:
  struct Stats {
    std::uint64_t context_calls = 0;
    std::uint64_t exported_calls = 0;
    std::uint64_t contract_checks = 0;
    std::uint64_t purity_violations = 0;
    std::uint64_t contract_failures = 0;
  };

  const Stats& stats() const { return stats_; }
  // One line per broken relation around a context call or exported call.
  const std::vector<std::string>& relation_violations() const { return relation_violations_; }
  const std::vector<std::string>& exported_violations() const { return exported_violations_; }
  const std::vector<std::string>& errors() const { return errors_; }

  // Runs `body` as unverified code, checking modif_only_shareable_and_encaps
  // and same_labels between entry and exit.
  Program context_call(std::string where, std::function<Program()> body);
  // Runs `body` as a call into verified code exported to the context and
  // records whether non-shareable, non-encapsulated cells stayed unchanged.
  Program exported_call(std::string where, std::function<Program()> body);

  // Invokes a contract on a world snapshot and compares the world before and
  // after. Counts the call and any failure.
  CheckResult run_check(const std::string& name, const World& w,
                        const std::function<CheckResult(const World&)>& check);
  Value run_select(const std::string& name, const World& w,
                   const std::function<Value(const World&)>& select);

  void record_error(const Err& e) { errors_.push_back(std::string(to_string(e.code)) + ": " + e.message); }

 private:
  void compare_snapshot(const std::string& name, const World& before, const World& after);

  Stats stats_;
  std::vector<std::string> relation_violations_;
  std::vector<std::string> exported_violations_;
  std::vector<std::string> errors_;
};

using MonitorPtr = std::shared_ptr<Monitor>;

// Inl v' on success, Inr (Int code) on a refinement failure. Arrows are wrapped
// and never fail here. Throws TypeMismatch if v does not have the spec's shape.
Value import_value(const InterfaceSpec& spec, const Value& v, const ContractTree& hocs, const MonitorPtr& mon);
// Identity on first-order data; arrows are wrapped.
Value export_value(const InterfaceSpec& spec, const Value& v, const ContractTree& hocs, const MonitorPtr& mon);

// Every address in v_out occurs at the same position in v_in. Closures are
// compared per call elsewhere and count as preserved here.
bool preserves_refs_check(const InterfaceSpec& spec, const Value& v_in, const Value& v_out);

}  // namespace secref
