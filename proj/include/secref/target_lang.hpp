#pragma once

// A small simply typed language with first-order references, used to write
// unverified contexts. Programs are s-expressions (see docs/sref-grammar.md).
// Elaborated terms touch the world only through ContextOps.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "secref/linker.hpp"

namespace secref {

class SrcType {
 public:
  enum class Kind { Unit, Int, Bool, Pair, Sum, Ref, LList, Arrow };

  static SrcType unit();
  static SrcType integer();
  static SrcType boolean();
  static SrcType pair(SrcType a, SrcType b);
  static SrcType sum(SrcType a, SrcType b);
  static SrcType ref(SrcType payload);
  static SrcType llist(SrcType element);
  static SrcType arrow(SrcType arg, SrcType res);
  // Throws TypeError for Seq tags.
  static SrcType of_tag(const TypeTag& t);

  Kind kind() const { return node_->kind; }
  const SrcType& left() const { return node_->children.at(0); }
  const SrcType& right() const { return node_->children.at(1); }
  const SrcType& inner() const { return node_->children.at(0); }
  const SrcType& arg() const { return node_->children.at(0); }
  const SrcType& res() const { return node_->children.at(1); }

  bool is_ground() const;
  // Throws TypeError (FunctionInStore) when an arrow occurs.
  TypeTag to_tag() const;

  std::string to_string() const;
  bool operator==(const SrcType& other) const;

 private:
  struct Node {
    Kind kind;
    std::vector<SrcType> children;
  };
  explicit SrcType(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static SrcType make(Kind kind, std::vector<SrcType> children = {});

  std::shared_ptr<const Node> node_;
};

// Type of the value a context must produce for `spec` (import side) and of a
// verified value exported at `spec`. Fallible exported arrows answer (+ B int).
SrcType context_type(const InterfaceSpec& spec);
SrcType exported_type(const InterfaceSpec& spec);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    Var, Lam, App, Let, Unit, Int, Bool, BinOp, If, Pair, Fst, Snd, Inl, Inr, Case,
    Alloc, Deref, Assign, Nil, Cons, CaseLL, Fix, Seq,
  };

  Kind kind = Kind::Unit;
  // Var/Lam/Let binder, Case left binder, CaseLL head binder, Fix function name.
  std::string name;
  // Case right binder, CaseLL tail binder, Fix argument name.
  std::string name2;
  std::string op;  // BinOp
  // Lam/Fix argument type, Inl/Inr sum type, Nil element type.
  std::optional<SrcType> type;
  std::optional<SrcType> type2;  // Fix result type
  std::int64_t int_value = 0;
  bool bool_value = false;
  std::vector<ExprPtr> kids;
  int line = 0;
  int col = 0;
};

// Node count.
std::size_t expr_size(const ExprPtr& e);

// Throws ParseError with "line:col" in the message.
ExprPtr parse(const std::string& text);
SrcType parse_type(const std::string& text);
// Re-parseable s-expression.
std::string print(const ExprPtr& e);

struct Typed {
  SrcType type;
  // Payload tag of every Alloc node and list tag of every CaseLL node.
  std::map<const Expr*, TypeTag> tags;
};

// Throws TypeError; the message starts with a reason key such as
// FunctionInStore, NotARef, Unbound or Mismatch.
Typed typecheck(const ExprPtr& e);

// Evaluates a closed well-typed term using only ops. The resulting context
// value may contain closures.
Program evaluate(const ExprPtr& e, const Typed& typed, const ContextOps& ops);

// Throws InterfaceMismatch when the term's type is not `expected`.
TargetContext elaborate(const ExprPtr& e, const SrcType& expected, std::string name);
TargetContext elaborate(const ExprPtr& e, const InterfaceSpec& spec, std::string name);

// Seed-deterministic well-typed term of type t. size bounds the term's depth
// budget; throws GenerationExhausted if the smallest term does not fit.
ExprPtr gen_random_context(const SrcType& t, std::uint64_t seed, int size);
// Smallest size gen_random_context accepts for t.
int minimal_size(const SrcType& t);
ExprPtr gen_random_context(const InterfaceSpec& spec, std::uint64_t seed, int size);

// Size-decreasing regeneration: smallest size in [1, size] for which
// `still_fails` holds on the regenerated term, together with that term.
struct Shrunk {
  int size;
  ExprPtr term;
};
Shrunk shrink(const SrcType& t, std::uint64_t seed, int size, const std::function<bool(const ExprPtr&)>& still_fails);

}  // namespace secref
