#pragma once

// Full ground types, dynamic values and one-level reference traversal.

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace secref {

class Heap;
class Program;
class Value;

struct Addr {
  std::uint64_t value = 0;
  auto operator<=>(const Addr&) const = default;
};

// Pseudo-address of the label map. Never a heap key.
inline constexpr Addr kLabelMapAddr{0};

using AddrSet = std::set<Addr>;

class TypeTag {
 public:
  enum class Kind { Unit, Int, Bool, Sum, Pair, Ref, LList, Seq };

  static TypeTag unit();
  static TypeTag integer();
  static TypeTag boolean();
  static TypeTag sum(TypeTag left, TypeTag right);
  static TypeTag pair(TypeTag first, TypeTag second);
  static TypeTag ref(TypeTag payload);
  static TypeTag llist(TypeTag element);
  // Immutable inline sequence; used only by verified-side private state.
  static TypeTag seq(TypeTag element);

  Kind kind() const { return node_->kind; }
  const TypeTag& left() const { return node_->children.at(0); }
  const TypeTag& right() const { return node_->children.at(1); }
  // Payload of Ref/LList/Seq.
  const TypeTag& inner() const { return node_->children.at(0); }

  std::string to_string() const;
  bool operator==(const TypeTag& other) const;

 private:
  struct Node {
    Kind kind;
    std::vector<TypeTag> children;
  };
  explicit TypeTag(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static TypeTag make(Kind kind, std::vector<TypeTag> children = {});

  std::shared_ptr<const Node> node_;
};

// An effectful host function. Closures are boundary values only: no TypeTag
// admits them, so they can never reach the heap.
class Callable : public std::enable_shared_from_this<Callable> {
 public:
  explicit Callable(std::string name) : name_(std::move(name)) {}
  virtual ~Callable() = default;
  virtual Program invoke(const Value& argument) const = 0;
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class Value {
 public:
  struct Unit;
  struct Int;
  struct Bool;
  struct Inl;
  struct Inr;
  struct Pair;
  struct Ref;
  struct LLNil;
  struct LLCons;
  struct Seq;
  struct Closure;
  struct Node;

  Value();  // unit

  static Value unit() { return Value(); }
  static Value integer(std::int64_t v);
  static Value boolean(bool v);
  static Value inl(Value v);
  static Value inr(Value v);
  static Value pair(Value a, Value b);
  static Value ref(Addr addr, TypeTag tag);
  static Value ll_nil();
  static Value ll_cons(Value head, Addr tail);
  static Value seq(std::vector<Value> items);
  static Value closure(std::shared_ptr<const Callable> fn);

  const Node& node() const { return *node_; }
  template <typename T>
  bool is() const;
  template <typename T>
  const T& as() const;

  std::int64_t as_int() const;
  bool as_bool() const;
  Addr as_addr() const;  // Ref only

  // Structural equality; closures compare by identity.
  bool operator==(const Value& other) const;
  // Addresses rendered literally, e.g. "(pair 1 ref#3)".
  std::string to_string() const;

 private:
  explicit Value(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  template <typename T>
  static Value make(T alternative);

  std::shared_ptr<const Node> node_;
};

struct Value::Unit {};
struct Value::Int { std::int64_t value; };
struct Value::Bool { bool value; };
struct Value::Inl { Value payload; };
struct Value::Inr { Value payload; };
struct Value::Pair { Value first; Value second; };
struct Value::Ref { Addr addr; TypeTag tag; };
struct Value::LLNil {};
struct Value::LLCons { Value head; Addr tail; };
struct Value::Seq { std::vector<Value> items; };
struct Value::Closure { std::shared_ptr<const Callable> fn; };

struct Value::Node {
  std::variant<Unit, Int, Bool, Inl, Inr, Pair, Ref, LLNil, LLCons, Seq, Closure> alt;
};

template <typename T>
bool Value::is() const {
  return std::holds_alternative<T>(node_->alt);
}

template <typename T>
const T& Value::as() const {
  return std::get<T>(node_->alt);
}

template <typename T>
Value Value::make(T alternative) {
  return Value(std::make_shared<const Node>(Node{std::move(alternative)}));
}

bool conforms(const Value& v, const TypeTag& t);

// Addresses occurring one level deep in v: refs and linked-list tails. Does not
// follow the heap. Throws TypeMismatch if v does not conform to t.
AddrSet embedded_addrs(const TypeTag& t, const Value& v);

struct RefPredicate {
  std::string name;
  std::function<bool(Addr, const Heap&)> test;
};

bool forall_refs(const RefPredicate& pred, const TypeTag& t, const Value& v, const Heap& h);

// Outcome of walking a linked list through the heap.
struct CycleDetected {
  Addr repeated;
};
using CollectResult = std::variant<std::vector<Value>, CycleDetected>;

// Follows LLCons tails from the cell at head. Throws Uncontained for a dangling
// tail and TypeMismatch if head is not an LList cell.
CollectResult llist_collect(const Heap& h, Addr head);

// Non-decreasing integer list; false on cycles.
bool llist_sorted(const Heap& h, Addr head);
// Multiset equality of the list read in h0 and in h1; false on cycles.
bool llist_same_values(const Heap& h0, const Heap& h1, Addr head);

}  // namespace secref
