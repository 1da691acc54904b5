#include "secref/ground_values.hpp"

#include <algorithm>
#include <sstream>

#include "secref/errors.hpp"
#include "secref/heap.hpp"

namespace secref {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::Uncontained: return "Uncontained";
    case ErrorCode::PreorderViolation: return "PreorderViolation";
    case ErrorCode::DanglingInit: return "DanglingInit";
    case ErrorCode::ShareLeak: return "ShareLeak";
    case ErrorCode::AlreadyLabeled: return "AlreadyLabeled";
    case ErrorCode::MonotonicRefShare: return "MonotonicRefShare";
    case ErrorCode::LabelMapAccess: return "LabelMapAccess";
    case ErrorCode::RecallUnwitnessed: return "RecallUnwitnessed";
    case ErrorCode::WitnessFalse: return "WitnessFalse";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::OutOfFuel: return "OutOfFuel";
    case ErrorCode::BoundaryViolation: return "BoundaryViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
  }
  return "Unknown";
}

// ---- TypeTag ---------------------------------------------------------------

TypeTag TypeTag::make(Kind kind, std::vector<TypeTag> children) {
  return TypeTag(std::make_shared<const Node>(Node{kind, std::move(children)}));
}

TypeTag TypeTag::unit() {
  static const TypeTag t = make(Kind::Unit);
  return t;
}
TypeTag TypeTag::integer() {
  static const TypeTag t = make(Kind::Int);
  return t;
}
TypeTag TypeTag::boolean() {
  static const TypeTag t = make(Kind::Bool);
  return t;
}
TypeTag TypeTag::sum(TypeTag left, TypeTag right) {
  return make(Kind::Sum, {std::move(left), std::move(right)});
}
TypeTag TypeTag::pair(TypeTag first, TypeTag second) {
  return make(Kind::Pair, {std::move(first), std::move(second)});
}
TypeTag TypeTag::ref(TypeTag payload) { return make(Kind::Ref, {std::move(payload)}); }
TypeTag TypeTag::llist(TypeTag element) { return make(Kind::LList, {std::move(element)}); }
TypeTag TypeTag::seq(TypeTag element) { return make(Kind::Seq, {std::move(element)}); }

bool TypeTag::operator==(const TypeTag& other) const {
  if (node_ == other.node_) return true;
  if (node_->kind != other.node_->kind) return false;
  return node_->children == other.node_->children;
}

std::string TypeTag::to_string() const {
  switch (kind()) {
    case Kind::Unit: return "unit";
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::Sum: return "(+ " + left().to_string() + " " + right().to_string() + ")";
    case Kind::Pair: return "(* " + left().to_string() + " " + right().to_string() + ")";
    case Kind::Ref: return "(ref " + inner().to_string() + ")";
    case Kind::LList: return "(llist " + inner().to_string() + ")";
    case Kind::Seq: return "(seq " + inner().to_string() + ")";
  }
  return "?";
}

// ---- Value -----------------------------------------------------------------

Value::Value() {
  static const std::shared_ptr<const Node> unit_node = std::make_shared<const Node>(Node{Unit{}});
  node_ = unit_node;
}

Value Value::integer(std::int64_t v) { return make(Int{v}); }
Value Value::boolean(bool v) { return make(Bool{v}); }
Value Value::inl(Value v) { return make(Inl{std::move(v)}); }
Value Value::inr(Value v) { return make(Inr{std::move(v)}); }
Value Value::pair(Value a, Value b) { return make(Pair{std::move(a), std::move(b)}); }
Value Value::ref(Addr addr, TypeTag tag) { return make(Ref{addr, std::move(tag)}); }
Value Value::ll_nil() { return make(LLNil{}); }
Value Value::ll_cons(Value head, Addr tail) { return make(LLCons{std::move(head), tail}); }
Value Value::seq(std::vector<Value> items) { return make(Seq{std::move(items)}); }
Value Value::closure(std::shared_ptr<const Callable> fn) { return make(Closure{std::move(fn)}); }

std::int64_t Value::as_int() const {
  if (!is<Int>()) fail(ErrorCode::TypeMismatch, "expected int, got " + to_string());
  return as<Int>().value;
}

bool Value::as_bool() const {
  if (!is<Bool>()) fail(ErrorCode::TypeMismatch, "expected bool, got " + to_string());
  return as<Bool>().value;
}

Addr Value::as_addr() const {
  if (!is<Ref>()) fail(ErrorCode::TypeMismatch, "expected ref, got " + to_string());
  return as<Ref>().addr;
}

namespace {

struct EqualVisitor {
  const Value::Node& rhs;

  template <typename T>
  bool operator()(const T& lhs) const {
    const T* other = std::get_if<T>(&rhs.alt);
    return other != nullptr && same(lhs, *other);
  }

  static bool same(const Value::Unit&, const Value::Unit&) { return true; }
  static bool same(const Value::LLNil&, const Value::LLNil&) { return true; }
  static bool same(const Value::Int& a, const Value::Int& b) { return a.value == b.value; }
  static bool same(const Value::Bool& a, const Value::Bool& b) { return a.value == b.value; }
  static bool same(const Value::Inl& a, const Value::Inl& b) { return a.payload == b.payload; }
  static bool same(const Value::Inr& a, const Value::Inr& b) { return a.payload == b.payload; }
  static bool same(const Value::Pair& a, const Value::Pair& b) {
    return a.first == b.first && a.second == b.second;
  }
  static bool same(const Value::Ref& a, const Value::Ref& b) { return a.addr == b.addr && a.tag == b.tag; }
  static bool same(const Value::LLCons& a, const Value::LLCons& b) {
    return a.tail == b.tail && a.head == b.head;
  }
  static bool same(const Value::Seq& a, const Value::Seq& b) { return a.items == b.items; }
  static bool same(const Value::Closure& a, const Value::Closure& b) { return a.fn == b.fn; }
};

void render(const Value& v, std::ostream& out) {
  std::visit(
      [&out](const auto& alt) {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, Value::Unit>) {
          out << "()";
        } else if constexpr (std::is_same_v<T, Value::Int>) {
          out << alt.value;
        } else if constexpr (std::is_same_v<T, Value::Bool>) {
          out << (alt.value ? "#t" : "#f");
        } else if constexpr (std::is_same_v<T, Value::Inl>) {
          out << "(inl ";
          render(alt.payload, out);
          out << ")";
        } else if constexpr (std::is_same_v<T, Value::Inr>) {
          out << "(inr ";
          render(alt.payload, out);
          out << ")";
        } else if constexpr (std::is_same_v<T, Value::Pair>) {
          out << "(pair ";
          render(alt.first, out);
          out << " ";
          render(alt.second, out);
          out << ")";
        } else if constexpr (std::is_same_v<T, Value::Ref>) {
          out << "ref#" << alt.addr.value;
        } else if constexpr (std::is_same_v<T, Value::LLNil>) {
          out << "nil";
        } else if constexpr (std::is_same_v<T, Value::LLCons>) {
          out << "(cons ";
          render(alt.head, out);
          out << " ref#" << alt.tail.value << ")";
        } else if constexpr (std::is_same_v<T, Value::Seq>) {
          out << "[";
          for (std::size_t i = 0; i < alt.items.size(); ++i) {
            if (i != 0) out << " ";
            render(alt.items[i], out);
          }
          out << "]";
        } else {
          out << "<fn " << (alt.fn ? alt.fn->name() : std::string("null")) << ">";
        }
      },
      v.node().alt);
}

void collect_addrs(const TypeTag& t, const Value& v, AddrSet& out) {
  if (!conforms(v, t)) {
    fail(ErrorCode::TypeMismatch, v.to_string() + " does not conform to " + t.to_string());
  }
  switch (t.kind()) {
    case TypeTag::Kind::Unit:
    case TypeTag::Kind::Int:
    case TypeTag::Kind::Bool:
      return;
    case TypeTag::Kind::Sum:
      if (v.is<Value::Inl>()) {
        collect_addrs(t.left(), v.as<Value::Inl>().payload, out);
      } else {
        collect_addrs(t.right(), v.as<Value::Inr>().payload, out);
      }
      return;
    case TypeTag::Kind::Pair:
      collect_addrs(t.left(), v.as<Value::Pair>().first, out);
      collect_addrs(t.right(), v.as<Value::Pair>().second, out);
      return;
    case TypeTag::Kind::Ref:
      out.insert(v.as<Value::Ref>().addr);
      return;
    case TypeTag::Kind::LList:
      if (v.is<Value::LLCons>()) {
        collect_addrs(t.inner(), v.as<Value::LLCons>().head, out);
        out.insert(v.as<Value::LLCons>().tail);
      }
      return;
    case TypeTag::Kind::Seq:
      for (const Value& item : v.as<Value::Seq>().items) collect_addrs(t.inner(), item, out);
      return;
  }
}

}  // namespace

bool Value::operator==(const Value& other) const {
  if (node_ == other.node_) return true;
  return std::visit(EqualVisitor{*other.node_}, node_->alt);
}

std::string Value::to_string() const {
  std::ostringstream out;
  render(*this, out);
  return out.str();
}

// ---- predicates ------------------------------------------------------------

bool conforms(const Value& v, const TypeTag& t) {
  switch (t.kind()) {
    case TypeTag::Kind::Unit: return v.is<Value::Unit>();
    case TypeTag::Kind::Int: return v.is<Value::Int>();
    case TypeTag::Kind::Bool: return v.is<Value::Bool>();
    case TypeTag::Kind::Sum:
      if (v.is<Value::Inl>()) return conforms(v.as<Value::Inl>().payload, t.left());
      if (v.is<Value::Inr>()) return conforms(v.as<Value::Inr>().payload, t.right());
      return false;
    case TypeTag::Kind::Pair:
      return v.is<Value::Pair>() && conforms(v.as<Value::Pair>().first, t.left()) &&
             conforms(v.as<Value::Pair>().second, t.right());
    case TypeTag::Kind::Ref:
      return v.is<Value::Ref>() && v.as<Value::Ref>().tag == t.inner() && v.as<Value::Ref>().addr.value > 0;
    case TypeTag::Kind::LList:
      if (v.is<Value::LLNil>()) return true;
      return v.is<Value::LLCons>() && conforms(v.as<Value::LLCons>().head, t.inner()) &&
             v.as<Value::LLCons>().tail.value > 0;
    case TypeTag::Kind::Seq:
      if (!v.is<Value::Seq>()) return false;
      return std::all_of(v.as<Value::Seq>().items.begin(), v.as<Value::Seq>().items.end(),
                         [&t](const Value& item) { return conforms(item, t.inner()); });
  }
  return false;
}

AddrSet embedded_addrs(const TypeTag& t, const Value& v) {
  AddrSet out;
  collect_addrs(t, v, out);
  return out;
}

bool forall_refs(const RefPredicate& pred, const TypeTag& t, const Value& v, const Heap& h) {
  if (!conforms(v, t)) {
    fail(ErrorCode::TypeMismatch, v.to_string() + " does not conform to " + t.to_string());
  }
  switch (t.kind()) {
    case TypeTag::Kind::Unit:
    case TypeTag::Kind::Int:
    case TypeTag::Kind::Bool:
      return true;
    case TypeTag::Kind::Sum:
      return v.is<Value::Inl>() ? forall_refs(pred, t.left(), v.as<Value::Inl>().payload, h)
                                : forall_refs(pred, t.right(), v.as<Value::Inr>().payload, h);
    case TypeTag::Kind::Pair:
      return forall_refs(pred, t.left(), v.as<Value::Pair>().first, h) &&
             forall_refs(pred, t.right(), v.as<Value::Pair>().second, h);
    case TypeTag::Kind::Ref:
      return pred.test(v.as<Value::Ref>().addr, h);
    case TypeTag::Kind::LList:
      if (v.is<Value::LLNil>()) return true;
      return forall_refs(pred, t.inner(), v.as<Value::LLCons>().head, h) &&
             pred.test(v.as<Value::LLCons>().tail, h);
    case TypeTag::Kind::Seq:
      for (const Value& item : v.as<Value::Seq>().items) {
        if (!forall_refs(pred, t.inner(), item, h)) return false;
      }
      return true;
  }
  return false;
}

// ---- linked lists ----------------------------------------------------------

CollectResult llist_collect(const Heap& h, Addr head) {
  std::vector<Value> items;
  AddrSet visited;
  Addr at = head;
  while (true) {
    const HeapCell& c = h.cell(at);
    if (c.type_tag.kind() != TypeTag::Kind::LList) {
      fail(ErrorCode::TypeMismatch, "cell " + std::to_string(at.value) + " is not a linked list");
    }
    if (!visited.insert(at).second) return CycleDetected{at};
    if (c.value.is<Value::LLNil>()) return items;
    const auto& cons = c.value.as<Value::LLCons>();
    items.push_back(cons.head);
    at = cons.tail;
  }
}

bool llist_sorted(const Heap& h, Addr head) {
  const CollectResult collected = llist_collect(h, head);
  const auto* items = std::get_if<std::vector<Value>>(&collected);
  if (items == nullptr) return false;
  for (std::size_t i = 1; i < items->size(); ++i) {
    if ((*items)[i - 1].as_int() > (*items)[i].as_int()) return false;
  }
  return true;
}

namespace {

std::optional<std::vector<std::string>> sorted_renderings(const Heap& h, Addr head) {
  const CollectResult collected = llist_collect(h, head);
  const auto* items = std::get_if<std::vector<Value>>(&collected);
  if (items == nullptr) return std::nullopt;
  std::vector<std::string> keys;
  keys.reserve(items->size());
  for (const Value& v : *items) keys.push_back(v.to_string());
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

bool llist_same_values(const Heap& h0, const Heap& h1, Addr head) {
  const auto before = sorted_renderings(h0, head);
  const auto after = sorted_renderings(h1, head);
  return before && after && *before == *after;
}

}  // namespace secref
