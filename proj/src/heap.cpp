#include "secref/heap.hpp"

#include <algorithm>

#include "secref/errors.hpp"

namespace secref {

Preorder Preorder::trivial() {
  return Preorder("trivial", [](const Value&, const Value&) { return true; });
}

Preorder Preorder::int_leq() {
  return Preorder("int_leq", [](const Value& a, const Value& b) { return a.as_int() <= b.as_int(); });
}

Preorder Preorder::set_once() {
  return Preorder("set_once", [](const Value& a, const Value& b) {
    if (a.is<Value::Inl>()) return true;  // None may become anything
    return a == b;
  });
}

namespace {

bool is_prefix(const Value& a, const Value& b) {
  const auto& xs = a.as<Value::Seq>().items;
  const auto& ys = b.as<Value::Seq>().items;
  return xs.size() <= ys.size() && std::equal(xs.begin(), xs.end(), ys.begin());
}

}  // namespace

Preorder Preorder::seq_prefix() { return Preorder("seq_prefix", is_prefix); }

Preorder Preorder::first_seq_prefix() {
  return Preorder("first_seq_prefix", [](const Value& a, const Value& b) {
    return is_prefix(a.as<Value::Pair>().first, b.as<Value::Pair>().first);
  });
}

std::vector<RegisteredPreorder> registered_preorders() {
  const TypeTag i = TypeTag::integer();
  return {
      {Preorder::trivial(), i},
      {Preorder::int_leq(), i},
      {Preorder::set_once(), TypeTag::sum(TypeTag::unit(), i)},
      {Preorder::seq_prefix(), TypeTag::seq(i)},
      {Preorder::first_seq_prefix(), TypeTag::pair(TypeTag::seq(i), TypeTag::pair(i, i))},
  };
}

std::optional<std::string> preorder_law_violation(const Preorder& p, const std::vector<Value>& samples) {
  for (const Value& a : samples) {
    if (!p(a, a)) return p.name() + " is not reflexive at " + a.to_string();
  }
  for (const Value& a : samples) {
    for (const Value& b : samples) {
      if (!p(a, b)) continue;
      for (const Value& c : samples) {
        if (p(b, c) && !p(a, c)) {
          return p.name() + " is not transitive at " + a.to_string() + ", " + b.to_string() + ", " +
                 c.to_string();
        }
      }
    }
  }
  return std::nullopt;
}

const HeapCell& Heap::cell(Addr r) const {
  auto it = cells_.find(r);
  if (it == cells_.end()) fail(ErrorCode::Uncontained, "address " + std::to_string(r.value) + " not in heap");
  return it->second;
}

AddrSet Heap::domain() const {
  AddrSet out;
  for (const auto& [addr, _] : cells_) out.insert(out.end(), addr);
  return out;
}

bool Heap::operator==(const Heap& other) const {
  if (next_ != other.next_ || cells_.size() != other.cells_.size()) return false;
  auto it = other.cells_.begin();
  for (const auto& [addr, c] : cells_) {
    const HeapCell& d = it->second;
    if (it->first != addr || !(c.type_tag == d.type_tag) || c.preorder.name() != d.preorder.name() ||
        !(c.value == d.value)) {
      return false;
    }
    ++it;
  }
  return true;
}

std::pair<Addr, Heap> alloc(const Heap& h, const TypeTag& tag, const Preorder& rel, const Value& init) {
  if (!conforms(init, tag)) {
    fail(ErrorCode::TypeMismatch, init.to_string() + " does not conform to " + tag.to_string());
  }
  Heap out = h;
  const Addr r = h.next_;
  out.cells_.emplace(r, HeapCell{r, tag, rel, init});
  out.next_ = Addr{r.value + 1};
  return {r, std::move(out)};
}

const Value& read(const Heap& h, Addr r) { return h.cell(r).value; }

Heap write(const Heap& h, Addr r, const Value& v) {
  const HeapCell& c = h.cell(r);
  if (!conforms(v, c.type_tag)) {
    fail(ErrorCode::TypeMismatch, v.to_string() + " does not conform to " + c.type_tag.to_string());
  }
  if (!c.preorder(c.value, v)) {
    fail(ErrorCode::PreorderViolation, "cell " + std::to_string(r.value) + " (" + c.preorder.name() +
                                           "): " + c.value.to_string() + " -> " + v.to_string());
  }
  Heap out = h;
  out.cells_.at(r).value = v;
  return out;
}

bool heap_leq(const Heap& h0, const Heap& h1) {
  for (const auto& [addr, c] : h0.cells()) {
    if (!h1.contains(addr)) return false;
    if (!c.preorder(c.value, h1.cell(addr).value)) return false;
  }
  return true;
}

bool modifies(const AddrSet& s, const Heap& h0, const Heap& h1) {
  for (const auto& [addr, c] : h0.cells()) {
    if (s.count(addr) != 0) continue;
    if (!h1.contains(addr) || !(h1.cell(addr).value == c.value)) return false;
  }
  return true;
}

bool equal_dom(const Heap& h0, const Heap& h1) {
  if (h0.size() != h1.size()) return false;
  return std::equal(h0.cells().begin(), h0.cells().end(), h1.cells().begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; });
}

bool fresh(Addr r, const Heap& h0, const Heap& h1) { return !h0.contains(r) && h1.contains(r); }

}  // namespace secref
