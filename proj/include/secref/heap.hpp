#pragma once

// Monotonic heap of first-order cells, each carrying its own preorder.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "secref/ground_values.hpp"

namespace secref {

class Preorder {
 public:
  using Relation = std::function<bool(const Value&, const Value&)>;

  Preorder(std::string name, Relation relation)
      : name_(std::move(name)), relation_(std::move(relation)) {}

  const std::string& name() const { return name_; }
  bool operator()(const Value& before, const Value& after) const { return relation_(before, after); }
  bool is_trivial() const { return name_ == "trivial"; }

  // Relates every pair of values: plain ML-style references.
  static Preorder trivial();
  // Integers may only grow.
  static Preorder int_leq();
  // Option encoded as Inl unit (None) / Inr v (Some v); once Some, fixed.
  static Preorder set_once();
  // Seq values may only be extended at the end.
  static Preorder seq_prefix();
  // Pairs whose first component is a Seq; that component may only be extended.
  static Preorder first_seq_prefix();

 private:
  std::string name_;
  Relation relation_;
};

struct RegisteredPreorder {
  Preorder preorder;
  TypeTag domain;  // type of the values the preorder is meant for
};

// Every preorder shipped by the library, for the law suites.
std::vector<RegisteredPreorder> registered_preorders();

// Describes the first sampled counterexample to reflexivity or transitivity.
std::optional<std::string> preorder_law_violation(const Preorder& p, const std::vector<Value>& samples);

struct HeapCell {
  Addr addr;
  TypeTag type_tag;
  Preorder preorder;
  Value value;
};

class Heap {
 public:
  Heap() = default;

  bool contains(Addr r) const { return cells_.count(r) != 0; }
  // Throws Uncontained.
  const HeapCell& cell(Addr r) const;
  Addr next_addr() const { return next_; }
  std::size_t size() const { return cells_.size(); }
  const std::map<Addr, HeapCell>& cells() const { return cells_; }
  AddrSet domain() const;

  bool operator==(const Heap& other) const;

 private:
  friend std::pair<Addr, Heap> alloc(const Heap&, const TypeTag&, const Preorder&, const Value&);
  friend Heap write(const Heap&, Addr, const Value&);

  std::map<Addr, HeapCell> cells_;
  Addr next_{1};
};

// Returned address is h.next_addr(); nothing else changes.
std::pair<Addr, Heap> alloc(const Heap& h, const TypeTag& tag, const Preorder& rel, const Value& init);
const Value& read(const Heap& h, Addr r);
Heap write(const Heap& h, Addr r, const Value& v);

bool heap_leq(const Heap& h0, const Heap& h1);
// True iff every address of dom(h0) outside s holds the same value in h1.
bool modifies(const AddrSet& s, const Heap& h0, const Heap& h1);
bool equal_dom(const Heap& h0, const Heap& h1);
bool fresh(Addr r, const Heap& h0, const Heap& h1);

}  // namespace secref
