#pragma once

// Private / Shareable / Encapsulated labels over the monotonic heap.
//
// A World pairs the heap with its label map. The label map lives at the
// reserved pseudo-address 0: it is never a heap key, always reads as Private,
// and cannot be written through lr_write. Addresses missing from the map are
// Private, which covers every address at or above next_addr.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "secref/heap.hpp"

namespace secref {

enum class Label { Private, Shareable, Encapsulated };

std::string_view to_string(Label l);

// Private may become anything; the other two are terminal.
bool label_leq(Label l0, Label l1);

class LabelMap {
 public:
  Label at(Addr r) const;
  void set(Addr r, Label l);
  const std::map<Addr, Label>& entries() const { return entries_; }
  bool operator==(const LabelMap& other) const { return entries_ == other.entries_; }

 private:
  std::map<Addr, Label> entries_;
};

struct World {
  Heap heap;
  LabelMap labels;

  bool operator==(const World& other) const { return heap == other.heap && labels == other.labels; }
};

struct HeapRelation {
  std::string name;
  std::function<bool(const World&, const World&)> relation;
};

bool is_private(const World& w, Addr r);
bool is_shareable(const World& w, Addr r);
bool is_encapsulated(const World& w, Addr r);

// nullopt when the invariant holds, otherwise the first broken clause.
std::optional<std::string> lr_inv_violation(const World& w);
bool lr_inv(const World& w);

std::pair<Addr, World> lr_alloc(const World& w, const TypeTag& tag, const Preorder& rel, const Value& init);
const Value& lr_read(const World& w, Addr r);
World lr_write(const World& w, Addr r, const Value& v);

World label_shareable(const World& w, Addr r);
World label_encapsulated(const World& w, Addr r);

// Cells of dom(w0) that are neither Shareable nor Encapsulated in w0 are unchanged.
bool modif_only_shareable_and_encaps(const World& w0, const World& w1);
// Cells of dom(w0) that are not Shareable in w0 and not in s are unchanged.
bool modif_shareable_and(const World& w0, const World& w1, const AddrSet& s);
// Labels agree on dom(w0.heap).
bool same_labels(const World& w0, const World& w1);

// The MST preorder lifted to worlds: heap_leq and pointwise label_leq.
bool world_leq(const World& w0, const World& w1);

// modif_only_shareable_and_encaps ∧ same_labels, the relation unverified code
// is guaranteed to respect.
HeapRelation context_relation();

}  // namespace secref
