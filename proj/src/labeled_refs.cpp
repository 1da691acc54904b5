#include "secref/labeled_refs.hpp"

#include "secref/errors.hpp"
#include "secref/mutation.hpp"

namespace secref {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Private: return "Private";
    case Label::Shareable: return "Shareable";
    case Label::Encapsulated: return "Encapsulated";
  }
  return "?";
}

bool label_leq(Label l0, Label l1) { return l0 == Label::Private || l0 == l1; }

Label LabelMap::at(Addr r) const {
  auto it = entries_.find(r);
  return it == entries_.end() ? Label::Private : it->second;
}

void LabelMap::set(Addr r, Label l) { entries_[r] = l; }

bool is_private(const World& w, Addr r) { return w.labels.at(r) == Label::Private; }
bool is_shareable(const World& w, Addr r) { return w.labels.at(r) == Label::Shareable; }
bool is_encapsulated(const World& w, Addr r) { return w.labels.at(r) == Label::Encapsulated; }

namespace {

std::string addr_str(Addr r) { return std::to_string(r.value); }

// Containment closure including the tag agreement of embedded refs.
std::optional<std::string> dangling_in(const Heap& h, const TypeTag& t, const Value& v) {
  switch (t.kind()) {
    case TypeTag::Kind::Unit:
    case TypeTag::Kind::Int:
    case TypeTag::Kind::Bool:
      return std::nullopt;
    case TypeTag::Kind::Sum:
      return v.is<Value::Inl>() ? dangling_in(h, t.left(), v.as<Value::Inl>().payload)
                                : dangling_in(h, t.right(), v.as<Value::Inr>().payload);
    case TypeTag::Kind::Pair:
      if (auto d = dangling_in(h, t.left(), v.as<Value::Pair>().first)) return d;
      return dangling_in(h, t.right(), v.as<Value::Pair>().second);
    case TypeTag::Kind::Ref: {
      const Addr a = v.as<Value::Ref>().addr;
      if (!h.contains(a)) return "ref#" + addr_str(a) + " is not contained";
      if (!(h.cell(a).type_tag == t.inner())) return "ref#" + addr_str(a) + " has the wrong type";
      return std::nullopt;
    }
    case TypeTag::Kind::LList: {
      if (v.is<Value::LLNil>()) return std::nullopt;
      const auto& cons = v.as<Value::LLCons>();
      if (auto d = dangling_in(h, t.inner(), cons.head)) return d;
      if (!h.contains(cons.tail)) return "tail ref#" + addr_str(cons.tail) + " is not contained";
      if (!(h.cell(cons.tail).type_tag == t)) return "tail ref#" + addr_str(cons.tail) + " has the wrong type";
      return std::nullopt;
    }
    case TypeTag::Kind::Seq:
      for (const Value& item : v.as<Value::Seq>().items) {
        if (auto d = dangling_in(h, t.inner(), item)) return d;
      }
      return std::nullopt;
  }
  return std::nullopt;
}

bool embeds_only_shareable(const World& w, const TypeTag& t, const Value& v) {
  for (Addr a : embedded_addrs(t, v)) {
    if (!is_shareable(w, a)) return false;
  }
  return true;
}

}  // namespace

std::optional<std::string> lr_inv_violation(const World& w) {
  for (const auto& [addr, c] : w.heap.cells()) {
    if (auto d = dangling_in(w.heap, c.type_tag, c.value)) {
      return "cell " + addr_str(addr) + ": " + *d;
    }
    if (is_shareable(w, addr) && !embeds_only_shareable(w, c.type_tag, c.value)) {
      return "shareable cell " + addr_str(addr) + " points to a non-shareable reference";
    }
  }
  for (const auto& [addr, label] : w.labels.entries()) {
    if (label == Label::Private) continue;
    if (addr == kLabelMapAddr) return "label map is not private";
    if (addr >= w.heap.next_addr()) return "unallocated address " + addr_str(addr) + " is labeled";
  }
  return std::nullopt;
}

bool lr_inv(const World& w) { return !lr_inv_violation(w).has_value(); }

std::pair<Addr, World> lr_alloc(const World& w, const TypeTag& tag, const Preorder& rel, const Value& init) {
  if (!conforms(init, tag)) {
    fail(ErrorCode::TypeMismatch, init.to_string() + " does not conform to " + tag.to_string());
  }
  if (auto d = dangling_in(w.heap, tag, init)) fail(ErrorCode::DanglingInit, *d);
  auto [r, heap] = alloc(w.heap, tag, rel, init);
  return {r, World{std::move(heap), w.labels}};
}

const Value& lr_read(const World& w, Addr r) {
  if (r == kLabelMapAddr) fail(ErrorCode::LabelMapAccess, "the label map cannot be read");
  return read(w.heap, r);
}

World lr_write(const World& w, Addr r, const Value& v) {
  if (r == kLabelMapAddr) fail(ErrorCode::LabelMapAccess, "the label map cannot be written");
  const HeapCell& c = w.heap.cell(r);
  if (!conforms(v, c.type_tag)) {
    fail(ErrorCode::TypeMismatch, v.to_string() + " does not conform to " + c.type_tag.to_string());
  }
  if (auto d = dangling_in(w.heap, c.type_tag, v)) fail(ErrorCode::DanglingInit, *d);
  if (is_shareable(w, r) && !embeds_only_shareable(w, c.type_tag, v)) {
    fail(ErrorCode::ShareLeak, "writing " + v.to_string() + " into shareable cell " + addr_str(r));
  }
  return World{write(w.heap, r, v), w.labels};
}

World label_shareable(const World& w, Addr r) {
  if (r == kLabelMapAddr) fail(ErrorCode::LabelMapAccess, "the label map cannot be relabeled");
  const HeapCell& c = w.heap.cell(r);
  if (!is_private(w, r)) fail(ErrorCode::AlreadyLabeled, "cell " + addr_str(r) + " is already labeled");
  if (!c.preorder.is_trivial()) {
    fail(ErrorCode::MonotonicRefShare, "cell " + addr_str(r) + " carries preorder " + c.preorder.name());
  }
  if (active_mutant() != Mutant::LabelShareableNoPointsTo && !embeds_only_shareable(w, c.type_tag, c.value)) {
    fail(ErrorCode::ShareLeak, "cell " + addr_str(r) + " points to a non-shareable reference");
  }
  World out = w;
  out.labels.set(r, Label::Shareable);
  return out;
}

World label_encapsulated(const World& w, Addr r) {
  if (r == kLabelMapAddr) fail(ErrorCode::LabelMapAccess, "the label map cannot be relabeled");
  (void)w.heap.cell(r);
  if (!is_private(w, r)) fail(ErrorCode::AlreadyLabeled, "cell " + addr_str(r) + " is already labeled");
  World out = w;
  out.labels.set(r, Label::Encapsulated);
  return out;
}

bool modif_only_shareable_and_encaps(const World& w0, const World& w1) {
  for (const auto& [addr, c] : w0.heap.cells()) {
    if (!is_private(w0, addr)) continue;
    if (!w1.heap.contains(addr) || !(w1.heap.cell(addr).value == c.value)) return false;
  }
  return true;
}

bool modif_shareable_and(const World& w0, const World& w1, const AddrSet& s) {
  for (const auto& [addr, c] : w0.heap.cells()) {
    if (is_shareable(w0, addr) || s.count(addr) != 0) continue;
    if (!w1.heap.contains(addr) || !(w1.heap.cell(addr).value == c.value)) return false;
  }
  return true;
}

bool same_labels(const World& w0, const World& w1) {
  for (const auto& [addr, _] : w0.heap.cells()) {
    if (w0.labels.at(addr) != w1.labels.at(addr)) return false;
  }
  return true;
}

bool world_leq(const World& w0, const World& w1) {
  if (!heap_leq(w0.heap, w1.heap)) return false;
  for (const auto& [addr, label] : w0.labels.entries()) {
    if (!label_leq(label, w1.labels.at(addr))) return false;
  }
  return true;
}

HeapRelation context_relation() {
  return HeapRelation{"modif_only_shareable_and_encaps&same_labels", [](const World& w0, const World& w1) {
                        return modif_only_shareable_and_encaps(w0, w1) && same_labels(w0, w1);
                      }};
}

}  // namespace secref
