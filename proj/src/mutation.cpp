#include "secref/mutation.hpp"

#include <atomic>

namespace secref {

namespace {
std::atomic<Mutant> g_mutant{Mutant::None};
}  // namespace

Mutant active_mutant() { return g_mutant.load(std::memory_order_relaxed); }
void set_active_mutant(Mutant m) { g_mutant.store(m, std::memory_order_relaxed); }

std::string_view to_string(Mutant m) {
  switch (m) {
    case Mutant::None: return "none";
    case Mutant::CtxWriteNoShareCheck: return "ctx-write-no-share-check";
    case Mutant::LabelShareableNoPointsTo: return "label-shareable-no-points-to";
    case Mutant::ImportNoPost: return "import-no-post";
  }
  return "?";
}

std::optional<Mutant> parse_mutant(std::string_view name) {
  for (Mutant m : {Mutant::None, Mutant::CtxWriteNoShareCheck, Mutant::LabelShareableNoPointsTo,
                   Mutant::ImportNoPost}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

}  // namespace secref
