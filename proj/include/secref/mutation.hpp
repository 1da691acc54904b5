#pragma once

#include <optional>
#include <string_view>

namespace secref {

// Deliberately broken variants of three runtime checks. Used only to show that
// the acceptance monitors are not vacuous; production runs use Mutant::None.
enum class Mutant {
  None,
  CtxWriteNoShareCheck,
  LabelShareableNoPointsTo,
  ImportNoPost,
};

Mutant active_mutant();
void set_active_mutant(Mutant m);

std::string_view to_string(Mutant m);
std::optional<Mutant> parse_mutant(std::string_view name);

class ScopedMutant {
 public:
  explicit ScopedMutant(Mutant m) : previous_(active_mutant()) { set_active_mutant(m); }
  ~ScopedMutant() { set_active_mutant(previous_); }
  ScopedMutant(const ScopedMutant&) = delete;
  ScopedMutant& operator=(const ScopedMutant&) = delete;

 private:
  Mutant previous_;
};

}  // namespace secref
