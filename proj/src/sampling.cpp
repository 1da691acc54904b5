#include "secref/sampling.hpp"

namespace secref {

Value ValueSampler::sample(const TypeTag& t, int depth) {
  switch (t.kind()) {
    case TypeTag::Kind::Unit: return Value::unit();
    case TypeTag::Kind::Int: return Value::integer(small_int());
    case TypeTag::Kind::Bool: return Value::boolean(below(2) == 1);
    case TypeTag::Kind::Sum:
      return below(2) == 0 ? Value::inl(sample(t.left(), depth - 1)) : Value::inr(sample(t.right(), depth - 1));
    case TypeTag::Kind::Pair: return Value::pair(sample(t.left(), depth - 1), sample(t.right(), depth - 1));
    case TypeTag::Kind::Ref: return Value::ref(Addr{1 + below(8)}, t.inner());
    case TypeTag::Kind::LList:
      if (depth <= 0 || below(3) == 0) return Value::ll_nil();
      return Value::ll_cons(sample(t.inner(), depth - 1), Addr{1 + below(8)});
    case TypeTag::Kind::Seq: {
      std::vector<Value> items;
      const std::uint64_t n = depth <= 0 ? 0 : below(4);
      for (std::uint64_t i = 0; i < n; ++i) items.push_back(sample(t.inner(), depth - 1));
      return Value::seq(std::move(items));
    }
  }
  return Value::unit();
}

std::vector<Value> ValueSampler::samples(const TypeTag& t, std::size_t n) {
  std::vector<Value> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(t));
  return out;
}

}  // namespace secref
