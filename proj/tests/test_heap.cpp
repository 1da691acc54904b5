#include "secref/heap.hpp"
#include "secref/sampling.hpp"
#include "test_support.hpp"

using namespace secref;

namespace {

const TypeTag kInt = TypeTag::integer();

TEST(GroundValues, ConformsByShape) {
  EXPECT_TRUE(conforms(Value::integer(3), kInt));
  EXPECT_FALSE(conforms(Value::boolean(true), kInt));
  const TypeTag opt = TypeTag::sum(TypeTag::unit(), kInt);
  EXPECT_TRUE(conforms(Value::inl(Value::unit()), opt));
  EXPECT_TRUE(conforms(Value::inr(Value::integer(1)), opt));
  EXPECT_FALSE(conforms(Value::inr(Value::unit()), opt));
  EXPECT_TRUE(conforms(Value::ref(Addr{4}, kInt), TypeTag::ref(kInt)));
  EXPECT_FALSE(conforms(Value::ref(Addr{4}, TypeTag::boolean()), TypeTag::ref(kInt)));
}

TEST(GroundValues, EmbeddedAddrsIsOneLevel) {
  const TypeTag t = TypeTag::pair(TypeTag::ref(kInt), TypeTag::llist(kInt));
  const Value v = Value::pair(Value::ref(Addr{2}, kInt), Value::ll_cons(Value::integer(1), Addr{5}));
  EXPECT_EQ(embedded_addrs(t, v), (AddrSet{Addr{2}, Addr{5}}));
  EXPECT_TRUE(embedded_addrs(kInt, Value::integer(1)).empty());
  EXPECT_SECREF_ERROR(embedded_addrs(kInt, Value::unit()), ErrorCode::TypeMismatch);
}

TEST(GroundValues, ToStringRendersAddresses) {
  EXPECT_EQ(Value::pair(Value::integer(1), Value::ref(Addr{3}, kInt)).to_string(), "(pair 1 ref#3)");
}

Heap list_heap(const std::vector<std::int64_t>& xs, Addr& head) {
  Heap h;
  auto [nil, h1] = alloc(h, TypeTag::llist(kInt), Preorder::trivial(), Value::ll_nil());
  h = h1;
  head = nil;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
    auto [a, h2] = alloc(h, TypeTag::llist(kInt), Preorder::trivial(), Value::ll_cons(Value::integer(*it), head));
    h = h2;
    head = a;
  }
  return h;
}

TEST(GroundValues, ListCollectSortedAndCycles) {
  Addr head;
  Heap h = list_heap({1, 2, 2, 5}, head);
  auto got = llist_collect(h, head);
  ASSERT_TRUE(std::holds_alternative<std::vector<Value>>(got));
  EXPECT_EQ(std::get<std::vector<Value>>(got).size(), 4u);
  EXPECT_TRUE(llist_sorted(h, head));

  Heap cyc = write(h, head, Value::ll_cons(Value::integer(1), head));
  EXPECT_TRUE(std::holds_alternative<CycleDetected>(llist_collect(cyc, head)));
  EXPECT_FALSE(llist_sorted(cyc, head));

  Addr head2;
  Heap shuffled = list_heap({5, 2, 1, 2}, head2);
  EXPECT_FALSE(llist_sorted(shuffled, head2));
}

TEST(Heap, AllocReturnsNextAddress) {
  Heap h;
  EXPECT_EQ(h.next_addr(), Addr{1});
  auto [a, h1] = alloc(h, kInt, Preorder::trivial(), Value::integer(7));
  EXPECT_EQ(a, Addr{1});
  EXPECT_EQ(h1.next_addr(), Addr{2});
  EXPECT_EQ(read(h1, a), Value::integer(7));
  EXPECT_TRUE(fresh(a, h, h1));
  EXPECT_TRUE(heap_leq(h, h1));
  EXPECT_TRUE(h.size() == 0 && h1.size() == 1);
}

TEST(Heap, WriteRespectsPreorder) {
  auto [a, h] = alloc(Heap{}, kInt, Preorder::int_leq(), Value::integer(3));
  Heap h2 = write(h, a, Value::integer(4));
  EXPECT_EQ(read(h2, a), Value::integer(4));
  EXPECT_TRUE(heap_leq(h, h2));
  EXPECT_SECREF_ERROR(write(h2, a, Value::integer(2)), ErrorCode::PreorderViolation);
  EXPECT_SECREF_ERROR(write(h2, a, Value::boolean(true)), ErrorCode::TypeMismatch);
  EXPECT_SECREF_ERROR(read(h2, Addr{9}), ErrorCode::Uncontained);
}

TEST(Heap, ModifiesAndEqualDom) {
  auto [a, h0] = alloc(Heap{}, kInt, Preorder::trivial(), Value::integer(0));
  auto [b, h1] = alloc(h0, kInt, Preorder::trivial(), Value::integer(0));
  Heap h2 = write(h1, b, Value::integer(9));
  EXPECT_TRUE(modifies({b}, h1, h2));
  EXPECT_FALSE(modifies({a}, h1, h2));
  EXPECT_TRUE(equal_dom(h1, h2));
  EXPECT_FALSE(equal_dom(h0, h2));
}

TEST(Preorders, SetOnceAndPrefix) {
  const Value none = Value::inl(Value::unit());
  const Value some1 = Value::inr(Value::integer(1));
  const Value some2 = Value::inr(Value::integer(2));
  const Preorder so = Preorder::set_once();
  EXPECT_TRUE(so(none, some1));
  EXPECT_TRUE(so(some1, some1));
  EXPECT_FALSE(so(some1, some2));
  EXPECT_FALSE(so(some1, none));

  const Value s12 = Value::seq({Value::integer(1), Value::integer(2)});
  const Value s1 = Value::seq({Value::integer(1)});
  const Value s21 = Value::seq({Value::integer(2), Value::integer(1)});
  const Preorder sp = Preorder::seq_prefix();
  EXPECT_TRUE(sp(s1, s12));
  EXPECT_FALSE(sp(s12, s1));
  EXPECT_FALSE(sp(s1, s21));
  EXPECT_TRUE(Preorder::first_seq_prefix()(Value::pair(s1, Value::integer(9)), Value::pair(s12, Value::integer(0))));
}

TEST(Preorders, RegisteredOnesAreReflexiveAndTransitive) {
  ValueSampler sampler(17);
  for (const auto& r : registered_preorders()) {
    auto samples = sampler.samples(r.domain, 60);
    EXPECT_EQ(preorder_law_violation(r.preorder, samples), std::nullopt) << r.preorder.name();
  }
}

TEST(Preorders, NonTransitiveRelationIsCaught) {
  const Preorder within_one("within_one", [](const Value& a, const Value& b) {
    return std::abs(a.as_int() - b.as_int()) <= 1;
  });
  std::vector<Value> samples;
  for (int i = 0; i < 5; ++i) samples.push_back(Value::integer(i));
  EXPECT_NE(preorder_law_violation(within_one, samples), std::nullopt);
}

TEST(Sampling, SeedDeterministicAndConforming) {
  const TypeTag t = TypeTag::pair(TypeTag::sum(kInt, TypeTag::boolean()), TypeTag::seq(kInt));
  ValueSampler a(5);
  ValueSampler b(5);
  for (int i = 0; i < 50; ++i) {
    Value x = a.sample(t);
    EXPECT_EQ(x, b.sample(t));
    EXPECT_TRUE(conforms(x, t));
  }
}

}  // namespace
