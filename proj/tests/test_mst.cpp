#include "secref/mst.hpp"
#include "test_support.hpp"

using namespace secref;

namespace {

const TypeTag kInt = TypeTag::integer();

RunConfig paranoid() {
  RunConfig rc;
  rc.check_level = CheckLevel::Paranoid;
  return rc;
}

Program counter_program() {
  return bind(alloc_op(kInt, Preorder::int_leq(), Value::integer(0)), [](const Value& r) {
    return bind(read_op(r.as_addr()), [r](const Value& v) {
      return then(write_op(r.as_addr(), Value::integer(v.as_int() + 5)), read_op(r.as_addr()));
    });
  });
}

TEST(Mst, RunsAllocReadWrite) {
  RunResult r = run_closed(counter_program(), paranoid());
  ASSERT_TRUE(r.ok()) << r.failure->message;
  EXPECT_EQ(*r.result, Value::integer(5));
  EXPECT_GT(r.invariant_checks, 0u);
}

TEST(Mst, BindLaws) {
  auto k = [](const Value& v) { return ret(Value::integer(v.as_int() * 2)); };
  auto h = [](const Value& v) { return ret(Value::integer(v.as_int() + 1)); };
  const RunConfig rc;
  // left unit
  EXPECT_EQ(*run_closed(bind(ret(Value::integer(3)), k), rc).result, *run_closed(k(Value::integer(3)), rc).result);
  // right unit
  EXPECT_EQ(*run_closed(bind(counter_program(), ret), rc).result, *run_closed(counter_program(), rc).result);
  // associativity
  const Value lhs = *run_closed(bind(bind(counter_program(), k), h), rc).result;
  const Value rhs = *run_closed(bind(counter_program(), [&](const Value& v) { return bind(k(v), h); }), rc).result;
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(lhs, Value::integer(11));
}

TEST(Mst, RecallNeedsWitness) {
  Program bare = bind(alloc_op(kInt, Preorder::trivial(), Value::integer(0)),
                      [](const Value& r) { return recall_op(contained_token(r.as_addr())); });
  RunResult r = run_closed(bare, RunConfig{});
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->code, ErrorCode::RecallUnwitnessed);

  Program witnessed = bind(alloc_op(kInt, Preorder::trivial(), Value::integer(0)), [](const Value& r) {
    return then(witness_op(contained_token(r.as_addr())), recall_op(contained_token(r.as_addr())));
  });
  EXPECT_TRUE(run_closed(witnessed, RunConfig{}).ok());
}

TEST(Mst, WitnessOfFalsePredicateFails) {
  RunResult r = run_closed(witness_op(shareable_token(Addr{1})), RunConfig{});
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->code, ErrorCode::WitnessFalse);
}

TEST(Mst, WitnessedUnstablePredicateIsCaught) {
  Program m = bind(alloc_op(kInt, Preorder::trivial(), Value::integer(0)), [](const Value& r) {
    return then(witness_op(private_token(r.as_addr())), relabel_op(r.as_addr(), Label::Shareable));
  });
  RunResult r = run_closed(m, paranoid());
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->code, ErrorCode::StabilityViolation);
}

TEST(Mst, FuelRunsOut) {
  std::function<Program()> loop = [&loop]() { return then(tick(), std::function<Program()>(loop)); };
  RunConfig rc;
  rc.fuel = 100;
  RunResult r = run_closed(loop(), rc);
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->code, ErrorCode::OutOfFuel);
}

TEST(Mst, ErrorsBecomeFailures) {
  RunResult r = run_closed(then(alloc_op(kInt, Preorder::trivial(), Value::integer(1)), read_op(Addr{9})), RunConfig{});
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->code, ErrorCode::Uncontained);
  EXPECT_EQ(r.world.heap.size(), 1u);
}

TEST(Mst, ObserverSeesEveryWorldChange) {
  struct Count : StepObserver {
    int n = 0;
    void on_transition(const World& a, const World& b) override {
      EXPECT_FALSE(a == b);
      ++n;
    }
  } count;
  RunConfig rc;
  rc.observer = &count;
  ASSERT_TRUE(run_closed(counter_program(), rc).ok());
  EXPECT_EQ(count.n, 2);  // alloc and write
}

TEST(Mst, HostClosures) {
  Value twice = host_closure("twice", [](const Value& v) { return ret(Value::integer(2 * v.as_int())); });
  EXPECT_EQ(*run_closed(call(twice, Value::integer(21)), RunConfig{}).result, Value::integer(42));
  EXPECT_SECREF_ERROR(call(Value::integer(1), Value::unit()), ErrorCode::TypeMismatch);
}

}  // namespace
