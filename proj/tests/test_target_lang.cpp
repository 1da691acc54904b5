#include "secref/linker.hpp"
#include "secref/scenarios.hpp"
#include "secref/target_lang.hpp"
#include "test_support.hpp"

using namespace secref;

namespace {

const TypeTag kInt = TypeTag::integer();

TEST(TargetLang, ParsePrintRoundTrip) {
  for (const auto& [name, text] : embedded_contexts()) {
    ExprPtr e = parse(text);
    const std::string once = print(e);
    EXPECT_EQ(print(parse(once)), once) << name;
  }
}

TEST(TargetLang, TypesOfShippedContexts) {
  EXPECT_EQ(typecheck(parse(embedded_context("safe_prog_benign"))).type,
            parse_type("(-> (ref (ref int)) (-> unit unit))"));
  EXPECT_EQ(typecheck(parse("(+ 1 (/ 7 2))")).type, SrcType::integer());
}

TEST(TargetLang, FunctionsCannotBeStored) {
  try {
    (void)typecheck(parse(embedded_context("bad_store_function")));
    ADD_FAILURE() << "accepted";
  } catch (const SecrefError& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeError);
    EXPECT_NE(std::string(e.what()).find("FunctionInStore"), std::string::npos) << e.what();
  }
  EXPECT_SECREF_ERROR(SrcType::arrow(SrcType::integer(), SrcType::integer()).to_tag(), ErrorCode::TypeError);
}

TEST(TargetLang, ParseErrorsCarryPosition) {
  try {
    (void)parse("(lam (x int)\n  (+ x 1)))");
    ADD_FAILURE() << "accepted";
  } catch (const SecrefError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.detail().rfind("2:", 0), 0u) << e.detail();
  }
  EXPECT_SECREF_ERROR(typecheck(parse("(+ 1 #t)")), ErrorCode::TypeError);
  EXPECT_SECREF_ERROR(typecheck(parse("y")), ErrorCode::TypeError);
}

TEST(TargetLang, ElaborateChecksTheInterface) {
  ExprPtr e = parse("(lam (x int) x)");
  EXPECT_NO_THROW(elaborate(e, SrcType::arrow(SrcType::integer(), SrcType::integer()), "id"));
  EXPECT_SECREF_ERROR(elaborate(e, SrcType::integer(), "id"), ErrorCode::InterfaceMismatch);
}

TEST(TargetLang, EvaluatesThroughContextOps) {
  ExprPtr e = parse("(let (r (alloc 3)) (seq (:= r (+ (! r) 4)) (! r)))");
  TargetContext c = elaborate(e, SrcType::integer(), "arith");
  auto mon = std::make_shared<Monitor>();
  RunResult r = run_closed(instantiate(c, mon), RunConfig{});
  ASSERT_TRUE(r.ok()) << r.failure->message;
  EXPECT_EQ(*r.result, Value::integer(7));
  EXPECT_TRUE(is_shareable(r.world, Addr{1}));
}

TEST(TargetLang, GeneratorIsWellTypedAndDeterministic) {
  const std::vector<SrcType> types = {
      parse_type("(-> (ref (ref int)) (-> unit unit))"),
      parse_type("(-> (-> int int) int)"),
      parse_type("(-> (llist int) unit)"),
      parse_type("(* int (+ bool unit))"),
  };
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const SrcType& t = types[seed % types.size()];
    const int size = minimal_size(t) + static_cast<int>(seed % 6);
    ExprPtr e = gen_random_context(t, seed, size);
    ASSERT_EQ(typecheck(e).type, t) << print(e);
    ASSERT_EQ(print(gen_random_context(t, seed, size)), print(e));
  }
  EXPECT_SECREF_ERROR(gen_random_context(types[0], 1, minimal_size(types[0]) - 1), ErrorCode::GenerationExhausted);
}

TEST(ContextOps, OnlyShareableCellsCrossTheBoundary) {
  auto [p, w0] = lr_alloc(World{}, kInt, Preorder::trivial(), Value::integer(1));
  auto [s, w1] = ctx_alloc(w0, kInt, Value::integer(2));
  EXPECT_TRUE(is_shareable(w1, s));
  EXPECT_EQ(ctx_read(w1, Value::ref(s, kInt)), Value::integer(2));
  EXPECT_SECREF_ERROR(ctx_read(w1, Value::ref(p, kInt)), ErrorCode::BoundaryViolation);
  EXPECT_SECREF_ERROR(ctx_write(w1, Value::ref(p, kInt), Value::integer(0)), ErrorCode::BoundaryViolation);
  EXPECT_SECREF_ERROR(ctx_read(w1, Value::ref(s, TypeTag::boolean())), ErrorCode::BoundaryViolation);
  EXPECT_SECREF_ERROR(ctx_read(w1, Value::ref(Addr{9}, kInt)), ErrorCode::BoundaryViolation);
  EXPECT_SECREF_ERROR(ctx_alloc(w1, TypeTag::ref(kInt), Value::ref(p, kInt)), ErrorCode::BoundaryViolation);
}

}  // namespace
