#include "secref/contract.hpp"
#include "secref/mutation.hpp"
#include "test_support.hpp"

using namespace secref;

namespace {

const TypeTag kInt = TypeTag::integer();
const InterfaceSpec kIntSpec = InterfaceSpec::base(TypeTag::integer());

Refinement positive() {
  return {"positive", [](const Value& v) { return v.as_int() > 0; }};
}

Value run_value(const Program& m) {
  RunResult r = run_closed(m, RunConfig{});
  if (!r.ok()) throw std::runtime_error(r.failure->message);
  return *r.result;
}

TEST(Contracts, ErrValueRoundTrip) {
  for (ErrCode c : {ErrCode::PreViolation, ErrCode::PostViolation, ErrCode::RefinementViolation, ErrCode::ImportFailure}) {
    EXPECT_EQ(err_code_of(err_value(c)), c);
  }
  EXPECT_EQ(err_code_of(Value::inr(Value::integer(99))), std::nullopt);
  EXPECT_EQ(err_code_of(Value::inl(Value::integer(1))), std::nullopt);
}

TEST(Contracts, FirstOrderImportExportRoundTrip) {
  const InterfaceSpec spec = InterfaceSpec::pair(kIntSpec, InterfaceSpec::sum(kIntSpec, InterfaceSpec::ref(kInt)));
  const ContractTree hocs = ContractTree::of(spec);
  auto mon = std::make_shared<Monitor>();
  const Value v = Value::pair(Value::integer(3), Value::inr(Value::ref(Addr{2}, kInt)));
  const Value out = export_value(spec, v, hocs, mon);
  EXPECT_EQ(out, v);
  EXPECT_TRUE(preserves_refs_check(spec, v, out));
  EXPECT_EQ(import_value(spec, out, hocs, mon), Value::inl(v));
  EXPECT_SECREF_ERROR(import_value(spec, Value::integer(1), hocs, mon), ErrorCode::TypeMismatch);
}

TEST(Contracts, RefinementFailureIsAValue) {
  const InterfaceSpec spec = kIntSpec.refined(positive());
  const ContractTree hocs = ContractTree::of(spec);
  auto mon = std::make_shared<Monitor>();
  EXPECT_TRUE(import_can_fail(spec));
  EXPECT_EQ(import_value(spec, Value::integer(1), hocs, mon), Value::inl(Value::integer(1)));
  EXPECT_EQ(err_code_of(import_value(spec, Value::integer(0), hocs, mon)), ErrCode::RefinementViolation);
  EXPECT_EQ(mon->errors().size(), 1u);
  EXPECT_SECREF_ERROR(InterfaceSpec::arrow(kIntSpec, kIntSpec).refined(positive()), ErrorCode::InterfaceMismatch);
}

TEST(Contracts, ShapeOfContractTree) {
  const InterfaceSpec spec = InterfaceSpec::arrow(InterfaceSpec::pair(kIntSpec, kIntSpec), kIntSpec);
  const ContractTree hocs = ContractTree::of(spec);
  EXPECT_TRUE(shape_matches(spec, hocs));
  EXPECT_FALSE(shape_matches(kIntSpec, hocs));
  EXPECT_EQ(hocs.children().size(), 2u);
}

// Imported int -> int whose post demands result > arg.
InterfaceSpec growing_arrow() {
  ExecPost post{"grows", [](const Value& arg, const World&) { return arg; },
                [](const Value& arg, const Value& res, const World&) -> CheckResult {
                  if (res.as_int() > arg.as_int()) return std::nullopt;
                  return Err{ErrCode::PostViolation, "result did not grow"};
                }};
  return InterfaceSpec::arrow(kIntSpec, kIntSpec, std::nullopt, post);
}

Value import_fn(const InterfaceSpec& spec, std::function<std::int64_t(std::int64_t)> f, const MonitorPtr& mon) {
  Value target = host_closure("f", [f](const Value& v) { return ret(Value::integer(f(v.as_int()))); });
  return import_value(spec, target, ContractTree::of(spec), mon).as<Value::Inl>().payload;
}

TEST(Contracts, ImportedPostIsChecked) {
  const InterfaceSpec spec = growing_arrow();
  auto mon = std::make_shared<Monitor>();
  Value good = import_fn(spec, [](std::int64_t x) { return x + 1; }, mon);
  Value bad = import_fn(spec, [](std::int64_t x) { return x; }, mon);
  EXPECT_EQ(run_value(call(good, Value::integer(4))), Value::inl(Value::integer(5)));
  EXPECT_EQ(err_code_of(run_value(call(bad, Value::integer(4)))), ErrCode::PostViolation);
  EXPECT_EQ(mon->stats().context_calls, 2u);
  EXPECT_EQ(mon->stats().purity_violations, 0u);

  ScopedMutant mutant(Mutant::ImportNoPost);
  EXPECT_EQ(run_value(call(bad, Value::integer(4))), Value::inl(Value::integer(4)));
}

TEST(Contracts, ExportedPreIsChecked) {
  ExecPre pre{"small", [](const Value& arg, const World&) -> CheckResult {
                if (arg.as_int() < 10) return std::nullopt;
                return Err{ErrCode::PreViolation, "too large"};
              }};
  const InterfaceSpec spec = InterfaceSpec::arrow(kIntSpec, kIntSpec, pre);
  EXPECT_TRUE(export_is_fallible(spec));
  auto mon = std::make_shared<Monitor>();
  Value src = host_closure("sq", [](const Value& v) { return ret(Value::integer(v.as_int() * v.as_int())); });
  Value exported = export_value(spec, src, ContractTree::of(spec), mon);
  EXPECT_EQ(run_value(call(exported, Value::integer(3))), Value::inl(Value::integer(9)));
  EXPECT_EQ(err_code_of(run_value(call(exported, Value::integer(12)))), ErrCode::PreViolation);
  EXPECT_EQ(mon->stats().exported_calls, 1u);
}

TEST(Contracts, ContextCallFlagsPrivateWrites) {
  auto mon = std::make_shared<Monitor>();
  Program m = bind(alloc_op(kInt, Preorder::trivial(), Value::integer(0)), [mon](const Value& r) {
    return mon->context_call("sneaky", [r] { return write_op(r.as_addr(), Value::integer(1)); });
  });
  ASSERT_TRUE(run_closed(m, RunConfig{}).ok());
  EXPECT_EQ(mon->relation_violations().size(), 1u);
}

}  // namespace
