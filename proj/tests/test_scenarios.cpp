#include "secref/campaign.hpp"
#include "test_support.hpp"

using namespace secref;

namespace {

RunConfig paranoid() {
  RunConfig rc;
  rc.check_level = CheckLevel::Paranoid;
  return rc;
}

TEST(Scenarios, EveryNamedContextMeetsItsExpectation) {
  for (const auto& s : all_scenarios()) {
    for (const auto& nc : s.contexts) {
      RunOutcome o = run_target(s, nc.param, nc.make(), paranoid());
      EXPECT_EQ(expectation_failure(o, nc.expect), std::nullopt) << s.name << "/" << nc.name;
    }
  }
  for (const auto& d : dual_scenarios()) {
    for (const auto& nc : d.contexts) {
      RunOutcome o = run_dual(d, nc.make(), paranoid());
      EXPECT_EQ(expectation_failure(o, nc.expect), std::nullopt) << d.program.name << "/" << nc.name;
    }
  }
}

TEST(Scenarios, BothPipelinesAgreeOnNamedContexts) {
  for (const auto& s : all_scenarios()) {
    for (const auto& nc : s.contexts) {
      const auto t = run_target(s, nc.param, nc.make(), paranoid());
      const auto src = run_source(s, nc.param, nc.make(), paranoid());
      EXPECT_TRUE(beh_equal(t.exec.behavior, src.exec.behavior)) << s.name << "/" << nc.name;
    }
  }
}

TEST(Scenarios, SafeProgKeepsTheSecret) {
  const Scenario& s = find_scenario("safe_prog");
  RunOutcome o = run_target(safe_prog_instance(), s.context("adversarial").make(), paranoid());
  ASSERT_TRUE(o.ok());
  EXPECT_EQ(*o.exec.run.result, Value::integer(42));
  RunOutcome u = run_target(safe_prog_instance(SafeProgVariant::Unlabeled), s.context("benign").make(), paranoid());
  ASSERT_TRUE(u.exec.run.failure);
  EXPECT_EQ(u.exec.run.failure->code, ErrorCode::ShareLeak);
}

TEST(Scenarios, PrngIsDeterministic) {
  EXPECT_EQ(generate_nr(7, 3), generate_nr(7, 3));
  EXPECT_NE(generate_nr(7, 3), generate_nr(7, 4));
  const Scenario& s = find_scenario("prng");
  RunOutcome o = run_target(s, 0, s.context("caller3").make(), paranoid());
  ASSERT_TRUE(o.ok());
  EXPECT_EQ(*o.exec.run.result, Value::integer(3));
}

TEST(Scenarios, GuessBinarySearchFindsThePick) {
  const Scenario& s = find_scenario("guess");
  for (std::int64_t pick : {1, 42, 99}) {
    RunOutcome o = run_target(s, pick, s.context("binary").make(), paranoid());
    ASSERT_TRUE(o.ok()) << pick;
    EXPECT_EQ(*o.exec.run.result, Value::integer(1)) << pick;
    EXPECT_EQ(o.psi_failure, std::nullopt);
  }
}

TEST(Scenarios, Fairness) {
  EXPECT_TRUE(fairness(3, {0, 1, 2, 0, 1, 2}));
  EXPECT_TRUE(fairness(2, {0, 1, 1}));  // task 0 finished
  EXPECT_FALSE(fairness(3, {0, 1, 0, 2}));
  EXPECT_FALSE(fairness(3, {0, 1, 1, 0}));
}

TEST(Scenarios, ForgersAreStoppedAtTheBoundary) {
  for (const auto& s : all_scenarios()) {
    for (ForgeAction a : {ForgeAction::Read, ForgeAction::Write, ForgeAction::Alloc}) {
      RunOutcome o = run_target(s, 0, forger_context(s.context_type, a, Addr{1}), paranoid());
      ASSERT_TRUE(o.exec.run.failure) << s.name;
      EXPECT_EQ(o.exec.run.failure->code, ErrorCode::BoundaryViolation) << s.name;
    }
  }
}

TEST(Campaign, ReportIsReproducible) {
  CampaignConfig cfg;
  cfg.seed = 3;
  cfg.trials = 20;
  cfg.dual_trials = 5;
  const Report a = fuzz_report(cfg);
  const Report b = fuzz_report(cfg);
  EXPECT_TRUE(a.passed()) << a.text();
  EXPECT_EQ(a.json(), b.json());
}

TEST(Campaign, PropsPass) {
  CampaignConfig cfg;
  cfg.trials = 20;
  const Report r = props_report(cfg);
  EXPECT_TRUE(r.passed()) << r.text();
}

}  // namespace
