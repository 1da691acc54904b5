// secref: run scenarios, check context files and drive campaigns.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "secref/campaign.hpp"
#include "secref/errors.hpp"
#include "secref/mutation.hpp"

using namespace secref;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SECREF_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

bool is_file(const std::string& s) { return s.find('/') != std::string::npos || s.ends_with(".sref"); }

void print_outcome(const std::string& side, const RunOutcome& o) {
  std::cout << side << ": " << o.exec.behavior.to_string();
  if (o.ok()) std::cout << "  psi: " << (o.psi_failure ? "FAILS (" + *o.psi_failure + ")" : "holds") << "\n";
  if (o.contract_error) std::cout << "  contract error observed\n";
  for (const auto& v : o.mon->relation_violations()) std::cout << "  relation violated: " << v << "\n";
}

int cmd_run(const std::string& scenario, const std::string& context, std::int64_t param, bool paranoid,
            bool both) {
  RunConfig rc;
  rc.check_level = paranoid ? CheckLevel::Paranoid : CheckLevel::Fast;

  if (scenario.starts_with("dual-")) {
    for (const auto& d : dual_scenarios()) {
      if ("dual-" + d.program.name != scenario) continue;
      TargetContext c;
      Expectation expect = Expectation::Ok;
      if (is_file(context)) {
        c = elaborate(parse(slurp(context)), d.context_type, context);
      } else {
        auto it = std::find_if(d.contexts.begin(), d.contexts.end(), [&](const auto& n) { return n.name == context; });
        if (it == d.contexts.end()) throw SecrefError(ErrorCode::InterfaceMismatch, "no context named " + context);
        c = it->make();
        expect = it->expect;
      }
      RunOutcome o = run_dual(d, c, rc);
      print_outcome("context-first", o);
      auto why = expectation_failure(o, expect);
      std::cout << "expected " << to_string(expect) << ": " << (why ? "NO (" + *why + ")" : "yes") << "\n";
      return why ? 1 : 0;
    }
    throw SecrefError(ErrorCode::InterfaceMismatch, "no scenario named " + scenario);
  }

  const Scenario& s = find_scenario(scenario);
  TargetContext c;
  std::optional<Expectation> expect;
  if (is_file(context)) {
    c = elaborate(parse(slurp(context)), s.context_type, context);
  } else {
    const NamedContext& nc = s.context(context);
    c = nc.make();
    expect = nc.expect;
    if (param == 0) param = nc.param;
  }
  RunOutcome t = run_target(s, param, c, rc);
  print_outcome("target", t);
  bool good = true;
  if (both) {
    RunOutcome src = run_source(s, param, c, rc);
    print_outcome("source", src);
    const bool same = beh_equal(t.exec.behavior, src.exec.behavior);
    std::cout << "beh_equal: " << (same ? "yes" : "NO") << "\n";
    good = good && same;
  }
  if (expect) {
    auto why = expectation_failure(t, *expect);
    std::cout << "expected " << to_string(*expect) << ": " << (why ? "NO (" + *why + ")" : "yes") << "\n";
    good = good && !why;
  } else {
    // An arbitrary context may be rejected by a contract; it must not break psi or abort.
    good = good && t.ok() && !t.psi_failure && t.mon->relation_violations().empty();
  }
  return good ? 0 : 1;
}

int cmd_check(const std::string& file, const std::string& scenario) {
  ExprPtr e = parse(slurp(file));
  Typed typed = typecheck(e);
  std::cout << file << ": " << typed.type.to_string() << "\n";
  if (!scenario.empty()) {
    const Scenario& s = find_scenario(scenario);
    (void)elaborate(e, s.context_type, file);
    std::cout << "matches the " << scenario << " interface " << s.context_type.to_string() << "\n";
  }
  std::cout << "OK\n";
  return 0;
}

int emit(const Report& r, const std::string& json_path) {
  std::cout << r.text();
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << r.json();
  }
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secref: verified programs linked with unverified contexts"};
  app.require_subcommand(1);

  std::string scenario;
  std::string context;
  std::int64_t param = 0;
  bool paranoid = false;
  bool both = false;
  auto* run = app.add_subcommand("run", "Link a scenario with a context and run it");
  run->add_option("scenario", scenario, "Scenario name (see `secref list`)")->required();
  run->add_option("context", context, "Context name or .sref file")->required();
  run->add_option("--param", param, "Scenario parameter (0 keeps the default)");
  run->add_flag("--paranoid", paranoid, "Check the invariants after every step");
  run->add_flag("--both", both, "Also run the back-translated side and compare");

  std::string file;
  std::string against;
  auto* check = app.add_subcommand("check", "Parse and typecheck a .sref file");
  check->add_option("file", file)->required();
  check->add_option("--scenario", against, "Also match the scenario's context type");

  CampaignConfig cfg;
  cfg.seed = default_seed();
  std::string json_path;
  auto add_campaign = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Campaign seed (default $SECREF_SEED or 0)");
    sub->add_option("--trials", cfg.trials, "Generated contexts")->check(CLI::PositiveNumber);
    sub->add_option("--fuel", cfg.fuel, "Step budget per run");
    sub->add_option("--scenario", cfg.scenarios, "Restrict to these scenarios");
    sub->add_option("--json", json_path, "Write the JSON report here");
    sub->add_flag("--paranoid,!--fast", cfg.paranoid, "Check the invariants after every step (default)");
  };
  auto* fuzz = app.add_subcommand("fuzz", "Differential fuzzing of both link directions");
  add_campaign(fuzz);
  fuzz->add_option("--dual-trials", cfg.dual_trials, "Generated contexts in the context-first direction");
  fuzz->add_option("--repro", cfg.repro_path, "Write the shrunk failing context here");
  auto* props = app.add_subcommand("props", "Law and stability suites");
  add_campaign(props);

  auto* list = app.add_subcommand("list", "List scenarios and their contexts");

  std::string mutant = "none";
  app.add_option("--mutant", mutant, "Run with a deliberately broken check (for mutation testing)")
      ->check(CLI::IsMember({"none", "ctx-write-no-share-check", "label-shareable-no-points-to", "import-no-post"}));

  CLI11_PARSE(app, argc, argv);

  ScopedMutant scoped(*parse_mutant(mutant));
  try {
    if (run->parsed()) return cmd_run(scenario, context, param, paranoid, both);
    if (check->parsed()) return cmd_check(file, against);
    if (fuzz->parsed()) return emit(fuzz_report(cfg), json_path);
    if (props->parsed()) return emit(props_report(cfg), json_path);
    if (list->parsed()) {
      for (const auto& s : all_scenarios()) {
        std::cout << s.name << "  " << s.context_type.to_string() << "\n";
        for (const auto& c : s.contexts) std::cout << "  " << c.name << " (" << to_string(c.expect) << ")\n";
      }
      for (const auto& d : dual_scenarios()) {
        std::cout << "dual-" << d.program.name << "  " << d.context_type.to_string() << "\n";
        for (const auto& c : d.contexts) std::cout << "  " << c.name << " (" << to_string(c.expect) << ")\n";
      }
      return 0;
    }
  } catch (const SecrefError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
