#include "secref/scenarios.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "secref/errors.hpp"

namespace secref {

namespace {

TypeTag int_tag() { return TypeTag::integer(); }
TypeTag llist_int() { return TypeTag::llist(TypeTag::integer()); }

InterfaceSpec base(TypeTag t) { return InterfaceSpec::base(std::move(t)); }

// Imported arrows answer Inl v or Inr err; none of the arrows this is used on
// carries a contract, so an error here is a broken run.
Program call_ok(const Value& f, const Value& arg, std::function<Program(const Value&)> k) {
  return bind(call(f, arg), [k](const Value& r) {
    if (!r.is<Value::Inl>()) return fail_op(ErrorCode::InvariantViolation, "unexpected contract error " + r.to_string());
    return k(r.as<Value::Inl>().payload);
  });
}

std::string str(const Value& v) { return v.to_string(); }

const HeapCell* cell_or_null(const World& w, Addr a) { return w.heap.contains(a) ? &w.heap.cell(a) : nullptr; }

NamedContext sref_context(const std::string& name, const std::string& file, const SrcType& t, Expectation e,
                          std::int64_t param = 0) {
  return NamedContext{name, [file, t] { return elaborate(parse(embedded_context(file)), t, file); }, e, param, false};
}

std::vector<NamedContext> with_forgers(std::vector<NamedContext> named, const SrcType& t) {
  for (auto& f : forger_contexts(t)) named.push_back(std::move(f));
  return named;
}

// ---- safe_prog -------------------------------------------------------------

InterfaceSpec safe_prog_spec() {
  return InterfaceSpec::arrow(InterfaceSpec::ref(TypeTag::ref(int_tag())),
                              InterfaceSpec::arrow(base(TypeTag::unit()), base(TypeTag::unit())));
}

// ---- autograder ------------------------------------------------------------

CheckResult judge_sorted(const Value& captured, const World& w) {
  const Addr head = captured.as<Value::Pair>().first.as_addr();
  const auto collected = llist_collect(w.heap, head);
  if (const auto* cyc = std::get_if<CycleDetected>(&collected)) {
    return Err{ErrCode::PostViolation, "no_cycles: cell " + std::to_string(cyc->repeated.value) + " repeats"};
  }
  const auto& items = std::get<std::vector<Value>>(collected);
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i - 1].as_int() > items[i].as_int()) return Err{ErrCode::PostViolation, "sorted"};
  }
  auto multiset = [](const std::vector<Value>& vs) {
    std::vector<std::int64_t> out;
    for (const auto& v : vs) out.push_back(v.as_int());
    std::sort(out.begin(), out.end());
    return out;
  };
  if (multiset(items) != multiset(captured.as<Value::Pair>().second.as<Value::Seq>().items)) {
    return Err{ErrCode::PostViolation, "same_values"};
  }
  return std::nullopt;
}

Program create_llist(std::shared_ptr<const std::vector<std::int64_t>> xs, std::size_t n, Addr tail) {
  if (n == 0) return ret(Value::ref(tail, llist_int()));
  const Value cell = Value::ll_cons(Value::integer((*xs)[n - 1]), tail);
  return bind(alloc_op(llist_int(), Preorder::trivial(), cell), [xs, n](const Value& r) {
    return then(relabel_op(r.as_addr(), Label::Shareable), [xs, n, r] { return create_llist(xs, n - 1, r.as_addr()); });
  });
}

// Tail first, so every cell is labeled after the cell it points to.
Program create_llist(const std::vector<std::int64_t>& test) {
  auto xs = std::make_shared<const std::vector<std::int64_t>>(test);
  return bind(alloc_op(llist_int(), Preorder::trivial(), Value::ll_nil()), [xs](const Value& nil) {
    return then(relabel_op(nil.as_addr(), Label::Shareable),
                [xs, nil] { return create_llist(xs, xs->size(), nil.as_addr()); });
  });
}

// ---- prng ------------------------------------------------------------------

InterfaceSpec prng_spec() {
  return InterfaceSpec::arrow(InterfaceSpec::arrow(base(TypeTag::unit()), base(int_tag())), base(TypeTag::unit()));
}

// ---- guess -----------------------------------------------------------------

InterfaceSpec guess_spec() {
  auto game = InterfaceSpec::pair(InterfaceSpec::pair(base(int_tag()), base(int_tag())),
                                  InterfaceSpec::arrow(base(int_tag()), base(int_tag())));
  return InterfaceSpec::arrow(game, base(int_tag()));
}

std::int64_t compare_guess(std::int64_t pick, std::int64_t guess) {
  if (pick == guess) return 0;
  return pick < guess ? -1 : 1;
}

Value seq_append(const Value& s, const Value& x) {
  auto items = s.as<Value::Seq>().items;
  items.push_back(x);
  return Value::seq(std::move(items));
}

// ---- scheduler -------------------------------------------------------------

InterfaceSpec scheduler_spec() {
  return InterfaceSpec::arrow(
      base(int_tag()),
      InterfaceSpec::arrow(InterfaceSpec::ref(int_tag()),
                           InterfaceSpec::arrow(base(TypeTag::unit()), base(TypeTag::boolean()))));
}

TypeTag counter_tag() {
  return TypeTag::pair(TypeTag::seq(int_tag()), TypeTag::pair(int_tag(), int_tag()));
}

Value counter_value(std::vector<Value> hist, std::int64_t next, std::int64_t inact) {
  return Value::pair(Value::seq(std::move(hist)), Value::pair(Value::integer(next), Value::integer(inact)));
}

struct SchedulerState {
  int k = 0;
  std::uint64_t budget = 0;
  Addr counter;
  Addr shared;
  std::vector<Value> tasks;
  std::vector<bool> active;
  bool exhausted = false;
};

Program schedule(std::shared_ptr<SchedulerState> st, std::uint64_t steps) {
  return bind(read_op(st->counter), [st, steps](const Value& c) {
    const auto& pr = c.as<Value::Pair>();
    const std::int64_t next = pr.second.as<Value::Pair>().first.as_int();
    const std::int64_t inact = pr.second.as<Value::Pair>().second.as_int();
    if (inact == st->k) return ret(Value::unit());
    if (steps == st->budget) {
      st->exhausted = true;
      return ret(Value::unit());
    }
    return call_ok(st->tasks[next], Value::unit(), [st, steps, c, next, inact](const Value& yielded) {
      const auto& pr = c.as<Value::Pair>();
      std::int64_t now_inact = inact;
      if (!yielded.as_bool()) {
        st->active[next] = false;
        ++now_inact;
      }
      auto hist = pr.first.as<Value::Seq>().items;
      hist.push_back(Value::integer(next));
      std::int64_t after = next;
      for (int d = 1; d <= st->k; ++d) {
        const std::int64_t cand = (next + d) % st->k;
        if (st->active[cand]) {
          after = cand;
          break;
        }
      }
      return then(write_op(st->counter, counter_value(std::move(hist), after, now_inact)),
                  [st, steps] { return schedule(st, steps + 1); });
    });
  });
}

Program make_tasks(std::shared_ptr<SchedulerState> st, const Value& factory, int i) {
  if (i == st->k) return ret(Value::unit());
  return call_ok(factory, Value::integer(i), [st, factory, i](const Value& with_cell) {
    return call_ok(with_cell, Value::ref(st->shared, int_tag()), [st, factory, i](const Value& step) {
      st->tasks.push_back(step);
      return make_tasks(st, factory, i + 1);
    });
  });
}

// ---- forgers ---------------------------------------------------------------

Program forged_ground(const TypeTag& t, const ContextOps& ops) {
  switch (t.kind()) {
    case TypeTag::Kind::Unit: return ret(Value::unit());
    case TypeTag::Kind::Int: return ret(Value::integer(0));
    case TypeTag::Kind::Bool: return ret(Value::boolean(false));
    case TypeTag::Kind::Sum:
      return bind(forged_ground(t.left(), ops), [](const Value& v) { return ret(Value::inl(v)); });
    case TypeTag::Kind::Pair:
      return bind(forged_ground(t.left(), ops), [t, ops](const Value& a) {
        return bind(forged_ground(t.right(), ops), [a](const Value& b) { return ret(Value::pair(a, b)); });
      });
    case TypeTag::Kind::Ref:
      return bind(forged_ground(t.inner(), ops), [t, ops](const Value& v) { return ops.alloc(t.inner(), v); });
    case TypeTag::Kind::LList: return ret(Value::ll_nil());
    case TypeTag::Kind::Seq: return ret(Value::seq({}));
  }
  return ret(Value::unit());
}

using Action = std::function<Program(const ContextOps&)>;

Program forged_value(const SrcType& t, const ContextOps& ops, const Action& action) {
  switch (t.kind()) {
    case SrcType::Kind::Arrow:
      return ret(host_closure("forger", [t, ops, action](const Value&) {
        return then(action(ops), [t, ops, action] { return forged_value(t.res(), ops, action); });
      }));
    case SrcType::Kind::Pair:
      return bind(forged_value(t.left(), ops, action), [t, ops, action](const Value& a) {
        return bind(forged_value(t.right(), ops, action), [a](const Value& b) { return ret(Value::pair(a, b)); });
      });
    case SrcType::Kind::Sum:
      return bind(forged_value(t.left(), ops, action), [](const Value& v) { return ret(Value::inl(v)); });
    default: return forged_ground(t.to_tag(), ops);
  }
}

}  // namespace

// ---- registry --------------------------------------------------------------

const std::string& embedded_context(const std::string& name) {
  const auto& all = embedded_contexts();
  auto it = all.find(name);
  if (it == all.end()) fail(ErrorCode::InterfaceMismatch, "no context file named " + name);
  return it->second;
}

std::string_view to_string(Expectation e) {
  switch (e) {
    case Expectation::Ok: return "ok";
    case Expectation::ContractError: return "contract-error";
    case Expectation::BoundaryError: return "boundary-error";
  }
  return "?";
}

const NamedContext& Scenario::context(const std::string& n) const {
  for (const auto& c : contexts) {
    if (c.name == n) return c;
  }
  fail(ErrorCode::InterfaceMismatch, "scenario " + name + " has no context named " + n);
}

// ---- safe_prog -------------------------------------------------------------

ScenarioInstance safe_prog_instance(SafeProgVariant variant) {
  auto secret = std::make_shared<Addr>();
  auto log = std::make_shared<InstanceLog>();
  SourceProgram program{"safe_prog", [secret, variant, log](const Value& lib) {
    return bind(alloc_op(int_tag(), Preorder::trivial(), Value::integer(42)), [=](const Value& s) {
      *secret = s.as_addr();
      log->cells["secret"] = s.as_addr();
      return bind(alloc_op(int_tag(), Preorder::trivial(), Value::integer(0)), [=](const Value& inner) {
        const TypeTag ref_int = TypeTag::ref(int_tag());
        return bind(alloc_op(ref_int, Preorder::trivial(), inner), [=](const Value& r) {
          log->cells["r"] = r.as_addr();
          return then(relabel_op(inner.as_addr(), Label::Shareable), [=] {
            return then(relabel_op(r.as_addr(), Label::Shareable), [=] {
              return call_ok(lib, r, [=](const Value& cb) {
                return bind(alloc_op(int_tag(), Preorder::trivial(), Value::integer(1)), [=](const Value& v) {
                  Program label = variant == SafeProgVariant::Labeled ? relabel_op(v.as_addr(), Label::Shareable)
                                                                      : ret(Value::unit());
                  return then(label, [=] {
                    // r := alloc 1
                    return then(write_op(r.as_addr(), v), [=] {
                      return call_ok(cb, Value::unit(), [=](const Value&) { return read_op(*secret); });
                    });
                  });
                });
              });
            });
          });
        });
      });
    });
  }};
  Psi psi = [secret](const World&, const Value& result, const World& w1) -> std::optional<std::string> {
    const HeapCell* c = cell_or_null(w1, *secret);
    if (c == nullptr) return "secret cell is missing";
    if (!(c->value == Value::integer(42))) return "secret is " + str(c->value);
    if (!is_private(w1, *secret)) return "secret is no longer private";
    if (!(result == Value::integer(42))) return "program returned " + str(result);
    return std::nullopt;
  };
  return {make_interface("safe_prog", safe_prog_spec(), psi), program, log};
}

// ---- autograder ------------------------------------------------------------

InterfaceSpec autograder_spec() {
  ExecPost post{
      "sorted_no_cycles_same_values",
      [](const Value& arg, const World& w) {
        const auto collected = llist_collect(w.heap, arg.as_addr());
        std::vector<Value> items;
        if (const auto* v = std::get_if<std::vector<Value>>(&collected)) items = *v;
        return Value::pair(arg, Value::seq(std::move(items)));
      },
      [](const Value& captured, const Value&, const World& w) { return judge_sorted(captured, w); }};
  return InterfaceSpec::arrow(InterfaceSpec::ref(llist_int()), base(TypeTag::unit()), std::nullopt, post);
}

std::vector<std::int64_t> autograder_list(std::int64_t param) {
  if (param == 0) return {4, 1, 3};
  std::mt19937_64 rng(static_cast<std::uint64_t>(param));
  std::vector<std::int64_t> out(rng() % 11);
  for (auto& x : out) x = static_cast<std::int64_t>(rng() % 41) - 20;
  return out;
}

ScenarioInstance autograder_instance(std::vector<std::int64_t> test) {
  struct State {
    Addr grade;
    std::optional<Value> before;
    std::optional<Value> after;
  };
  auto st = std::make_shared<State>();
  auto log = std::make_shared<InstanceLog>();
  const TypeTag grade_tag = TypeTag::sum(TypeTag::unit(), int_tag());
  SourceProgram program{"autograder", [st, log, test, grade_tag](const Value& hw) {
    return bind(alloc_op(grade_tag, Preorder::set_once(), Value::inl(Value::unit())), [=](const Value& g) {
      st->grade = g.as_addr();
      log->cells["grade"] = g.as_addr();
      return bind(create_llist(test), [=](const Value& ll) {
        log->cells["list"] = ll.as_addr();
        const StablePredicate shared = shareable_token(ll.as_addr());
        return then(witness_op(shared), [=] {
          return observe([=](const World& w) {
            st->before = read(w.heap, st->grade);
            return then(recall_op(shared), [=] {
              return bind(call(hw, ll), [=](const Value& res) {
                return observe([=](const World& w1) {
                  st->after = read(w1.heap, st->grade);
                  const bool passed = res.is<Value::Inl>();
                  if (!passed) {
                    log->contract_error = true;
                    log->error_code = err_code_of(res);
                    log->notes.push_back("homework rejected: " + str(res));
                  }
                  const std::int64_t grade = passed ? kGradePass : kGradeFail;
                  return then(write_op(st->grade, Value::inr(Value::integer(grade))),
                              ret(Value::integer(grade)));
                });
              });
            });
          });
        });
      });
    });
  }};
  Psi psi = [st](const World& w0, const Value& result, const World& w1) -> std::optional<std::string> {
    const HeapCell* c = cell_or_null(w1, st->grade);
    if (c == nullptr) return "grade cell is missing";
    if (!c->value.is<Value::Inr>()) return "grade was never set";
    if (!(c->value.as<Value::Inr>().payload == result)) return "grade " + str(c->value) + " but returned " + str(result);
    if (!is_private(w1, st->grade)) return "grade is no longer private";
    if (!st->before || !st->after || str(*st->before) != str(*st->after)) return "grade changed during the homework";
    if (!same_labels(w0, w1)) return "labels of the start world changed";
    if (!modif_shareable_and(w0, w1, AddrSet{st->grade})) return "a private cell of the start world changed";
    return std::nullopt;
  };
  return {make_interface("autograder", autograder_spec(), psi), program, log};
}

// ---- prng ------------------------------------------------------------------

std::int64_t generate_nr(std::int64_t seed, std::int64_t i) {
  std::uint64_t x = static_cast<std::uint64_t>(seed) ^ (static_cast<std::uint64_t>(i) * 0x9E3779B97F4A7C15ULL);
  x = x * 6364136223846793005ULL + 1442695040888963407ULL;
  return static_cast<std::int64_t>(x >> 33);
}

ScenarioInstance prng_instance(std::int64_t seed) {
  struct State {
    Addr counter;
    std::int64_t calls = 0;
  };
  auto st = std::make_shared<State>();
  auto log = std::make_shared<InstanceLog>();
  SourceProgram program{"prng", [st, seed, log](const Value& ctx) {
    return bind(alloc_op(int_tag(), Preorder::int_leq(), Value::integer(0)), [=](const Value& c) {
      st->counter = c.as_addr();
      log->cells["counter"] = c.as_addr();
      return then(relabel_op(c.as_addr(), Label::Encapsulated), [=] {
        Value next = host_closure("generate", [st, seed](const Value&) {
          return bind(read_op(st->counter), [st, seed](const Value& n) {
            const std::int64_t i = n.as_int() + 1;
            ++st->calls;
            return then(write_op(st->counter, Value::integer(i)), ret(Value::integer(generate_nr(seed, i))));
          });
        });
        return call_ok(ctx, next, [st](const Value&) { return read_op(st->counter); });
      });
    });
  }};
  Psi psi = [st](const World&, const Value& result, const World& w1) -> std::optional<std::string> {
    const HeapCell* c = cell_or_null(w1, st->counter);
    if (c == nullptr) return "counter cell is missing";
    if (!(c->value == Value::integer(st->calls))) {
      return "counter is " + str(c->value) + " after " + std::to_string(st->calls) + " calls";
    }
    if (!is_encapsulated(w1, st->counter)) return "counter is not encapsulated";
    if (!(result == c->value)) return "program returned " + str(result);
    return std::nullopt;
  };
  return {make_interface("prng", prng_spec(), psi), program, log};
}

// ---- guess -----------------------------------------------------------------

ScenarioInstance guess_instance(std::int64_t lo, std::int64_t pick, std::int64_t hi) {
  struct State {
    Addr guesses;
    std::int64_t calls = 0;
    std::vector<Value> history;
    std::optional<std::int64_t> final_guess;
  };
  auto st = std::make_shared<State>();
  auto log = std::make_shared<InstanceLog>();
  SourceProgram program{"guess", [st, lo, pick, hi, log](const Value& player) {
    return bind(alloc_op(TypeTag::seq(int_tag()), Preorder::seq_prefix(), Value::seq({})), [=](const Value& g) {
      st->guesses = g.as_addr();
      log->cells["guesses"] = g.as_addr();
      return then(relabel_op(g.as_addr(), Label::Encapsulated), [=] {
        Value oracle = host_closure("oracle", [st, pick](const Value& x) {
          return bind(read_op(st->guesses), [st, pick, x](const Value& s) {
            ++st->calls;
            st->history.push_back(x);
            return then(write_op(st->guesses, seq_append(s, x)),
                        ret(Value::integer(compare_guess(pick, x.as_int()))));
          });
        });
        const Value game = Value::pair(Value::pair(Value::integer(lo), Value::integer(hi)), oracle);
        return call_ok(player, game, [st, pick](const Value& final_guess) {
          return bind(read_op(st->guesses), [st, pick, final_guess](const Value& s) {
            st->final_guess = final_guess.as_int();
            st->history.push_back(final_guess);
            return then(write_op(st->guesses, seq_append(s, final_guess)),
                        ret(Value::integer(final_guess.as_int() == pick ? 1 : 0)));
          });
        });
      });
    });
  }};
  Psi psi = [st, pick](const World&, const Value& result, const World& w1) -> std::optional<std::string> {
    const HeapCell* c = cell_or_null(w1, st->guesses);
    if (c == nullptr) return "guesses cell is missing";
    const auto& items = c->value.as<Value::Seq>().items;
    if (!(items == st->history)) return "recorded guesses differ from the history";
    if (items.size() != static_cast<std::size_t>(st->calls) + 1) return "history length is not calls + 1";
    if (!st->final_guess || !(items.back() == Value::integer(*st->final_guess))) return "last guess is not the final one";
    if (!is_encapsulated(w1, st->guesses)) return "guesses cell is not encapsulated";
    if (!(result == Value::integer(*st->final_guess == pick ? 1 : 0))) return "wrong outcome " + str(result);
    return std::nullopt;
  };
  return {make_interface("guess", guess_spec(), psi), program, log};
}

// ---- scheduler -------------------------------------------------------------

bool fairness(int k, const std::vector<std::int64_t>& hist) {
  const auto n = static_cast<std::int64_t>(hist.size());
  std::vector<std::int64_t> last(static_cast<std::size_t>(k), -1);
  for (std::int64_t p = 0; p < n; ++p) {
    if (hist[p] < 0 || hist[p] >= k) return false;
    last[hist[p]] = p;
  }
  if (n >= k && std::find(last.begin(), last.end(), -1) != last.end()) return false;
  for (std::int64_t p = 0; p < n; ++p) {
    std::int64_t q = p + 1;
    while (q < n && hist[q] != hist[p]) ++q;
    if (q == n) continue;
    for (int j = 0; j < k; ++j) {
      if (j == hist[p] || last[j] <= q) continue;
      if (std::find(hist.begin() + p + 1, hist.begin() + q, j) == hist.begin() + q) return false;
    }
  }
  return true;
}

ExprPtr scheduler_tasks(const std::vector<int>& yields) {
  std::string limit = "1";
  for (std::size_t i = yields.size(); i-- > 0;) {
    limit = "(if (= i " + std::to_string(i) + ") " + std::to_string(yields[i] + 1) + " " + limit + ")";
  }
  return parse(
      "(lam (i int) (lam (r (ref int)) (let (c (alloc 0)) (lam (u unit) (seq (:= r (+ (! r) (+ i 1))) "
      "(:= c (+ (! c) 1)) (< (! c) " +
      limit + "))))))");
}

ScenarioInstance scheduler_instance(int k, std::uint64_t budget) {
  auto st = std::make_shared<SchedulerState>();
  st->k = k;
  st->budget = budget;
  auto log = std::make_shared<InstanceLog>();
  SourceProgram program{"scheduler", [st, log](const Value& factory) {
    return bind(alloc_op(counter_tag(), Preorder::first_seq_prefix(), counter_value({}, 0, 0)), [=](const Value& c) {
      st->counter = c.as_addr();
      log->cells["counter"] = c.as_addr();
      return bind(alloc_op(int_tag(), Preorder::trivial(), Value::integer(0)), [=](const Value& r) {
        st->shared = r.as_addr();
        log->cells["shared"] = r.as_addr();
        st->tasks.clear();
        st->active.assign(static_cast<std::size_t>(st->k), true);
        return then(relabel_op(r.as_addr(), Label::Shareable), [=] {
          return then(make_tasks(st, factory, 0),
                      [st] { return then(schedule(st, 0), [st] { return read_op(st->shared); }); });
        });
      });
    });
  }};
  Psi psi = [st](const World&, const Value& result, const World& w1) -> std::optional<std::string> {
    const HeapCell* c = cell_or_null(w1, st->counter);
    if (c == nullptr) return "counter cell is missing";
    if (!is_private(w1, st->counter)) return "counter is no longer private";
    const auto& pr = c->value.as<Value::Pair>();
    std::vector<std::int64_t> hist;
    for (const auto& v : pr.first.as<Value::Seq>().items) hist.push_back(v.as_int());
    if (!fairness(st->k, hist)) return "unfair history";
    const std::int64_t inact = pr.second.as<Value::Pair>().second.as_int();
    if (!st->exhausted && inact != st->k) return "only " + std::to_string(inact) + " tasks finished";
    const HeapCell* shared = cell_or_null(w1, st->shared);
    if (shared == nullptr || !(shared->value == result)) return "result is not the shared cell";
    return std::nullopt;
  };
  return {make_interface("scheduler", scheduler_spec(), psi), program, log};
}

// ---- dual direction --------------------------------------------------------

World dual_start_world() {
  return lr_alloc(initial_world(), int_tag(), Preorder::trivial(), Value::integer(7)).second;
}

namespace {

DualProgram dual_prng() {
  InterfaceSpec spec =
      InterfaceSpec::arrow(base(int_tag()), InterfaceSpec::arrow(base(TypeTag::unit()), base(int_tag())));
  auto make = [] {
    return ret(host_closure("prng", [](const Value& seed) {
      return bind(alloc_op(int_tag(), Preorder::int_leq(), Value::integer(0)), [seed](const Value& c) {
        const Addr counter = c.as_addr();
        return then(relabel_op(counter, Label::Encapsulated),
                    ret(host_closure("generate", [counter, seed](const Value&) {
                      return bind(read_op(counter), [counter, seed](const Value& n) {
                        const std::int64_t i = n.as_int() + 1;
                        return then(write_op(counter, Value::integer(i)),
                                    ret(Value::integer(generate_nr(seed.as_int(), i))));
                      });
                    })));
      });
    }));
  };
  return DualProgram{"prng", spec, make};
}

DualProgram dual_oracle() {
  ExecPre in_range{"in_range(0,100)", [](const Value& x, const World&) -> CheckResult {
                     if (x.as_int() > 0 && x.as_int() < 100) return std::nullopt;
                     return Err{ErrCode::PreViolation, "guess " + x.to_string() + " is out of range"};
                   }};
  InterfaceSpec spec = InterfaceSpec::arrow(base(int_tag()), base(int_tag()), in_range);
  auto make = [] {
    return bind(alloc_op(TypeTag::seq(int_tag()), Preorder::seq_prefix(), Value::seq({})), [](const Value& g) {
      const Addr guesses = g.as_addr();
      return then(relabel_op(guesses, Label::Encapsulated), ret(host_closure("oracle", [guesses](const Value& x) {
                    return bind(read_op(guesses), [guesses, x](const Value& s) {
                      return then(write_op(guesses, seq_append(s, x)),
                                  ret(Value::integer(compare_guess(42, x.as_int()))));
                    });
                  })));
    });
  };
  return DualProgram{"oracle", spec, make};
}

DualScenario dual_scenario(DualProgram p, std::vector<std::pair<std::string, std::string>> files) {
  const SrcType t = SrcType::arrow(exported_type(p.spec), SrcType::integer());
  std::vector<NamedContext> named;
  for (const auto& [name, file] : files) named.push_back(sref_context(name, file, t, Expectation::Ok));
  return DualScenario{std::move(p), t, with_forgers(std::move(named), t)};
}

}  // namespace

const std::vector<DualScenario>& dual_scenarios() {
  static const std::vector<DualScenario> all = {
      dual_scenario(dual_prng(), {{"client", "dual_prng_client"}}),
      dual_scenario(dual_oracle(),
                    {{"client", "dual_oracle_client"}, {"out_of_range", "dual_oracle_out_of_range"}}),
  };
  return all;
}

// ---- forgers ---------------------------------------------------------------

TargetContext forger_context(const SrcType& t, ForgeAction action, Addr target) {
  const Value forged = Value::ref(target, int_tag());
  Action act;
  switch (action) {
    case ForgeAction::Read: act = [forged](const ContextOps& ops) { return ops.read(forged); }; break;
    case ForgeAction::Write:
      act = [forged](const ContextOps& ops) { return ops.write(forged, Value::integer(0)); };
      break;
    case ForgeAction::Alloc:
      act = [forged](const ContextOps& ops) { return ops.alloc(TypeTag::ref(TypeTag::integer()), forged); };
      break;
  }
  static const char* names[] = {"read", "write", "alloc"};
  std::string name = std::string("forge_") + names[static_cast<int>(action)] + "@" + std::to_string(target.value);
  return TargetContext{name, [t, act](const ContextOps& ops) { return forged_value(t, ops, act); }};
}

std::vector<NamedContext> forger_contexts(const SrcType& t) {
  std::vector<NamedContext> out;
  for (ForgeAction a : {ForgeAction::Read, ForgeAction::Write, ForgeAction::Alloc}) {
    // Address 1 is the first cell the program allocates, never a shareable one.
    TargetContext probe = forger_context(t, a, Addr{1});
    out.push_back(NamedContext{probe.name, [t, a] { return forger_context(t, a, Addr{1}); },
                               Expectation::BoundaryError, 0, true});
  }
  return out;
}

// ---- registry --------------------------------------------------------------

namespace {

std::vector<Scenario> build_scenarios() {
  std::vector<Scenario> out;
  {
    const InterfaceSpec spec = safe_prog_spec();
    const SrcType t = context_type(spec);
    out.push_back(Scenario{
        "safe_prog", spec, t, [](std::int64_t) { return safe_prog_instance(); },
        [](std::uint64_t) { return std::int64_t{0}; },
        with_forgers({sref_context("adversarial", "safe_prog_adversarial", t, Expectation::Ok),
                      sref_context("benign", "safe_prog_benign", t, Expectation::Ok)},
                     t)});
  }
  {
    const InterfaceSpec spec = autograder_spec();
    const SrcType t = context_type(spec);
    out.push_back(Scenario{
        "autograder", spec, t, [](std::int64_t p) { return autograder_instance(autograder_list(p)); },
        [](std::uint64_t seed) { return static_cast<std::int64_t>(seed | 1U); },
        with_forgers({sref_context("honest", "autograder_honest", t, Expectation::Ok),
                      sref_context("cycler", "autograder_cycler", t, Expectation::ContractError),
                      sref_context("mutator", "autograder_mutator", t, Expectation::ContractError),
                      sref_context("nonsorter", "autograder_nonsorter", t, Expectation::ContractError)},
                     t)});
  }
  {
    const InterfaceSpec spec = prng_spec();
    const SrcType t = context_type(spec);
    out.push_back(Scenario{
        "prng", spec, t, [](std::int64_t p) { return prng_instance(p); },
        [](std::uint64_t seed) { return static_cast<std::int64_t>(seed % 100000); },
        with_forgers({sref_context("caller3", "prng_caller3", t, Expectation::Ok),
                      sref_context("caller0", "prng_caller0", t, Expectation::Ok)},
                     t)});
  }
  {
    const InterfaceSpec spec = guess_spec();
    const SrcType t = context_type(spec);
    out.push_back(Scenario{
        "guess", spec, t, [](std::int64_t p) { return guess_instance(0, p == 0 ? 42 : p, 100); },
        [](std::uint64_t seed) { return static_cast<std::int64_t>(1 + seed % 99); },
        with_forgers({sref_context("binary", "guess_binary", t, Expectation::Ok),
                      sref_context("onewrong", "guess_onewrong", t, Expectation::Ok),
                      sref_context("silent", "guess_silent", t, Expectation::Ok)},
                     t)});
  }
  {
    const InterfaceSpec spec = scheduler_spec();
    const SrcType t = context_type(spec);
    out.push_back(Scenario{
        "scheduler", spec, t, [](std::int64_t p) { return scheduler_instance(p == 0 ? 3 : static_cast<int>(p)); },
        [](std::uint64_t seed) { return static_cast<std::int64_t>(1 + seed % 4); },
        with_forgers({sref_context("round_robin", "scheduler_round_robin", t, Expectation::Ok, 3),
                      sref_context("immediate", "scheduler_immediate", t, Expectation::Ok, 1),
                      sref_context("writer", "scheduler_writer", t, Expectation::Ok, 3)},
                     t)});
  }
  return out;
}

}  // namespace

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> all = build_scenarios();
  return all;
}

const Scenario& find_scenario(const std::string& name) {
  for (const auto& s : all_scenarios()) {
    if (s.name == name) return s;
  }
  fail(ErrorCode::InterfaceMismatch, "no scenario named " + name);
}

}  // namespace secref
