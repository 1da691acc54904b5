#include "secref/mst.hpp"

namespace secref {

namespace {

std::string addr_str(Addr r) { return std::to_string(r.value); }

Program ret_cont(const Value& v) { return ret(v); }

}  // namespace

StablePredicate shareable_token(Addr r) {
  return {"is_shareable@" + addr_str(r), [r](const World& w) { return is_shareable(w, r); },
          "Shareable is terminal in the label preorder"};
}

StablePredicate encapsulated_token(Addr r) {
  return {"is_encapsulated@" + addr_str(r), [r](const World& w) { return is_encapsulated(w, r); },
          "Encapsulated is terminal in the label preorder"};
}

StablePredicate contained_token(Addr r) {
  return {"contains@" + addr_str(r), [r](const World& w) { return w.heap.contains(r); },
          "cells are never deallocated"};
}

StablePredicate private_token(Addr r) {
  return {"is_private@" + addr_str(r), [r](const World& w) { return is_private(w, r); },
          "NOT stable: Private may move to either other label"};
}

std::optional<std::string> WitnessSet::first_failing(const World& w) const {
  for (const auto& [name, p] : preds_) {
    if (!p.test(w)) return name;
  }
  return std::nullopt;
}

std::vector<std::string> WitnessSet::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : preds_) out.push_back(name);
  return out;
}

bool Program::is_return() const { return std::holds_alternative<Return>(node_->alt); }

const Value& Program::returned() const { return std::get<Return>(node_->alt).value; }

Program ret(Value v) { return Program::make(Program::Return{std::move(v)}); }

Program bind(Program m, Program::Cont k) {
  if (m.is_return()) return k(m.returned());
  return Program::make(Program::Bind{std::move(m), std::move(k)});
}

Program then(Program m, Program next) {
  return bind(std::move(m), [next = std::move(next)](const Value&) { return next; });
}

Program then(Program m, std::function<Program()> next) {
  return bind(std::move(m), [next = std::move(next)](const Value&) { return next(); });
}

Program read_op(Addr r) { return Program::make(Program::Read{r, ret_cont}); }
Program write_op(Addr r, Value v) { return Program::make(Program::Write{r, std::move(v), ret_cont}); }
Program alloc_op(TypeTag tag, Preorder rel, Value init) {
  auto payload = tag;
  return Program::make(Program::Alloc{std::move(tag), std::move(rel), std::move(init),
                                      [payload](Addr a) { return ret(Value::ref(a, payload)); }});
}
Program witness_op(StablePredicate p) { return Program::make(Program::Witness{std::move(p), ret_cont}); }
Program recall_op(StablePredicate p) { return Program::make(Program::Recall{std::move(p), ret_cont}); }
Program relabel_op(Addr r, Label l) { return Program::make(Program::Relabel{r, l, ret_cont}); }
Program observe(std::function<Program(const World&)> k) { return Program::make(Program::Observe{std::move(k)}); }
Program fail_op(ErrorCode code, std::string message) {
  return Program::make(Program::Fail{code, std::move(message)});
}
Program tick() { return Program::make(Program::Tick{ret_cont}); }

namespace {

class HostClosure : public Callable {
 public:
  HostClosure(std::string name, std::function<Program(const Value&)> body)
      : Callable(std::move(name)), body_(std::move(body)) {}
  Program invoke(const Value& arg) const override { return body_(arg); }

 private:
  std::function<Program(const Value&)> body_;
};

}  // namespace

Value host_closure(std::string name, std::function<Program(const Value&)> body) {
  return Value::closure(std::make_shared<HostClosure>(std::move(name), std::move(body)));
}

Program call(const Value& f, const Value& arg) {
  if (!f.is<Value::Closure>()) fail(ErrorCode::TypeMismatch, f.to_string() + " is not a function");
  return f.as<Value::Closure>().fn->invoke(arg);
}

World initial_world() { return World{}; }

namespace {

class Interpreter {
 public:
  Interpreter(World w0, WitnessSet witnessed, const RunConfig& cfg)
      : world_(std::move(w0)), witnessed_(std::move(witnessed)), cfg_(cfg) {}

  RunResult execute(Program current) {
    RunResult out;
    try {
      if (auto bad = witnessed_.first_failing(world_)) {
        fail(ErrorCode::WitnessFalse, "initial witness set contains failing predicate " + *bad);
      }
      while (true) {
        if (steps_ >= cfg_.fuel) fail(ErrorCode::OutOfFuel, "fuel exhausted after " + std::to_string(steps_));
        ++steps_;
        if (current.is_return()) {
          if (stack_.empty()) {
            out.result = current.returned();
            break;
          }
          Program::Cont k = std::move(stack_.back());
          stack_.pop_back();
          current = k(current.returned());
          continue;
        }
        current = step(current);
      }
    } catch (const SecrefError& e) {
      out.failure = Failure{e.code(), e.detail()};
    } catch (const std::bad_variant_access&) {
      out.failure = Failure{ErrorCode::TypeMismatch, "host continuation received a value of the wrong shape"};
    }
    out.world = std::move(world_);
    out.witnessed = std::move(witnessed_);
    out.steps = steps_;
    out.invariant_checks = invariant_checks_;
    return out;
  }

 private:
  bool paranoid() const { return cfg_.check_level == CheckLevel::Paranoid; }
  bool tracking() const { return paranoid() || cfg_.observer != nullptr; }

  Program step(const Program& current) {
    return std::visit([this](const auto& op) { return this->apply(op); }, current.node().alt);
  }

  Program apply(const Program::Return&) { return ret(Value::unit()); }  // handled in execute

  Program apply(const Program::Bind& b) {
    stack_.push_back(b.rest);
    return b.first;
  }

  Program apply(const Program::Read& r) { return r.k(lr_read(world_, r.addr)); }

  Program apply(const Program::Write& w) {
    mutate([&] { return lr_write(world_, w.addr, w.value); });
    return w.k(Value::unit());
  }

  Program apply(const Program::Alloc& a) {
    Addr fresh_addr{};
    mutate([&] {
      auto [addr, next] = lr_alloc(world_, a.tag, a.rel, a.init);
      fresh_addr = addr;
      return next;
    });
    return a.k(fresh_addr);
  }

  Program apply(const Program::Relabel& r) {
    mutate([&] {
      return r.label == Label::Shareable ? label_shareable(world_, r.addr) : label_encapsulated(world_, r.addr);
    });
    return r.k(Value::unit());
  }

  Program apply(const Program::Witness& w) {
    if (!w.pred.test(world_)) fail(ErrorCode::WitnessFalse, w.pred.name + " does not hold");
    witnessed_.insert(w.pred);
    return w.k(Value::unit());
  }

  Program apply(const Program::Recall& r) {
    if (!witnessed_.contains(r.pred.name)) {
      fail(ErrorCode::RecallUnwitnessed, r.pred.name + " was recalled before being witnessed");
    }
    if (!r.pred.test(world_)) fail(ErrorCode::StabilityViolation, r.pred.name + " no longer holds");
    return r.k(Value::unit());
  }

  Program apply(const Program::Observe& o) { return o.k(world_); }

  Program apply(const Program::Fail& f) { fail(f.code, f.message); }

  Program apply(const Program::Tick& t) { return t.k(Value::unit()); }

  template <typename F>
  void mutate(F&& f) {
    if (!tracking()) {
      world_ = f();
      return;
    }
    World before = world_;
    world_ = f();
    if (paranoid()) check_step(before);
    if (cfg_.observer != nullptr) cfg_.observer->on_transition(before, world_);
  }

  void check_step(const World& before) {
    ++invariant_checks_;
    if (auto why = lr_inv_violation(world_)) fail(ErrorCode::InvariantViolation, *why);
    if (!world_leq(before, world_)) fail(ErrorCode::InvariantViolation, "step is not monotone");
    if (auto bad = witnessed_.first_failing(world_)) {
      fail(ErrorCode::StabilityViolation, "witnessed " + *bad + " no longer holds");
    }
  }

  World world_;
  WitnessSet witnessed_;
  const RunConfig& cfg_;
  std::vector<Program::Cont> stack_;
  std::uint64_t steps_ = 0;
  std::uint64_t invariant_checks_ = 0;
};

}  // namespace

RunResult run(const Program& m, World w0, WitnessSet witnessed, const RunConfig& cfg) {
  Interpreter interp(std::move(w0), std::move(witnessed), cfg);
  RunResult out = interp.execute(m);
  if (out.ok() && cfg.check_level == CheckLevel::Paranoid) {
    if (auto bad = out.witnessed.first_failing(out.world)) {
      out.result.reset();
      out.failure = Failure{ErrorCode::StabilityViolation, "witnessed " + *bad + " fails on the final world"};
    }
  }
  return out;
}

RunResult run_closed(const Program& m, const RunConfig& cfg) { return run(m, initial_world(), WitnessSet{}, cfg); }

}  // namespace secref
