#include "secref/linker.hpp"

#include "secref/errors.hpp"
#include "secref/mutation.hpp"

namespace secref {

namespace {

std::string addr_str(Addr r) { return std::to_string(r.value); }

Addr boundary_addr(const World& w, const Value& ref, bool require_shareable) {
  if (!ref.is<Value::Ref>()) fail(ErrorCode::BoundaryViolation, ref.to_string() + " is not a reference");
  const auto& [a, tag] = ref.as<Value::Ref>();
  if (!w.heap.contains(a)) fail(ErrorCode::BoundaryViolation, "ref#" + addr_str(a) + " is not contained");
  if (!(w.heap.cell(a).type_tag == tag)) {
    fail(ErrorCode::BoundaryViolation, "ref#" + addr_str(a) + " is used at the wrong type " + tag.to_string());
  }
  if (require_shareable && !is_shareable(w, a)) {
    fail(ErrorCode::BoundaryViolation, "ref#" + addr_str(a) + " is not shareable");
  }
  return a;
}

void require_shareable_payload(const World& w, const TypeTag& tag, const Value& v) {
  if (!conforms(v, tag)) fail(ErrorCode::BoundaryViolation, v.to_string() + " is not a " + tag.to_string());
  for (Addr a : embedded_addrs(tag, v)) {
    if (!w.heap.contains(a)) fail(ErrorCode::BoundaryViolation, "ref#" + addr_str(a) + " is not contained");
    if (!is_shareable(w, a)) fail(ErrorCode::BoundaryViolation, "ref#" + addr_str(a) + " is not shareable");
  }
}

// lr_alloc followed by label_shareable; any failure is the context's fault.
std::pair<Addr, World> dry_alloc(const World& w, const TypeTag& tag, const Value& init) {
  try {
    auto [a, w1] = lr_alloc(w, tag, Preorder::trivial(), init);
    return {a, label_shareable(w1, a)};
  } catch (const SecrefError& e) {
    fail(ErrorCode::BoundaryViolation, "context allocation rejected: " + std::string(e.what()));
  }
}

}  // namespace

std::pair<Addr, World> ctx_alloc(const World& w, const TypeTag& tag, const Value& init) {
  return dry_alloc(w, tag, init);
}

Value ctx_read(const World& w, const Value& ref) { return lr_read(w, boundary_addr(w, ref, true)); }

World ctx_write(const World& w, const Value& ref, const Value& v) {
  const bool check = active_mutant() != Mutant::CtxWriteNoShareCheck;
  const Addr a = boundary_addr(w, ref, check);
  require_shareable_payload(w, ref.as<Value::Ref>().tag, v);
  return lr_write(w, a, v);
}

ContextOps context_ops() {
  ContextOps ops;
  ops.alloc = [](const TypeTag& tag, const Value& init) {
    return observe([tag, init](const World& w) {
      (void)dry_alloc(w, tag, init);
      return bind(alloc_op(tag, Preorder::trivial(), init), [](const Value& r) {
        return then(relabel_op(r.as_addr(), Label::Shareable), ret(r));
      });
    });
  };
  ops.read = [](const Value& ref) {
    return observe([ref](const World& w) { return read_op(boundary_addr(w, ref, true)); });
  };
  ops.write = [](const Value& ref, const Value& v) {
    return observe([ref, v](const World& w) {
      const bool check = active_mutant() != Mutant::CtxWriteNoShareCheck;
      const Addr a = boundary_addr(w, ref, check);
      require_shareable_payload(w, ref.as<Value::Ref>().tag, v);
      return write_op(a, v);
    });
  };
  return ops;
}

SourceInterface make_interface(std::string name, InterfaceSpec spec, Psi psi) {
  ContractTree hocs = ContractTree::of(spec);
  return SourceInterface{std::move(name), std::move(spec), std::move(hocs), std::move(psi)};
}

namespace {

Program run_on_import(const SourceProgram& p, const Value& imported) {
  if (imported.is<Value::Inr>()) return ret(Value::integer(-1));
  return p.body(imported.as<Value::Inl>().payload);
}

}  // namespace

Program instantiate(const TargetContext& c, const MonitorPtr& mon) {
  auto builder = c.builder;
  return mon->context_call("instantiate " + c.name, [builder] { return builder(context_ops()); });
}

TargetProgram compile(const SourceProgram& p, const SourceInterface& i, const MonitorPtr& mon) {
  return [p, i, mon](const Value& target_ctx) {
    return run_on_import(p, import_value(i.spec, target_ctx, i.hocs, mon));
  };
}

Program back_translate(const TargetContext& c, const SourceInterface& i, const MonitorPtr& mon) {
  return bind(instantiate(c, mon),
              [i, mon](const Value& target_ctx) { return ret(import_value(i.spec, target_ctx, i.hocs, mon)); });
}

WholeProgram link_target(const TargetProgram& pt, const TargetContext& c, const MonitorPtr& mon) {
  return WholeProgram{[pt, c, mon] { return bind(instantiate(c, mon), pt); }};
}

WholeProgram link_source(const SourceProgram& p, Program source_ctx) {
  return WholeProgram{[p, source_ctx] {
    return bind(source_ctx, [p](const Value& imported) { return run_on_import(p, imported); });
  }};
}

WholeProgram link_dual(const DualProgram& p, const TargetContext& c, const MonitorPtr& mon) {
  return WholeProgram{[p, c, mon] {
    return bind(instantiate(c, mon), [p, c, mon](const Value& main) {
      return bind(p.make(), [p, c, mon, main](const Value& program) {
        if (!main.is<Value::Closure>()) fail(ErrorCode::InterfaceMismatch, c.name + " is not a function");
        Value exported = export_value(p.spec, program, ContractTree::of(p.spec), mon);
        auto fn = main.as<Value::Closure>().fn;
        return mon->context_call("main of " + c.name, [fn, exported] { return fn->invoke(exported); });
      });
    });
  }};
}

std::string BehaviorRecord::to_string() const {
  std::string out = outcome + "\n";
  for (const auto& line : dump) out += "  " + line + "\n";
  return out;
}

BehaviorRecord behavior_of(const RunResult& r) {
  BehaviorRecord b;
  if (r.ok()) {
    b.outcome = "ok " + r.result->to_string();
  } else {
    b.outcome = "error " + std::string(to_string(r.failure->code)) + ": " + r.failure->message;
  }
  for (const auto& [addr, c] : r.world.heap.cells()) {
    b.dump.push_back(addr_str(addr) + " " + c.type_tag.to_string() + " " + std::string(to_string(r.world.labels.at(addr))) +
                     " " + c.value.to_string());
  }
  return b;
}

Execution execute(const WholeProgram& wp, const RunConfig& cfg, World start) {
  Execution e;
  e.start = start;
  Program m = [&] {
    try {
      return wp.thunk();
    } catch (const SecrefError& err) {
      return fail_op(err.code(), err.detail());
    }
  }();
  e.run = run(m, std::move(start), WitnessSet{}, cfg);
  e.behavior = behavior_of(e.run);
  return e;
}

BehaviorRecord beh(const WholeProgram& wp, const RunConfig& cfg) { return execute(wp, cfg).behavior; }

bool beh_equal(const BehaviorRecord& a, const BehaviorRecord& b) { return a == b; }

}  // namespace secref
