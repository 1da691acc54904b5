#include "secref/errors.hpp"
#include "secref/target_lang.hpp"

namespace secref {

namespace {

struct Env {
  std::string name;
  Value value;
  std::shared_ptr<const Env> next;
};
using EnvPtr = std::shared_ptr<const Env>;

EnvPtr extend(EnvPtr env, std::string name, Value v) {
  return std::make_shared<const Env>(Env{std::move(name), std::move(v), std::move(env)});
}

const Value& lookup(const EnvPtr& env, const std::string& name) {
  for (const Env* p = env.get(); p != nullptr; p = p->next.get()) {
    if (p->name == name) return p->value;
  }
  fail(ErrorCode::TypeError, "Unbound: variable " + name + " at run time");
}

struct EvalContext {
  Typed typed;
  ContextOps ops;

  const TypeTag& tag_of(const Expr* e) const {
    auto it = typed.tags.find(e);
    if (it == typed.tags.end()) fail(ErrorCode::TypeError, "term was not typechecked");
    return it->second;
  }
};
using CxPtr = std::shared_ptr<const EvalContext>;

Program eval(const ExprPtr& e, const EnvPtr& env, const CxPtr& cx);

class LamClosure : public Callable {
 public:
  LamClosure(ExprPtr lam, EnvPtr env, CxPtr cx)
      : Callable("lam " + lam->name), lam_(std::move(lam)), env_(std::move(env)), cx_(std::move(cx)) {}

  Program invoke(const Value& arg) const override {
    return eval(lam_->kids[0], extend(env_, lam_->name, arg), cx_);
  }

 private:
  ExprPtr lam_;
  EnvPtr env_;
  CxPtr cx_;
};

class FixClosure : public Callable {
 public:
  FixClosure(ExprPtr fix, EnvPtr env, CxPtr cx)
      : Callable("fix " + fix->name), fix_(std::move(fix)), env_(std::move(env)), cx_(std::move(cx)) {}

  Program invoke(const Value& arg) const override {
    EnvPtr inner = extend(env_, fix_->name, Value::closure(shared_from_this()));
    return eval(fix_->kids[0], extend(inner, fix_->name2, arg), cx_);
  }

 private:
  ExprPtr fix_;
  EnvPtr env_;
  CxPtr cx_;
};

// Every application burns a step so recursion is bounded by fuel.
Program apply(const Value& f, const Value& arg) {
  auto fn = f.as<Value::Closure>().fn;
  return bind(tick(), [fn, arg](const Value&) { return fn->invoke(arg); });
}

Program binop(const std::string& op, const Value& a, const Value& b) {
  if (op == "=") return ret(Value::boolean(a == b));
  const std::int64_t x = a.as_int();
  const std::int64_t y = b.as_int();
  // Wrapping arithmetic: overflow is defined and deterministic.
  auto wrap = [](std::uint64_t v) { return Value::integer(static_cast<std::int64_t>(v)); };
  const auto ux = static_cast<std::uint64_t>(x);
  const auto uy = static_cast<std::uint64_t>(y);
  if (op == "+") return ret(wrap(ux + uy));
  if (op == "-") return ret(wrap(ux - uy));
  if (op == "*") return ret(wrap(ux * uy));
  // Truncating division; division by zero yields 0.
  if (op == "/") {
    if (y == 0 || (y == -1 && x == INT64_MIN)) return ret(Value::integer(y == 0 ? 0 : x));
    return ret(Value::integer(x / y));
  }
  if (op == "<") return ret(Value::boolean(x < y));
  return ret(Value::boolean(x <= y));
}

Program eval(const ExprPtr& e, const EnvPtr& env, const CxPtr& cx) {
  using K = Expr::Kind;
  const auto& k = e->kids;
  switch (e->kind) {
    case K::Var: return ret(lookup(env, e->name));
    case K::Unit: return ret(Value::unit());
    case K::Int: return ret(Value::integer(e->int_value));
    case K::Bool: return ret(Value::boolean(e->bool_value));
    case K::Lam: return ret(Value::closure(std::make_shared<LamClosure>(e, env, cx)));
    case K::Fix: return ret(Value::closure(std::make_shared<FixClosure>(e, env, cx)));
    case K::App:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& f) {
        return bind(eval(e->kids[1], env, cx), [f](const Value& a) { return apply(f, a); });
      });
    case K::Let:
      return bind(eval(k[0], env, cx),
                  [e, env, cx](const Value& v) { return eval(e->kids[1], extend(env, e->name, v), cx); });
    case K::BinOp:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& a) {
        return bind(eval(e->kids[1], env, cx), [e, a](const Value& b) { return binop(e->op, a, b); });
      });
    case K::If:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& c) {
        return eval(c.as_bool() ? e->kids[1] : e->kids[2], env, cx);
      });
    case K::Pair:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& a) {
        return bind(eval(e->kids[1], env, cx), [a](const Value& b) { return ret(Value::pair(a, b)); });
      });
    case K::Fst:
    case K::Snd:
      return bind(eval(k[0], env, cx), [e](const Value& p) {
        const auto& pr = p.as<Value::Pair>();
        return ret(e->kind == K::Fst ? pr.first : pr.second);
      });
    case K::Inl:
    case K::Inr:
      return bind(eval(k[0], env, cx),
                  [e](const Value& v) { return ret(e->kind == K::Inl ? Value::inl(v) : Value::inr(v)); });
    case K::Case:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& s) {
        if (s.is<Value::Inl>()) return eval(e->kids[1], extend(env, e->name, s.as<Value::Inl>().payload), cx);
        return eval(e->kids[2], extend(env, e->name2, s.as<Value::Inr>().payload), cx);
      });
    case K::Alloc:
      return bind(eval(k[0], env, cx), [e, cx](const Value& v) { return cx->ops.alloc(cx->tag_of(e.get()), v); });
    case K::Deref: return bind(eval(k[0], env, cx), [cx](const Value& r) { return cx->ops.read(r); });
    case K::Assign:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& r) {
        return bind(eval(e->kids[1], env, cx), [cx, r](const Value& v) { return cx->ops.write(r, v); });
      });
    case K::Nil: return ret(Value::ll_nil());
    case K::Cons:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& h) {
        return bind(eval(e->kids[1], env, cx),
                    [h](const Value& r) { return ret(Value::ll_cons(h, r.as_addr())); });
      });
    case K::CaseLL:
      return bind(eval(k[0], env, cx), [e, env, cx](const Value& l) {
        if (l.is<Value::LLNil>()) return eval(e->kids[1], env, cx);
        const auto& cons = l.as<Value::LLCons>();
        const Value tail = Value::ref(cons.tail, cx->tag_of(e.get()));
        return eval(e->kids[2], extend(extend(env, e->name, cons.head), e->name2, tail), cx);
      });
    case K::Seq: {
      Program p = eval(k.back(), env, cx);
      for (std::size_t i = k.size() - 1; i-- > 0;) {
        ExprPtr first = k[i];
        p = bind(eval(first, env, cx), [p](const Value&) { return p; });
      }
      return p;
    }
  }
  fail(ErrorCode::TypeError, "Unsupported expression form");
}

}  // namespace

Program evaluate(const ExprPtr& e, const Typed& typed, const ContextOps& ops) {
  auto cx = std::make_shared<const EvalContext>(EvalContext{typed, ops});
  return eval(e, nullptr, cx);
}

TargetContext elaborate(const ExprPtr& e, const SrcType& expected, std::string name) {
  Typed typed = typecheck(e);
  if (!(typed.type == expected)) {
    fail(ErrorCode::InterfaceMismatch,
         name + " has type " + typed.type.to_string() + ", expected " + expected.to_string());
  }
  return TargetContext{std::move(name), [e, typed](const ContextOps& ops) { return evaluate(e, typed, ops); }};
}

TargetContext elaborate(const ExprPtr& e, const InterfaceSpec& spec, std::string name) {
  return elaborate(e, context_type(spec), std::move(name));
}

}  // namespace secref
