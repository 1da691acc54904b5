#include <random>

#include "secref/errors.hpp"
#include "secref/target_lang.hpp"

namespace secref {

namespace {

using K = Expr::Kind;

std::shared_ptr<Expr> mk(K kind, std::vector<ExprPtr> kids = {}) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->kids = std::move(kids);
  return e;
}

ExprPtr var(const std::string& name) {
  auto e = mk(K::Var);
  e->name = name;
  return e;
}

ExprPtr int_lit(std::int64_t v) {
  auto e = mk(K::Int);
  e->int_value = v;
  return e;
}

ExprPtr bool_lit(bool v) {
  auto e = mk(K::Bool);
  e->bool_value = v;
  return e;
}

ExprPtr let_in(const std::string& name, ExprPtr bound, ExprPtr body) {
  auto e = mk(K::Let, {std::move(bound), std::move(body)});
  e->name = name;
  return e;
}

ExprPtr lam(const std::string& name, const SrcType& t, ExprPtr body) {
  auto e = mk(K::Lam, {std::move(body)});
  e->name = name;
  e->type = t;
  return e;
}

ExprPtr binop(const std::string& op, ExprPtr a, ExprPtr b) {
  auto e = mk(K::BinOp, {std::move(a), std::move(b)});
  e->op = op;
  return e;
}

ExprPtr inj(bool left, const SrcType& t, ExprPtr v) {
  auto e = mk(left ? K::Inl : K::Inr, {std::move(v)});
  e->type = t;
  return e;
}

ExprPtr nil(const SrcType& elem) {
  auto e = mk(K::Nil);
  e->type = elem;
  return e;
}

// Smallest closed term of each type.
ExprPtr minimal(const SrcType& t) {
  switch (t.kind()) {
    case SrcType::Kind::Unit: return mk(K::Unit);
    case SrcType::Kind::Int: return int_lit(0);
    case SrcType::Kind::Bool: return bool_lit(false);
    case SrcType::Kind::Pair: return mk(K::Pair, {minimal(t.left()), minimal(t.right())});
    case SrcType::Kind::Sum: return inj(true, t, minimal(t.left()));
    case SrcType::Kind::Ref: return mk(K::Alloc, {minimal(t.inner())});
    case SrcType::Kind::LList: return nil(t.inner());
    case SrcType::Kind::Arrow: return lam("unused", t.arg(), minimal(t.res()));
  }
  return mk(K::Unit);
}

int depth_of(const ExprPtr& e) {
  int d = 0;
  for (const auto& k : e->kids) d = std::max(d, depth_of(k));
  return d + 1;
}

struct Binding {
  std::string name;
  SrcType type;
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  ExprPtr top(const SrcType& t, int size) {
    // A context-owned cell able to hold the first reference argument: the
    // stash pattern of an adversarial library.
    if (t.kind() == SrcType::Kind::Arrow && t.arg().kind() == SrcType::Kind::Ref && coin(2)) {
      const std::string s = fresh("stash");
      ExprPtr init = mk(K::Alloc, {minimal(t.arg())});
      scope_.push_back({s, SrcType::ref(t.arg())});
      ExprPtr body = gen(t, size - 1);
      scope_.pop_back();
      return let_in(s, init, body);
    }
    return gen(t, size);
  }

 private:
  std::uint64_t pick(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
  bool coin(std::uint64_t n) { return pick(n) == 0; }
  std::string fresh(const std::string& base) { return base + std::to_string(counter_++); }

  std::vector<std::size_t> vars_where(const std::function<bool(const SrcType&)>& pred) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < scope_.size(); ++i) {
      if (pred(scope_[i].type)) out.push_back(i);
    }
    return out;
  }

  std::optional<Binding> some_var(const std::function<bool(const SrcType&)>& pred) {
    auto idx = vars_where(pred);
    if (idx.empty()) return std::nullopt;
    return scope_[idx[pick(idx.size())]];
  }

  ExprPtr with_binding(const std::string& name, const SrcType& t, ExprPtr bound, const SrcType& want, int d) {
    scope_.push_back({name, t});
    ExprPtr body = gen(want, d);
    scope_.pop_back();
    return let_in(name, std::move(bound), std::move(body));
  }

  ExprPtr gen(const SrcType& t, int d) {
    if (d <= 1) {
      if (auto v = some_var([&](const SrcType& s) { return s == t; }); v && coin(2)) return var(v->name);
      return leaf(t);
    }
    for (int attempt = 0; attempt < 8; ++attempt) {
      if (ExprPtr e = try_form(t, d)) return e;
    }
    return leaf(t);
  }

  ExprPtr leaf(const SrcType& t) {
    switch (t.kind()) {
      case SrcType::Kind::Int: return int_lit(static_cast<std::int64_t>(pick(7)));
      case SrcType::Kind::Bool: return bool_lit(coin(2));
      default: return minimal(t);
    }
  }

  // One randomly chosen production; nullptr when it does not apply here.
  ExprPtr try_form(const SrcType& t, int d) {
    const int sub = d - 1;
    switch (pick(12)) {
      case 0:
        if (auto v = some_var([&](const SrcType& s) { return s == t; })) return var(v->name);
        return nullptr;
      case 1: {
        // Allocate a fresh cell, possibly holding a reference already in scope.
        SrcType payload = SrcType::integer();
        ExprPtr init = leaf(payload);
        if (auto r = some_var([](const SrcType& s) { return s.kind() == SrcType::Kind::Ref; }); r && coin(2)) {
          payload = r->type;
          init = var(r->name);
        }
        return with_binding(fresh("cell"), SrcType::ref(payload), mk(K::Alloc, {init}), t, sub);
      }
      case 2: {
        auto r = some_var([](const SrcType& s) { return s.kind() == SrcType::Kind::Ref; });
        if (!r) return nullptr;
        return with_binding(fresh("val"), r->type.inner(), mk(K::Deref, {var(r->name)}), t, sub);
      }
      case 3: {
        auto r = some_var([](const SrcType& s) { return s.kind() == SrcType::Kind::Ref; });
        if (!r) return nullptr;
        ExprPtr w = mk(K::Assign, {var(r->name), gen(r->type.inner(), sub)});
        if (t.kind() == SrcType::Kind::Unit && coin(2)) return w;
        return mk(K::Seq, {w, gen(t, sub)});
      }
      case 4: {
        auto f = some_var([](const SrcType& s) { return s.kind() == SrcType::Kind::Arrow; });
        if (!f) return nullptr;
        ExprPtr call = mk(K::App, {var(f->name), gen(f->type.arg(), sub)});
        if (f->type.res() == t && coin(2)) return call;
        return with_binding(fresh("res"), f->type.res(), call, t, sub);
      }
      case 5: {
        auto s = some_var([](const SrcType& x) { return x.kind() == SrcType::Kind::Sum; });
        if (!s) return nullptr;
        auto e = mk(K::Case, {var(s->name)});
        e->name = fresh("l");
        e->name2 = fresh("r");
        scope_.push_back({e->name, s->type.left()});
        e->kids.push_back(gen(t, sub));
        scope_.pop_back();
        scope_.push_back({e->name2, s->type.right()});
        e->kids.push_back(gen(t, sub));
        scope_.pop_back();
        return e;
      }
      case 6: {
        auto l = some_var([](const SrcType& x) {
          return x.kind() == SrcType::Kind::Ref && x.inner().kind() == SrcType::Kind::LList;
        });
        if (!l) return nullptr;
        const SrcType lt = l->type.inner();
        auto e = mk(K::CaseLL, {mk(K::Deref, {var(l->name)}), gen(t, sub)});
        e->name = fresh("hd");
        e->name2 = fresh("tl");
        scope_.push_back({e->name, lt.inner()});
        scope_.push_back({e->name2, SrcType::ref(lt)});
        e->kids.push_back(gen(t, sub));
        scope_.pop_back();
        scope_.pop_back();
        return e;
      }
      case 7: {
        auto p = some_var([](const SrcType& x) { return x.kind() == SrcType::Kind::Pair; });
        if (!p) return nullptr;
        const bool first = coin(2);
        return with_binding(fresh("part"), first ? p->type.left() : p->type.right(),
                            mk(first ? K::Fst : K::Snd, {var(p->name)}), t, sub);
      }
      case 8:
        return mk(K::If, {gen(SrcType::boolean(), sub), gen(t, sub), gen(t, sub)});
      default: return typed_form(t, sub);
    }
  }

  ExprPtr typed_form(const SrcType& t, int sub) {
    switch (t.kind()) {
      case SrcType::Kind::Unit: return mk(K::Unit);
      case SrcType::Kind::Int: {
        if (auto r = some_var([](const SrcType& s) { return s == SrcType::ref(SrcType::integer()); }); r && coin(2)) {
          return mk(K::Deref, {var(r->name)});
        }
        static const char* ops[] = {"+", "-", "*"};
        return binop(ops[pick(3)], gen(t, sub), gen(t, sub));
      }
      case SrcType::Kind::Bool: {
        static const char* ops[] = {"<", "<=", "="};
        return binop(ops[pick(3)], gen(SrcType::integer(), sub), gen(SrcType::integer(), sub));
      }
      case SrcType::Kind::Pair: return mk(K::Pair, {gen(t.left(), sub), gen(t.right(), sub)});
      case SrcType::Kind::Sum: {
        const bool left = coin(2);
        return inj(left, t, gen(left ? t.left() : t.right(), sub));
      }
      case SrcType::Kind::Ref: {
        if (auto rr = some_var([&](const SrcType& s) { return s == SrcType::ref(t); }); rr && coin(2)) {
          return mk(K::Deref, {var(rr->name)});
        }
        return mk(K::Alloc, {gen(t.inner(), sub)});
      }
      case SrcType::Kind::LList: {
        if (coin(3)) return nil(t.inner());
        ExprPtr tail;
        if (auto r = some_var([&](const SrcType& s) { return s == SrcType::ref(t); })) {
          tail = var(r->name);
        } else {
          tail = mk(K::Alloc, {nil(t.inner())});
        }
        return mk(K::Cons, {gen(t.inner(), sub), tail});
      }
      case SrcType::Kind::Arrow: {
        const std::string x = fresh("arg");
        scope_.push_back({x, t.arg()});
        ExprPtr body = gen(t.res(), sub);
        // Keep the argument if a stash of the right type is in scope.
        if (auto s = some_var([&](const SrcType& st) { return st == SrcType::ref(t.arg()); }); s && coin(2)) {
          ExprPtr keep = mk(K::Assign, {var(s->name), var(x)});
          body = t.res().kind() == SrcType::Kind::Unit && coin(3) ? keep : mk(K::Seq, {keep, body});
        }
        scope_.pop_back();
        return lam(x, t.arg(), body);
      }
    }
    return leaf(t);
  }

  std::mt19937_64 rng_;
  std::vector<Binding> scope_;
  int counter_ = 0;
};

}  // namespace

ExprPtr gen_random_context(const SrcType& t, std::uint64_t seed, int size) {
  if (size < depth_of(minimal(t))) {
    fail(ErrorCode::GenerationExhausted,
         "size " + std::to_string(size) + " is too small for a term of type " + t.to_string());
  }
  return Generator(seed).top(t, size);
}

int minimal_size(const SrcType& t) { return depth_of(minimal(t)); }

ExprPtr gen_random_context(const InterfaceSpec& spec, std::uint64_t seed, int size) {
  return gen_random_context(context_type(spec), seed, size);
}

Shrunk shrink(const SrcType& t, std::uint64_t seed, int size, const std::function<bool(const ExprPtr&)>& still_fails) {
  const int lowest = depth_of(minimal(t));
  for (int s = lowest; s < size; ++s) {
    ExprPtr e = gen_random_context(t, seed, s);
    if (still_fails(e)) return {s, e};
  }
  return {size, gen_random_context(t, seed, size)};
}

}  // namespace secref
