#include "secref/contract.hpp"

#include "secref/errors.hpp"
#include "secref/mutation.hpp"

namespace secref {

std::string_view to_string(ErrCode code) {
  switch (code) {
    case ErrCode::PreViolation: return "PreViolation";
    case ErrCode::PostViolation: return "PostViolation";
    case ErrCode::RefinementViolation: return "RefinementViolation";
    case ErrCode::ImportFailure: return "ImportFailure";
  }
  return "?";
}

Value err_value(ErrCode code) { return Value::inr(Value::integer(static_cast<std::int64_t>(code))); }

std::optional<ErrCode> err_code_of(const Value& v) {
  if (!v.is<Value::Inr>()) return std::nullopt;
  const Value& p = v.as<Value::Inr>().payload;
  if (!p.is<Value::Int>()) return std::nullopt;
  const std::int64_t c = p.as_int();
  if (c < 1 || c > 4) return std::nullopt;
  return static_cast<ErrCode>(c);
}

// ---- InterfaceSpec ---------------------------------------------------------

InterfaceSpec InterfaceSpec::base(TypeTag t) {
  const auto k = t.kind();
  if (k != TypeTag::Kind::Unit && k != TypeTag::Kind::Int && k != TypeTag::Kind::Bool) {
    fail(ErrorCode::InterfaceMismatch, "base spec needs unit, int or bool, got " + t.to_string());
  }
  return InterfaceSpec(std::make_shared<const Node>(Node{Kind::Base, std::move(t), {}, {}, {}, {}}));
}

InterfaceSpec InterfaceSpec::pair(InterfaceSpec a, InterfaceSpec b) {
  return InterfaceSpec(std::make_shared<const Node>(Node{Kind::Pair, {}, {std::move(a), std::move(b)}, {}, {}, {}}));
}

InterfaceSpec InterfaceSpec::sum(InterfaceSpec a, InterfaceSpec b) {
  return InterfaceSpec(std::make_shared<const Node>(Node{Kind::Sum, {}, {std::move(a), std::move(b)}, {}, {}, {}}));
}

InterfaceSpec InterfaceSpec::ref(TypeTag payload) {
  return InterfaceSpec(std::make_shared<const Node>(Node{Kind::Ref, std::move(payload), {}, {}, {}, {}}));
}

InterfaceSpec InterfaceSpec::llist(TypeTag element) {
  return InterfaceSpec(std::make_shared<const Node>(Node{Kind::LList, std::move(element), {}, {}, {}, {}}));
}

InterfaceSpec InterfaceSpec::arrow(InterfaceSpec arg, InterfaceSpec res, std::optional<ExecPre> pre,
                                   std::optional<ExecPost> post) {
  return InterfaceSpec(std::make_shared<const Node>(
      Node{Kind::Arrow, {}, {std::move(arg), std::move(res)}, {}, std::move(pre), std::move(post)}));
}

InterfaceSpec InterfaceSpec::refined(Refinement r) const {
  if (kind() == Kind::Arrow) fail(ErrorCode::InterfaceMismatch, "refinements are not allowed on arrows");
  Node copy = *node_;
  copy.refinement = std::move(r);
  return InterfaceSpec(std::make_shared<const Node>(std::move(copy)));
}

TypeTag InterfaceSpec::ground_tag() const {
  switch (kind()) {
    case Kind::Base: return tag();
    case Kind::Pair: return TypeTag::pair(left().ground_tag(), right().ground_tag());
    case Kind::Sum: return TypeTag::sum(left().ground_tag(), right().ground_tag());
    case Kind::Ref: return TypeTag::ref(tag());
    case Kind::LList: return TypeTag::llist(tag());
    case Kind::Arrow: break;
  }
  fail(ErrorCode::InterfaceMismatch, "arrow " + to_string() + " has no ground type");
}

bool InterfaceSpec::is_first_order() const {
  switch (kind()) {
    case Kind::Pair:
    case Kind::Sum: return left().is_first_order() && right().is_first_order();
    case Kind::Arrow: return false;
    default: return true;
  }
}

std::string InterfaceSpec::to_string() const {
  std::string out;
  switch (kind()) {
    case Kind::Base: out = tag().to_string(); break;
    case Kind::Pair: out = "(* " + left().to_string() + " " + right().to_string() + ")"; break;
    case Kind::Sum: out = "(+ " + left().to_string() + " " + right().to_string() + ")"; break;
    case Kind::Ref: out = "(ref " + tag().to_string() + ")"; break;
    case Kind::LList: out = "(llist " + tag().to_string() + ")"; break;
    case Kind::Arrow:
      out = "(-> " + arg().to_string() + " " + res().to_string();
      if (pre()) out += " pre:" + pre()->name;
      if (post()) out += " post:" + post()->name;
      out += ")";
      break;
  }
  if (refinement()) out = "{" + out + " | " + refinement()->name + "}";
  return out;
}

bool import_can_fail(const InterfaceSpec& spec) {
  if (spec.refinement()) return true;
  switch (spec.kind()) {
    case InterfaceSpec::Kind::Pair:
    case InterfaceSpec::Kind::Sum: return import_can_fail(spec.left()) || import_can_fail(spec.right());
    default: return false;
  }
}

bool export_is_fallible(const InterfaceSpec& arrow) {
  return arrow.pre().has_value() || import_can_fail(arrow.arg()) || arrow.res().refinement().has_value();
}

// ---- ContractTree ----------------------------------------------------------

ContractTree ContractTree::of(const InterfaceSpec& spec) {
  ContractTree t;
  t.refinement_ = spec.refinement();
  switch (spec.kind()) {
    case InterfaceSpec::Kind::Arrow:
      t.pre_ = spec.pre();
      t.post_ = spec.post();
      [[fallthrough]];
    case InterfaceSpec::Kind::Pair:
    case InterfaceSpec::Kind::Sum:
      t.children_ = {of(spec.left()), of(spec.right())};
      break;
    default: break;
  }
  return t;
}

bool shape_matches(const InterfaceSpec& spec, const ContractTree& tree) {
  switch (spec.kind()) {
    case InterfaceSpec::Kind::Arrow:
    case InterfaceSpec::Kind::Pair:
    case InterfaceSpec::Kind::Sum:
      if (tree.children().size() != 2) return false;
      if (spec.kind() != InterfaceSpec::Kind::Arrow && (tree.pre() || tree.post())) return false;
      return shape_matches(spec.left(), tree.child(0)) && shape_matches(spec.right(), tree.child(1));
    default: return tree.children().empty() && !tree.pre() && !tree.post();
  }
}

// ---- Monitor ---------------------------------------------------------------

Program Monitor::context_call(std::string where, std::function<Program()> body) {
  ++stats_.context_calls;
  auto self = shared_from_this();
  return observe([self, where = std::move(where), body = std::move(body)](const World& w0) {
    return bind(body(), [self, where, w0](const Value& r) {
      return observe([self, where, w0, r](const World& w1) {
        if (!modif_only_shareable_and_encaps(w0, w1)) {
          self->relation_violations_.push_back(where + ": a private cell changed");
        }
        if (!same_labels(w0, w1)) self->relation_violations_.push_back(where + ": labels changed");
        return ret(r);
      });
    });
  });
}

Program Monitor::exported_call(std::string where, std::function<Program()> body) {
  ++stats_.exported_calls;
  auto self = shared_from_this();
  return observe([self, where = std::move(where), body = std::move(body)](const World& w0) {
    return bind(body(), [self, where, w0](const Value& r) {
      return observe([self, where, w0, r](const World& w1) {
        if (!modif_only_shareable_and_encaps(w0, w1)) {
          self->exported_violations_.push_back(where + ": a private cell changed");
        }
        return ret(r);
      });
    });
  });
}

void Monitor::compare_snapshot(const std::string& name, const World& before, const World& after) {
  if (!(before == after)) {
    ++stats_.purity_violations;
    errors_.push_back("contract " + name + " modified the world");
  }
}

CheckResult Monitor::run_check(const std::string& name, const World& w,
                               const std::function<CheckResult(const World&)>& check) {
  ++stats_.contract_checks;
  const World snapshot = w;
  CheckResult r = check(w);
  compare_snapshot(name, snapshot, w);
  if (r) {
    ++stats_.contract_failures;
    record_error(*r);
  }
  return r;
}

Value Monitor::run_select(const std::string& name, const World& w,
                          const std::function<Value(const World&)>& select) {
  ++stats_.contract_checks;
  const World snapshot = w;
  Value v = select(w);
  compare_snapshot(name, snapshot, w);
  return v;
}

// ---- import / export -------------------------------------------------------

namespace {

void expect_shape(bool ok, const InterfaceSpec& spec, const Value& v) {
  if (!ok) fail(ErrorCode::TypeMismatch, v.to_string() + " does not fit " + spec.to_string());
}

// Unverified function seen from verified code: every call answers Inl/Inr.
class ImportedArrow : public Callable {
 public:
  ImportedArrow(InterfaceSpec spec, ContractTree hocs, Value target, MonitorPtr mon)
      : Callable("imported " + spec.to_string()),
        spec_(std::move(spec)),
        hocs_(std::move(hocs)),
        target_(std::move(target)),
        mon_(std::move(mon)) {}

  Program invoke(const Value& arg) const override {
    auto self = std::static_pointer_cast<const ImportedArrow>(shared_from_this());
    return self->invoke_impl(self, arg);
  }

 private:
  Program invoke_impl(const std::shared_ptr<const ImportedArrow>& self, const Value& arg) const {
    const Value target_arg = export_value(spec_.arg(), arg, hocs_.child(0), mon_);
    auto fn = target_.as<Value::Closure>().fn;
    auto call = [self, fn, target_arg]() {
      return self->mon_->context_call(self->name(), [fn, target_arg] { return fn->invoke(target_arg); });
    };
    auto finish = [self](const Value& r) { return ret(import_value(self->spec_.res(), r, self->hocs_.child(1), self->mon_)); };
    const auto& post = hocs_.post();
    if (!post || active_mutant() == Mutant::ImportNoPost) return bind(call(), finish);
    return observe([self, post, arg, call, finish](const World& w0) {
      Value captured = self->mon_->run_select(post->name, w0, [&](const World& w) { return post->select(arg, w); });
      return bind(call(), [self, post, captured, finish](const Value& r) {
        return observe([self, post, captured, r, finish](const World& w1) {
          CheckResult bad =
              self->mon_->run_check(post->name, w1, [&](const World& w) { return post->verify(captured, r, w); });
          if (bad) return ret(err_value(bad->code));
          return finish(r);
        });
      });
    });
  }

 private:
  InterfaceSpec spec_;
  ContractTree hocs_;
  Value target_;
  MonitorPtr mon_;
};

// Verified function handed to unverified code.
class ExportedArrow : public Callable {
 public:
  ExportedArrow(InterfaceSpec spec, ContractTree hocs, Value source, MonitorPtr mon)
      : Callable("exported " + spec.to_string()),
        spec_(std::move(spec)),
        hocs_(std::move(hocs)),
        source_(std::move(source)),
        mon_(std::move(mon)),
        fallible_(export_is_fallible(spec_)) {}

  Program invoke(const Value& target_arg) const override {
    auto self = std::static_pointer_cast<const ExportedArrow>(shared_from_this());
    return self->invoke_impl(self, target_arg);
  }

 private:
  Program invoke_impl(const std::shared_ptr<const ExportedArrow>& self, const Value& target_arg) const {
    const Value imported = import_value(spec_.arg(), target_arg, hocs_.child(0), mon_);
    if (imported.is<Value::Inr>()) return ret(imported);
    const Value arg = imported.as<Value::Inl>().payload;
    auto fn = source_.as<Value::Closure>().fn;
    auto go = [self, fn, arg]() {
      return self->mon_->exported_call(self->name(), [self, fn, arg] {
        return bind(fn->invoke(arg), [self](const Value& r) {
          const auto& refinement = self->spec_.res().refinement();
          if (refinement && !refinement->check(r)) {
            self->mon_->record_error({ErrCode::RefinementViolation, refinement->name + " rejected " + r.to_string()});
            return ret(err_value(ErrCode::RefinementViolation));
          }
          Value out = export_value(self->spec_.res(), r, self->hocs_.child(1), self->mon_);
          return ret(self->fallible_ ? Value::inl(out) : out);
        });
      });
    };
    const auto& pre = hocs_.pre();
    if (!pre) return go();
    return observe([self, pre, arg, go](const World& w) {
      CheckResult bad = self->mon_->run_check(pre->name, w, [&](const World& w1) { return pre->check(arg, w1); });
      if (bad) return ret(err_value(bad->code));
      return go();
    });
  }

 private:
  InterfaceSpec spec_;
  ContractTree hocs_;
  Value source_;
  MonitorPtr mon_;
  bool fallible_;
};

bool refinement_fails(const InterfaceSpec& spec, const Value& v, const MonitorPtr& mon) {
  const auto& r = spec.refinement();
  if (!r || r->check(v)) return false;
  mon->record_error({ErrCode::RefinementViolation, r->name + " rejected " + v.to_string()});
  return true;
}

}  // namespace

Value import_value(const InterfaceSpec& spec, const Value& v, const ContractTree& hocs, const MonitorPtr& mon) {
  using K = InterfaceSpec::Kind;
  switch (spec.kind()) {
    case K::Base:
    case K::LList:
      expect_shape(conforms(v, spec.ground_tag()), spec, v);
      break;
    case K::Ref:
      expect_shape(v.is<Value::Ref>() && v.as<Value::Ref>().tag == spec.tag(), spec, v);
      break;
    case K::Pair: {
      expect_shape(v.is<Value::Pair>(), spec, v);
      const auto& p = v.as<Value::Pair>();
      Value a = import_value(spec.left(), p.first, hocs.child(0), mon);
      if (a.is<Value::Inr>()) return a;
      Value b = import_value(spec.right(), p.second, hocs.child(1), mon);
      if (b.is<Value::Inr>()) return b;
      Value out = Value::pair(a.as<Value::Inl>().payload, b.as<Value::Inl>().payload);
      if (refinement_fails(spec, out, mon)) return err_value(ErrCode::RefinementViolation);
      return Value::inl(out);
    }
    case K::Sum: {
      const bool left = v.is<Value::Inl>();
      expect_shape(left || v.is<Value::Inr>(), spec, v);
      const Value& payload = left ? v.as<Value::Inl>().payload : v.as<Value::Inr>().payload;
      Value x = import_value(left ? spec.left() : spec.right(), payload, hocs.child(left ? 0 : 1), mon);
      if (x.is<Value::Inr>()) return x;
      const Value& inner = x.as<Value::Inl>().payload;
      Value out = left ? Value::inl(inner) : Value::inr(inner);
      if (refinement_fails(spec, out, mon)) return err_value(ErrCode::RefinementViolation);
      return Value::inl(out);
    }
    case K::Arrow:
      expect_shape(v.is<Value::Closure>(), spec, v);
      return Value::inl(Value::closure(std::make_shared<ImportedArrow>(spec, hocs, v, mon)));
  }
  if (refinement_fails(spec, v, mon)) return err_value(ErrCode::RefinementViolation);
  return Value::inl(v);
}

Value export_value(const InterfaceSpec& spec, const Value& v, const ContractTree& hocs, const MonitorPtr& mon) {
  using K = InterfaceSpec::Kind;
  switch (spec.kind()) {
    case K::Pair: {
      expect_shape(v.is<Value::Pair>(), spec, v);
      const auto& p = v.as<Value::Pair>();
      return Value::pair(export_value(spec.left(), p.first, hocs.child(0), mon),
                         export_value(spec.right(), p.second, hocs.child(1), mon));
    }
    case K::Sum:
      if (v.is<Value::Inl>()) return Value::inl(export_value(spec.left(), v.as<Value::Inl>().payload, hocs.child(0), mon));
      expect_shape(v.is<Value::Inr>(), spec, v);
      return Value::inr(export_value(spec.right(), v.as<Value::Inr>().payload, hocs.child(1), mon));
    case K::Arrow:
      expect_shape(v.is<Value::Closure>(), spec, v);
      return Value::closure(std::make_shared<ExportedArrow>(spec, hocs, v, mon));
    case K::Ref:
      expect_shape(v.is<Value::Ref>() && v.as<Value::Ref>().tag == spec.tag(), spec, v);
      return v;
    default:
      expect_shape(conforms(v, spec.ground_tag()), spec, v);
      return v;
  }
}

bool preserves_refs_check(const InterfaceSpec& spec, const Value& v_in, const Value& v_out) {
  using K = InterfaceSpec::Kind;
  switch (spec.kind()) {
    case K::Arrow: return v_out.is<Value::Closure>();
    case K::Pair: {
      if (!v_in.is<Value::Pair>() || !v_out.is<Value::Pair>()) return false;
      const auto& a = v_in.as<Value::Pair>();
      const auto& b = v_out.as<Value::Pair>();
      return preserves_refs_check(spec.left(), a.first, b.first) &&
             preserves_refs_check(spec.right(), a.second, b.second);
    }
    case K::Sum:
      if (v_in.is<Value::Inl>() && v_out.is<Value::Inl>()) {
        return preserves_refs_check(spec.left(), v_in.as<Value::Inl>().payload, v_out.as<Value::Inl>().payload);
      }
      if (v_in.is<Value::Inr>() && v_out.is<Value::Inr>()) {
        return preserves_refs_check(spec.right(), v_in.as<Value::Inr>().payload, v_out.as<Value::Inr>().payload);
      }
      return false;
    default: {
      const TypeTag t = spec.ground_tag();
      if (!conforms(v_in, t) || !conforms(v_out, t)) return false;
      const AddrSet out = embedded_addrs(t, v_out);
      const AddrSet in = embedded_addrs(t, v_in);
      return out == in;
    }
  }
}

}  // namespace secref
