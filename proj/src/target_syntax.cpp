#include <cctype>
#include <charconv>
#include <set>

#include "secref/errors.hpp"
#include "secref/target_lang.hpp"

namespace secref {

// ---- SrcType ---------------------------------------------------------------

SrcType SrcType::make(Kind kind, std::vector<SrcType> children) {
  return SrcType(std::make_shared<const Node>(Node{kind, std::move(children)}));
}

SrcType SrcType::unit() { return make(Kind::Unit); }
SrcType SrcType::integer() { return make(Kind::Int); }
SrcType SrcType::boolean() { return make(Kind::Bool); }
SrcType SrcType::pair(SrcType a, SrcType b) { return make(Kind::Pair, {std::move(a), std::move(b)}); }
SrcType SrcType::sum(SrcType a, SrcType b) { return make(Kind::Sum, {std::move(a), std::move(b)}); }
SrcType SrcType::ref(SrcType payload) { return make(Kind::Ref, {std::move(payload)}); }
SrcType SrcType::llist(SrcType element) { return make(Kind::LList, {std::move(element)}); }
SrcType SrcType::arrow(SrcType arg, SrcType res) { return make(Kind::Arrow, {std::move(arg), std::move(res)}); }

SrcType SrcType::of_tag(const TypeTag& t) {
  switch (t.kind()) {
    case TypeTag::Kind::Unit: return unit();
    case TypeTag::Kind::Int: return integer();
    case TypeTag::Kind::Bool: return boolean();
    case TypeTag::Kind::Sum: return sum(of_tag(t.left()), of_tag(t.right()));
    case TypeTag::Kind::Pair: return pair(of_tag(t.left()), of_tag(t.right()));
    case TypeTag::Kind::Ref: return ref(of_tag(t.inner()));
    case TypeTag::Kind::LList: return llist(of_tag(t.inner()));
    case TypeTag::Kind::Seq: break;
  }
  fail(ErrorCode::TypeError, "Unsupported: " + t.to_string() + " has no source type");
}

bool SrcType::is_ground() const {
  switch (kind()) {
    case Kind::Arrow: return false;
    case Kind::Pair:
    case Kind::Sum: return left().is_ground() && right().is_ground();
    case Kind::Ref:
    case Kind::LList: return inner().is_ground();
    default: return true;
  }
}

TypeTag SrcType::to_tag() const {
  switch (kind()) {
    case Kind::Unit: return TypeTag::unit();
    case Kind::Int: return TypeTag::integer();
    case Kind::Bool: return TypeTag::boolean();
    case Kind::Pair: return TypeTag::pair(left().to_tag(), right().to_tag());
    case Kind::Sum: return TypeTag::sum(left().to_tag(), right().to_tag());
    case Kind::Ref: return TypeTag::ref(inner().to_tag());
    case Kind::LList: return TypeTag::llist(inner().to_tag());
    case Kind::Arrow: break;
  }
  fail(ErrorCode::TypeError, "FunctionInStore: " + to_string() + " cannot be stored");
}

std::string SrcType::to_string() const {
  switch (kind()) {
    case Kind::Unit: return "unit";
    case Kind::Int: return "int";
    case Kind::Bool: return "bool";
    case Kind::Pair: return "(* " + left().to_string() + " " + right().to_string() + ")";
    case Kind::Sum: return "(+ " + left().to_string() + " " + right().to_string() + ")";
    case Kind::Ref: return "(ref " + inner().to_string() + ")";
    case Kind::LList: return "(llist " + inner().to_string() + ")";
    case Kind::Arrow: return "(-> " + arg().to_string() + " " + res().to_string() + ")";
  }
  return "?";
}

bool SrcType::operator==(const SrcType& other) const {
  if (node_ == other.node_) return true;
  return kind() == other.kind() && node_->children == other.node_->children;
}

SrcType context_type(const InterfaceSpec& spec) {
  using K = InterfaceSpec::Kind;
  switch (spec.kind()) {
    case K::Base: return SrcType::of_tag(spec.tag());
    case K::Ref: return SrcType::ref(SrcType::of_tag(spec.tag()));
    case K::LList: return SrcType::llist(SrcType::of_tag(spec.tag()));
    case K::Pair: return SrcType::pair(context_type(spec.left()), context_type(spec.right()));
    case K::Sum: return SrcType::sum(context_type(spec.left()), context_type(spec.right()));
    case K::Arrow: return SrcType::arrow(exported_type(spec.arg()), context_type(spec.res()));
  }
  return SrcType::unit();
}

SrcType exported_type(const InterfaceSpec& spec) {
  using K = InterfaceSpec::Kind;
  switch (spec.kind()) {
    case K::Pair: return SrcType::pair(exported_type(spec.left()), exported_type(spec.right()));
    case K::Sum: return SrcType::sum(exported_type(spec.left()), exported_type(spec.right()));
    case K::Arrow: {
      SrcType res = exported_type(spec.res());
      if (export_is_fallible(spec)) res = SrcType::sum(res, SrcType::integer());
      return SrcType::arrow(context_type(spec.arg()), res);
    }
    default: return context_type(spec);
  }
}

// ---- s-expressions ---------------------------------------------------------

namespace {

struct Sexp {
  bool is_atom = false;
  std::string atom;
  std::vector<Sexp> items;
  int line = 0;
  int col = 0;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  Sexp read_top() {
    skip_space();
    if (pos_ >= text_.size()) error("empty input");
    Sexp s = read();
    skip_space();
    if (pos_ < text_.size()) error("trailing input after the expression");
    return s;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::ParseError, std::to_string(line_) + ":" + std::to_string(col_) + ": " + msg);
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of input");
    Sexp s;
    s.line = line_;
    s.col = col_;
    const char c = text_[pos_];
    if (c == ')') error("unexpected ')'");
    if (c == '(') {
      advance();
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) {
          fail(ErrorCode::ParseError,
               std::to_string(s.line) + ":" + std::to_string(s.col) + ": unclosed '('");
        }
        if (text_[pos_] == ')') {
          advance();
          return s;
        }
        s.items.push_back(read());
      }
    }
    s.is_atom = true;
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      s.atom.push_back(d);
      advance();
    }
    return s;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

[[noreturn]] void syntax_error(const Sexp& s, const std::string& msg) {
  fail(ErrorCode::ParseError, std::to_string(s.line) + ":" + std::to_string(s.col) + ": " + msg);
}

const std::set<std::string> kKeywords = {"lam", "let", "if", "pair", "fst", "snd", "inl", "inr", "case", "alloc",
                                         "!", ":=", "nil", "cons", "casell", "fix", "seq", "+", "-", "*", "/", "=",
                                         "<", "<="};

std::optional<std::int64_t> as_integer(const std::string& a) {
  std::int64_t v = 0;
  const char* first = a.data();
  const char* last = a.data() + a.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

bool is_identifier(const std::string& a) {
  if (a.empty() || kKeywords.count(a) != 0) return false;
  if (!std::isalpha(static_cast<unsigned char>(a[0])) && a[0] != '_') return false;
  for (char c : a) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '\'' && c != '-') return false;
  }
  return true;
}

SrcType to_type(const Sexp& s) {
  if (s.is_atom) {
    if (s.atom == "unit") return SrcType::unit();
    if (s.atom == "int") return SrcType::integer();
    if (s.atom == "bool") return SrcType::boolean();
    syntax_error(s, "unknown type '" + s.atom + "'");
  }
  if (s.items.empty() || !s.items[0].is_atom) syntax_error(s, "malformed type");
  const std::string& head = s.items[0].atom;
  const std::size_t n = s.items.size();
  if ((head == "ref" || head == "llist") && n == 2) {
    SrcType t = to_type(s.items[1]);
    return head == "ref" ? SrcType::ref(t) : SrcType::llist(t);
  }
  if ((head == "*" || head == "+") && n == 3) {
    SrcType a = to_type(s.items[1]);
    SrcType b = to_type(s.items[2]);
    return head == "*" ? SrcType::pair(a, b) : SrcType::sum(a, b);
  }
  if (head == "->" && n >= 3) {
    SrcType t = to_type(s.items[n - 1]);
    for (std::size_t i = n - 1; i-- > 1;) t = SrcType::arrow(to_type(s.items[i]), t);
    return t;
  }
  syntax_error(s, "malformed type '" + head + "'");
}

std::shared_ptr<Expr> node(Expr::Kind k, const Sexp& s) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->line = s.line;
  e->col = s.col;
  return e;
}

std::string binder(const Sexp& s) {
  if (!s.is_atom || !is_identifier(s.atom)) syntax_error(s, "expected a variable name");
  return s.atom;
}

ExprPtr to_expr(const Sexp& s);

void expect_arity(const Sexp& s, std::size_t n, const std::string& form) {
  if (s.items.size() != n) {
    syntax_error(s, "'" + form + "' takes " + std::to_string(n - 1) + " operands");
  }
}

ExprPtr to_expr(const Sexp& s) {
  using K = Expr::Kind;
  if (s.is_atom) {
    if (s.atom == "#t" || s.atom == "#f") {
      auto e = node(K::Bool, s);
      e->bool_value = s.atom == "#t";
      return e;
    }
    if (auto v = as_integer(s.atom)) {
      auto e = node(K::Int, s);
      e->int_value = *v;
      return e;
    }
    auto e = node(K::Var, s);
    e->name = binder(s);
    return e;
  }
  if (s.items.empty()) return node(K::Unit, s);
  const Sexp& h = s.items[0];
  const std::string head = h.is_atom ? h.atom : "";
  if (head == "lam") {
    expect_arity(s, 3, head);
    const Sexp& b = s.items[1];
    if (b.is_atom || b.items.size() != 2) syntax_error(b, "expected (name type)");
    auto e = node(K::Lam, s);
    e->name = binder(b.items[0]);
    e->type = to_type(b.items[1]);
    e->kids = {to_expr(s.items[2])};
    return e;
  }
  if (head == "let") {
    expect_arity(s, 3, head);
    const Sexp& b = s.items[1];
    if (b.is_atom || b.items.size() != 2) syntax_error(b, "expected (name expr)");
    auto e = node(K::Let, s);
    e->name = binder(b.items[0]);
    e->kids = {to_expr(b.items[1]), to_expr(s.items[2])};
    return e;
  }
  if (head == "fix") {
    // (fix f (x T1) T2 body)
    expect_arity(s, 5, head);
    const Sexp& b = s.items[2];
    if (b.is_atom || b.items.size() != 2) syntax_error(b, "expected (name type)");
    auto e = node(K::Fix, s);
    e->name = binder(s.items[1]);
    e->name2 = binder(b.items[0]);
    e->type = to_type(b.items[1]);
    e->type2 = to_type(s.items[3]);
    e->kids = {to_expr(s.items[4])};
    return e;
  }
  if (head == "case") {
    // (case e (x e1) (y e2))
    expect_arity(s, 4, head);
    const Sexp& l = s.items[2];
    const Sexp& r = s.items[3];
    if (l.is_atom || l.items.size() != 2 || r.is_atom || r.items.size() != 2) {
      syntax_error(s, "case branches are (name expr)");
    }
    auto e = node(K::Case, s);
    e->name = binder(l.items[0]);
    e->name2 = binder(r.items[0]);
    e->kids = {to_expr(s.items[1]), to_expr(l.items[1]), to_expr(r.items[1])};
    return e;
  }
  if (head == "casell") {
    // (casell e e_nil (x tl e_cons))
    expect_arity(s, 4, head);
    const Sexp& c = s.items[3];
    if (c.is_atom || c.items.size() != 3) syntax_error(c, "expected (head tail expr)");
    auto e = node(K::CaseLL, s);
    e->name = binder(c.items[0]);
    e->name2 = binder(c.items[1]);
    e->kids = {to_expr(s.items[1]), to_expr(s.items[2]), to_expr(c.items[2])};
    return e;
  }
  if (head == "inl" || head == "inr") {
    expect_arity(s, 3, head);
    auto e = node(head == "inl" ? K::Inl : K::Inr, s);
    e->type = to_type(s.items[1]);
    e->kids = {to_expr(s.items[2])};
    return e;
  }
  if (head == "nil") {
    expect_arity(s, 2, head);
    auto e = node(K::Nil, s);
    e->type = to_type(s.items[1]);
    return e;
  }
  static const std::map<std::string, std::pair<K, std::size_t>> fixed = {
      {"if", {K::If, 4}},     {"pair", {K::Pair, 3}},   {"fst", {K::Fst, 2}},  {"snd", {K::Snd, 2}},
      {"alloc", {K::Alloc, 2}}, {"!", {K::Deref, 2}}, {":=", {K::Assign, 3}}, {"cons", {K::Cons, 3}},
  };
  if (auto it = fixed.find(head); it != fixed.end()) {
    expect_arity(s, it->second.second, head);
    auto e = node(it->second.first, s);
    for (std::size_t i = 1; i < s.items.size(); ++i) e->kids.push_back(to_expr(s.items[i]));
    return e;
  }
  if (head == "+" || head == "-" || head == "*" || head == "/" || head == "=" || head == "<" || head == "<=") {
    expect_arity(s, 3, head);
    auto e = node(K::BinOp, s);
    e->op = head;
    e->kids = {to_expr(s.items[1]), to_expr(s.items[2])};
    return e;
  }
  if (head == "seq") {
    if (s.items.size() < 2) syntax_error(s, "'seq' needs at least one expression");
    auto e = node(K::Seq, s);
    for (std::size_t i = 1; i < s.items.size(); ++i) e->kids.push_back(to_expr(s.items[i]));
    return e;
  }
  if (s.items.size() < 2) syntax_error(s, "application needs an argument");
  ExprPtr f = to_expr(s.items[0]);
  for (std::size_t i = 1; i < s.items.size(); ++i) {
    auto e = node(K::App, s);
    e->kids = {f, to_expr(s.items[i])};
    f = e;
  }
  return f;
}

void print_into(const ExprPtr& e, std::string& out) {
  using K = Expr::Kind;
  auto kid = [&](std::size_t i) {
    out += ' ';
    print_into(e->kids[i], out);
  };
  switch (e->kind) {
    case K::Var: out += e->name; return;
    case K::Unit: out += "()"; return;
    case K::Int: out += std::to_string(e->int_value); return;
    case K::Bool: out += e->bool_value ? "#t" : "#f"; return;
    case K::Lam:
      out += "(lam (" + e->name + " " + e->type->to_string() + ")";
      kid(0);
      break;
    case K::App:
      out += "(";
      print_into(e->kids[0], out);
      kid(1);
      break;
    case K::Let:
      out += "(let (" + e->name;
      kid(0);
      out += ")";
      kid(1);
      break;
    case K::BinOp:
      out += "(" + e->op;
      kid(0);
      kid(1);
      break;
    case K::If: out += "(if"; kid(0); kid(1); kid(2); break;
    case K::Pair: out += "(pair"; kid(0); kid(1); break;
    case K::Fst: out += "(fst"; kid(0); break;
    case K::Snd: out += "(snd"; kid(0); break;
    case K::Inl:
    case K::Inr:
      out += std::string(e->kind == K::Inl ? "(inl " : "(inr ") + e->type->to_string();
      kid(0);
      break;
    case K::Case:
      out += "(case";
      kid(0);
      out += " (" + e->name;
      kid(1);
      out += ") (" + e->name2;
      kid(2);
      out += ")";
      break;
    case K::Alloc: out += "(alloc"; kid(0); break;
    case K::Deref: out += "(!"; kid(0); break;
    case K::Assign: out += "(:="; kid(0); kid(1); break;
    case K::Nil: out += "(nil " + e->type->to_string(); break;
    case K::Cons: out += "(cons"; kid(0); kid(1); break;
    case K::CaseLL:
      out += "(casell";
      kid(0);
      kid(1);
      out += " (" + e->name + " " + e->name2;
      kid(2);
      out += ")";
      break;
    case K::Fix:
      out += "(fix " + e->name + " (" + e->name2 + " " + e->type->to_string() + ") " + e->type2->to_string();
      kid(0);
      break;
    case K::Seq:
      out += "(seq";
      for (std::size_t i = 0; i < e->kids.size(); ++i) kid(i);
      break;
  }
  out += ")";
}

}  // namespace

std::size_t expr_size(const ExprPtr& e) {
  std::size_t n = 1;
  for (const auto& k : e->kids) n += expr_size(k);
  return n;
}

ExprPtr parse(const std::string& text) { return to_expr(Reader(text).read_top()); }

SrcType parse_type(const std::string& text) { return to_type(Reader(text).read_top()); }

std::string print(const ExprPtr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

// ---- typechecking ----------------------------------------------------------

namespace {

struct TypeEnv {
  std::string name;
  SrcType type;
  std::shared_ptr<const TypeEnv> next;
};
using TypeEnvPtr = std::shared_ptr<const TypeEnv>;

TypeEnvPtr extend(TypeEnvPtr env, std::string name, SrcType t) {
  return std::make_shared<const TypeEnv>(TypeEnv{std::move(name), std::move(t), std::move(env)});
}

class Checker {
 public:
  std::map<const Expr*, TypeTag> tags;

  SrcType check(const ExprPtr& e, const TypeEnvPtr& env) {
    using K = Expr::Kind;
    switch (e->kind) {
      case K::Var:
        for (const TypeEnv* p = env.get(); p != nullptr; p = p->next.get()) {
          if (p->name == e->name) return p->type;
        }
        error(e, "Unbound", "variable " + e->name);
      case K::Unit: return SrcType::unit();
      case K::Int: return SrcType::integer();
      case K::Bool: return SrcType::boolean();
      case K::Lam:
        return SrcType::arrow(*e->type, check(e->kids[0], extend(env, e->name, *e->type)));
      case K::Fix: {
        const SrcType ft = SrcType::arrow(*e->type, *e->type2);
        const SrcType body = check(e->kids[0], extend(extend(env, e->name, ft), e->name2, *e->type));
        expect(e, *e->type2, body);
        return ft;
      }
      case K::App: {
        const SrcType f = check(e->kids[0], env);
        if (f.kind() != SrcType::Kind::Arrow) error(e, "NotAFunction", f.to_string() + " is applied");
        expect(e->kids[1], f.arg(), check(e->kids[1], env));
        return f.res();
      }
      case K::Let: return check(e->kids[1], extend(env, e->name, check(e->kids[0], env)));
      case K::BinOp: {
        const SrcType a = check(e->kids[0], env);
        const SrcType b = check(e->kids[1], env);
        if (e->op == "=" && a.kind() == SrcType::Kind::Bool) {
          expect(e->kids[1], a, b);
          return SrcType::boolean();
        }
        expect(e->kids[0], SrcType::integer(), a);
        expect(e->kids[1], SrcType::integer(), b);
        const bool cmp = e->op == "=" || e->op == "<" || e->op == "<=";
        return cmp ? SrcType::boolean() : SrcType::integer();
      }
      case K::If: {
        expect(e->kids[0], SrcType::boolean(), check(e->kids[0], env));
        const SrcType t = check(e->kids[1], env);
        expect(e->kids[2], t, check(e->kids[2], env));
        return t;
      }
      case K::Pair: return SrcType::pair(check(e->kids[0], env), check(e->kids[1], env));
      case K::Fst:
      case K::Snd: {
        const SrcType t = check(e->kids[0], env);
        if (t.kind() != SrcType::Kind::Pair) error(e, "NotAPair", t.to_string());
        return e->kind == K::Fst ? t.left() : t.right();
      }
      case K::Inl:
      case K::Inr: {
        const SrcType& t = *e->type;
        if (t.kind() != SrcType::Kind::Sum) error(e, "NotASum", t.to_string() + " annotates an injection");
        expect(e->kids[0], e->kind == K::Inl ? t.left() : t.right(), check(e->kids[0], env));
        return t;
      }
      case K::Case: {
        const SrcType t = check(e->kids[0], env);
        if (t.kind() != SrcType::Kind::Sum) error(e, "NotASum", t.to_string() + " is scrutinized");
        const SrcType l = check(e->kids[1], extend(env, e->name, t.left()));
        expect(e->kids[2], l, check(e->kids[2], extend(env, e->name2, t.right())));
        return l;
      }
      case K::Alloc: {
        const SrcType t = check(e->kids[0], env);
        if (!t.is_ground()) error(e, "FunctionInStore", t.to_string() + " cannot be stored");
        tags.insert_or_assign(e.get(), t.to_tag());
        return SrcType::ref(t);
      }
      case K::Deref: {
        const SrcType t = check(e->kids[0], env);
        if (t.kind() != SrcType::Kind::Ref) error(e, "NotARef", t.to_string() + " is dereferenced");
        return t.inner();
      }
      case K::Assign: {
        const SrcType r = check(e->kids[0], env);
        if (r.kind() != SrcType::Kind::Ref) error(e, "NotARef", r.to_string() + " is assigned to");
        expect(e->kids[1], r.inner(), check(e->kids[1], env));
        return SrcType::unit();
      }
      case K::Nil:
        if (!e->type->is_ground()) error(e, "FunctionInStore", e->type->to_string() + " list element");
        return SrcType::llist(*e->type);
      case K::Cons: {
        const SrcType h = check(e->kids[0], env);
        if (!h.is_ground()) error(e, "FunctionInStore", h.to_string() + " list element");
        expect(e->kids[1], SrcType::ref(SrcType::llist(h)), check(e->kids[1], env));
        return SrcType::llist(h);
      }
      case K::CaseLL: {
        const SrcType t = check(e->kids[0], env);
        if (t.kind() != SrcType::Kind::LList) error(e, "NotAList", t.to_string() + " is scrutinized");
        tags.insert_or_assign(e.get(), t.to_tag());
        const SrcType n = check(e->kids[1], env);
        const TypeEnvPtr inner = extend(extend(env, e->name, t.inner()), e->name2, SrcType::ref(t));
        expect(e->kids[2], n, check(e->kids[2], inner));
        return n;
      }
      case K::Seq: {
        SrcType t = SrcType::unit();
        for (std::size_t i = 0; i < e->kids.size(); ++i) {
          t = check(e->kids[i], env);
          if (i + 1 < e->kids.size()) expect(e->kids[i], SrcType::unit(), t);
        }
        return t;
      }
    }
    error(e, "Unsupported", "expression form");
  }

 private:
  [[noreturn]] static void error(const ExprPtr& e, const std::string& key, const std::string& msg) {
    fail(ErrorCode::TypeError,
         key + " at " + std::to_string(e->line) + ":" + std::to_string(e->col) + ": " + msg);
  }

  static void expect(const ExprPtr& e, const SrcType& want, const SrcType& got) {
    if (!(want == got)) error(e, "Mismatch", "expected " + want.to_string() + ", got " + got.to_string());
  }
};

}  // namespace

Typed typecheck(const ExprPtr& e) {
  Checker c;
  SrcType t = c.check(e, nullptr);
  return Typed{std::move(t), std::move(c.tags)};
}

}  // namespace secref
