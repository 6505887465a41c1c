#include "omqrw/syntax.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "lexer.hpp"

namespace omqrw {

Error::Error(ErrorKind kind, const std::string& msg, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + msg
                                  : msg),
      kind_(kind),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------- roles

Role Role::named(std::string name, bool inverse) { return Role{std::move(name), inverse, false}; }

Role Role::top() { return Role{"u", false, true}; }

Role Role::inv() const {
  if (universal) return *this;
  return Role{name, !inverse, false};
}

std::string Role::text() const {
  if (universal) return "u";
  return inverse ? name + "-" : name;
}

// ---------------------------------------------------------------- concepts

struct Concept::Node {
  Kind kind;
  std::string name;
  Role role;
  std::vector<Concept> kids;
  std::string text;
};

Concept::Concept() : Concept(top()) {}

Concept::Concept(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

namespace {

std::string build_text(Concept::Kind k, const std::string& name, const Role& role,
                       const std::vector<Concept>& kids) {
  switch (k) {
    case Concept::Kind::Top: return "top";
    case Concept::Kind::Bottom: return "bot";
    case Concept::Kind::Name: return name;
    case Concept::Kind::Not: return "not " + kids[0].text();
    case Concept::Kind::And: return "(" + kids[0].text() + " and " + kids[1].text() + ")";
    case Concept::Kind::Or: return "(" + kids[0].text() + " or " + kids[1].text() + ")";
    case Concept::Kind::Exists: return "exists " + role.text() + ". " + kids[0].text();
    case Concept::Kind::Forall: return "forall " + role.text() + ". " + kids[0].text();
  }
  return {};
}

}  // namespace

struct ConceptFactory {
  static Concept make(Concept::Kind k, std::string name, Role role, std::vector<Concept> kids) {
    if ((k == Concept::Kind::And || k == Concept::Kind::Or) && kids[1].text() < kids[0].text())
      std::swap(kids[0], kids[1]);
    auto n = std::make_shared<Concept::Node>();
    n->kind = k;
    n->name = std::move(name);
    n->role = std::move(role);
    n->kids = std::move(kids);
    n->text = build_text(n->kind, n->name, n->role, n->kids);
    return Concept(std::shared_ptr<const Concept::Node>(std::move(n)));
  }
};

Concept Concept::top() {
  static const Concept t = ConceptFactory::make(Kind::Top, "", Role{}, {});
  return t;
}

Concept Concept::bottom() {
  static const Concept b = ConceptFactory::make(Kind::Bottom, "", Role{}, {});
  return b;
}

Concept Concept::atom(std::string name) { return ConceptFactory::make(Kind::Name, std::move(name), Role{}, {}); }

Concept Concept::negation(Concept c) { return ConceptFactory::make(Kind::Not, "", Role{}, {std::move(c)}); }

Concept Concept::conj(Concept a, Concept b) {
  return ConceptFactory::make(Kind::And, "", Role{}, {std::move(a), std::move(b)});
}

Concept Concept::disj(Concept a, Concept b) {
  return ConceptFactory::make(Kind::Or, "", Role{}, {std::move(a), std::move(b)});
}

Concept Concept::exists(Role r, Concept c) { return ConceptFactory::make(Kind::Exists, "", std::move(r), {std::move(c)}); }

Concept Concept::forall(Role r, Concept c) { return ConceptFactory::make(Kind::Forall, "", std::move(r), {std::move(c)}); }

Concept Concept::implies(Concept a, Concept b) { return disj(negation(std::move(a)), std::move(b)); }

namespace {

Concept fold_sorted(std::vector<Concept> cs, bool conj) {
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  if (cs.empty()) return conj ? Concept::top() : Concept::bottom();
  Concept acc = cs.back();
  for (std::size_t i = cs.size() - 1; i-- > 0;)
    acc = conj ? Concept::conj(cs[i], acc) : Concept::disj(cs[i], acc);
  return acc;
}

}  // namespace

Concept Concept::conj_all(std::vector<Concept> cs) { return fold_sorted(std::move(cs), true); }

Concept Concept::disj_all(std::vector<Concept> cs) { return fold_sorted(std::move(cs), false); }

Concept::Kind Concept::kind() const { return node_->kind; }
const std::string& Concept::name() const { return node_->name; }
const Role& Concept::role() const { return node_->role; }
const Concept& Concept::child(int i) const { return node_->kids.at(static_cast<std::size_t>(i)); }
int Concept::arity() const { return static_cast<int>(node_->kids.size()); }
const std::string& Concept::text() const { return node_->text; }

bool operator==(const Concept& a, const Concept& b) {
  return a.node_ == b.node_ || a.node_->text == b.node_->text;
}

bool operator<(const Concept& a, const Concept& b) { return a.node_->text < b.node_->text; }

namespace {

void collect_flat(const Concept& c, Concept::Kind k, std::vector<Concept>& out) {
  if (c.kind() == k) {
    collect_flat(c.child(0), k, out);
    collect_flat(c.child(1), k, out);
  } else {
    out.push_back(c);
  }
}

}  // namespace

Concept canonical(const Concept& c) {
  using K = Concept::Kind;
  switch (c.kind()) {
    case K::Top:
    case K::Bottom:
    case K::Name: return c;
    case K::Not: {
      Concept inner = canonical(c.child());
      if (inner.kind() == K::Not) return inner.child();
      if (inner.is_top()) return Concept::bottom();
      if (inner.is_bottom()) return Concept::top();
      return Concept::negation(inner);
    }
    case K::And:
    case K::Or: {
      bool conj = c.kind() == K::And;
      std::vector<Concept> flat;
      collect_flat(c, c.kind(), flat);
      std::vector<Concept> ops;
      for (const Concept& f : flat) {
        Concept g = canonical(f);
        if (g.kind() == c.kind()) {
          collect_flat(g, c.kind(), ops);
          continue;
        }
        if (conj ? g.is_top() : g.is_bottom()) continue;
        if (conj ? g.is_bottom() : g.is_top()) return g;
        ops.push_back(g);
      }
      return conj ? Concept::conj_all(ops) : Concept::disj_all(ops);
    }
    case K::Exists: {
      Concept inner = canonical(c.child());
      if (inner.is_bottom()) return Concept::bottom();
      return Concept::exists(c.role(), inner);
    }
    case K::Forall: {
      Concept inner = canonical(c.child());
      if (inner.is_top()) return Concept::top();
      return Concept::forall(c.role(), inner);
    }
  }
  return c;
}

namespace {

Concept nnf_impl(const Concept& c, bool neg) {
  using K = Concept::Kind;
  switch (c.kind()) {
    case K::Top: return neg ? Concept::bottom() : c;
    case K::Bottom: return neg ? Concept::top() : c;
    case K::Name: return neg ? Concept::negation(c) : c;
    case K::Not: return nnf_impl(c.child(), !neg);
    case K::And:
    case K::Or: {
      Concept a = nnf_impl(c.child(0), neg);
      Concept b = nnf_impl(c.child(1), neg);
      bool conj = (c.kind() == K::And) != neg;
      return conj ? Concept::conj(a, b) : Concept::disj(a, b);
    }
    case K::Exists:
    case K::Forall: {
      Concept inner = nnf_impl(c.child(), neg);
      bool ex = (c.kind() == K::Exists) != neg;
      return ex ? Concept::exists(c.role(), inner) : Concept::forall(c.role(), inner);
    }
  }
  return c;
}

void collect_sub(const Concept& c, std::set<Concept>& seen, std::vector<Concept>& out) {
  if (!seen.insert(c).second) return;
  out.push_back(c);
  for (int i = 0; i < c.arity(); ++i) collect_sub(c.child(i), seen, out);
}

}  // namespace

Concept nnf(const Concept& c) { return nnf_impl(c, false); }

std::vector<Concept> subconcepts(const Concept& c) {
  std::set<Concept> seen;
  std::vector<Concept> out;
  collect_sub(c, seen, out);
  return out;
}

Concept substitute(const Concept& c, const Concept& from, const Concept& to) {
  if (c == from) return to;
  using K = Concept::Kind;
  switch (c.kind()) {
    case K::Top:
    case K::Bottom:
    case K::Name: return c;
    case K::Not: return Concept::negation(substitute(c.child(), from, to));
    case K::And: return Concept::conj(substitute(c.child(0), from, to), substitute(c.child(1), from, to));
    case K::Or: return Concept::disj(substitute(c.child(0), from, to), substitute(c.child(1), from, to));
    case K::Exists: return Concept::exists(c.role(), substitute(c.child(), from, to));
    case K::Forall: return Concept::forall(c.role(), substitute(c.child(), from, to));
  }
  return c;
}

int concept_size(const Concept& c) {
  int n = 1;
  for (int i = 0; i < c.arity(); ++i) n += concept_size(c.child(i));
  return n;
}

// ---------------------------------------------------------------- TBox, ABox, queries

bool TBox::is_functional(const Role& r) const {
  return std::find(functional.begin(), functional.end(), r) != functional.end();
}

std::vector<std::string> ABox::individuals() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::string& a) {
    if (seen.insert(a).second) out.push_back(a);
  };
  for (const auto& c : concepts) add(c.ind);
  for (const auto& r : roles) {
    add(r.a);
    add(r.b);
  }
  return out;
}

bool ABox::plain() const {
  return std::all_of(concepts.begin(), concepts.end(), [](const ConceptAssertion& c) { return c.c.is_name(); });
}

void ABox::add(const Concept& c, const std::string& a) { concepts.push_back({c, a}); }

void ABox::add(const std::string& r, const std::string& a, const std::string& b) { roles.push_back({r, a, b}); }

ABox ABox::normalized() const {
  ABox out = *this;
  std::sort(out.concepts.begin(), out.concepts.end(), [](const ConceptAssertion& x, const ConceptAssertion& y) {
    return std::tie(x.ind, x.c) < std::tie(y.ind, y.c);
  });
  out.concepts.erase(std::unique(out.concepts.begin(), out.concepts.end()), out.concepts.end());
  std::sort(out.roles.begin(), out.roles.end());
  out.roles.erase(std::unique(out.roles.begin(), out.roles.end()), out.roles.end());
  return out;
}

CQ::CQ(std::string answer_var) : answer(std::move(answer_var)) { vars.push_back(answer); }

void CQ::add_var(const std::string& v) {
  auto it = std::lower_bound(vars.begin(), vars.end(), v);
  if (it == vars.end() || *it != v) vars.insert(it, v);
}

void CQ::add(const Concept& c, const std::string& v) {
  add_var(v);
  concept_atoms.push_back({c, v});
}

void CQ::add(const std::string& r, const std::string& v1, const std::string& v2) {
  add_var(v1);
  add_var(v2);
  role_atoms.push_back({r, v1, v2});
}

CQ CQ::normalized() const {
  CQ out = *this;
  out.add_var(out.answer);
  std::sort(out.vars.begin(), out.vars.end());
  out.vars.erase(std::unique(out.vars.begin(), out.vars.end()), out.vars.end());
  std::sort(out.concept_atoms.begin(), out.concept_atoms.end(), [](const ConceptAtom& x, const ConceptAtom& y) {
    return std::tie(x.var, x.c) < std::tie(y.var, y.c);
  });
  out.concept_atoms.erase(std::unique(out.concept_atoms.begin(), out.concept_atoms.end()), out.concept_atoms.end());
  std::sort(out.role_atoms.begin(), out.role_atoms.end());
  out.role_atoms.erase(std::unique(out.role_atoms.begin(), out.role_atoms.end()), out.role_atoms.end());
  return out;
}

bool CQ::has_var(const std::string& v) const { return std::binary_search(vars.begin(), vars.end(), v); }

bool CQ::plain() const {
  return std::all_of(concept_atoms.begin(), concept_atoms.end(), [](const ConceptAtom& a) { return a.c.is_name(); });
}

bool CQ::operator==(const CQ& o) const {
  CQ a = normalized();
  CQ b = o.normalized();
  return a.answer == b.answer && a.vars == b.vars && a.concept_atoms == b.concept_atoms && a.role_atoms == b.role_atoms;
}

const std::string& UCQ::answer() const {
  static const std::string def = "x";
  return disjuncts.empty() ? def : disjuncts.front().answer;
}

bool Signature::includes(const Signature& o) const {
  return std::includes(concepts.begin(), concepts.end(), o.concepts.begin(), o.concepts.end()) &&
         std::includes(roles.begin(), roles.end(), o.roles.begin(), o.roles.end());
}

void Signature::merge(const Signature& o) {
  concepts.insert(o.concepts.begin(), o.concepts.end());
  roles.insert(o.roles.begin(), o.roles.end());
}

Dialect Dialect::parse(std::string_view tag) {
  static const std::regex re("^alc(h?)(i?)(f?)(\\+u)?$");
  std::string s(tag);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw Error(ErrorKind::Parse, "unknown dialect tag '" + std::string(tag) + "'");
  Dialect d;
  d.h = m[1].length() > 0;
  d.i = m[2].length() > 0;
  d.f = m[3].length() > 0;
  d.u = m[4].length() > 0;
  return d;
}

std::string Dialect::tag() const {
  std::string s = "alc";
  if (h) s += "h";
  if (i) s += "i";
  if (f) s += "f";
  if (u) s += "+u";
  return s;
}

// ---------------------------------------------------------------- signatures

namespace {

void sig_concept(const Concept& c, Signature& s) {
  switch (c.kind()) {
    case Concept::Kind::Name: s.concepts.insert(c.name()); break;
    case Concept::Kind::Exists:
    case Concept::Kind::Forall:
      if (!c.role().universal) s.roles.insert(c.role().name);
      sig_concept(c.child(), s);
      break;
    default:
      for (int i = 0; i < c.arity(); ++i) sig_concept(c.child(i), s);
  }
}

}  // namespace

Signature signature_of(const Concept& c) {
  Signature s;
  sig_concept(c, s);
  return s;
}

Signature signature_of(const TBox& t) {
  Signature s;
  for (const auto& ci : t.cis) {
    sig_concept(ci.lhs, s);
    sig_concept(ci.rhs, s);
  }
  for (const auto& ri : t.ris) {
    s.roles.insert(ri.sub.name);
    s.roles.insert(ri.sup.name);
  }
  for (const auto& f : t.functional) s.roles.insert(f.name);
  return s;
}

Signature signature_of(const ABox& a) {
  Signature s;
  for (const auto& c : a.concepts) sig_concept(c.c, s);
  for (const auto& r : a.roles) s.roles.insert(r.role);
  return s;
}

Signature signature_of(const CQ& q) {
  Signature s;
  for (const auto& c : q.concept_atoms) sig_concept(c.c, s);
  for (const auto& r : q.role_atoms) s.roles.insert(r.role);
  return s;
}

Signature signature_of(const UCQ& q) {
  Signature s;
  for (const auto& d : q.disjuncts) s.merge(signature_of(d));
  return s;
}

Signature signature_of(const OMQ& q) {
  Signature s = signature_of(q.tbox);
  if (q.is_iq())
    s.merge(signature_of(q.iq().c));
  else
    s.merge(signature_of(q.ucq()));
  return s;
}

// ---------------------------------------------------------------- dialects

namespace {

void scan_concept(const Concept& c, std::set<std::string>& v) {
  if (c.kind() == Concept::Kind::Exists || c.kind() == Concept::Kind::Forall) {
    if (c.role().universal) v.insert("universal role");
    if (c.role().inverse) v.insert("inverse role");
  }
  for (int i = 0; i < c.arity(); ++i) scan_concept(c.child(i), v);
}

std::vector<std::string> check(const std::set<std::string>& found, const Dialect& d) {
  std::vector<std::string> out;
  for (const auto& f : found) {
    if (f == "inverse role" && d.i) continue;
    if (f == "universal role" && d.u) continue;
    if (f == "role inclusion" && d.h) continue;
    if (f == "functionality" && d.f) continue;
    out.push_back(f);
  }
  return out;
}

}  // namespace

std::vector<std::string> validate_dialect(const TBox& t, const Dialect& d) {
  std::set<std::string> found;
  for (const auto& ci : t.cis) {
    scan_concept(ci.lhs, found);
    scan_concept(ci.rhs, found);
  }
  for (const auto& ri : t.ris) {
    found.insert("role inclusion");
    if (ri.sub.inverse || ri.sup.inverse) found.insert("inverse role");
  }
  for (const auto& f : t.functional) {
    found.insert("functionality");
    if (f.inverse) found.insert("inverse role");
  }
  return check(found, d);
}

std::vector<std::string> validate_dialect(const OMQ& q) {
  std::vector<std::string> tv = validate_dialect(q.tbox, q.dialect);
  std::set<std::string> found(tv.begin(), tv.end());
  std::set<std::string> qf;
  if (q.is_iq()) {
    scan_concept(q.iq().c, qf);
  } else {
    for (const auto& cq : q.ucq().disjuncts)
      for (const auto& a : cq.concept_atoms) scan_concept(a.c, qf);
  }
  for (const auto& v : check(qf, q.dialect)) found.insert(v);
  return {found.begin(), found.end()};
}

// ---------------------------------------------------------------- roles

namespace {

std::vector<Role> role_universe(const TBox& t, const Role& extra) {
  std::set<std::string> names;
  for (const auto& ri : t.ris) {
    names.insert(ri.sub.name);
    names.insert(ri.sup.name);
  }
  names.insert(extra.name);
  std::vector<Role> out;
  for (const auto& n : names) {
    out.push_back(Role::named(n, false));
    out.push_back(Role::named(n, true));
  }
  return out;
}

}  // namespace

bool role_entails(const TBox& t, const Role& r, const Role& s) {
  if (r.universal || s.universal) return r == s || s.universal;
  if (r == s) return true;
  std::set<Role> seen{r};
  std::vector<Role> todo{r};
  while (!todo.empty()) {
    Role cur = todo.back();
    todo.pop_back();
    for (const auto& ri : t.ris) {
      Role next;
      if (ri.sub == cur)
        next = ri.sup;
      else if (ri.sub.inv() == cur)
        next = ri.sup.inv();
      else
        continue;
      if (next == s) return true;
      if (seen.insert(next).second) todo.push_back(next);
    }
  }
  return false;
}

std::vector<Role> sub_roles(const TBox& t, const Role& r) {
  std::vector<Role> out;
  for (const Role& c : role_universe(t, r))
    if (role_entails(t, c, r)) out.push_back(c);
  return out;
}

std::vector<std::string> fresh_names(const std::vector<Signature>& used, int count, const std::string& tag) {
  std::vector<std::string> out;
  for (int i = 0; static_cast<int>(out.size()) < count; ++i) {
    std::string n = "@" + tag + std::to_string(i);
    bool clash = false;
    for (const auto& s : used)
      if (s.concepts.count(n) || s.roles.count(n)) clash = true;
    if (!clash) out.push_back(n);
  }
  return out;
}

bool is_reserved_name(std::string_view name) { return !name.empty() && name.front() == '@'; }

// ---------------------------------------------------------------- parsing

using detail::expect_name;
using detail::parse_concept_tokens;
using detail::split_lines;
using detail::Tok;
using detail::tokenize;
using detail::TokenStream;

namespace {

bool blank(const std::vector<detail::Token>& toks) { return toks.size() == 1; }

void collect_roles(const Concept& c, std::set<std::string>& roles) {
  Signature s = signature_of(c);
  roles.insert(s.roles.begin(), s.roles.end());
}

struct PendingInclusion {
  std::string lhs;
  std::string rhs;
  int line;
};

// A TBox line. Bare "A sub B" lines are resolved after all other lines are
// known: they are role inclusions iff one side is used as a role elsewhere.
void parse_tbox_line(TokenStream& ts, TBox& t, std::vector<PendingInclusion>& pending,
                     std::set<std::string>& roles) {
  if (ts.accept_ident("func")) {
    ts.expect(Tok::LParen, "'('");
    std::string n = expect_name(ts, "role name");
    if (n == "u") ts.fail("the universal role cannot be functional");
    bool inv = ts.accept(Tok::Minus);
    ts.expect(Tok::RParen, "')'");
    if (!ts.done()) ts.fail("unexpected trailing input");
    t.functional.push_back(Role::named(n, inv));
    roles.insert(n);
    return;
  }
  if (ts.at_ident("role") && ts.peek(1).kind == Tok::Ident && !detail::is_keyword(ts.peek(1).text)) {
    ts.next();
    std::string a = expect_name(ts, "role name");
    bool ai = ts.accept(Tok::Minus);
    ts.expect_ident("sub");
    std::string b = expect_name(ts, "role name");
    bool bi = ts.accept(Tok::Minus);
    if (!ts.done()) ts.fail("unexpected trailing input");
    if (a == "u" || b == "u") ts.fail("the universal role cannot occur in role inclusions");
    t.ris.push_back({Role::named(a, ai), Role::named(b, bi)});
    roles.insert(a);
    roles.insert(b);
    return;
  }
  // Role inclusion with an inverse on either side.
  if (ts.peek().kind == Tok::Ident && !detail::is_keyword(ts.peek().text)) {
    bool lhs_inv = ts.peek(1).kind == Tok::Minus;
    if (lhs_inv || (ts.peek(1).kind == Tok::Ident && ts.peek(1).text == "sub" && ts.peek(2).kind == Tok::Ident &&
                    !detail::is_keyword(ts.peek(2).text) && (ts.peek(3).kind == Tok::Minus || ts.peek(3).kind == Tok::End))) {
      detail::Token first = ts.peek();
      std::string a = ts.next().text;
      bool ai = ts.accept(Tok::Minus);
      ts.expect_ident("sub");
      std::string b = expect_name(ts, "role name");
      bool bi = ts.accept(Tok::Minus);
      if (!ts.done()) ts.fail("unexpected trailing input");
      if (ai || bi) {
        if (a == "u" || b == "u") ts.fail("the universal role cannot occur in role inclusions");
        t.ris.push_back({Role::named(a, ai), Role::named(b, bi)});
        roles.insert(a);
        roles.insert(b);
      } else {
        pending.push_back({a, b, first.line});
      }
      return;
    }
  }
  Concept lhs = parse_concept_tokens(ts);
  ts.expect_ident("sub");
  Concept rhs = parse_concept_tokens(ts);
  if (!ts.done()) ts.fail("unexpected trailing input");
  collect_roles(lhs, roles);
  collect_roles(rhs, roles);
  t.cis.push_back({lhs, rhs});
}

void resolve_pending(TBox& t, std::vector<PendingInclusion>& pending, std::set<std::string>& roles) {
  bool changed = true;
  std::vector<bool> done(pending.size(), false);
  std::vector<std::pair<std::size_t, RoleInclusion>> ris;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      if (done[i]) continue;
      if (roles.count(pending[i].lhs) || roles.count(pending[i].rhs)) {
        if (pending[i].lhs == "u" || pending[i].rhs == "u")
          throw Error(ErrorKind::Parse, "the universal role cannot occur in role inclusions", pending[i].line, 1);
        roles.insert(pending[i].lhs);
        roles.insert(pending[i].rhs);
        done[i] = true;
        changed = true;
      }
    }
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (done[i])
      t.ris.push_back({Role::named(pending[i].lhs), Role::named(pending[i].rhs)});
    else
      t.cis.push_back({Concept::atom(pending[i].lhs), Concept::atom(pending[i].rhs)});
  }
}

void parse_abox_line(TokenStream& ts, ABox& a) {
  // r(a,b) or C(a)
  if (ts.peek().kind == Tok::Ident && !detail::is_keyword(ts.peek().text) && ts.peek(1).kind == Tok::LParen &&
      ts.peek(2).kind == Tok::Ident && ts.peek(3).kind == Tok::Comma) {
    std::string r = ts.next().text;
    if (r == "u") ts.fail("the universal role cannot occur in ABoxes");
    ts.expect(Tok::LParen, "'('");
    std::string x = expect_name(ts, "individual");
    ts.expect(Tok::Comma, "','");
    std::string y = expect_name(ts, "individual");
    ts.expect(Tok::RParen, "')'");
    a.roles.push_back({r, x, y});
  } else {
    Concept c = parse_concept_tokens(ts);
    ts.expect(Tok::LParen, "'('");
    std::string x = expect_name(ts, "individual");
    ts.expect(Tok::RParen, "')'");
    a.concepts.push_back({c, x});
  }
  ts.accept(Tok::Dot);
  if (!ts.done()) ts.fail("unexpected trailing input");
}

void parse_atom(TokenStream& ts, CQ& q) {
  if (ts.peek().kind == Tok::Ident && !detail::is_keyword(ts.peek().text)) {
    bool inv = ts.peek(1).kind == Tok::Minus;
    int o = inv ? 1 : 0;
    if (ts.peek(1 + o).kind == Tok::LParen && ts.peek(2 + o).kind == Tok::Ident && ts.peek(3 + o).kind == Tok::Comma) {
      std::string r = ts.next().text;
      if (r == "u") ts.fail("the universal role cannot occur in query atoms");
      if (inv) ts.next();
      ts.expect(Tok::LParen, "'('");
      std::string x = expect_name(ts, "variable");
      ts.expect(Tok::Comma, "','");
      std::string y = expect_name(ts, "variable");
      ts.expect(Tok::RParen, "')'");
      if (inv)
        q.add(r, y, x);
      else
        q.add(r, x, y);
      return;
    }
  }
  Concept c = parse_concept_tokens(ts);
  ts.expect(Tok::LParen, "'('");
  std::string v = expect_name(ts, "variable");
  ts.expect(Tok::RParen, "')'");
  if (c.is_top())
    q.add_var(v);
  else
    q.add(c, v);
}

CQ parse_cq_tokens(TokenStream& ts) {
  std::string head = expect_name(ts, "query name");
  (void)head;
  ts.expect(Tok::LParen, "'('");
  std::string x = expect_name(ts, "answer variable");
  ts.expect(Tok::RParen, "')'");
  ts.expect(Tok::Turnstile, "':-'");
  CQ q(x);
  if (!ts.at(Tok::Dot)) {
    parse_atom(ts, q);
    while (ts.accept(Tok::Comma)) parse_atom(ts, q);
  }
  ts.expect(Tok::Dot, "'.' at end of query");
  if (!ts.done()) ts.fail("unexpected trailing input");
  return q.normalized();
}

template <typename F>
void for_each_line(std::string_view text, bool allow_reserved, F&& f) {
  for (auto& [no, line] : split_lines(text)) {
    auto toks = tokenize(line, no, allow_reserved);
    if (blank(toks)) continue;
    TokenStream ts(std::move(toks));
    f(ts, no);
  }
}

}  // namespace

Concept parse_concept(std::string_view text, const ParseOptions& opts) {
  auto lines = split_lines(text);
  std::vector<detail::Token> toks;
  for (auto& [no, line] : lines) {
    auto t = tokenize(line, no, opts.allow_reserved);
    t.pop_back();
    toks.insert(toks.end(), t.begin(), t.end());
  }
  int last_line = lines.empty() ? 1 : lines.back().first;
  toks.push_back({Tok::End, "", last_line, 1});
  TokenStream ts(std::move(toks));
  Concept c = parse_concept_tokens(ts);
  if (!ts.done()) ts.fail("unexpected trailing input");
  return c;
}

TBox parse_tbox(std::string_view text, const ParseOptions& opts) {
  TBox t;
  std::vector<PendingInclusion> pending;
  std::set<std::string> roles;
  for_each_line(text, opts.allow_reserved, [&](TokenStream& ts, int) { parse_tbox_line(ts, t, pending, roles); });
  resolve_pending(t, pending, roles);
  return t;
}

ABox parse_abox(std::string_view text, const ParseOptions& opts) {
  ABox a;
  for_each_line(text, opts.allow_reserved, [&](TokenStream& ts, int) { parse_abox_line(ts, a); });
  return a;
}

CQ parse_cq(std::string_view text, const ParseOptions& opts) {
  std::optional<CQ> out;
  for_each_line(text, opts.allow_reserved, [&](TokenStream& ts, int no) {
    if (out) throw Error(ErrorKind::Parse, "expected a single conjunctive query", no, 1);
    out = parse_cq_tokens(ts);
  });
  if (!out) throw Error(ErrorKind::Parse, "empty query");
  return *out;
}

UCQ parse_ucq(std::string_view text, const ParseOptions& opts) {
  UCQ u;
  for_each_line(text, opts.allow_reserved, [&](TokenStream& ts, int no) {
    CQ q = parse_cq_tokens(ts);
    if (!u.disjuncts.empty() && q.answer != u.disjuncts.front().answer)
      throw Error(ErrorKind::Parse, "all disjuncts must use the answer variable '" + u.disjuncts.front().answer + "'",
                  no, 1);
    u.disjuncts.push_back(std::move(q));
  });
  if (u.disjuncts.empty()) throw Error(ErrorKind::Parse, "empty query");
  return u;
}

OMQ parse_omq(std::string_view text, const ParseOptions& opts) {
  OMQ q;
  std::string section;
  std::vector<PendingInclusion> pending;
  std::set<std::string> roles;
  struct SigEntry {
    std::string name;
    int arity;  // 0 = infer
    int line;
    int column;
  };
  std::vector<SigEntry> sig_entries;
  bool sig_full = false;
  bool have_query = false, have_iq = false, have_dialect = false;
  UCQ ucq;
  IQ iq;
  for (auto& [no, line] : split_lines(text)) {
    auto toks = tokenize(line, no, opts.allow_reserved);
    if (blank(toks)) continue;
    TokenStream ts(std::move(toks));
    if (ts.at(Tok::LBracket)) {
      ts.next();
      section = expect_name(ts, "section name");
      ts.expect(Tok::RBracket, "']'");
      if (section != "tbox" && section != "sigma" && section != "query" && section != "iq" && section != "dialect")
        throw Error(ErrorKind::Parse, "unknown section '" + section + "'", no, 2);
      if (ts.done()) continue;
    }
    if (section.empty()) ts.fail("content outside of a section");
    if (section == "tbox") {
      parse_tbox_line(ts, q.tbox, pending, roles);
    } else if (section == "sigma") {
      if (ts.at_ident("full") && ts.peek(1).kind == Tok::End) {
        sig_full = true;
        ts.next();
        continue;
      }
      do {
        auto tok = ts.peek();
        std::string n = expect_name(ts, "symbol");
        int arity = 0;
        if (ts.accept(Tok::Slash)) {
          auto num = ts.expect(Tok::Number, "arity");
          arity = std::stoi(num.text);
          if (arity != 1 && arity != 2) ts.fail_at(num, "arity must be 1 or 2");
        }
        sig_entries.push_back({n, arity, tok.line, tok.column});
      } while (ts.accept(Tok::Comma));
      if (!ts.done()) ts.fail("expected ','");
    } else if (section == "query") {
      if (have_iq) ts.fail("document has both [query] and [iq]");
      CQ cq = parse_cq_tokens(ts);
      if (!ucq.disjuncts.empty() && cq.answer != ucq.disjuncts.front().answer)
        throw Error(ErrorKind::Parse, "all disjuncts must use the answer variable '" + ucq.disjuncts.front().answer + "'",
                    no, 1);
      for (const auto& r : cq.role_atoms) roles.insert(r.role);
      for (const auto& c : cq.concept_atoms) collect_roles(c.c, roles);
      ucq.disjuncts.push_back(std::move(cq));
      have_query = true;
    } else if (section == "iq") {
      if (have_query) ts.fail("document has both [query] and [iq]");
      if (have_iq) ts.fail("only one instance query allowed");
      iq.c = parse_concept_tokens(ts);
      ts.expect(Tok::LParen, "'('");
      iq.var = expect_name(ts, "variable");
      ts.expect(Tok::RParen, "')'");
      ts.accept(Tok::Dot);
      if (!ts.done()) ts.fail("unexpected trailing input");
      collect_roles(iq.c, roles);
      have_iq = true;
    } else if (section == "dialect") {
      std::string tag = expect_name(ts, "dialect tag");
      if (ts.accept(Tok::Plus)) {
        auto u = ts.peek();
        if (!ts.accept_ident("u")) ts.fail_at(u, "expected 'u'");
        tag += "+u";
      }
      if (!ts.done()) ts.fail("unexpected trailing input");
      try {
        q.dialect = Dialect::parse(tag);
      } catch (const Error& e) {
        throw Error(ErrorKind::Parse, e.what(), no, 1);
      }
      have_dialect = true;
    }
  }
  if (!have_query && !have_iq) throw Error(ErrorKind::Parse, "document has no [query] or [iq] section");
  for (const auto& e : sig_entries)
    if (e.arity == 2) roles.insert(e.name);
  resolve_pending(q.tbox, pending, roles);
  if (have_iq)
    q.query = iq;
  else
    q.query = ucq;
  Signature used = signature_of(q);
  for (const auto& e : sig_entries) {
    bool role = e.arity == 2 || (e.arity == 0 && used.roles.count(e.name));
    if (e.arity == 0 && used.roles.count(e.name) && used.concepts.count(e.name))
      throw Error(ErrorKind::Parse, "symbol '" + e.name + "' is used both as concept and role name", e.line, e.column);
    if (role)
      q.sigma.roles.insert(e.name);
    else
      q.sigma.concepts.insert(e.name);
  }
  if (sig_full) q.sigma.merge(used);
  if (!have_dialect) {
    auto all = validate_dialect(q.tbox, Dialect{});
    Dialect d;
    for (const auto& v : all) {
      if (v == "inverse role") d.i = true;
      if (v == "role inclusion") d.h = true;
      if (v == "functionality") d.f = true;
      if (v == "universal role") d.u = true;
    }
    q.dialect = d;
  }
  auto violations = validate_dialect(q.tbox, q.dialect);
  if (!violations.empty()) {
    std::string msg = "TBox outside dialect " + q.dialect.tag() + ":";
    for (const auto& v : violations) msg += " " + v + ";";
    msg.pop_back();
    throw Error(ErrorKind::Dialect, msg);
  }
  return q;
}

// ---------------------------------------------------------------- rendering

std::string render(const Role& r) { return r.text(); }

std::string render(const Concept& c) { return c.text(); }

namespace {

std::string render_tbox(const TBox& t, const std::set<std::string>& roles_elsewhere) {
  std::ostringstream os;
  std::set<std::string> roles = roles_elsewhere;
  for (const auto& ci : t.cis) {
    collect_roles(ci.lhs, roles);
    collect_roles(ci.rhs, roles);
  }
  for (const auto& f : t.functional) roles.insert(f.name);
  for (const auto& ri : t.ris)
    if (ri.sub.inverse || ri.sup.inverse) {
      roles.insert(ri.sub.name);
      roles.insert(ri.sup.name);
    }
  for (const auto& ci : t.cis) os << ci.lhs.text() << " sub " << ci.rhs.text() << "\n";
  for (const auto& ri : t.ris) {
    bool clear = ri.sub.inverse || ri.sup.inverse || roles.count(ri.sub.name) || roles.count(ri.sup.name);
    os << (clear ? "" : "role ") << ri.sub.text() << " sub " << ri.sup.text() << "\n";
  }
  for (const auto& f : t.functional) os << "func(" << f.text() << ")\n";
  return os.str();
}

std::string atom_text(const ConceptAtom& a) { return a.c.text() + "(" + a.var + ")"; }

std::string atom_text(const RoleAtom& a) { return a.role + "(" + a.v1 + "," + a.v2 + ")"; }

}  // namespace

std::string render(const TBox& t) { return render_tbox(t, {}); }

std::string render(const ABox& a) {
  std::ostringstream os;
  for (const auto& c : a.concepts) os << c.c.text() << "(" << c.ind << ")\n";
  for (const auto& r : a.roles) os << r.role << "(" << r.a << "," << r.b << ")\n";
  return os.str();
}

std::string render(const CQ& q0) {
  CQ q = q0.normalized();
  std::vector<std::string> atoms;
  std::set<std::string> used;
  for (const auto& a : q.role_atoms) {
    atoms.push_back(atom_text(a));
    used.insert(a.v1);
    used.insert(a.v2);
  }
  for (const auto& a : q.concept_atoms) {
    atoms.push_back(atom_text(a));
    used.insert(a.var);
  }
  std::sort(atoms.begin(), atoms.end());
  for (const auto& v : q.vars)
    if (!used.count(v)) atoms.push_back("top(" + v + ")");
  std::string s = "q(" + q.answer + ") :- ";
  for (std::size_t i = 0; i < atoms.size(); ++i) s += (i ? ", " : "") + atoms[i];
  return s + ".";
}

std::string render(const UCQ& q) {
  std::string s;
  for (const auto& d : q.disjuncts) s += render(d) + "\n";
  return s;
}

std::string render(const IQ& q) { return q.c.text() + "(" + q.var + ")"; }

namespace {

std::string render_sigma(const Signature& s, const Signature& used) {
  std::vector<std::string> items;
  for (const auto& c : s.concepts) items.push_back(used.roles.count(c) ? c + "/1" : c);
  for (const auto& r : s.roles) items.push_back(used.roles.count(r) && !used.concepts.count(r) ? r : r + "/2");
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

}  // namespace

std::string render(const Signature& s) { return render_sigma(s, Signature{}); }

std::string render(const OMQ& q) {
  std::ostringstream os;
  Signature used = signature_of(q);
  std::set<std::string> roles_elsewhere;
  Signature qs = q.is_iq() ? signature_of(q.iq().c) : signature_of(q.ucq());
  roles_elsewhere.insert(qs.roles.begin(), qs.roles.end());
  os << "[dialect] " << q.dialect.tag() << "\n";
  os << "[tbox]\n" << render_tbox(q.tbox, roles_elsewhere);
  os << "[sigma]";
  std::string sig = render_sigma(q.sigma, used);
  if (!sig.empty()) os << " " << sig;
  os << "\n";
  if (q.is_iq())
    os << "[iq]\n" << render(q.iq()) << "\n";
  else
    os << "[query]\n" << render(q.ucq());
  return os.str();
}

}  // namespace omqrw
