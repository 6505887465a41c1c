#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace omqrw {

enum class ErrorKind {
  Parse,
  Dialect,
  ReservedName,
  Precondition,
  Unsupported,
  ResourceLimit,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg, int line = 0, int column = 0);

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
};

// Named role, its inverse, or the universal role u. u is never inverted.
struct Role {
  std::string name;
  bool inverse = false;
  bool universal = false;

  static Role named(std::string name, bool inverse = false);
  static Role top();

  Role inv() const;
  std::string text() const;

  auto operator<=>(const Role&) const = default;
};

class Concept {
 public:
  enum class Kind { Top, Bottom, Name, Not, And, Or, Exists, Forall };

  Concept();

  static Concept top();
  static Concept bottom();
  static Concept atom(std::string name);
  static Concept negation(Concept c);
  static Concept conj(Concept a, Concept b);
  static Concept disj(Concept a, Concept b);
  static Concept exists(Role r, Concept c);
  static Concept forall(Role r, Concept c);
  static Concept implies(Concept a, Concept b);
  // Right-nested binary conjunction/disjunction of the sorted, deduplicated
  // operands. Empty input gives top/bottom.
  static Concept conj_all(std::vector<Concept> cs);
  static Concept disj_all(std::vector<Concept> cs);

  Kind kind() const;
  const std::string& name() const;
  const Role& role() const;
  const Concept& child(int i = 0) const;
  int arity() const;

  // Canonical rendering; And/Or operands appear sorted by their text.
  const std::string& text() const;

  bool is_name() const { return kind() == Kind::Name; }
  bool is_top() const { return kind() == Kind::Top; }
  bool is_bottom() const { return kind() == Kind::Bottom; }

  friend bool operator==(const Concept& a, const Concept& b);
  friend bool operator!=(const Concept& a, const Concept& b) { return !(a == b); }
  friend bool operator<(const Concept& a, const Concept& b);

 private:
  friend struct ConceptFactory;
  struct Node;
  explicit Concept(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

struct ConceptHash {
  std::size_t operator()(const Concept& c) const { return std::hash<std::string>()(c.text()); }
};

// Flattens nested And/Or, drops neutral elements, removes duplicates and
// simplifies double negation and constant operands.
Concept canonical(const Concept& c);

// Negation normal form.
Concept nnf(const Concept& c);

// All subconcepts including c itself.
std::vector<Concept> subconcepts(const Concept& c);

// Replaces every occurrence of `from` by `to`.
Concept substitute(const Concept& c, const Concept& from, const Concept& to);

int concept_size(const Concept& c);

struct ConceptInclusion {
  Concept lhs;
  Concept rhs;
  bool operator==(const ConceptInclusion&) const = default;
};

struct RoleInclusion {
  Role sub;
  Role sup;
  bool operator==(const RoleInclusion&) const = default;
};

struct TBox {
  std::vector<ConceptInclusion> cis;
  std::vector<RoleInclusion> ris;
  std::vector<Role> functional;

  bool empty() const { return cis.empty() && ris.empty() && functional.empty(); }
  bool functionality_only() const { return cis.empty() && ris.empty(); }
  bool is_functional(const Role& r) const;
  bool operator==(const TBox&) const = default;
};

struct ConceptAssertion {
  Concept c;
  std::string ind;
  bool operator==(const ConceptAssertion&) const = default;
};

struct RoleAssertion {
  std::string role;
  std::string a;
  std::string b;
  bool operator==(const RoleAssertion&) const = default;
  auto operator<=>(const RoleAssertion&) const = default;
};

struct ABox {
  std::vector<ConceptAssertion> concepts;
  std::vector<RoleAssertion> roles;

  // Individuals in order of first occurrence.
  std::vector<std::string> individuals() const;
  bool plain() const;
  void add(const Concept& c, const std::string& a);
  void add(const std::string& r, const std::string& a, const std::string& b);
  // Sorted, duplicate-free copy.
  ABox normalized() const;
  std::size_t size() const { return concepts.size() + roles.size(); }
  bool operator==(const ABox&) const = default;
};

struct ConceptAtom {
  Concept c;
  std::string var;
  bool operator==(const ConceptAtom&) const = default;
};

// r(v1, v2) with r a role name; inverse atoms are stored flipped.
struct RoleAtom {
  std::string role;
  std::string v1;
  std::string v2;
  bool operator==(const RoleAtom&) const = default;
  auto operator<=>(const RoleAtom&) const = default;
};

struct CQ {
  std::string answer = "x";
  std::vector<std::string> vars;  // sorted; always contains `answer`
  std::vector<ConceptAtom> concept_atoms;
  std::vector<RoleAtom> role_atoms;

  CQ() = default;
  explicit CQ(std::string answer_var);

  void add_var(const std::string& v);
  void add(const Concept& c, const std::string& v);
  void add(const std::string& r, const std::string& v1, const std::string& v2);
  // Sorts atoms and variables and removes duplicate atoms.
  CQ normalized() const;
  std::size_t atom_count() const { return concept_atoms.size() + role_atoms.size(); }
  bool has_var(const std::string& v) const;
  bool plain() const;
  bool operator==(const CQ& o) const;
};

struct UCQ {
  std::vector<CQ> disjuncts;

  UCQ() = default;
  explicit UCQ(std::vector<CQ> ds) : disjuncts(std::move(ds)) {}
  const std::string& answer() const;
  bool operator==(const UCQ&) const = default;
};

struct IQ {
  Concept c;
  std::string var = "x";
  bool operator==(const IQ&) const = default;
};

struct Signature {
  std::set<std::string> concepts;
  std::set<std::string> roles;

  bool contains_concept(const std::string& a) const { return concepts.count(a) > 0; }
  bool contains_role(const std::string& r) const { return roles.count(r) > 0; }
  bool includes(const Signature& o) const;
  void merge(const Signature& o);
  bool empty() const { return concepts.empty() && roles.empty(); }
  bool operator==(const Signature&) const = default;
};

struct Dialect {
  bool h = false;  // role inclusions
  bool i = false;  // inverse roles
  bool f = false;  // functionality
  bool u = false;  // universal role

  static Dialect parse(std::string_view tag);
  std::string tag() const;
  bool operator==(const Dialect&) const = default;
};

struct OMQ {
  TBox tbox;
  Signature sigma;
  std::variant<UCQ, IQ> query;
  Dialect dialect;

  bool is_iq() const { return std::holds_alternative<IQ>(query); }
  const UCQ& ucq() const { return std::get<UCQ>(query); }
  const IQ& iq() const { return std::get<IQ>(query); }
  bool operator==(const OMQ&) const = default;
};

// Symbols (without inversion) occurring in the object.
Signature signature_of(const Concept& c);
Signature signature_of(const TBox& t);
Signature signature_of(const ABox& a);
Signature signature_of(const CQ& q);
Signature signature_of(const UCQ& q);
Signature signature_of(const OMQ& q);

// Offending constructs; each entry is one of "inverse role",
// "universal role", "role inclusion", "functionality".
std::vector<std::string> validate_dialect(const OMQ& q);
std::vector<std::string> validate_dialect(const TBox& t, const Dialect& d);

// T |= r ⊑ s via the reflexive-transitive closure of the role inclusions,
// lifted to inverses.
bool role_entails(const TBox& t, const Role& r, const Role& s);
// All roles s (names and inverses over sig(T) ∪ {r}) with T |= s ⊑ r.
std::vector<Role> sub_roles(const TBox& t, const Role& r);

// Fresh names "@<tag><i>" disjoint from every symbol in `used`.
std::vector<std::string> fresh_names(const std::vector<Signature>& used, int count,
                                     const std::string& tag);

bool is_reserved_name(std::string_view name);

struct ParseOptions {
  // Accept names from the reserved '@' namespace (tool-generated documents).
  bool allow_reserved = false;
};

Concept parse_concept(std::string_view text, const ParseOptions& opts = {});
TBox parse_tbox(std::string_view text, const ParseOptions& opts = {});
ABox parse_abox(std::string_view text, const ParseOptions& opts = {});
CQ parse_cq(std::string_view text, const ParseOptions& opts = {});
UCQ parse_ucq(std::string_view text, const ParseOptions& opts = {});
OMQ parse_omq(std::string_view text, const ParseOptions& opts = {});

std::string render(const Role& r);
std::string render(const Concept& c);
std::string render(const TBox& t);
std::string render(const ABox& a);
std::string render(const CQ& q);
std::string render(const UCQ& q);
std::string render(const IQ& q);
std::string render(const Signature& s);
std::string render(const OMQ& q);

}  // namespace omqrw
