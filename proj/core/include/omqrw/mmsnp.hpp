#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "omqrw/reasoner.hpp"

namespace omqrw::mmsnp {

struct Atom {
  std::string pred;
  std::vector<std::string> args;

  bool operator<(const Atom& o) const { return std::tie(pred, args) < std::tie(o.pred, o.args); }
  bool operator==(const Atom& o) const { return pred == o.pred && args == o.args; }
};

// body -> head; body atoms use schema predicates or monadic SO variables,
// the head is a disjunction of SO atoms (empty means false).
struct Rule {
  std::vector<Atom> body;
  std::vector<Atom> head;

  std::vector<std::string> variables() const;
  bool operator<(const Rule& o) const { return std::tie(body, head) < std::tie(o.body, o.head); }
  bool operator==(const Rule& o) const { return body == o.body && head == o.head; }
};

struct Sentence {
  std::map<std::string, int> schema;  // predicate -> arity
  std::vector<std::string> so;
  std::vector<Rule> rules;

  bool is_so(const std::string& p) const;
  std::set<std::string> nullary() const;
};

struct Instance {
  std::vector<std::string> domain;
  std::map<std::string, std::set<std::vector<int>>> facts;

  int size() const { return static_cast<int>(domain.size()); }
  int element(const std::string& name);
  void add(const std::string& pred, const std::vector<std::string>& args);
  bool has(const std::string& pred, const std::vector<int>& args) const;
  std::size_t fact_count() const;
};

// "pred E/2.", "so X, Y.", "rule E(x,y), X(x), X(y) -> false." and
// "rule E(x,y) -> X(x) | X(y)."; "true" is the empty body.
Sentence parse_sentence(std::string_view text);
// Facts "E(a,b)." and nullary "N."; "dom a, b." adds isolated elements.
Instance parse_instance(std::string_view text);
std::string render(const Sentence& s);
std::string render(const Instance& i);

struct EvalOptions {
  std::uint64_t max_nodes = 50'000'000;
};

// Existence of SO sets satisfying every rule. Throws ResourceLimit beyond
// the node budget.
bool eval(const Sentence& s, const Instance& i, const EvalOptions& opts = {});

Instance disjoint_union(const Instance& a, const Instance& b);

// Rules whose bodies are acyclic images of rules of s under identifications
// of variables.
Sentence build_phi_acyc(const Sentence& s);
bool body_acyclic(const Rule& r, const Sentence& s);

// Colour-split sentence for nullary sets n1, n2.
Sentence build_phi_colored(const Sentence& s, const std::set<std::string>& n1, const std::set<std::string>& n2);

struct SearchOptions {
  int max_dom = 5;
  std::uint64_t seed = 1;
  // Random instances per domain size beyond exhaustive enumeration.
  int samples = 60;
};

struct Certificate {
  Instance instance;
  std::string reason;
};

struct CheckResult {
  Verdict3 verdict;
  std::optional<Certificate> certificate;
  std::size_t instances_checked = 0;
};

// No with a certificate when some φ_{N1,N2} holds on an instance where φ
// fails (or a disjoint union of two models of φ falsifies it); otherwise
// Unknown with a "holds up to bound" note.
CheckResult check_du_preservation(const Sentence& s, const SearchOptions& opts = {});
// Preservation under disjoint union plus a search for instances where
// φ_acyc holds and φ fails.
CheckResult check_csp_definable(const Sentence& s, const SearchOptions& opts = {});

}  // namespace omqrw::mmsnp
