#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "omqrw/structure.hpp"
#include "omqrw/syntax.hpp"

namespace omqrw {

using VarSet = std::set<std::string>;
using VarMap = std::map<std::string, std::string>;

// Cycle r0(x0,x1), ..., r_{n-1}(x_{n-1},x0). atoms[i] joins vars[i] and
// vars[(i+1) % n] in either orientation.
struct Cycle {
  std::vector<RoleAtom> atoms;
  std::vector<std::string> vars;

  std::string text() const;
};

// Shortest cycle whose variables all lie outside `avoid`; ties go to the
// smallest atom sequence.
std::optional<Cycle> find_cycle(const CQ& q, const VarSet& avoid = {});
// Witness cycle avoiding the answer variable, if any.
std::optional<Cycle> x_cycle(const CQ& q);
bool is_x_acyclic(const CQ& q);
bool is_x_acyclic(const UCQ& q);
// Undirected graph is a tree without self-loops or parallel atoms.
bool is_tree_shaped(const CQ& q);

// Connected components of the undirected query graph; the first contains x.
std::vector<VarSet> components(const CQ& q);
VarSet undirected_reach(const CQ& q, const std::string& from);
bool is_connected(const CQ& q);
bool is_connected(const UCQ& q);
VarSet dreach(const CQ& q);
bool is_x_accessible(const CQ& q);
bool is_x_accessible(const UCQ& q);

CQ restrict(const CQ& q, const VarSet& vars);
CQ q_con(const CQ& q);
UCQ q_con(const UCQ& q);
// Renames variables; unmapped variables keep their names.
CQ rename(const CQ& q, const VarMap& m);

// One CQ per set partition of the variables, the block of x named x and
// every other block named after its smallest member. Duplicates removed.
std::vector<CQ> contractions(const CQ& q);
// x-acyclic contractions with role specialisation along the role hierarchy.
UCQ build_q_acyc(const UCQ& q, const TBox& t);

// Homomorphism between CQs fixing the answer variable.
std::optional<VarMap> cq_hom(const CQ& from, const CQ& to);
// Homomorphism into an ABox with x mapped to `a` (or anywhere when empty).
std::optional<std::map<std::string, std::string>> abox_hom(const CQ& q, const ABox& a,
                                                           const std::string& ind = "");

// Empty-TBox containment: q1 ⊆ q2.
bool cq_contained(const CQ& q1, const CQ& q2);
bool ucq_contained(const UCQ& q1, const UCQ& q2);
bool ucq_equivalent(const UCQ& q1, const UCQ& q2);
// Drops disjuncts contained in another one (keeps the first of equivalents).
UCQ minimize_ucq(const UCQ& q);

CQ core(const CQ& q);

// All atom subsets, largest first; the first is q itself.
std::vector<CQ> subqueries(const CQ& q);
// Choices of at most one subquery per disjunct (at least one disjunct kept).
// Stop by returning false.
void for_each_subquery(const UCQ& q, const std::function<bool(const UCQ&)>& visit);

// Functional steps: p(a,b) gives a->b when func(p), and b->a when func(p-).
VarSet functional_closure(const CQ& q, const TBox& t, const std::string& v);
bool atom_functional(const RoleAtom& a, const TBox& t);

struct FAcyclicity {
  bool ok = true;
  std::optional<Cycle> witness;
};
FAcyclicity check_f_acyclic(const CQ& q, const TBox& t);
bool is_f_acyclic(const CQ& q, const TBox& t);
bool is_f_acyclic(const UCQ& q, const TBox& t);

struct Cluster {
  std::vector<std::string> vars;
  bool degenerate = false;  // single variable without a self-loop
};

struct ClusterGraph {
  VarSet fc;
  VarSet nfc;
  std::vector<Cluster> clusters;
  std::vector<std::pair<int, int>> edges;
  std::map<std::string, int> cluster_of;
};

// Throws Precondition when one of the cluster properties fails.
ClusterGraph clusters(const CQ& q, const TBox& t);

}  // namespace omqrw
