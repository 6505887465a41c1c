#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "omqrw/syntax.hpp"

namespace omqrw {

// Finite relational structure over unary and binary predicates. Serves as
// ABox graph, canonical database of a CQ, and finite interpretation. Unary
// predicates are keyed by concept text, so compound assertions of extended
// ABoxes are stored verbatim.
class Structure {
 public:
  int add_element(const std::string& name = "");
  // Element with this name, created on demand.
  int element(const std::string& name);
  // -1 when absent.
  int find(const std::string& name) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int e) const { return names_[static_cast<std::size_t>(e)]; }

  void add_unary(const std::string& key, int e);
  void add_binary(const std::string& role, int a, int b);
  bool has_unary(const std::string& key, int e) const;
  bool has_binary(const std::string& role, int a, int b) const;

  const std::vector<int>& out(const std::string& role, int e) const;
  const std::vector<int>& in(const std::string& role, int e) const;

  std::vector<std::string> unary_keys() const;
  std::vector<std::string> roles() const;
  std::vector<std::string> labels(int e) const;
  std::size_t fact_count() const;

  // Membership vector for a unary key; nullptr if the key never occurs.
  const std::vector<char>* unary(const std::string& key) const;
  int role_id(const std::string& role) const;
  const std::vector<int>& out_by_id(int rid, int e) const;
  const std::vector<int>& in_by_id(int rid, int e) const;
  bool has_binary_by_id(int rid, int a, int b) const;

  ABox to_abox() const;
  std::string describe() const;

 private:
  struct RoleRel {
    std::vector<std::vector<int>> out;
    std::vector<std::vector<int>> in;
    std::unordered_set<std::uint64_t> edges;
  };
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> by_name_;
  std::map<std::string, std::vector<char>> unary_;
  std::map<std::string, int> role_ids_;
  std::vector<RoleRel> rels_;
};

Structure abox_structure(const ABox& a);
// Canonical database of a CQ; elements are named after the variables.
Structure cq_structure(const CQ& q);

// Homomorphisms from a CQ into a structure. `fixed` pins variables to
// elements. Concept atoms match unary facts with identical text, except that
// top atoms always match.
std::optional<std::map<std::string, int>> find_hom(const CQ& q, const Structure& s,
                                                   const std::map<std::string, int>& fixed = {});
bool has_hom(const CQ& q, const Structure& s, const std::map<std::string, int>& fixed = {});
// Visits homomorphisms as vectors indexed like q.vars; stop by returning false.
void for_each_hom(const CQ& q, const Structure& s, const std::map<std::string, int>& fixed,
                  const std::function<bool(const std::vector<int>&)>& visit);

// Homomorphism from `from` to `to` mapping answer variable to answer variable.
bool cq_maps_to(const CQ& from, const CQ& to);

}  // namespace omqrw
