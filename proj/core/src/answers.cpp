#include <algorithm>
#include <numeric>

#include "omqrw/reasoner.hpp"

namespace omqrw {

std::set<std::string> cq_answers_empty_tbox(const UCQ& q, const ABox& a) {
  std::set<std::string> out;
  Structure s = abox_structure(a);
  for (int e = 0; e < s.size(); ++e)
    for (const auto& p : q.disjuncts)
      if (has_hom(p, s, {{p.answer, e}})) {
        out.insert(s.name(e));
        break;
      }
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

}  // namespace

ABox functional_quotient(const ABox& a, const TBox& t, std::map<std::string, std::string>* rep) {
  std::vector<std::string> inds = a.individuals();
  std::map<std::string, int> id;
  for (std::size_t i = 0; i < inds.size(); ++i) id[inds[i]] = static_cast<int>(i);
  UnionFind uf(static_cast<int>(inds.size()));
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& f : t.functional) {
      std::map<int, int> succ;
      for (const auto& r : a.roles) {
        if (r.role != f.name) continue;
        int from = uf.find(id.at(f.inverse ? r.b : r.a));
        int to = uf.find(id.at(f.inverse ? r.a : r.b));
        auto [it, fresh] = succ.emplace(from, to);
        if (!fresh && uf.find(it->second) != to) changed |= uf.unite(it->second, to);
      }
    }
  }
  auto name = [&](const std::string& i) { return inds[static_cast<std::size_t>(uf.find(id.at(i)))]; };
  ABox out;
  for (const auto& c : a.concepts) out.add(c.c, name(c.ind));
  for (const auto& r : a.roles) out.add(r.role, name(r.a), name(r.b));
  if (rep)
    for (const auto& i : inds) (*rep)[i] = name(i);
  return out.normalized();
}

bool is_functional_abox(const ABox& a, const TBox& t) {
  for (const auto& f : t.functional) {
    std::map<std::string, std::string> succ;
    for (const auto& r : a.roles) {
      if (r.role != f.name) continue;
      const auto& from = f.inverse ? r.b : r.a;
      const auto& to = f.inverse ? r.a : r.b;
      auto [it, fresh] = succ.emplace(from, to);
      if (!fresh && it->second != to) return false;
    }
  }
  return true;
}

}  // namespace omqrw
