#include "omqrw/structure.hpp"

#include <algorithm>
#include <sstream>

namespace omqrw {

namespace {

const std::vector<int> kNoElements;

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

int Structure::add_element(const std::string& name) {
  int id = size();
  std::string n = name.empty() ? "e" + std::to_string(id) : name;
  names_.push_back(n);
  by_name_[n] = id;
  for (auto& [k, v] : unary_) v.push_back(0);
  for (auto& r : rels_) {
    r.out.emplace_back();
    r.in.emplace_back();
  }
  return id;
}

int Structure::element(const std::string& name) {
  int f = find(name);
  return f >= 0 ? f : add_element(name);
}

int Structure::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

void Structure::add_unary(const std::string& key, int e) {
  auto it = unary_.find(key);
  if (it == unary_.end()) it = unary_.emplace(key, std::vector<char>(names_.size(), 0)).first;
  it->second[static_cast<std::size_t>(e)] = 1;
}

void Structure::add_binary(const std::string& role, int a, int b) {
  auto it = role_ids_.find(role);
  if (it == role_ids_.end()) {
    it = role_ids_.emplace(role, static_cast<int>(rels_.size())).first;
    RoleRel r;
    r.out.resize(names_.size());
    r.in.resize(names_.size());
    rels_.push_back(std::move(r));
  }
  RoleRel& r = rels_[static_cast<std::size_t>(it->second)];
  if (!r.edges.insert(edge_key(a, b)).second) return;
  r.out[static_cast<std::size_t>(a)].push_back(b);
  r.in[static_cast<std::size_t>(b)].push_back(a);
}

bool Structure::has_unary(const std::string& key, int e) const {
  auto it = unary_.find(key);
  return it != unary_.end() && it->second[static_cast<std::size_t>(e)];
}

bool Structure::has_binary(const std::string& role, int a, int b) const {
  int rid = role_id(role);
  return rid >= 0 && has_binary_by_id(rid, a, b);
}

const std::vector<int>& Structure::out(const std::string& role, int e) const {
  int rid = role_id(role);
  return rid < 0 ? kNoElements : out_by_id(rid, e);
}

const std::vector<int>& Structure::in(const std::string& role, int e) const {
  int rid = role_id(role);
  return rid < 0 ? kNoElements : in_by_id(rid, e);
}

std::vector<std::string> Structure::unary_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : unary_) out.push_back(k);
  return out;
}

std::vector<std::string> Structure::roles() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : role_ids_) out.push_back(k);
  return out;
}

std::vector<std::string> Structure::labels(int e) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : unary_)
    if (v[static_cast<std::size_t>(e)]) out.push_back(k);
  return out;
}

std::size_t Structure::fact_count() const {
  std::size_t n = 0;
  for (const auto& [k, v] : unary_) n += static_cast<std::size_t>(std::count(v.begin(), v.end(), 1));
  for (const auto& r : rels_) n += r.edges.size();
  return n;
}

const std::vector<char>* Structure::unary(const std::string& key) const {
  auto it = unary_.find(key);
  return it == unary_.end() ? nullptr : &it->second;
}

int Structure::role_id(const std::string& role) const {
  auto it = role_ids_.find(role);
  return it == role_ids_.end() ? -1 : it->second;
}

const std::vector<int>& Structure::out_by_id(int rid, int e) const {
  return rels_[static_cast<std::size_t>(rid)].out[static_cast<std::size_t>(e)];
}

const std::vector<int>& Structure::in_by_id(int rid, int e) const {
  return rels_[static_cast<std::size_t>(rid)].in[static_cast<std::size_t>(e)];
}

bool Structure::has_binary_by_id(int rid, int a, int b) const {
  return rels_[static_cast<std::size_t>(rid)].edges.count(edge_key(a, b)) > 0;
}

ABox Structure::to_abox() const {
  ABox a;
  for (const auto& [k, v] : unary_)
    for (int e = 0; e < size(); ++e)
      if (v[static_cast<std::size_t>(e)]) a.add(Concept::atom(k), name(e));
  for (const auto& [role, rid] : role_ids_)
    for (int e = 0; e < size(); ++e)
      for (int f : out_by_id(rid, e)) a.add(role, name(e), name(f));
  return a.normalized();
}

std::string Structure::describe() const {
  std::ostringstream os;
  os << "domain {";
  for (int e = 0; e < size(); ++e) os << (e ? ", " : "") << name(e);
  os << "}";
  for (const auto& [k, v] : unary_) {
    os << "; " << k << " = {";
    bool first = true;
    for (int e = 0; e < size(); ++e)
      if (v[static_cast<std::size_t>(e)]) {
        os << (first ? "" : ", ") << name(e);
        first = false;
      }
    os << "}";
  }
  for (const auto& [role, rid] : role_ids_) {
    os << "; " << role << " = {";
    bool first = true;
    for (int e = 0; e < size(); ++e)
      for (int f : out_by_id(rid, e)) {
        os << (first ? "" : ", ") << "(" << name(e) << "," << name(f) << ")";
        first = false;
      }
    os << "}";
  }
  return os.str();
}

Structure abox_structure(const ABox& a) {
  Structure s;
  for (const auto& ind : a.individuals()) s.add_element(ind);
  for (const auto& c : a.concepts) s.add_unary(c.c.text(), s.element(c.ind));
  for (const auto& r : a.roles) s.add_binary(r.role, s.element(r.a), s.element(r.b));
  return s;
}

Structure cq_structure(const CQ& q) {
  Structure s;
  for (const auto& v : q.vars) s.add_element(v);
  for (const auto& c : q.concept_atoms) s.add_unary(c.c.text(), s.element(c.var));
  for (const auto& r : q.role_atoms) s.add_binary(r.role, s.element(r.v1), s.element(r.v2));
  return s;
}

namespace {

struct Matcher {
  struct Edge {
    int rid;  // -1: role absent from structure
    int other;
    bool forward;  // var --rid--> other
  };
  const Structure& s;
  int n = 0;
  std::vector<std::vector<const std::vector<char>*>> unary;  // nullptr entry: unsatisfiable
  std::vector<std::vector<Edge>> edges;
  std::vector<int> order;
  std::vector<int> assign;
  bool impossible = false;

  Matcher(const CQ& q, const Structure& st, const std::map<std::string, int>& fixed) : s(st) {
    n = static_cast<int>(q.vars.size());
    auto idx = [&](const std::string& v) {
      return static_cast<int>(std::lower_bound(q.vars.begin(), q.vars.end(), v) - q.vars.begin());
    };
    unary.resize(static_cast<std::size_t>(n));
    edges.resize(static_cast<std::size_t>(n));
    assign.assign(static_cast<std::size_t>(n), -1);
    for (const auto& c : q.concept_atoms) {
      if (c.c.is_top()) continue;
      const auto* u = s.unary(c.c.text());
      if (!u) impossible = true;
      unary[static_cast<std::size_t>(idx(c.var))].push_back(u);
    }
    for (const auto& r : q.role_atoms) {
      int rid = s.role_id(r.role);
      if (rid < 0) impossible = true;
      int a = idx(r.v1), b = idx(r.v2);
      edges[static_cast<std::size_t>(a)].push_back({rid, b, true});
      if (a != b) edges[static_cast<std::size_t>(b)].push_back({rid, a, false});
      else edges[static_cast<std::size_t>(a)].push_back({rid, a, false});
    }
    std::vector<char> placed(static_cast<std::size_t>(n), 0);
    for (const auto& [v, e] : fixed) {
      auto it = std::lower_bound(q.vars.begin(), q.vars.end(), v);
      if (it == q.vars.end() || *it != v) continue;
      int i = static_cast<int>(it - q.vars.begin());
      if (e < 0 || e >= s.size()) impossible = true;
      assign[static_cast<std::size_t>(i)] = e;
      placed[static_cast<std::size_t>(i)] = 1;
    }
    // Variables in order of connectivity to already placed ones.
    for (int step = 0; step < n; ++step) {
      int best = -1, best_score = -1;
      for (int v = 0; v < n; ++v) {
        if (placed[static_cast<std::size_t>(v)]) continue;
        int score = 0;
        for (const auto& e : edges[static_cast<std::size_t>(v)])
          if (placed[static_cast<std::size_t>(e.other)]) score += 4;
        score += static_cast<int>(unary[static_cast<std::size_t>(v)].size() + edges[static_cast<std::size_t>(v)].size());
        if (score > best_score) {
          best_score = score;
          best = v;
        }
      }
      if (best < 0) break;
      placed[static_cast<std::size_t>(best)] = 1;
      order.push_back(best);
    }
  }

  bool consistent_fixed() const {
    for (int v = 0; v < n; ++v) {
      int e = assign[static_cast<std::size_t>(v)];
      if (e < 0) continue;
      if (!ok(v, e)) return false;
    }
    return true;
  }

  bool ok(int v, int e) const {
    for (const auto* u : unary[static_cast<std::size_t>(v)])
      if (!u || !(*u)[static_cast<std::size_t>(e)]) return false;
    for (const auto& ed : edges[static_cast<std::size_t>(v)]) {
      int o = ed.other == v ? e : assign[static_cast<std::size_t>(ed.other)];
      if (o < 0) continue;
      if (ed.rid < 0) return false;
      bool has = ed.forward ? s.has_binary_by_id(ed.rid, e, o) : s.has_binary_by_id(ed.rid, o, e);
      if (!has) return false;
    }
    return true;
  }

  bool search(std::size_t k, const std::function<bool(const std::vector<int>&)>& visit) {
    if (k == order.size()) return visit(assign);
    int v = order[k];
    // Candidates from an assigned neighbour when possible.
    const std::vector<int>* cands = nullptr;
    for (const auto& ed : edges[static_cast<std::size_t>(v)]) {
      int o = assign[static_cast<std::size_t>(ed.other)];
      if (o < 0 || ed.other == v || ed.rid < 0) continue;
      const auto& c = ed.forward ? s.in_by_id(ed.rid, o) : s.out_by_id(ed.rid, o);
      if (!cands || c.size() < cands->size()) cands = &c;
    }
    if (cands) {
      for (int e : *cands) {
        if (!ok(v, e)) continue;
        assign[static_cast<std::size_t>(v)] = e;
        if (!search(k + 1, visit)) return false;
      }
    } else {
      for (int e = 0; e < s.size(); ++e) {
        if (!ok(v, e)) continue;
        assign[static_cast<std::size_t>(v)] = e;
        if (!search(k + 1, visit)) return false;
      }
    }
    assign[static_cast<std::size_t>(v)] = -1;
    return true;
  }
};

}  // namespace

void for_each_hom(const CQ& q, const Structure& s, const std::map<std::string, int>& fixed,
                  const std::function<bool(const std::vector<int>&)>& visit) {
  Matcher m(q, s, fixed);
  if (m.impossible || !m.consistent_fixed()) return;
  m.search(0, visit);
}

std::optional<std::map<std::string, int>> find_hom(const CQ& q, const Structure& s,
                                                   const std::map<std::string, int>& fixed) {
  std::optional<std::map<std::string, int>> out;
  for_each_hom(q, s, fixed, [&](const std::vector<int>& a) {
    std::map<std::string, int> m;
    for (std::size_t i = 0; i < q.vars.size(); ++i) m[q.vars[i]] = a[i];
    out = std::move(m);
    return false;
  });
  return out;
}

bool has_hom(const CQ& q, const Structure& s, const std::map<std::string, int>& fixed) {
  bool found = false;
  for_each_hom(q, s, fixed, [&](const std::vector<int>&) {
    found = true;
    return false;
  });
  return found;
}

bool cq_maps_to(const CQ& from, const CQ& to) {
  Structure s = cq_structure(to);
  return has_hom(from, s, {{from.answer, s.find(to.answer)}});
}

}  // namespace omqrw
