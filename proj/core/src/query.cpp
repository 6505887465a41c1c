#include "omqrw/query.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

namespace omqrw {

std::string Cycle::text() const {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ", ";
    out += atoms[i].role + "(" + atoms[i].v1 + "," + atoms[i].v2 + ")";
  }
  return out;
}

namespace {

struct Incidence {
  int atom;
  std::string other;
};

std::map<std::string, std::vector<Incidence>> incidence(const CQ& q, const VarSet& avoid) {
  std::map<std::string, std::vector<Incidence>> adj;
  for (std::size_t i = 0; i < q.role_atoms.size(); ++i) {
    const auto& a = q.role_atoms[i];
    if (avoid.count(a.v1) || avoid.count(a.v2)) continue;
    adj[a.v1].push_back({static_cast<int>(i), a.v2});
    if (a.v1 != a.v2) adj[a.v2].push_back({static_cast<int>(i), a.v1});
  }
  return adj;
}

}  // namespace

std::optional<Cycle> find_cycle(const CQ& q0, const VarSet& avoid) {
  CQ q = q0.normalized();
  const auto& atoms = q.role_atoms;
  // Self-loops.
  for (const auto& a : atoms)
    if (a.v1 == a.v2 && !avoid.count(a.v1)) return Cycle{{a}, {a.v1}};
  // Parallel atoms.
  std::optional<Cycle> best;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (avoid.count(a.v1) || avoid.count(a.v2)) continue;
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const auto& b = atoms[j];
      bool same = (b.v1 == a.v1 && b.v2 == a.v2) || (b.v1 == a.v2 && b.v2 == a.v1);
      if (same) return Cycle{{a, b}, {a.v1, a.v2}};
    }
  }
  // Shortest cycle through each atom: path between its ends avoiding it.
  auto adj = incidence(q, avoid);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (avoid.count(a.v1) || avoid.count(a.v2)) continue;
    std::map<std::string, std::pair<std::string, int>> parent;
    std::deque<std::string> todo{a.v2};
    parent[a.v2] = {"", -1};
    while (!todo.empty() && !parent.count(a.v1)) {
      std::string cur = todo.front();
      todo.pop_front();
      for (const auto& inc : adj[cur]) {
        if (inc.atom == static_cast<int>(i) || parent.count(inc.other)) continue;
        parent[inc.other] = {cur, inc.atom};
        todo.push_back(inc.other);
      }
    }
    if (!parent.count(a.v1)) continue;
    // Walk back from v1 to v2, then reverse to get v1 -a-> v2 -> ... -> v1.
    std::vector<std::string> back_vars;
    std::vector<RoleAtom> back_atoms;
    for (std::string cur = a.v1; cur != a.v2; cur = parent[cur].first) {
      back_vars.push_back(cur);
      back_atoms.push_back(atoms[static_cast<std::size_t>(parent[cur].second)]);
    }
    Cycle c;
    c.atoms.push_back(a);
    c.vars.push_back(a.v1);
    c.vars.push_back(a.v2);
    for (std::size_t k = back_vars.size(); k-- > 0;) {
      c.atoms.push_back(back_atoms[k]);
      if (k > 0) c.vars.push_back(back_vars[k]);
    }
    if (!best || c.atoms.size() < best->atoms.size()) best = std::move(c);
  }
  return best;
}

std::optional<Cycle> x_cycle(const CQ& q) { return find_cycle(q, {q.answer}); }

bool is_x_acyclic(const CQ& q) { return !x_cycle(q).has_value(); }

bool is_x_acyclic(const UCQ& q) {
  return std::all_of(q.disjuncts.begin(), q.disjuncts.end(), [](const CQ& p) { return is_x_acyclic(p); });
}

bool is_tree_shaped(const CQ& q) { return !find_cycle(q).has_value() && is_connected(q); }

VarSet undirected_reach(const CQ& q, const std::string& from) {
  auto adj = incidence(q, {});
  VarSet seen{from};
  std::vector<std::string> todo{from};
  while (!todo.empty()) {
    std::string cur = todo.back();
    todo.pop_back();
    for (const auto& inc : adj[cur])
      if (seen.insert(inc.other).second) todo.push_back(inc.other);
  }
  return seen;
}

std::vector<VarSet> components(const CQ& q) {
  std::vector<VarSet> out;
  VarSet done;
  auto visit = [&](const std::string& v) {
    if (done.count(v)) return;
    VarSet c = undirected_reach(q, v);
    done.insert(c.begin(), c.end());
    out.push_back(std::move(c));
  };
  visit(q.answer);
  for (const auto& v : q.vars) visit(v);
  return out;
}

bool is_connected(const CQ& q) { return undirected_reach(q, q.answer).size() == q.vars.size(); }

bool is_connected(const UCQ& q) {
  return std::all_of(q.disjuncts.begin(), q.disjuncts.end(), [](const CQ& p) { return is_connected(p); });
}

VarSet dreach(const CQ& q) {
  VarSet seen{q.answer};
  std::vector<std::string> todo{q.answer};
  while (!todo.empty()) {
    std::string cur = todo.back();
    todo.pop_back();
    for (const auto& a : q.role_atoms)
      if (a.v1 == cur && seen.insert(a.v2).second) todo.push_back(a.v2);
  }
  return seen;
}

bool is_x_accessible(const CQ& q) { return dreach(q).size() == q.vars.size(); }

bool is_x_accessible(const UCQ& q) {
  return std::all_of(q.disjuncts.begin(), q.disjuncts.end(), [](const CQ& p) { return is_x_accessible(p); });
}

CQ restrict(const CQ& q, const VarSet& vars) {
  if (!vars.count(q.answer)) throw Error(ErrorKind::Precondition, "restriction must keep the answer variable");
  CQ out(q.answer);
  for (const auto& v : q.vars)
    if (vars.count(v)) out.add_var(v);
  for (const auto& c : q.concept_atoms)
    if (vars.count(c.var)) out.add(c.c, c.var);
  for (const auto& r : q.role_atoms)
    if (vars.count(r.v1) && vars.count(r.v2)) out.add(r.role, r.v1, r.v2);
  return out.normalized();
}

CQ q_con(const CQ& q) { return restrict(q, undirected_reach(q, q.answer)); }

UCQ q_con(const UCQ& q) {
  UCQ out;
  for (const auto& p : q.disjuncts) {
    CQ c = q_con(p);
    if (std::find(out.disjuncts.begin(), out.disjuncts.end(), c) == out.disjuncts.end()) out.disjuncts.push_back(c);
  }
  return out;
}

CQ rename(const CQ& q, const VarMap& m) {
  auto f = [&](const std::string& v) {
    auto it = m.find(v);
    return it == m.end() ? v : it->second;
  };
  CQ out(f(q.answer));
  for (const auto& v : q.vars) out.add_var(f(v));
  for (const auto& c : q.concept_atoms) out.add(c.c, f(c.var));
  for (const auto& r : q.role_atoms) out.add(r.role, f(r.v1), f(r.v2));
  return out.normalized();
}

std::vector<CQ> contractions(const CQ& q0) {
  CQ q = q0.normalized();
  std::vector<std::string> vars = q.vars;
  // x first so its block gets index 0.
  std::stable_partition(vars.begin(), vars.end(), [&](const std::string& v) { return v == q.answer; });
  std::size_t n = vars.size();
  std::vector<CQ> out;
  std::set<std::string> seen;
  std::vector<int> block(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == n) {
      std::vector<std::string> rep(static_cast<std::size_t>(used));
      for (std::size_t k = 0; k < n; ++k) {
        auto& r = rep[static_cast<std::size_t>(block[k])];
        if (block[k] == 0)
          r = q.answer;
        else if (r.empty() || vars[k] < r)
          r = vars[k];
      }
      VarMap m;
      for (std::size_t k = 0; k < n; ++k) m[vars[k]] = rep[static_cast<std::size_t>(block[k])];
      CQ c = rename(q, m);
      if (seen.insert(render(c)).second) out.push_back(std::move(c));
      return;
    }
    // A new block first, so the finest partition comes out first.
    for (int b = used; b >= 0; --b) {
      block[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) return {q};
  block[0] = 0;
  rec(1, 1);
  return out;
}

UCQ build_q_acyc(const UCQ& q, const TBox& t) {
  UCQ out;
  std::set<std::string> seen;
  for (const auto& p : q.disjuncts) {
    for (const auto& c : contractions(p)) {
      std::vector<std::vector<RoleAtom>> options;
      for (const auto& a : c.role_atoms) {
        std::vector<RoleAtom> opts;
        for (const Role& s : sub_roles(t, Role::named(a.role))) {
          if (s.inverse)
            opts.push_back({s.name, a.v2, a.v1});
          else
            opts.push_back({s.name, a.v1, a.v2});
        }
        options.push_back(std::move(opts));
      }
      std::vector<std::size_t> pick(options.size(), 0);
      while (true) {
        CQ v(c.answer);
        for (const auto& x : c.vars) v.add_var(x);
        for (const auto& ca : c.concept_atoms) v.add(ca.c, ca.var);
        for (std::size_t i = 0; i < options.size(); ++i) {
          const auto& a = options[i][pick[i]];
          v.add(a.role, a.v1, a.v2);
        }
        v = v.normalized();
        if (is_x_acyclic(v) && seen.insert(render(v)).second) out.disjuncts.push_back(v);
        std::size_t k = 0;
        while (k < pick.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
        if (k == pick.size()) break;
      }
    }
  }
  return out;
}

std::optional<VarMap> cq_hom(const CQ& from, const CQ& to) {
  Structure s = cq_structure(to);
  auto h = find_hom(from, s, {{from.answer, s.find(to.answer)}});
  if (!h) return std::nullopt;
  VarMap m;
  for (const auto& [v, e] : *h) m[v] = s.name(e);
  return m;
}

std::optional<std::map<std::string, std::string>> abox_hom(const CQ& q, const ABox& a, const std::string& ind) {
  Structure s = abox_structure(a);
  std::map<std::string, int> fixed;
  if (!ind.empty()) {
    int e = s.find(ind);
    if (e < 0) return std::nullopt;
    fixed[q.answer] = e;
  }
  auto h = find_hom(q, s, fixed);
  if (!h) return std::nullopt;
  std::map<std::string, std::string> m;
  for (const auto& [v, e] : *h) m[v] = s.name(e);
  return m;
}

bool cq_contained(const CQ& q1, const CQ& q2) { return cq_maps_to(q2, q1); }

bool ucq_contained(const UCQ& q1, const UCQ& q2) {
  for (const auto& p1 : q1.disjuncts) {
    bool hit = std::any_of(q2.disjuncts.begin(), q2.disjuncts.end(), [&](const CQ& p2) { return cq_contained(p1, p2); });
    if (!hit) return false;
  }
  return true;
}

bool ucq_equivalent(const UCQ& q1, const UCQ& q2) { return ucq_contained(q1, q2) && ucq_contained(q2, q1); }

UCQ minimize_ucq(const UCQ& q) {
  UCQ out;
  const auto& ds = q.disjuncts;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < ds.size() && !redundant; ++j) {
      if (i == j || !cq_contained(ds[i], ds[j])) continue;
      // Strictly contained, or equivalent to an earlier disjunct.
      if (!cq_contained(ds[j], ds[i]) || j < i) redundant = true;
    }
    if (!redundant) out.disjuncts.push_back(ds[i]);
  }
  return out;
}

CQ core(const CQ& q0) {
  CQ q = q0.normalized();
  bool changed = true;
  while (changed) {
    changed = false;
    // Later variables are dropped first.
    for (auto it = q.vars.rbegin(); it != q.vars.rend(); ++it) {
      const std::string& v = *it;
      if (v == q.answer) continue;
      VarSet keep(q.vars.begin(), q.vars.end());
      keep.erase(v);
      CQ smaller = restrict(q, keep);
      if (cq_maps_to(q, smaller)) {
        q = smaller;
        changed = true;
        break;
      }
    }
  }
  return q;
}

namespace {

CQ from_atoms(const CQ& q, const std::vector<ConceptAtom>& cs, const std::vector<RoleAtom>& rs) {
  CQ out(q.answer);
  for (const auto& c : cs) out.add(c.c, c.var);
  for (const auto& r : rs) out.add(r.role, r.v1, r.v2);
  return out.normalized();
}

}  // namespace

std::vector<CQ> subqueries(const CQ& q0) {
  CQ q = q0.normalized();
  std::size_t nc = q.concept_atoms.size();
  std::size_t n = q.atom_count();
  std::vector<std::pair<int, std::uint64_t>> masks;
  if (n > 30) throw Error(ErrorKind::ResourceLimit, "too many atoms for subquery enumeration");
  for (std::uint64_t m = 0; m < (1ULL << n); ++m) masks.push_back({-__builtin_popcountll(m), m});
  // Largest first; within a size, masks that keep earlier atoms first.
  std::stable_sort(masks.begin(), masks.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  });
  std::vector<CQ> out;
  for (const auto& [neg, m] : masks) {
    std::vector<ConceptAtom> cs;
    std::vector<RoleAtom> rs;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(m >> (n - 1 - i) & 1)) continue;
      if (i < nc)
        cs.push_back(q.concept_atoms[i]);
      else
        rs.push_back(q.role_atoms[i - nc]);
    }
    out.push_back(from_atoms(q, cs, rs));
  }
  return out;
}

void for_each_subquery(const UCQ& q, const std::function<bool(const UCQ&)>& visit) {
  std::vector<std::vector<CQ>> opts;
  for (const auto& p : q.disjuncts) opts.push_back(subqueries(p));
  // Index opts[i].size() stands for dropping disjunct i.
  std::vector<std::size_t> pick(opts.size(), 0);
  while (true) {
    UCQ u;
    for (std::size_t i = 0; i < opts.size(); ++i)
      if (pick[i] < opts[i].size()) u.disjuncts.push_back(opts[i][pick[i]]);
    if (!u.disjuncts.empty() && !visit(u)) return;
    std::size_t k = opts.size();
    while (k-- > 0) {
      if (++pick[k] <= opts[k].size()) break;
      pick[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) return;
  }
}

bool atom_functional(const RoleAtom& a, const TBox& t) {
  return t.is_functional(Role::named(a.role)) || t.is_functional(Role::named(a.role, true));
}

namespace {

std::map<std::string, std::vector<std::string>> functional_steps(const CQ& q, const TBox& t) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& a : q.role_atoms) {
    if (t.is_functional(Role::named(a.role))) out[a.v1].push_back(a.v2);
    if (t.is_functional(Role::named(a.role, true))) out[a.v2].push_back(a.v1);
  }
  return out;
}

VarSet reach(const std::map<std::string, std::vector<std::string>>& steps, const std::string& v) {
  VarSet seen{v};
  std::vector<std::string> todo{v};
  while (!todo.empty()) {
    std::string cur = todo.back();
    todo.pop_back();
    auto it = steps.find(cur);
    if (it == steps.end()) continue;
    for (const auto& n : it->second)
      if (seen.insert(n).second) todo.push_back(n);
  }
  return seen;
}

// Enumerates simple cycles whose variables lie in `allowed`.
void for_each_cycle(const CQ& q, const VarSet& allowed, const std::function<bool(const Cycle&)>& visit) {
  const auto& atoms = q.role_atoms;
  for (const auto& a : atoms)
    if (a.v1 == a.v2 && allowed.count(a.v1))
      if (!visit(Cycle{{a}, {a.v1}})) return;
  VarSet avoid;
  for (const auto& v : q.vars)
    if (!allowed.count(v)) avoid.insert(v);
  auto adj = incidence(q, avoid);
  std::vector<std::string> order(allowed.begin(), allowed.end());
  bool stop = false;
  for (const auto& start : order) {
    // Cycles whose smallest variable is `start`.
    std::vector<std::string> path{start};
    std::vector<int> used;
    VarSet on_path{start};
    std::function<void(const std::string&)> dfs = [&](const std::string& cur) {
      if (stop) return;
      for (const auto& inc : adj[cur]) {
        if (stop) return;
        const auto& a = atoms[static_cast<std::size_t>(inc.atom)];
        if (a.v1 == a.v2) continue;
        if (std::find(used.begin(), used.end(), inc.atom) != used.end()) continue;
        if (inc.other == start) {
          if (used.empty()) continue;
          // Report each cycle once: orientation with first atom smaller than the last.
          std::vector<int> all = used;
          all.push_back(inc.atom);
          if (all.size() > 2 && all.front() > all.back()) continue;
          if (all.size() == 2 && all.front() > all.back()) continue;
          Cycle c;
          for (int id : all) c.atoms.push_back(atoms[static_cast<std::size_t>(id)]);
          c.vars = path;
          if (!visit(c)) stop = true;
          continue;
        }
        if (inc.other < start || on_path.count(inc.other)) continue;
        path.push_back(inc.other);
        used.push_back(inc.atom);
        on_path.insert(inc.other);
        dfs(inc.other);
        on_path.erase(inc.other);
        used.pop_back();
        path.pop_back();
      }
    };
    dfs(start);
    if (stop) return;
  }
}

}  // namespace

VarSet functional_closure(const CQ& q, const TBox& t, const std::string& v) { return reach(functional_steps(q, t), v); }

FAcyclicity check_f_acyclic(const CQ& q0, const TBox& t) {
  CQ q = q0.normalized();
  auto steps = functional_steps(q, t);
  VarSet fc = reach(steps, q.answer);
  VarSet nfc;
  for (const auto& v : q.vars)
    if (!fc.count(v)) nfc.insert(v);
  FAcyclicity out;
  // Cycles meeting FC(x) satisfy the first condition.
  for_each_cycle(q, nfc, [&](const Cycle& c) {
    bool all_functional = std::all_of(c.atoms.begin(), c.atoms.end(), [&](const RoleAtom& a) { return atom_functional(a, t); });
    if (all_functional) {
      const std::string& x0 = c.vars.front();
      VarSet from = reach(steps, x0);
      bool covered = std::all_of(c.vars.begin(), c.vars.end(), [&](const std::string& v) {
        return from.count(v) && reach(steps, v).count(x0);
      });
      if (covered) return true;
    }
    out.ok = false;
    out.witness = c;
    return false;
  });
  return out;
}

bool is_f_acyclic(const CQ& q, const TBox& t) { return check_f_acyclic(q, t).ok; }

bool is_f_acyclic(const UCQ& q, const TBox& t) {
  return std::all_of(q.disjuncts.begin(), q.disjuncts.end(), [&](const CQ& p) { return is_f_acyclic(p, t); });
}

ClusterGraph clusters(const CQ& q0, const TBox& t) {
  CQ q = q0.normalized();
  auto steps = functional_steps(q, t);
  ClusterGraph g;
  g.fc = reach(steps, q.answer);
  for (const auto& v : q.vars)
    if (!g.fc.count(v)) g.nfc.insert(v);
  std::map<std::string, VarSet> fwd;
  for (const auto& v : g.nfc) fwd[v] = reach(steps, v);
  for (const auto& v : g.nfc) {
    if (g.cluster_of.count(v)) continue;
    Cluster c;
    for (const auto& w : g.nfc)
      if (fwd[v].count(w) && fwd[w].count(v)) c.vars.push_back(w);
    int id = static_cast<int>(g.clusters.size());
    for (const auto& w : c.vars) g.cluster_of[w] = id;
    if (c.vars.size() == 1) {
      const auto& y = c.vars.front();
      c.degenerate = std::none_of(q.role_atoms.begin(), q.role_atoms.end(),
                                  [&](const RoleAtom& a) { return a.v1 == y && a.v2 == y; });
    }
    g.clusters.push_back(std::move(c));
  }
  std::map<std::pair<int, int>, int> joins;
  for (const auto& a : q.role_atoms) {
    auto i1 = g.cluster_of.find(a.v1), i2 = g.cluster_of.find(a.v2);
    if (i1 == g.cluster_of.end() || i2 == g.cluster_of.end()) continue;
    if (i1->second == i2->second) {
      if (!atom_functional(a, t))
        throw Error(ErrorKind::Precondition, "non-functional atom " + a.role + "(" + a.v1 + "," + a.v2 +
                                                 ") inside a cluster");
      continue;
    }
    auto key = std::minmax(i1->second, i2->second);
    if (++joins[{key.first, key.second}] > 1)
      throw Error(ErrorKind::Precondition, "two atoms join the same pair of clusters");
  }
  for (const auto& [e, n] : joins) g.edges.push_back(e);
  // Acyclic cluster graph: a forest has fewer edges than vertices per component.
  std::vector<int> parent(g.clusters.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int i) { return parent[static_cast<std::size_t>(i)] == i ? i : parent[static_cast<std::size_t>(i)] = root(parent[static_cast<std::size_t>(i)]); };
  for (const auto& [a, b] : g.edges) {
    int ra = root(a), rb = root(b);
    if (ra == rb) throw Error(ErrorKind::Precondition, "cluster graph has a cycle");
    parent[static_cast<std::size_t>(ra)] = rb;
  }
  return g;
}

}  // namespace omqrw
