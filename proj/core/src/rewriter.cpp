#include "omqrw/rewriter.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

namespace omqrw {

namespace {

class Fresh {
 public:
  explicit Fresh(const OMQ& q) {
    used_.push_back(q.sigma);
    used_.push_back(signature_of(q));
  }

  std::string make(const std::string& tag, RewriteResult& res, const std::string& why) {
    std::string n = fresh_names(used_, 1, tag).front();
    Signature s;
    s.concepts.insert(n);
    used_.push_back(std::move(s));
    res.fresh.insert(n);
    res.provenance[n] = why;
    return n;
  }

 private:
  std::vector<Signature> used_;
};

CQ restrict_to(const CQ& q, const VarSet& vars, const std::string& root) {
  CQ out(root);
  for (const auto& v : vars) out.add_var(v);
  for (const auto& a : q.concept_atoms)
    if (vars.count(a.var)) out.add(a.c, a.var);
  for (const auto& a : q.role_atoms)
    if (vars.count(a.v1) && vars.count(a.v2)) out.add(a.role, a.v1, a.v2);
  return out;
}

std::string atom_text(const RoleAtom& a) { return a.role + "(" + a.v1 + "," + a.v2 + ")"; }

std::string fresh_var(const CQ& q, int& counter) {
  while (true) {
    std::string v = "_x" + std::to_string(counter++);
    if (!q.has_var(v)) return v;
  }
}

bool on_cycle(const CQ& q, const RoleAtom& a) {
  if (a.v1 == a.v2) return true;
  CQ rest(q.answer);
  for (const auto& v : q.vars) rest.add_var(v);
  for (const auto& b : q.role_atoms)
    if (!(b == a)) rest.add(b.role, b.v1, b.v2);
  return undirected_reach(rest, a.v1).count(a.v2) > 0;
}

bool has_inverse(const Concept& c) {
  if ((c.kind() == Concept::Kind::Exists || c.kind() == Concept::Kind::Forall) && c.role().inverse) return true;
  for (int i = 0; i < c.arity(); ++i)
    if (has_inverse(c.child(i))) return true;
  return false;
}

void check_tbox_inverse_free(const TBox& t) {
  auto bad = validate_dialect(t, Dialect::parse("alchf+u"));
  if (std::find(bad.begin(), bad.end(), "inverse role") != bad.end())
    throw Error(ErrorKind::Precondition, "TBox uses inverse roles");
}

const UCQ& ucq_of(const OMQ& q) {
  if (q.is_iq()) throw Error(ErrorKind::Precondition, "query is an IQ, a UCQ is required");
  return q.ucq();
}

// Removes cycle atoms at x (descending atom order) and re-attaches each of
// them to a fresh variable labelled P.
CQ unfold(const CQ& p0, const std::string& p_name) {
  CQ p = p0.normalized();
  const std::string& x = p.answer;
  std::vector<RoleAtom> at_x;
  for (const auto& a : p.role_atoms)
    if (a.v1 == x || a.v2 == x) at_x.push_back(a);
  std::sort(at_x.rbegin(), at_x.rend());
  std::vector<RoleAtom> removed;
  for (const auto& a : at_x) {
    if (!on_cycle(p, a)) continue;
    p.role_atoms.erase(std::find(p.role_atoms.begin(), p.role_atoms.end(), a));
    removed.push_back(a);
  }
  int counter = 0;
  for (const auto& a : removed) {
    std::string v = fresh_var(p, counter);
    if (a.v2 == x)
      p.add(a.role, a.v1 == x ? x : a.v1, v);
    else
      p.add(a.role, v, a.v2);
    p.add(Concept::atom(p_name), v);
  }
  return p;
}

// C_p for one disjunct; components other than x's become "exists u. C".
Concept disjunct_concept(const CQ& p0, const std::string& p_name, bool universal, std::vector<CQ>& trees) {
  CQ p = p0.normalized();
  if (auto c = x_cycle(p)) throw Error(ErrorKind::Precondition, "query is not x-acyclic: cycle " + c->text());
  auto comps = components(p);
  if (!universal && comps.size() > 1) {
    std::string v = *comps[1].begin();
    throw Error(ErrorKind::Precondition, "query is not connected: " + v + " is unreachable from " + p.answer);
  }
  CQ main = restrict(p, comps[0]);
  CQ tree = unfold(main, p_name);
  if (!is_tree_shaped(tree)) throw Error(ErrorKind::Precondition, "unfolding did not produce a tree: " + render(tree));
  trees.push_back(tree);
  std::vector<Concept> parts{tree_concept(tree, tree.answer)};
  for (std::size_t i = 1; i < comps.size(); ++i) {
    std::string root = *comps[i].begin();
    CQ sub = restrict_to(p, comps[i], root);
    if (!is_tree_shaped(sub)) throw Error(ErrorKind::Precondition, "Boolean component is cyclic: " + render(sub));
    trees.push_back(sub);
    parts.push_back(Concept::exists(Role::top(), tree_concept(sub, root)));
  }
  return Concept::conj_all(parts);
}

RewriteResult alci_core(const OMQ& q, bool universal, std::vector<Concept>* per_disjunct, std::string* p_out) {
  const UCQ& u = ucq_of(q);
  RewriteResult res;
  Fresh fresh(q);
  std::string p = fresh.make("p", res, "marks the answer individual at re-attached cycle atoms");
  std::vector<Concept> cs;
  for (const auto& d : u.disjuncts) cs.push_back(disjunct_concept(d, p, universal, res.trees));
  if (per_disjunct) *per_disjunct = cs;
  if (p_out) *p_out = p;
  res.omq = q;
  res.omq.query = IQ{Concept::implies(Concept::atom(p), Concept::disj_all(cs)), u.answer()};
  res.omq.dialect.i = true;
  res.omq.dialect.u = res.omq.dialect.u || universal;
  return res;
}

// Rebuilds c bottom-up; `visit` may replace a rebuilt node.
Concept rebuild(const Concept& c, const std::function<std::optional<Concept>(const Concept&)>& visit) {
  using K = Concept::Kind;
  Concept out = c;
  switch (c.kind()) {
    case K::Not: out = Concept::negation(rebuild(c.child(), visit)); break;
    case K::And: out = Concept::conj(rebuild(c.child(0), visit), rebuild(c.child(1), visit)); break;
    case K::Or: out = Concept::disj(rebuild(c.child(0), visit), rebuild(c.child(1), visit)); break;
    case K::Exists: out = Concept::exists(c.role(), rebuild(c.child(), visit)); break;
    case K::Forall: out = Concept::forall(c.role(), rebuild(c.child(), visit)); break;
    default: break;
  }
  if (auto r = visit(out)) return *r;
  return out;
}

// Replaces the first (post-order) node satisfying `pick`.
bool replace_first(Concept& c, const std::function<std::optional<Concept>(const Concept&)>& pick) {
  bool done = false;
  c = rebuild(c, [&](const Concept& n) -> std::optional<Concept> {
    if (done) return std::nullopt;
    auto r = pick(n);
    if (r) done = true;
    return r;
  });
  return done;
}

void flatten_and(const Concept& c, std::vector<Concept>& out) {
  if (c.kind() == Concept::Kind::And) {
    flatten_and(c.child(0), out);
    flatten_and(c.child(1), out);
  } else if (!c.is_top()) {
    out.push_back(c);
  }
}

// Shared start of both inverse-free constructions: every occurrence of
// "exists r-. P" becomes its own fresh name P_D, and C_pre collects
// "forall r. P_D".
struct PreCon {
  Concept pre;
  Concept con;
  std::vector<std::string> pending;
};

PreCon init_pre_con(const std::vector<Concept>& cs, const std::string& p, Fresh& fresh, RewriteResult& res) {
  PreCon pc;
  std::vector<Concept> pre;
  std::vector<Concept> rebuilt;
  for (const auto& c : cs) {
    rebuilt.push_back(rebuild(c, [&](const Concept& n) -> std::optional<Concept> {
      if (n.kind() == Concept::Kind::Exists && n.role().inverse && n.child().kind() == Concept::Kind::Name &&
          n.child().name() == p) {
        std::string d = fresh.make("pd", res, "replaces " + n.text());
        pre.push_back(Concept::forall(n.role().inv(), Concept::atom(d)));
        pc.pending.push_back(d);
        return Concept::atom(d);
      }
      return std::nullopt;
    }));
  }
  pc.pre = Concept::conj_all(pre);
  pc.con = Concept::disj_all(rebuilt);
  return pc;
}

Concept substitute_name(const Concept& c, const std::string& name, const Concept& to) {
  return substitute(c, Concept::atom(name), to);
}

RewriteResult inverse_free(const OMQ& q, bool universal) {
  check_tbox_inverse_free(q.tbox);
  const UCQ& u = ucq_of(q);
  if (!universal)
    for (const auto& d : u.disjuncts) {
      CQ p = d.normalized();
      VarSet r = dreach(p);
      for (const auto& v : p.vars)
        if (!r.count(v))
          throw Error(ErrorKind::Precondition, "query is not x-accessible: " + v + " is not reachable from " + p.answer);
    }
  std::vector<Concept> cs;
  std::string p;
  RewriteResult res = alci_core(q, universal, &cs, &p);
  Fresh fresh(res.omq);
  PreCon pc = init_pre_con(cs, p, fresh, res);
  std::vector<Concept> guards;
  while (true) {
    std::string error;
    bool changed = replace_first(pc.con, [&](const Concept& n) -> std::optional<Concept> {
      if (n.kind() != Concept::Kind::Exists || !n.role().inverse || has_inverse(n.child())) return std::nullopt;
      Role r = n.role().inv();
      if (universal) {
        std::string d = fresh.make("pd", res, "replaces " + n.text());
        guards.push_back(Concept::forall(Role::top(), Concept::implies(n.child(), Concept::forall(r, Concept::atom(d)))));
        return Concept::atom(d);
      }
      std::vector<Concept> parts;
      flatten_and(n.child(), parts);
      auto it = std::find_if(parts.begin(), parts.end(), [&](const Concept& c) {
        return c.kind() == Concept::Kind::Name && std::find(pc.pending.begin(), pc.pending.end(), c.name()) != pc.pending.end();
      });
      if (it == parts.end()) {
        error = "no marker below " + n.text();
        return std::nullopt;
      }
      std::string prev = it->name();
      parts.erase(it);
      Concept f = Concept::conj_all(parts);
      std::string d = fresh.make("pd", res, "replaces " + n.text());
      Concept step = Concept::forall(r, Concept::atom(d));
      pc.pre = substitute_name(pc.pre, prev, f.is_top() ? step : Concept::implies(f, step));
      pc.pending.erase(std::find(pc.pending.begin(), pc.pending.end(), prev));
      pc.pending.push_back(d);
      return Concept::atom(d);
    });
    if (!error.empty()) throw Error(ErrorKind::Precondition, error);
    if (!changed) break;
  }
  guards.push_back(pc.pre);
  Concept pre = Concept::conj_all(guards);
  Concept iq = pre.is_top() ? pc.con : Concept::implies(pre, pc.con);
  // P only occurred inside the replaced restrictions.
  res.fresh.erase(p);
  res.provenance.erase(p);
  res.omq.query = IQ{iq, u.answer()};
  res.omq.dialect.i = false;
  return res;
}

}  // namespace

Concept tree_concept(const CQ& tree, const std::string& root, bool universal) {
  std::function<Concept(const std::string&, const std::string&)> node = [&](const std::string& v,
                                                                          const std::string& parent) {
    std::vector<Concept> parts;
    for (const auto& a : tree.concept_atoms)
      if (a.var == v && !a.c.is_top()) parts.push_back(a.c);
    bool parent_seen = false;
    for (const auto& a : tree.role_atoms) {
      std::string other;
      bool inverse;
      if (a.v1 == v) {
        other = a.v2;
        inverse = false;
      } else if (a.v2 == v) {
        other = a.v1;
        inverse = true;
      } else {
        continue;
      }
      if (other == parent && !parent_seen) {
        parent_seen = true;
        continue;
      }
      Role r = Role::named(a.role, inverse);
      Concept sub = node(other, v);
      parts.push_back(universal ? Concept::forall(r, sub) : Concept::exists(r, sub));
    }
    return Concept::conj_all(parts);
  };
  return node(root, "");
}

RewriteResult rewrite_alci(const OMQ& q) { return alci_core(q, false, nullptr, nullptr); }

RewriteResult rewrite_alci_u(const OMQ& q) { return alci_core(q, true, nullptr, nullptr); }

RewriteResult rewrite_alch_extend_tbox(const OMQ& q) {
  check_tbox_inverse_free(q.tbox);
  RewriteResult res = rewrite_alci(q);
  Fresh fresh(res.omq);
  Concept c = res.omq.iq().c;
  while (true) {
    std::optional<Concept> target;
    rebuild(c, [&](const Concept& n) -> std::optional<Concept> {
      if (!target && n.kind() == Concept::Kind::Exists && n.role().inverse && !has_inverse(n.child())) target = n;
      return std::nullopt;
    });
    if (!target) break;
    std::string d = fresh.make("pd", res, "replaces " + target->text());
    res.omq.tbox.cis.push_back({target->child(), Concept::forall(target->role().inv(), Concept::atom(d))});
    c = substitute(c, *target, Concept::atom(d));
  }
  res.omq.query = IQ{c, res.omq.iq().var};
  res.omq.dialect.i = false;
  return res;
}

RewriteResult rewrite_alc(const OMQ& q) { return inverse_free(q, false); }

RewriteResult rewrite_alc_u(const OMQ& q) { return inverse_free(q, true); }

namespace {

struct Step {
  RoleAtom atom;
  bool forward;  // traversed from v1 to v2
  const std::string& from() const { return forward ? atom.v1 : atom.v2; }
  const std::string& to() const { return forward ? atom.v2 : atom.v1; }
  Role role() const { return Role::named(atom.role, !forward); }
};

std::vector<Step> functional_moves(const std::vector<RoleAtom>& atoms, const TBox& t, const std::string& v) {
  std::vector<Step> out;
  for (const auto& a : atoms) {
    if (a.v1 == v && t.is_functional(Role::named(a.role))) out.push_back({a, true});
    if (a.v2 == v && t.is_functional(Role::named(a.role, true))) out.push_back({a, false});
  }
  return out;
}

// Shortest functional path from `from` to `to` using `atoms`.
std::optional<std::vector<Step>> functional_path(const std::vector<RoleAtom>& atoms, const TBox& t,
                                                 const std::string& from, const std::string& to) {
  std::map<std::string, Step> via;
  std::deque<std::string> todo{from};
  std::set<std::string> seen{from};
  while (!todo.empty()) {
    std::string v = todo.front();
    todo.pop_front();
    if (v == to) break;
    for (const auto& s : functional_moves(atoms, t, v))
      if (seen.insert(s.to()).second) {
        via.emplace(s.to(), s);
        todo.push_back(s.to());
      }
  }
  if (!seen.count(to)) return std::nullopt;
  std::vector<Step> path;
  for (std::string v = to; v != from;) {
    const Step& s = via.at(v);
    path.push_back(s);
    v = s.from();
  }
  std::reverse(path.begin(), path.end());
  return path;
}

struct UF {
  std::map<std::string, std::string> parent;
  std::string find(const std::string& v) {
    auto it = parent.find(v);
    if (it == parent.end() || it->second == v) return v;
    return parent[v] = find(it->second);
  }
  bool unite(const std::string& a, const std::string& b) {
    std::string ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
    return true;
  }
};

struct FunctionalParts {
  Concept plain;
  Concept deco;
};

FunctionalParts functional_disjunct(const CQ& p0, const TBox& t, bool universal, Fresh& fresh, RewriteResult& res) {
  CQ p = p0.normalized();
  auto fa = check_f_acyclic(p, t);
  if (!fa.ok) throw Error(ErrorKind::Precondition, "query is not f-acyclic: cycle " + fa.witness->text());
  auto comps = components(p);
  if (!universal && comps.size() > 1)
    throw Error(ErrorKind::Precondition, "query is not connected: " + *comps[1].begin() + " is unreachable");
  ClusterGraph cg = clusters(p, t);
  std::vector<RoleAtom> atoms = p.role_atoms;
  std::sort(atoms.begin(), atoms.end());

  std::vector<RoleAtom> kept;
  UF uf;
  auto keep = [&](const RoleAtom& a) {
    kept.push_back(a);
    uf.unite(a.v1, a.v2);
  };
  auto bfs_tree = [&](const std::string& root, const std::function<bool(const std::string&)>& inside) {
    std::deque<std::string> todo{root};
    std::set<std::string> seen{root};
    while (!todo.empty()) {
      std::string v = todo.front();
      todo.pop_front();
      for (const auto& s : functional_moves(atoms, t, v))
        if (inside(s.to()) && seen.insert(s.to()).second) {
          keep(s.atom);
          todo.push_back(s.to());
        }
    }
    return seen;
  };
  bfs_tree(p.answer, [&](const std::string& v) { return cg.fc.count(v) > 0; });
  for (std::size_t i = 0; i < cg.clusters.size(); ++i) {
    const auto& cl = cg.clusters[i];
    auto seen = bfs_tree(cl.vars.front(), [&](const std::string& v) {
      auto it = cg.cluster_of.find(v);
      return it != cg.cluster_of.end() && it->second == static_cast<int>(i);
    });
    if (seen.size() != cl.vars.size()) throw Error(ErrorKind::Precondition, "cluster is not strongly connected");
  }
  auto cluster = [&](const std::string& v) {
    auto it = cg.cluster_of.find(v);
    return it == cg.cluster_of.end() ? -1 : it->second;
  };
  for (const auto& a : atoms) {
    int c1 = cluster(a.v1), c2 = cluster(a.v2);
    if (c1 >= 0 && c2 >= 0 && c1 != c2) {
      if (!uf.unite(a.v1, a.v2)) throw Error(ErrorKind::Precondition, "cluster atoms form a cycle");
      kept.push_back(a);
    }
  }
  for (const auto& a : atoms) {
    bool f1 = cg.fc.count(a.v1) > 0, f2 = cg.fc.count(a.v2) > 0;
    if (f1 != f2 && uf.find(a.v1) != uf.find(a.v2)) keep(a);
  }
  std::sort(kept.begin(), kept.end());
  std::vector<RoleAtom> dropped;
  for (const auto& a : atoms)
    if (!std::binary_search(kept.begin(), kept.end(), a)) dropped.push_back(a);

  std::map<std::string, std::string> label;
  for (const auto& v : p.vars) label[v] = fresh.make("a", res, "labels variable " + v + " of " + render(p));

  CQ plain(p.answer), deco(p.answer);
  for (const auto& v : p.vars) {
    plain.add_var(v);
    deco.add_var(v);
    plain.add(Concept::atom(label[v]), v);
    deco.add(Concept::atom(label[v]), v);
  }
  for (const auto& a : kept) {
    plain.add(a.role, a.v1, a.v2);
    deco.add(a.role, a.v1, a.v2);
  }
  for (const auto& a : p.concept_atoms) deco.add(a.c, a.var);
  std::map<int, std::vector<RoleAtom>> in_cluster;
  for (const auto& a : dropped) {
    bool f1 = cg.fc.count(a.v1) > 0, f2 = cg.fc.count(a.v2) > 0;
    if (f2)
      deco.add(Concept::exists(Role::named(a.role), Concept::atom(label[a.v2])), a.v1);
    else if (f1)
      deco.add(Concept::exists(Role::named(a.role, true), Concept::atom(label[a.v1])), a.v2);
    else
      in_cluster[cluster(a.v1)].push_back(a);
  }
  for (auto& [id, remaining] : in_cluster) {
    std::vector<RoleAtom> current;
    for (const auto& a : kept)
      if (cluster(a.v1) == id && cluster(a.v2) == id) current.push_back(a);
    while (!remaining.empty()) {
      std::optional<std::pair<std::size_t, Step>> pick;
      std::vector<Step> path;
      for (std::size_t i = 0; i < remaining.size() && !pick; ++i) {
        const RoleAtom& a = remaining[i];
        for (bool fwd : {true, false}) {
          Step s{a, fwd};
          if (!t.is_functional(s.role())) continue;
          auto back = functional_path(current, t, s.to(), s.from());
          if (!back) continue;
          pick = {i, s};
          path = *back;
          break;
        }
      }
      if (!pick) throw Error(ErrorKind::Precondition, "no closing order for the atoms of a cluster");
      const Step& closing = pick->second;
      const std::string& y0 = closing.to();
      std::vector<Concept> colors, implications;
      std::string where = "cluster of " + cg.clusters[static_cast<std::size_t>(id)].vars.front() + ", atom " +
                          atom_text(closing.atom);
      for (int j = 1; j <= 3; ++j) {
        std::string c = fresh.make("c", res, "colour " + std::to_string(j) + " for " + where);
        colors.push_back(Concept::atom(c));
        Concept d = Concept::exists(closing.role(), Concept::atom(c));
        for (auto it = path.rbegin(); it != path.rend(); ++it) d = Concept::exists(it->role(), d);
        implications.push_back(Concept::implies(Concept::atom(c), d));
      }
      plain.add(Concept::disj_all(colors), y0);
      deco.add(Concept::conj_all(implications), y0);
      current.push_back(closing.atom);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick->first));
    }
  }

  res.trees.push_back(plain);
  std::vector<Concept> plains, decos;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    std::string root = i == 0 ? p.answer : *comps[i].begin();
    if (i > 0) {
      int c = cluster(root);
      if (c >= 0) root = cg.clusters[static_cast<std::size_t>(c)].vars.front();
    }
    CQ pl = restrict_to(plain, comps[i], root), de = restrict_to(deco, comps[i], root);
    if (!is_tree_shaped(pl)) throw Error(ErrorKind::Precondition, "spanning query is not a tree: " + render(pl));
    Concept cp = tree_concept(pl, root, true), cd = tree_concept(de, root, false);
    if (i == 0) {
      plains.push_back(cp);
      decos.push_back(cd);
    } else {
      plains.push_back(Concept::forall(Role::top(), cp));
      decos.push_back(Concept::exists(Role::top(), cd));
    }
  }
  return {Concept::conj_all(plains), Concept::conj_all(decos)};
}

}  // namespace

RewriteResult rewrite_functional(const OMQ& q, bool universal) {
  const UCQ& u = ucq_of(q);
  RewriteResult res;
  res.omq = q;
  Fresh fresh(q);
  std::vector<Concept> cs;
  for (const auto& d : u.disjuncts) {
    auto parts = functional_disjunct(d, q.tbox, universal, fresh, res);
    cs.push_back(Concept::implies(parts.plain, parts.deco));
  }
  res.omq.query = IQ{Concept::disj_all(cs), u.answer()};
  res.omq.dialect.i = true;
  res.omq.dialect.u = res.omq.dialect.u || universal;
  return res;
}

RewriteResult baq_to_aq(const OMQ& q) {
  if (!q.is_iq()) throw Error(ErrorKind::Precondition, "Boolean concept query expected");
  RewriteResult res;
  Fresh fresh(q);
  std::string m = fresh.make("m", res, "marks the component of a witness");
  res.omq = q;
  Concept mc = Concept::atom(m);
  res.omq.tbox.cis.push_back({q.iq().c, mc});
  for (const auto& r : signature_of(q.tbox).roles) {
    res.omq.tbox.cis.push_back({Concept::exists(Role::named(r), mc), mc});
    res.omq.tbox.cis.push_back({Concept::exists(Role::named(r, true), mc), mc});
  }
  res.omq.query = IQ{mc, q.iq().var};
  res.omq.dialect.i = true;
  return res;
}

}  // namespace omqrw
