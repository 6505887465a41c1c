#include <algorithm>
#include <functional>
#include <unordered_map>

#include "cadical.hpp"
#include "omqrw/reasoner.hpp"

namespace omqrw {

namespace {

class Encoder {
 public:
  Encoder(int n, std::vector<std::string> roles) : n_(n), roles_(std::move(roles)) {
    top_ = fresh();
    unit(top_);
    for (std::size_t r = 0; r < roles_.size(); ++r) {
      role_idx_[roles_[r]] = static_cast<int>(r);
      for (int e = 0; e < n_; ++e)
        for (int f = 0; f < n_; ++f) role_vars_.push_back(fresh());
    }
  }

  CaDiCaL::Solver& solver() { return sat_; }

  int fresh() { return next_++; }
  void unit(int l) { clause({l}); }
  void clause(std::initializer_list<int> ls) {
    for (int l : ls) sat_.add(l);
    sat_.add(0);
  }
  void clause(const std::vector<int>& ls) {
    for (int l : ls) sat_.add(l);
    sat_.add(0);
  }

  int role_var(const std::string& r, int e, int f) const {
    int idx = role_idx_.at(r);
    return role_vars_[static_cast<std::size_t>((idx * n_ + e) * n_ + f)];
  }
  int role_lit(const Role& r, int e, int f) const { return r.inverse ? role_var(r.name, f, e) : role_var(r.name, e, f); }

  int name_var(const std::string& a, int e) {
    auto key = a + "#" + std::to_string(e);
    auto it = names_.find(key);
    if (it != names_.end()) return it->second;
    int v = fresh();
    names_[key] = v;
    name_list_[a].resize(static_cast<std::size_t>(n_), 0);
    name_list_[a][static_cast<std::size_t>(e)] = v;
    return v;
  }

  // Literal that implies membership of e in the NNF concept c.
  int pos(const Concept& c, int e) {
    using K = Concept::Kind;
    switch (c.kind()) {
      case K::Top: return top_;
      case K::Bottom: return -top_;
      case K::Name: return name_var(c.name(), e);
      case K::Not: return -name_var(c.child().name(), e);
      default: break;
    }
    auto key = c.text() + "#" + std::to_string(e);
    auto it = pos_.find(key);
    if (it != pos_.end()) return it->second;
    int v = fresh();
    pos_[key] = v;
    switch (c.kind()) {
      case K::And:
        clause({-v, pos(c.child(0), e)});
        clause({-v, pos(c.child(1), e)});
        break;
      case K::Or:
        clause({-v, pos(c.child(0), e), pos(c.child(1), e)});
        break;
      case K::Exists: {
        std::vector<int> cl{-v};
        for (int f = 0; f < n_; ++f) {
          int sub = pos(c.child(), f);
          if (c.role().universal) {
            cl.push_back(sub);
            continue;
          }
          int y = fresh();
          clause({-y, role_lit(c.role(), e, f)});
          clause({-y, sub});
          cl.push_back(y);
        }
        clause(cl);
        break;
      }
      case K::Forall:
        for (int f = 0; f < n_; ++f) {
          int sub = pos(c.child(), f);
          if (c.role().universal)
            clause({-v, sub});
          else
            clause({-v, -role_lit(c.role(), e, f), sub});
        }
        break;
      default:
        break;
    }
    return v;
  }

  // Literal equivalent to membership of e in c.
  int exact(const Concept& c, int e) {
    using K = Concept::Kind;
    switch (c.kind()) {
      case K::Top: return top_;
      case K::Bottom: return -top_;
      case K::Name: return name_var(c.name(), e);
      case K::Not: return -exact(c.child(), e);
      case K::Forall: return -exact(Concept::exists(c.role(), Concept::negation(c.child())), e);
      default: break;
    }
    auto key = c.text() + "#" + std::to_string(e);
    auto it = exact_.find(key);
    if (it != exact_.end()) return it->second;
    int v = fresh();
    exact_[key] = v;
    std::vector<int> parts;
    bool conj = c.kind() == K::And;
    if (c.kind() == K::And || c.kind() == K::Or) {
      parts = {exact(c.child(0), e), exact(c.child(1), e)};
    } else {
      for (int f = 0; f < n_; ++f) {
        int sub = exact(c.child(), f);
        if (c.role().universal) {
          parts.push_back(sub);
          continue;
        }
        int r = role_lit(c.role(), e, f);
        int y = fresh();
        clause({-y, r});
        clause({-y, sub});
        clause({y, -r, -sub});
        parts.push_back(y);
      }
    }
    if (conj) {
      std::vector<int> back{v};
      for (int p : parts) {
        clause({-v, p});
        back.push_back(-p);
      }
      clause(back);
    } else {
      std::vector<int> fwd{-v};
      for (int p : parts) {
        clause({v, -p});
        fwd.push_back(p);
      }
      clause(fwd);
    }
    return v;
  }

  bool true_lit(int l) { return sat_.val(l) > 0; }

  Interpretation decode(const std::vector<std::string>& elem_names) {
    Interpretation out;
    for (int e = 0; e < n_; ++e) out.s.add_element(elem_names[static_cast<std::size_t>(e)]);
    for (const auto& [a, vars] : name_list_)
      for (int e = 0; e < n_; ++e) {
        int v = vars[static_cast<std::size_t>(e)];
        if (v && true_lit(v)) out.s.add_unary(a, e);
      }
    for (const auto& r : roles_)
      for (int e = 0; e < n_; ++e)
        for (int f = 0; f < n_; ++f)
          if (true_lit(role_var(r, e, f))) out.s.add_binary(r, e, f);
    return out;
  }

 private:
  int n_;
  int next_ = 1;
  int top_ = 0;
  std::vector<std::string> roles_;
  std::map<std::string, int> role_idx_;
  std::vector<int> role_vars_;
  std::unordered_map<std::string, int> names_;
  std::map<std::string, std::vector<int>> name_list_;
  std::unordered_map<std::string, int> pos_;
  std::unordered_map<std::string, int> exact_;
  CaDiCaL::Solver sat_;
};

void collect_compound(const UCQ& q, std::vector<Concept>& out) {
  for (const auto& p : q.disjuncts)
    for (const auto& a : p.concept_atoms)
      if (!a.c.is_name() && !a.c.is_top()) out.push_back(a.c);
}

// Set partitions of {0..n-1} as block indices, finest first.
void partitions(int n, const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> block(static_cast<std::size_t>(n), 0);
  bool stop = false;
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (stop) return;
    if (i == n) {
      if (!visit(block)) stop = true;
      return;
    }
    for (int b = used; b >= 0; --b) {
      block[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (n == 0) {
    visit(block);
    return;
  }
  rec(1, 1);
}

}  // namespace

FinderResult find_model(const ABox& a, const TBox& t, const FinderOptions& opts, const std::vector<Avoid>& avoid) {
  FinderResult res;
  std::vector<std::string> inds = a.individuals();
  for (const auto& av : avoid)
    if (!av.ind.empty() && std::find(inds.begin(), inds.end(), av.ind) == inds.end()) inds.push_back(av.ind);
  Signature sig = signature_of(a);
  sig.merge(signature_of(t));
  for (const auto& av : avoid) sig.merge(signature_of(av.query));
  std::vector<std::string> roles(sig.roles.begin(), sig.roles.end());
  std::vector<Concept> compound;
  for (const auto& av : avoid) collect_compound(av.query, compound);
  std::vector<Concept> tbox_concepts;
  for (const auto& ci : t.cis) tbox_concepts.push_back(nnf(Concept::disj(Concept::negation(ci.lhs), ci.rhs)));
  bool merging = !t.functional.empty();
  int m = static_cast<int>(inds.size());

  for (int extra = 0; extra <= opts.max_extra; ++extra) {
    bool found = false;
    partitions(m, [&](const std::vector<int>& block) {
      int blocks = 0;
      for (int b : block) blocks = std::max(blocks, b + 1);
      if (!merging && blocks != m) return true;
      int n = blocks + extra;
      if (n == 0) n = 1;
      if (blocks + extra == 0 && extra == 0 && m == 0) n = 1;
      Encoder enc(n, roles);
      std::vector<std::string> names(static_cast<std::size_t>(n));
      for (int i = m - 1; i >= 0; --i) names[static_cast<std::size_t>(block[static_cast<std::size_t>(i)])] = inds[static_cast<std::size_t>(i)];
      for (int e = blocks; e < n; ++e) names[static_cast<std::size_t>(e)] = "_e" + std::to_string(e - blocks);
      std::map<std::string, int> ind;
      for (int i = 0; i < m; ++i) ind[inds[static_cast<std::size_t>(i)]] = block[static_cast<std::size_t>(i)];
      for (const auto& c : tbox_concepts)
        for (int e = 0; e < n; ++e) enc.unit(enc.pos(c, e));
      for (const auto& ri : t.ris)
        for (int e = 0; e < n; ++e)
          for (int f = 0; f < n; ++f) enc.clause({-enc.role_lit(ri.sub, e, f), enc.role_lit(ri.sup, e, f)});
      for (const auto& r : t.functional)
        for (int e = 0; e < n; ++e)
          for (int f = 0; f < n; ++f)
            for (int g = f + 1; g < n; ++g) enc.clause({-enc.role_lit(r, e, f), -enc.role_lit(r, e, g)});
      for (const auto& c : a.concepts) enc.unit(enc.pos(nnf(c.c), ind.at(c.ind)));
      for (const auto& r : a.roles) enc.unit(enc.role_var(r.role, ind.at(r.a), ind.at(r.b)));
      // Make every compound query concept decodable.
      for (const auto& c : compound)
        for (int e = 0; e < n; ++e) enc.exact(c, e);
      std::size_t refinements = 0;
      while (true) {
        if (enc.solver().solve() != 10) return true;
        Interpretation model = enc.decode(names);
        model.ind = ind;
        Structure match = model.s;
        for (const auto& c : compound) {
          auto ext = extension(model, c);
          for (int e = 0; e < n; ++e)
            if (ext[static_cast<std::size_t>(e)]) match.add_unary(c.text(), e);
        }
        std::optional<std::vector<int>> clause;
        for (const auto& av : avoid) {
          for (const auto& p : av.query.disjuncts) {
            std::map<std::string, int> fixed;
            if (!av.ind.empty()) fixed[p.answer] = ind.at(av.ind);
            auto h = find_hom(p, match, fixed);
            if (!h) continue;
            std::vector<int> cl;
            for (const auto& ca : p.concept_atoms) {
              if (ca.c.is_top()) continue;
              cl.push_back(-enc.exact(ca.c, h->at(ca.var)));
            }
            for (const auto& ra : p.role_atoms) cl.push_back(-enc.role_var(ra.role, h->at(ra.v1), h->at(ra.v2)));
            clause = cl;
            break;
          }
          if (clause) break;
        }
        if (!clause) {
          res.model = std::move(model);
          found = true;
          return false;
        }
        if (++refinements > opts.max_refinements) {
          res.exhausted = false;
          return true;
        }
        enc.clause(*clause);
      }
    });
    if (found) return res;
  }
  return res;
}

}  // namespace omqrw
