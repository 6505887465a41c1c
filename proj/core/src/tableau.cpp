#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <unordered_map>

#include "omqrw/reasoner.hpp"

namespace omqrw {

namespace {

using Mask = std::uint64_t;

constexpr Mask kEven = 0x5555555555555555ULL;

Mask inv_mask(Mask m) { return ((m & kEven) << 1) | ((m >> 1) & kEven); }

struct Roles {
  std::map<std::string, int> idx;
  std::vector<std::string> names;
  std::vector<Mask> sup;  // per literal: all literals it is included in
  Mask functional = 0;

  int lit(const Role& r) const { return 2 * idx.at(r.name) + (r.inverse ? 1 : 0); }

  void add(const std::string& n) {
    if (idx.count(n)) return;
    if (names.size() >= 32) throw Error(ErrorKind::Unsupported, "more than 32 role names");
    idx[n] = static_cast<int>(names.size());
    names.push_back(n);
  }

  void close(const TBox& t) {
    sup.assign(names.size() * 2, 0);
    for (std::size_t i = 0; i < names.size(); ++i)
      for (int inv = 0; inv < 2; ++inv) {
        Role r = Role::named(names[i], inv == 1);
        Mask m = 0;
        for (std::size_t j = 0; j < names.size(); ++j)
          for (int inv2 = 0; inv2 < 2; ++inv2)
            if (role_entails(t, r, Role::named(names[j], inv2 == 1))) m |= Mask(1) << (2 * j + static_cast<std::size_t>(inv2));
        sup[2 * i + static_cast<std::size_t>(inv)] = m;
      }
    for (const auto& f : t.functional) functional |= Mask(1) << lit(f);
  }
};

struct Store {
  enum K { Top, Bot, Name, NegName, And, Or, Ex, All };
  struct N {
    K k;
    int a = -1;
    int b = -1;
    int role = -1;  // literal; -1 for u
    int name = -1;
  };
  std::vector<N> nodes;
  std::unordered_map<std::string, int> by_text;
  std::map<std::string, int> name_idx;
  std::vector<std::string> names;
  std::vector<int> pos, neg;  // concept id per name, -1 when absent

  int name_id(const std::string& n) {
    auto it = name_idx.find(n);
    if (it != name_idx.end()) return it->second;
    int i = static_cast<int>(names.size());
    name_idx[n] = i;
    names.push_back(n);
    pos.push_back(-1);
    neg.push_back(-1);
    return i;
  }

  int intern(const Concept& c, Roles& roles) {
    auto it = by_text.find(c.text());
    if (it != by_text.end()) return it->second;
    N n{Top};
    using CK = Concept::Kind;
    switch (c.kind()) {
      case CK::Top: n.k = Top; break;
      case CK::Bottom: n.k = Bot; break;
      case CK::Name:
        n.k = Name;
        n.name = name_id(c.name());
        break;
      case CK::Not:
        n.k = NegName;
        n.name = name_id(c.child().name());
        break;
      case CK::And:
      case CK::Or:
        n.k = c.kind() == CK::And ? And : Or;
        n.a = intern(c.child(0), roles);
        n.b = intern(c.child(1), roles);
        break;
      case CK::Exists:
      case CK::Forall:
        n.k = c.kind() == CK::Exists ? Ex : All;
        if (!c.role().universal) {
          roles.add(c.role().name);
          n.role = 2 * roles.idx.at(c.role().name) + (c.role().inverse ? 1 : 0);
        }
        n.a = intern(c.child(), roles);
        break;
    }
    int id = static_cast<int>(nodes.size());
    nodes.push_back(n);
    by_text[c.text()] = id;
    if (n.k == Name) pos[static_cast<std::size_t>(n.name)] = id;
    if (n.k == NegName) neg[static_cast<std::size_t>(n.name)] = id;
    return id;
  }
};

struct TNode {
  std::vector<Mask> label;
  std::vector<int> order;
  std::vector<std::pair<int, Mask>> nbrs;
  int parent = -1;
  bool root = false;
  bool pruned = false;
};

struct State {
  std::vector<TNode> nodes;
  std::vector<char> in_global;
  std::vector<int> global;
  std::vector<int> forward;  // merge target, -1 if alive
  std::vector<std::pair<int, int>> work;
  bool clash = false;
};

struct Compiled {
  Roles roles;
  Store store;
  std::vector<std::vector<int>> unfold;
  std::vector<int> globals;
  std::size_t words = 1;

  void compile_tbox(const TBox& t, const Signature& extra) {
    for (const auto& r : t.ris) {
      roles.add(r.sub.name);
      roles.add(r.sup.name);
    }
    for (const auto& f : t.functional) roles.add(f.name);
    for (const auto& r : extra.roles) roles.add(r);
    std::vector<std::pair<int, int>> absorbed;  // (name concept id, rhs id)
    for (const auto& ci : t.cis) {
      Concept lhs = canonical(ci.lhs);
      if (lhs.is_bottom()) continue;
      Concept rhs = ci.rhs;
      // A ⊓ R ⊑ D absorbs into A ⊑ ¬R ⊔ D.
      if (lhs.kind() == Concept::Kind::And) {
        for (int k = 0; k < 2; ++k)
          if (lhs.child(k).is_name()) {
            rhs = Concept::disj(Concept::negation(lhs.child(1 - k)), rhs);
            lhs = lhs.child(k);
            break;
          }
      }
      if (lhs.is_name()) {
        int a = store.intern(lhs, roles);
        int d = store.intern(nnf(rhs), roles);
        absorbed.push_back({a, d});
      } else {
        globals.push_back(store.intern(nnf(Concept::disj(Concept::negation(lhs), rhs)), roles));
      }
    }
    for (const auto& c : extra.concepts) {
      store.intern(Concept::atom(c), roles);
      store.intern(Concept::negation(Concept::atom(c)), roles);
    }
    unfold.assign(store.nodes.size(), {});
    for (const auto& [a, d] : absorbed) unfold[static_cast<std::size_t>(a)].push_back(d);
    finish(t);
  }

  void finish(const TBox& t) {
    roles.close(t);
    unfold.resize(store.nodes.size());
    words = (store.nodes.size() + 63) / 64;
    if (words == 0) words = 1;
  }

  // Whether the ABox mentions roles or concepts not compiled yet.
  bool covers(const ABox& a) const {
    for (const auto& r : a.roles)
      if (!roles.idx.count(r.role)) return false;
    for (const auto& c : a.concepts)
      if (!store.by_text.count(nnf(c.c).text())) return false;
    return true;
  }

  void extend(const ABox& a, const TBox& t) {
    for (const auto& r : a.roles) roles.add(r.role);
    for (const auto& c : a.concepts) store.intern(nnf(c.c), roles);
    finish(t);
  }
};

class Tableau {
 public:
  Tableau(const ABox& a, const TBox& t, const ReasonerOptions& opts, std::shared_ptr<const Compiled> base)
      : abox_(a), tbox_(t), opts_(opts), compiled_(prepare(a, t, std::move(base))) {
    compile();
  }

  TableauResult run() {
    TableauResult res;
    State s;
    s.in_global.assign(store_.nodes.size(), 0);
    for (std::size_t i = 0; i < inds_.size(); ++i) new_node(s, -1, true);
    for (const auto& [i, c] : init_concepts_) add(s, i, c);
    for (const auto& [i, j, m] : init_edges_) add_edge(s, i, j, m);
    std::optional<State> done = expand(std::move(s));
    res.nodes = created_;
    if (!done) return res;
    res.consistent = true;
    if (!opts_.build_model) return res;
    res.model = extract(*done);
    res.verified = is_model(*res.model, abox_, tbox_);
    return res;
  }

 private:
  const ABox& abox_;
  const TBox& tbox_;
  ReasonerOptions opts_;
  std::shared_ptr<const Compiled> compiled_;
  const Roles& roles_ = compiled_->roles;
  const Store& store_ = compiled_->store;
  const std::vector<std::vector<int>>& unfold_ = compiled_->unfold;
  const std::vector<int>& globals_ = compiled_->globals;
  std::vector<std::string> inds_;
  std::vector<std::pair<int, int>> init_concepts_;
  std::vector<std::tuple<int, int, Mask>> init_edges_;
  std::size_t words_ = 1;
  std::size_t created_ = 0;

  static std::shared_ptr<const Compiled> prepare(const ABox& a, const TBox& t, std::shared_ptr<const Compiled> base) {
    if (!base) {
      auto c = std::make_shared<Compiled>();
      c->compile_tbox(t, {});
      c->extend(a, t);
      return c;
    }
    if (base->covers(a)) return base;
    auto c = std::make_shared<Compiled>(*base);
    c->extend(a, t);
    return c;
  }

  void compile() {
    std::map<std::string, int> ind_idx;
    for (const auto& i : abox_.individuals()) {
      ind_idx[i] = static_cast<int>(inds_.size());
      inds_.push_back(i);
    }
    for (const auto& c : abox_.concepts)
      init_concepts_.push_back({ind_idx[c.ind], store_.by_text.at(nnf(c.c).text())});
    for (const auto& r : abox_.roles)
      init_edges_.push_back({ind_idx[r.a], ind_idx[r.b], roles_.sup[static_cast<std::size_t>(roles_.lit(Role::named(r.role)))]});
    words_ = compiled_->words;
  }

  bool has(const State& s, int x, int c) const {
    return (s.nodes[static_cast<std::size_t>(x)].label[static_cast<std::size_t>(c) / 64] >> (c % 64)) & 1;
  }

  int new_node(State& s, int parent, bool root) {
    if (++created_ > opts_.node_budget) throw Error(ErrorKind::ResourceLimit, "tableau node budget exhausted");
    TNode n;
    n.label.assign(words_, 0);
    n.parent = parent;
    n.root = root;
    int id = static_cast<int>(s.nodes.size());
    s.nodes.push_back(std::move(n));
    s.forward.push_back(-1);
    for (int g : globals_) add(s, id, g);
    for (int g : s.global) add(s, id, g);
    return id;
  }

  void add(State& s, int x, int c) {
    TNode& n = s.nodes[static_cast<std::size_t>(x)];
    if (n.pruned) return;
    Mask& w = n.label[static_cast<std::size_t>(c) / 64];
    Mask bit = Mask(1) << (c % 64);
    if (w & bit) return;
    w |= bit;
    n.order.push_back(c);
    const auto& cn = store_.nodes[static_cast<std::size_t>(c)];
    if (cn.k == Store::Bot) s.clash = true;
    if (cn.k == Store::Name) {
      int o = store_.neg[static_cast<std::size_t>(cn.name)];
      if (o >= 0 && has(s, x, o)) s.clash = true;
    }
    if (cn.k == Store::NegName) {
      int o = store_.pos[static_cast<std::size_t>(cn.name)];
      if (o >= 0 && has(s, x, o)) s.clash = true;
    }
    s.work.push_back({x, c});
  }

  Mask edge(const State& s, int x, int y) const {
    for (const auto& [n, m] : s.nodes[static_cast<std::size_t>(x)].nbrs)
      if (n == y) return m;
    return 0;
  }

  void set_edge(State& s, int x, int y, Mask m) {
    auto& nb = s.nodes[static_cast<std::size_t>(x)].nbrs;
    for (auto& [n, old] : nb)
      if (n == y) {
        old |= m;
        return;
      }
    nb.push_back({y, m});
  }

  void add_edge(State& s, int x, int y, Mask m) {
    if (x == y) m |= inv_mask(m);
    Mask fresh = m & ~edge(s, x, y);
    if (!fresh) return;
    set_edge(s, x, y, m);
    if (x != y) set_edge(s, y, x, inv_mask(m));
    propagate_forall(s, x, y, fresh);
    if (x != y) propagate_forall(s, y, x, inv_mask(fresh));
  }

  void propagate_forall(State& s, int x, int y, Mask fresh) {
    const auto& order = s.nodes[static_cast<std::size_t>(x)].order;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& cn = store_.nodes[static_cast<std::size_t>(order[k])];
      if (cn.k == Store::All && cn.role >= 0 && ((fresh >> cn.role) & 1)) add(s, y, cn.a);
    }
  }

  void process(State& s, int x, int c) {
    if (s.nodes[static_cast<std::size_t>(x)].pruned) return;
    const auto& cn = store_.nodes[static_cast<std::size_t>(c)];
    switch (cn.k) {
      case Store::And:
        add(s, x, cn.a);
        add(s, x, cn.b);
        break;
      case Store::Name:
        for (int d : unfold_[static_cast<std::size_t>(c)]) add(s, x, d);
        break;
      case Store::All:
        if (cn.role < 0) {
          if (!s.in_global[static_cast<std::size_t>(cn.a)]) {
            s.in_global[static_cast<std::size_t>(cn.a)] = 1;
            s.global.push_back(cn.a);
            for (std::size_t y = 0; y < s.nodes.size(); ++y) add(s, static_cast<int>(y), cn.a);
          }
        } else {
          auto nbrs = s.nodes[static_cast<std::size_t>(x)].nbrs;
          for (const auto& [y, m] : nbrs)
            if ((m >> cn.role) & 1) add(s, y, cn.a);
        }
        break;
      default:
        break;
    }
  }

  void prune(State& s, int x) {
    TNode& n = s.nodes[static_cast<std::size_t>(x)];
    if (n.pruned) return;
    n.pruned = true;
    auto nbrs = n.nbrs;
    n.nbrs.clear();
    for (const auto& [y, m] : nbrs) {
      if (y == x) continue;
      auto& other = s.nodes[static_cast<std::size_t>(y)].nbrs;
      other.erase(std::remove_if(other.begin(), other.end(), [&](const auto& p) { return p.first == x; }), other.end());
      if (!s.nodes[static_cast<std::size_t>(y)].root && s.nodes[static_cast<std::size_t>(y)].parent == x) prune(s, y);
    }
  }

  void merge(State& s, int from, int into) {
    TNode& f = s.nodes[static_cast<std::size_t>(from)];
    auto order = f.order;
    auto nbrs = f.nbrs;
    // Detach first so the tree below `from` can be pruned cleanly.
    for (const auto& [w, m] : nbrs) {
      if (w == from) continue;
      auto& other = s.nodes[static_cast<std::size_t>(w)].nbrs;
      other.erase(std::remove_if(other.begin(), other.end(), [&](const auto& p) { return p.first == from; }),
                  other.end());
    }
    f.nbrs.clear();
    f.pruned = true;
    s.forward[static_cast<std::size_t>(from)] = into;
    for (int c : order) add(s, into, c);
    for (const auto& [w, m] : nbrs) {
      if (w == from) {
        add_edge(s, into, into, m);
      } else if (w != into && !s.nodes[static_cast<std::size_t>(w)].root &&
                 s.nodes[static_cast<std::size_t>(w)].parent == from) {
        prune(s, w);
      } else if (w == into) {
        add_edge(s, into, into, m);
      } else {
        add_edge(s, into, w, m);
      }
    }
  }

  // Returns false when no merge was needed.
  bool merge_step(State& s) {
    if (!roles_.functional) return false;
    for (std::size_t xi = 0; xi < s.nodes.size(); ++xi) {
      const TNode& n = s.nodes[xi];
      if (n.pruned) continue;
      for (std::size_t l = 0; l < roles_.sup.size(); ++l) {
        if (!((roles_.functional >> l) & 1)) continue;
        int first = -1;
        for (const auto& [y, m] : n.nbrs) {
          if (!((m >> l) & 1)) continue;
          if (first < 0) {
            first = y;
            continue;
          }
          int a = first, b = y;
          const TNode& na = s.nodes[static_cast<std::size_t>(a)];
          const TNode& nb = s.nodes[static_cast<std::size_t>(b)];
          int from, into;
          if (na.root && !nb.root) {
            from = b;
            into = a;
          } else if (nb.root && !na.root) {
            from = a;
            into = b;
          } else if (na.root && nb.root) {
            from = std::max(a, b);
            into = std::min(a, b);
          } else if (n.parent == a) {
            from = b;
            into = a;
          } else if (n.parent == b) {
            from = a;
            into = b;
          } else {
            from = std::max(a, b);
            into = std::min(a, b);
          }
          merge(s, from, into);
          return true;
        }
      }
    }
    return false;
  }

  bool saturate(State& s) {
    while (true) {
      while (!s.work.empty() && !s.clash) {
        auto [x, c] = s.work.back();
        s.work.pop_back();
        process(s, x, c);
      }
      if (s.clash) return false;
      if (!merge_step(s)) return true;
    }
  }

  bool directly_blocked(const State& s, int x) const {
    const TNode& n = s.nodes[static_cast<std::size_t>(x)];
    if (n.root || n.parent < 0) return false;
    int xp = n.parent;
    const TNode& np = s.nodes[static_cast<std::size_t>(xp)];
    if (np.root || np.parent < 0) return false;
    Mask ex = edge(s, xp, x);
    for (int y = xp; y >= 0 && !s.nodes[static_cast<std::size_t>(y)].root;) {
      const TNode& ny = s.nodes[static_cast<std::size_t>(y)];
      int yp = ny.parent;
      if (yp < 0 || s.nodes[static_cast<std::size_t>(yp)].root) break;
      if (ny.label == n.label && s.nodes[static_cast<std::size_t>(yp)].label == np.label && edge(s, yp, y) == ex)
        return true;
      y = yp;
    }
    return false;
  }

  int blocker(const State& s, int x) const {
    const TNode& n = s.nodes[static_cast<std::size_t>(x)];
    int xp = n.parent;
    const TNode& np = s.nodes[static_cast<std::size_t>(xp)];
    Mask ex = edge(s, xp, x);
    for (int y = xp;;) {
      const TNode& ny = s.nodes[static_cast<std::size_t>(y)];
      int yp = ny.parent;
      if (ny.label == n.label && s.nodes[static_cast<std::size_t>(yp)].label == np.label && edge(s, yp, y) == ex)
        return y;
      y = yp;
    }
  }

  // 0 = not blocked, 1 = directly, 2 = indirectly.
  std::vector<int> blocking(const State& s) const {
    std::vector<int> b(s.nodes.size(), 0);
    // Parents are created before their children.
    for (std::size_t x = 0; x < s.nodes.size(); ++x) {
      const TNode& n = s.nodes[x];
      if (n.pruned || n.root) continue;
      if (n.parent >= 0 && b[static_cast<std::size_t>(n.parent)] != 0)
        b[x] = 2;
      else if (directly_blocked(s, static_cast<int>(x)))
        b[x] = 1;
    }
    return b;
  }

  // Applies one generating or branching step; returns 0 if complete,
  // 1 if a deterministic step was applied, 2 if it branched (result in out).
  std::optional<State> expand(State s) {
    while (true) {
      if (!saturate(s)) return std::nullopt;
      auto blocked = blocking(s);
      // Disjunctions.
      for (std::size_t x = 0; x < s.nodes.size(); ++x) {
        const TNode& n = s.nodes[x];
        if (n.pruned || blocked[x] == 2) continue;
        for (int c : n.order) {
          const auto& cn = store_.nodes[static_cast<std::size_t>(c)];
          if (cn.k != Store::Or) continue;
          if (has(s, static_cast<int>(x), cn.a) || has(s, static_cast<int>(x), cn.b)) continue;
          State left = s;
          add(left, static_cast<int>(x), cn.a);
          if (auto r = expand(std::move(left))) return r;
          add(s, static_cast<int>(x), cn.b);
          return expand(std::move(s));
        }
      }
      if (!generate(s, blocked)) return s;
    }
  }

  bool generate(State& s, const std::vector<int>& blocked) {
    for (std::size_t xi = 0; xi < s.nodes.size(); ++xi) {
      int x = static_cast<int>(xi);
      if (s.nodes[xi].pruned || blocked[xi] != 0) continue;
      auto order = s.nodes[xi].order;
      for (int c : order) {
        const auto& cn = store_.nodes[static_cast<std::size_t>(c)];
        if (cn.k != Store::Ex) continue;
        if (cn.role < 0) {
          bool found = false;
          for (std::size_t y = 0; y < s.nodes.size() && !found; ++y)
            if (!s.nodes[y].pruned && blocked[y] != 2 && has(s, static_cast<int>(y), cn.a)) found = true;
          if (found) continue;
          int y = new_node(s, -1, true);
          add(s, y, cn.a);
          return true;
        }
        bool sat = false;
        for (const auto& [y, m] : s.nodes[xi].nbrs)
          if (((m >> cn.role) & 1) && has(s, y, cn.a)) sat = true;
        if (sat) continue;
        Mask up = roles_.sup[static_cast<std::size_t>(cn.role)];
        Mask fsup = up & roles_.functional;
        int target = -1;
        if (fsup)
          for (const auto& [y, m] : s.nodes[xi].nbrs)
            if (m & fsup) target = y;
        if (target >= 0) {
          add_edge(s, x, target, up);
          add(s, target, cn.a);
          return true;
        }
        int y = new_node(s, x, false);
        add_edge(s, x, y, up);
        add(s, y, cn.a);
        return true;
      }
    }
    return false;
  }

  int find(const State& s, int x) const {
    while (s.forward[static_cast<std::size_t>(x)] >= 0) x = s.forward[static_cast<std::size_t>(x)];
    return x;
  }

  Interpretation extract(const State& s) const {
    auto blocked = blocking(s);
    Interpretation out;
    std::vector<int> elem(s.nodes.size(), -1);
    for (std::size_t x = 0; x < s.nodes.size(); ++x) {
      if (s.nodes[x].pruned || blocked[x] != 0) continue;
      std::string name = x < inds_.size() ? inds_[x] : "n" + std::to_string(x);
      elem[x] = out.s.add_element(name);
    }
    for (std::size_t x = 0; x < s.nodes.size(); ++x)
      if (!s.nodes[x].pruned && blocked[x] == 1) elem[x] = elem[static_cast<std::size_t>(blocker(s, static_cast<int>(x)))];
    for (std::size_t x = 0; x < s.nodes.size(); ++x) {
      if (s.nodes[x].pruned || blocked[x] != 0) continue;
      int e = elem[x];
      for (int c : s.nodes[x].order) {
        const auto& cn = store_.nodes[static_cast<std::size_t>(c)];
        if (cn.k == Store::Name) out.s.add_unary(store_.names[static_cast<std::size_t>(cn.name)], e);
      }
      for (const auto& [y, m] : s.nodes[x].nbrs) {
        int f = elem[static_cast<std::size_t>(y)];
        if (f < 0) continue;
        for (std::size_t l = 0; l < roles_.sup.size(); ++l) {
          if (!((m >> l) & 1)) continue;
          const std::string& r = roles_.names[l / 2];
          if (l % 2 == 0)
            out.s.add_binary(r, e, f);
          else
            out.s.add_binary(r, f, e);
        }
      }
    }
    for (std::size_t i = 0; i < inds_.size(); ++i) out.ind[inds_[i]] = elem[static_cast<std::size_t>(find(s, static_cast<int>(i)))];
    return out;
  }
};

}  // namespace

TableauResult tableau(const ABox& a, const TBox& t, const ReasonerOptions& opts) {
  return Tableau(a, t, opts, nullptr).run();
}

struct PreparedTBox::Impl {
  std::shared_ptr<const Compiled> compiled;
};

PreparedTBox::PreparedTBox(const TBox& t, const Signature& sig, const ReasonerOptions& opts)
    : tbox_(t), opts_(opts), impl_(std::make_shared<Impl>()) {
  auto c = std::make_shared<Compiled>();
  c->compile_tbox(tbox_, sig);
  impl_->compiled = c;
}

TableauResult PreparedTBox::tableau(const ABox& a) const { return Tableau(a, tbox_, opts_, impl_->compiled).run(); }

bool PreparedTBox::consistent(const ABox& a) const {
  ReasonerOptions o = opts_;
  o.build_model = false;
  return Tableau(a, tbox_, o, impl_->compiled).run().consistent;
}

bool consistent(const ABox& a, const TBox& t, const ReasonerOptions& opts) {
  ReasonerOptions o = opts;
  o.build_model = false;
  return tableau(a, t, o).consistent;
}

bool iq_certain_answer(const TBox& t, const Concept& c, const ABox& a, const std::string& ind,
                       const ReasonerOptions& opts) {
  ABox b = a;
  b.add(Concept::negation(c), ind);
  return !consistent(b, t, opts);
}

std::set<std::string> iq_answers(const TBox& t, const Concept& c, const ABox& a, const ReasonerOptions& opts) {
  std::set<std::string> out;
  for (const auto& i : a.individuals())
    if (iq_certain_answer(t, c, a, i, opts)) out.insert(i);
  return out;
}

}  // namespace omqrw
