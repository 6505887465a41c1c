#include "omqrw/harness.hpp"

#include <algorithm>
#include <functional>
#include <chrono>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "omqrw/query.hpp"

namespace omqrw {

// ------------------------------------------------------------------ facts

FactSpace::FactSpace(const Signature& sig, int n, bool negated)
    : concepts_(sig.concepts.begin(), sig.concepts.end()),
      roles_(sig.roles.begin(), sig.roles.end()),
      n_(n),
      negated_(negated) {
  for (int c = 0; c < static_cast<int>(concepts_.size()); ++c)
    for (int i = 0; i < n; ++i) {
      facts_.push_back({0, c, i, i});
      if (negated) facts_.push_back({1, c, i, i});
    }
  for (int r = 0; r < static_cast<int>(roles_.size()); ++r)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) facts_.push_back({2, r, i, j});
  if (facts_.size() > 64)
    throw Error(ErrorKind::ResourceLimit,
                "fact space has " + std::to_string(facts_.size()) + " facts, at most 64 are supported");
}

std::string FactSpace::individual_name(int i) {
  if (i < 26) return std::string(1, static_cast<char>('a' + i));
  return "i" + std::to_string(i);
}

int FactSpace::concept_fact(const std::string& c, int i, bool negated) const {
  auto it = std::lower_bound(concepts_.begin(), concepts_.end(), c);
  if (it == concepts_.end() || *it != c) return -1;
  int idx = static_cast<int>(it - concepts_.begin());
  int per = negated_ ? 2 : 1;
  return (idx * n_ + i) * per + (negated ? 1 : 0);
}

int FactSpace::role_fact(const std::string& r, int i, int j) const {
  auto it = std::lower_bound(roles_.begin(), roles_.end(), r);
  if (it == roles_.end() || *it != r) return -1;
  int base = static_cast<int>(concepts_.size()) * n_ * (negated_ ? 2 : 1);
  return base + (static_cast<int>(it - roles_.begin()) * n_ + i) * n_ + j;
}

ABox FactSpace::to_abox(std::uint64_t mask) const {
  ABox a;
  for (std::size_t f = 0; f < facts_.size(); ++f) {
    if (!(mask >> f & 1)) continue;
    const Fact& x = facts_[f];
    if (x.kind == 2) {
      a.add(roles_[static_cast<std::size_t>(x.sym)], individual_name(x.a), individual_name(x.b));
    } else {
      Concept c = Concept::atom(concepts_[static_cast<std::size_t>(x.sym)]);
      a.add(x.kind == 1 ? Concept::negation(c) : c, individual_name(x.a));
    }
  }
  return a;
}

std::uint32_t FactSpace::mentioned(std::uint64_t mask) const {
  std::uint32_t out = 0;
  for (std::size_t f = 0; f < facts_.size(); ++f)
    if (mask >> f & 1) out |= (1u << facts_[f].a) | (1u << facts_[f].b);
  return out;
}

const std::vector<std::vector<std::vector<std::uint64_t>>>& FactSpace::tables(int fixed) const {
  if (perm_tables_.size() <= static_cast<std::size_t>(fixed)) perm_tables_.resize(static_cast<std::size_t>(fixed) + 1);
  auto& out = perm_tables_[static_cast<std::size_t>(fixed)];
  if (!out.empty()) return out;
  std::vector<int> perm(static_cast<std::size_t>(n_));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t bytes = (facts_.size() + 7) / 8;
  do {
    std::vector<int> image(facts_.size());
    for (std::size_t f = 0; f < facts_.size(); ++f) {
      Fact x = facts_[f];
      int a = perm[static_cast<std::size_t>(x.a)], b = perm[static_cast<std::size_t>(x.b)];
      image[f] = x.kind == 2 ? role_fact(roles_[static_cast<std::size_t>(x.sym)], a, b)
                             : concept_fact(concepts_[static_cast<std::size_t>(x.sym)], a, x.kind == 1);
    }
    std::vector<std::vector<std::uint64_t>> t(bytes, std::vector<std::uint64_t>(256, 0));
    for (std::size_t by = 0; by < bytes; ++by)
      for (int v = 0; v < 256; ++v)
        for (int bit = 0; bit < 8; ++bit) {
          std::size_t f = by * 8 + static_cast<std::size_t>(bit);
          if (f < facts_.size() && (v >> bit & 1)) t[by][static_cast<std::size_t>(v)] |= std::uint64_t(1) << image[f];
        }
    out.push_back(std::move(t));
  } while (std::next_permutation(perm.begin() + fixed, perm.end()));
  return out;
}

std::uint64_t FactSpace::canonical(std::uint64_t mask, int fixed) const {
  const auto& ts = tables(std::min(fixed, n_));
  std::uint64_t best = mask;
  for (const auto& t : ts) {
    std::uint64_t img = 0;
    for (std::size_t by = 0; by < t.size(); ++by) img |= t[by][(mask >> (8 * by)) & 0xff];
    best = std::min(best, img);
  }
  return best;
}

std::vector<std::uint64_t> FactSpace::conflicts(const TBox& t) const {
  std::vector<std::uint64_t> out;
  for (const auto& f : t.functional) {
    if (!std::binary_search(roles_.begin(), roles_.end(), f.name)) continue;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b)
        for (int c = b + 1; c < n_; ++c) {
          int x = f.inverse ? role_fact(f.name, b, a) : role_fact(f.name, a, b);
          int y = f.inverse ? role_fact(f.name, c, a) : role_fact(f.name, a, c);
          out.push_back((std::uint64_t(1) << x) | (std::uint64_t(1) << y));
        }
  }
  return out;
}

namespace {

bool hits_none(std::uint64_t mask, const std::vector<std::uint64_t>& edges) {
  for (auto e : edges)
    if ((e & mask) == e) return false;
  return true;
}

}  // namespace

void enumerate_aboxes(const Signature& sigma, int max_ind, const EnumOptions& opts,
                      const std::function<bool(const ABox&)>& visit) {
  FactSpace fs(sigma, max_ind, opts.negated);
  if (fs.size() > 40) throw Error(ErrorKind::ResourceLimit, "too many facts for exhaustive enumeration");
  std::vector<std::uint64_t> bad = opts.functional ? fs.conflicts(*opts.functional) : std::vector<std::uint64_t>{};
  if (opts.negated)
    for (const auto& c : sigma.concepts)
      for (int i = 0; i < max_ind; ++i)
        bad.push_back((std::uint64_t(1) << fs.concept_fact(c, i)) | (std::uint64_t(1) << fs.concept_fact(c, i, true)));
  std::uint64_t end = std::uint64_t(1) << fs.size();
  for (std::uint64_t m = 0; m < end; ++m) {
    if (fs.canonical(m) != m) continue;
    if (!hits_none(m, bad)) continue;
    ABox a = fs.to_abox(m);
    if (opts.consistent_with && !consistent(a, *opts.consistent_with)) continue;
    if (!visit(a)) return;
  }
}

std::vector<ABox> enumerate_aboxes(const Signature& sigma, int max_ind, const EnumOptions& opts) {
  std::vector<ABox> out;
  enumerate_aboxes(sigma, max_ind, opts, [&](const ABox& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

// ------------------------------------------------------------ verification

std::string VerificationReport::summary() const {
  std::ostringstream os;
  os << (pass() ? "pass" : "FAIL") << ": " << checked << " cells checked (" << mode << ", max_ind " << max_ind
     << ", max_extra " << max_extra << "), " << discrepancies.size() << " discrepancies, " << unknown << " unknown";
  if (timed_out) os << ", deadline reached";
  os << ", " << elapsed << " s";
  return os.str();
}

namespace {

using Clock = std::chrono::steady_clock;

class Verifier {
 public:
  Verifier(const OMQ& q, const OMQ& qp, const VerifyOptions& opts) : q_(q), qp_(qp), opts_(opts), start_(Clock::now()) {
    rep_.max_ind = opts.max_ind;
    rep_.max_extra = opts.max_extra;
    if (!q.is_iq()) ucq_.emplace(q, opts.max_extra, opts.reasoner);
    if (!qp.is_iq()) ucqp_.emplace(qp, opts.max_extra, opts.reasoner);
  }

  bool expired() {
    if (opts_.deadline <= 0) return false;
    double s = std::chrono::duration<double>(Clock::now() - start_).count();
    if (s > opts_.deadline) rep_.timed_out = true;
    return rep_.timed_out;
  }

  Verdict3 answer_q(const ABox& a, const std::string& ind) {
    return ucq_ ? ucq_->answer(a, ind) : certain_answer(q_, a, ind, opts_.max_extra, opts_.reasoner);
  }
  Verdict3 answer_qp(const ABox& a, const std::string& ind) {
    return ucqp_ ? ucqp_->answer(a, ind) : certain_answer(qp_, a, ind, opts_.max_extra, opts_.reasoner);
  }

  void record(const ABox& a, const std::string& ind, Answer x, Answer y) {
    ++rep_.checked;
    if (x == Answer::Unknown || y == Answer::Unknown) {
      ++rep_.unknown;
      return;
    }
    if (x != y) rep_.discrepancies.push_back({a, ind, x, y});
  }

  void exhaustive() {
    rep_.mode = "exhaustive";
    EnumOptions eo;
    if (!q_.tbox.functional.empty()) eo.functional = &q_.tbox;
    bool check_consistency = !q_.tbox.empty() && !q_.tbox.functionality_only();
    enumerate_aboxes(q_.sigma, opts_.max_ind, eo, [&](const ABox& a) {
      if (check_consistency && !consistent(a, q_.tbox, opts_.reasoner)) return true;
      for (const auto& ind : a.individuals()) record(a, ind, answer_q(a, ind).answer, answer_qp(a, ind).answer);
      return !expired();
    });
  }

  void monotone() {
    rep_.mode = "monotone";
    const UCQ& u = q_.ucq();
    FactSpace fs(q_.sigma, opts_.max_ind);
    std::vector<std::uint64_t> conflicts = fs.conflicts(q_.tbox);
    std::set<std::uint64_t> edge_set;
    for (const auto& p : u.disjuncts) images(fs, p, edge_set);
    std::vector<std::uint64_t> edges(edge_set.begin(), edge_set.end());
    const std::string a0 = FactSpace::individual_name(0);

    // Minimal ABoxes where Q holds at a0.
    std::set<std::uint64_t> seen;
    for (auto e : edges) {
      if (!hits_none(e, conflicts)) continue;
      std::uint64_t c = fs.canonical(e, 1);
      if (!seen.insert(c).second) continue;
      ABox a = fs.to_abox(c);
      record(a, a0, Answer::Yes, answer_qp(a, a0).answer);
      if (expired()) return;
    }

    // Maximal ABoxes where Q fails at a0.
    std::vector<std::uint64_t> all = edges;
    all.insert(all.end(), conflicts.begin(), conflicts.end());
    seen.clear();
    maximal_independent(fs.size(), all, [&](std::uint64_t m) {
      if (!(fs.mentioned(m) & 1u)) return true;
      std::uint64_t c = fs.canonical(m, 1);
      if (!seen.insert(c).second) return true;
      ABox a = fs.to_abox(c);
      Answer y = answer_qp(a, a0).answer;
      if (y == Answer::Yes && !qp_.tbox.empty() && !consistent(a, qp_.tbox, opts_.reasoner)) y = Answer::Unknown;
      record(a, a0, Answer::No, y);
      return !expired();
    });
  }

  VerificationReport finish() {
    rep_.elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
    return std::move(rep_);
  }

 private:
  // Fact sets of all images of p with x at individual 0.
  void images(const FactSpace& fs, const CQ& p, std::set<std::uint64_t>& out) {
    std::vector<std::string> vars;
    for (const auto& v : p.vars)
      if (v != p.answer) vars.push_back(v);
    for (const auto& c : p.concept_atoms)
      if (!c.c.is_top() && (!c.c.is_name() || fs.concept_fact(c.c.name(), 0) < 0)) return;
    for (const auto& r : p.role_atoms)
      if (fs.role_fact(r.role, 0, 0) < 0) return;
    int n = fs.individuals();
    std::vector<int> h(vars.size(), 0);
    std::map<std::string, int> at;
    while (true) {
      at[p.answer] = 0;
      for (std::size_t i = 0; i < vars.size(); ++i) at[vars[i]] = h[i];
      std::uint64_t m = 0;
      for (const auto& c : p.concept_atoms)
        if (!c.c.is_top()) m |= std::uint64_t(1) << fs.concept_fact(c.c.name(), at[c.var]);
      for (const auto& r : p.role_atoms) m |= std::uint64_t(1) << fs.role_fact(r.role, at[r.v1], at[r.v2]);
      out.insert(m);
      std::size_t k = 0;
      while (k < h.size() && ++h[k] == n) h[k++] = 0;
      if (k == h.size()) break;
    }
  }

  // Maximal fact sets containing no edge.
  static void maximal_independent(int facts, const std::vector<std::uint64_t>& edges,
                                  const std::function<bool(std::uint64_t)>& emit) {
    std::vector<std::vector<std::uint64_t>> by_fact(static_cast<std::size_t>(facts));
    std::vector<std::uint64_t> near(static_cast<std::size_t>(facts), 0);
    for (auto e : edges)
      for (int f = 0; f < facts; ++f)
        if (e >> f & 1) {
          by_fact[static_cast<std::size_t>(f)].push_back(e);
          near[static_cast<std::size_t>(f)] |= e;
        }
    // Some edge through f avoids every excluded fact other than f.
    auto blockable = [&](int f, std::uint64_t excluded) {
      std::uint64_t others = excluded & ~(std::uint64_t(1) << f);
      for (auto e : by_fact[static_cast<std::size_t>(f)])
        if (!(e & others)) return true;
      return false;
    };
    bool stop = false;
    std::function<void(int, std::uint64_t, std::uint64_t)> rec = [&](int f, std::uint64_t in, std::uint64_t out) {
      if (stop) return;
      if (f == facts) {
        for (int g = 0; g < facts; ++g) {
          if (!(out >> g & 1)) continue;
          bool blocked = false;
          for (auto e : by_fact[static_cast<std::size_t>(g)])
            if ((e & ~in) == (std::uint64_t(1) << g)) {
              blocked = true;
              break;
            }
          if (!blocked) return;
        }
        if (!emit(in)) stop = true;
        return;
      }
      std::uint64_t bit = std::uint64_t(1) << f;
      bool can_include = true;
      for (auto e : by_fact[static_cast<std::size_t>(f)])
        if ((e & ~(in | bit)) == 0) {
          can_include = false;
          break;
        }
      if (can_include) rec(f + 1, in | bit, out);
      std::uint64_t out2 = out | bit;
      if (!blockable(f, out2)) return;
      std::uint64_t affected = near[static_cast<std::size_t>(f)] & out;
      for (int g = 0; g < facts && affected; ++g)
        if (affected >> g & 1) {
          if (!blockable(g, out2)) return;
          affected &= ~(std::uint64_t(1) << g);
        }
      rec(f + 1, in, out2);
    };
    rec(0, 0, 0);
  }

  const OMQ& q_;
  const OMQ& qp_;
  VerifyOptions opts_;
  Clock::time_point start_;
  std::optional<UcqAnswerer> ucq_;
  std::optional<UcqAnswerer> ucqp_;
  VerificationReport rep_;
};

}  // namespace

VerificationReport verify_rewriting(const OMQ& q, const OMQ& q_prime, const VerifyOptions& opts) {
  Verifier v(q, q_prime, opts);
  VerifyMode mode = opts.mode;
  bool monotone_ok = !q.is_iq() && (q.tbox.empty() || q.tbox.functionality_only());
  if (mode == VerifyMode::Auto) mode = monotone_ok ? VerifyMode::Monotone : VerifyMode::Exhaustive;
  if (mode == VerifyMode::Monotone && !monotone_ok)
    throw Error(ErrorKind::Precondition, "monotone verification needs a UCQ with an empty or functionality-only TBox");
  if (mode == VerifyMode::Monotone)
    v.monotone();
  else
    v.exhaustive();
  return v.finish();
}

Verdict3 omq_contained_bounded(const OMQ& q1, const OMQ& q2, int max_ind, int max_extra, const ReasonerOptions& opts) {
  Verdict3 out;
  out.answer = Answer::Yes;
  std::optional<UcqAnswerer> a1, a2;
  if (!q1.is_iq()) a1.emplace(q1, max_extra, opts);
  if (!q2.is_iq()) a2.emplace(q2, max_extra, opts);
  auto ans = [&](const std::optional<UcqAnswerer>& u, const OMQ& q, const ABox& a, const std::string& i) {
    return u ? u->answer(a, i) : certain_answer(q, a, i, max_extra, opts);
  };
  EnumOptions eo;
  if (!q1.tbox.functional.empty()) eo.functional = &q1.tbox;
  bool check = !q1.tbox.empty() && !q1.tbox.functionality_only();
  std::size_t unknown = 0;
  enumerate_aboxes(q1.sigma, max_ind, eo, [&](const ABox& a) {
    if (check && !consistent(a, q1.tbox, opts)) return true;
    for (const auto& i : a.individuals()) {
      Verdict3 v2 = ans(a2, q2, a, i);
      if (v2.answer == Answer::Yes) continue;
      Verdict3 v1 = ans(a1, q1, a, i);
      if (v1.answer == Answer::No) continue;
      if (v1.answer == Answer::Yes && v2.answer == Answer::No) {
        out.answer = Answer::No;
        out.counterexample = a;
        out.individual = i;
        out.countermodel = v2.countermodel;
        return false;
      }
      ++unknown;
    }
    return true;
  });
  if (out.answer == Answer::Yes && unknown > 0) {
    out.answer = Answer::Unknown;
    out.note = std::to_string(unknown) + " undecided cells";
  }
  if (out.answer == Answer::Yes) out.note = "holds up to " + std::to_string(max_ind) + " individuals";
  return out;
}

// -------------------------------------------------------------- generators

CQ gen_random_cq(const RandomCqParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> vars{"x"};
  for (int i = 1; i < params.vars; ++i) vars.push_back("y" + std::to_string(i));
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  CQ q("x");
  for (int i = 0; i < params.atoms; ++i) {
    bool concept_atom = params.roles.empty() || (!params.concepts.empty() && coin(rng) < params.concept_ratio);
    if (concept_atom) {
      q.add(Concept::atom(params.concepts[pick(params.concepts.size())]), vars[pick(vars.size())]);
    } else {
      const auto& r = params.roles[pick(params.roles.size())];
      const auto& a = vars[pick(vars.size())];
      q.add(r, a, vars[pick(vars.size())]);
    }
  }
  return q.normalized();
}

TBox gen_random_tbox(const RandomTBoxParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto role = [&] {
    return Role::named(params.roles[pick(params.roles.size())], params.inverse && coin(rng) < 0.3);
  };
  std::function<Concept(int)> concept_of = [&](int depth) -> Concept {
    int kinds = depth == 0 ? 3 : 8;
    switch (pick(static_cast<std::size_t>(kinds))) {
      case 0:
      case 1:
        return Concept::atom(params.concepts[pick(params.concepts.size())]);
      case 2:
        return coin(rng) < 0.5 ? Concept::negation(Concept::atom(params.concepts[pick(params.concepts.size())]))
                               : (coin(rng) < 0.5 ? Concept::top() : Concept::bottom());
      case 3:
        return Concept::conj(concept_of(depth - 1), concept_of(depth - 1));
      case 4:
        return Concept::disj(concept_of(depth - 1), concept_of(depth - 1));
      case 5:
        return Concept::negation(concept_of(depth - 1));
      case 6:
        return Concept::exists(role(), concept_of(depth - 1));
      default:
        return Concept::forall(role(), concept_of(depth - 1));
    }
  };
  TBox t;
  int n = 1 + static_cast<int>(pick(static_cast<std::size_t>(std::max(params.max_axioms, 1))));
  for (int i = 0; i < n; ++i) {
    double u = coin(rng);
    if (u < params.func_ratio && !params.roles.empty()) {
      t.functional.push_back(role());
    } else if (u < params.func_ratio + params.ri_ratio && !params.roles.empty()) {
      t.ris.push_back({role(), role()});
    } else {
      t.cis.push_back({concept_of(params.max_depth), concept_of(params.max_depth)});
    }
  }
  return t;
}

CQ gen_3col_query(const Graph& g) {
  CQ q("x0");
  auto v = [](int i) { return "v" + std::to_string(i); };
  for (int i = 0; i < g.vertices; ++i) q.add_var(v(i));
  for (const auto& [a, b] : g.edges) {
    q.add("r", v(a), v(b));
    q.add("r", v(b), v(a));
  }
  if (g.vertices > 0) {
    q.add("r", "x0", v(0));
    q.add("r", v(0), "x0");
  }
  const char* clique[] = {"x0", "x1", "x2"};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) q.add("r", clique[i], clique[j]);
  return q.normalized();
}

}  // namespace omqrw
