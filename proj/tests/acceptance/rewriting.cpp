#include <algorithm>
#include <chrono>
#include <cstdio>

#include "criteria.hpp"
#include "omqrw/harness.hpp"
#include "omqrw/rewriter.hpp"

using namespace omqrw;

namespace acceptance {

namespace {

OMQ omq(const std::string& query, const std::string& sigma = "full", const std::string& tbox = "") {
  return parse_omq("[tbox]\n" + tbox + "\n[sigma]\n" + sigma + "\n[query]\n" + query + "\n");
}

// Structural equality after canonicalisation, for some bijection between the
// fresh names and `names`.
bool same_modulo_fresh(const std::vector<Concept>& actual, const std::vector<Concept>& expected,
                       const std::set<std::string>& fresh, std::vector<std::string> names) {
  std::vector<std::string> f(fresh.begin(), fresh.end());
  if (f.size() != names.size()) return false;
  std::sort(names.begin(), names.end());
  auto norm = [](std::vector<Concept> cs) {
    std::vector<std::string> out;
    for (auto& c : cs) out.push_back(canonical(c).text());
    std::sort(out.begin(), out.end());
    return out;
  };
  auto want = norm(expected);
  do {
    std::vector<Concept> renamed;
    for (auto c : actual) {
      for (std::size_t i = 0; i < f.size(); ++i) c = substitute(c, Concept::atom(f[i]), Concept::atom("~" + names[i]));
      for (std::size_t i = 0; i < f.size(); ++i)
        c = substitute(c, Concept::atom("~" + names[i]), Concept::atom(names[i]));
      renamed.push_back(c);
    }
    if (norm(renamed) == want) return true;
  } while (std::next_permutation(names.begin(), names.end()));
  return false;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct Case {
  std::string name;
  OMQ q;
  RewriteResult r;
};

const char* kSelfLoop = "q(x) :- r(x,x).";
const char* kCommonPredecessor = "q(x) :- r(y,x), s(y,x).";
const char* kBranching = "q(x) :- r(x,y1), s(x,y2), t(y2,y1), v(y2,y3).";

}  // namespace

Outcome rewriting_shapes() {
  Outcome o;
  o.pass = true;
  std::string slow;
  auto timed = [&](const std::string& name, auto&& f) {
    auto t = std::chrono::steady_clock::now();
    bool ok = f();
    double s = seconds_since(t);
    if (!ok) {
      o.pass = false;
      o.detail += name + " mismatch; ";
    }
    if (s >= 1.0) {
      o.pass = false;
      slow += name + " ";
    }
  };
  timed("self-loop", [] {
    auto r = rewrite_alci(omq(kSelfLoop));
    return same_modulo_fresh({r.omq.iq().c}, {parse_concept("(P implies exists r. P)")}, r.fresh, {"P"});
  });
  timed("branching", [] {
    auto r = rewrite_alci(omq(kBranching, "r, s, t, v"));
    return same_modulo_fresh({r.omq.iq().c},
                             {parse_concept("(P implies exists r. exists t-. (exists v. top and exists s-. P))")},
                             r.fresh, {"P"});
  });
  timed("common predecessor", [] {
    auto r = rewrite_alci(omq(kCommonPredecessor, "r, s"));
    return same_modulo_fresh({r.omq.iq().c}, {parse_concept("(P implies exists r-. exists s. P)")}, r.fresh, {"P"});
  });
  timed("TBox extension", [] {
    auto r = rewrite_alch_extend_tbox(omq(kCommonPredecessor, "r, s"));
    if (r.omq.tbox.cis.size() != 1 || !r.omq.tbox.ris.empty() || !r.omq.tbox.functional.empty()) return false;
    const auto& ci = r.omq.tbox.cis[0];
    return same_modulo_fresh({ci.lhs, ci.rhs, r.omq.iq().c},
                             {parse_concept("exists s. P"), parse_concept("forall r. Q"), parse_concept("(P implies Q)")},
                             r.fresh, {"P", "Q"});
  });
  if (!slow.empty()) o.detail += "over 1 s: " + slow;
  if (o.pass) o.detail = "4 rewritings match the expected concepts, each under 1 s";
  return o;
}

Outcome rewriting_equivalence() {
  std::vector<Case> cases;
  auto add = [&](const std::string& name, OMQ q, RewriteResult (*f)(const OMQ&)) {
    RewriteResult r = f(q);
    cases.push_back({name, q, r});
  };
  add("self-loop/alci", omq(kSelfLoop), rewrite_alci);
  add("branching/alci", omq(kBranching, "r, s, t, v"), rewrite_alci);
  add("common predecessor/alci", omq(kCommonPredecessor, "r, s"), rewrite_alci);
  add("common predecessor/TBox extension", omq(kCommonPredecessor, "r, s"), rewrite_alch_extend_tbox);
  add("branching/alc", omq(kBranching, "r, s, t, v"), rewrite_alc);
  Outcome o;
  o.pass = true;
  auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  for (const auto& c : cases) {
    VerifyOptions vo;
    vo.max_ind = 3;
    auto t = std::chrono::steady_clock::now();
    VerificationReport r = verify_rewriting(c.q, c.r.omq, vo);
    checked += r.checked;
    if (verbose) std::fprintf(stderr, "  %s: %s (%.2f s)\n", c.name.c_str(), r.summary().c_str(), seconds_since(t));
    if (!r.pass() || !r.complete()) {
      o.pass = false;
      o.detail += c.name + ": " + r.summary() + "; ";
    }
  }
  double total = seconds_since(start);
  if (total >= 300) o.pass = false;
  if (o.pass)
    o.detail = std::to_string(cases.size()) + " rewritings, " + std::to_string(checked) +
               " cells up to 3 individuals, 0 discrepancies, 0 unknown";
  return o;
}

Outcome functional_suite() {
  std::vector<Case> cases;
  auto add = [&](const std::string& name, OMQ q) { cases.push_back({name, q, rewrite_functional(q)}); };
  add("successor loop, func(s)", omq("q(x) :- s(x,y), r(y,y).", "full", "func(s)"));
  add("successor loop, func(r)", omq("q(x) :- s(x,y), r(y,y).", "full", "func(r)"));
  add("functional diamond with back edge",
      omq("q(x) :- r(x,y), s1(y,z), s2(y,z), s1(z,y).", "full", "func(s1)\nfunc(s2)"));
  Outcome o;
  o.pass = true;
  auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  for (const auto& c : cases) {
    VerifyOptions vo;
    vo.max_ind = 4;
    auto t = std::chrono::steady_clock::now();
    VerificationReport r = verify_rewriting(c.q, c.r.omq, vo);
    checked += r.checked;
    if (verbose) std::fprintf(stderr, "  %s: %s (%.2f s)\n", c.name.c_str(), r.summary().c_str(), seconds_since(t));
    if (!r.pass() || !r.complete()) {
      o.pass = false;
      o.detail += c.name + ": " + r.summary() + "; ";
    }
  }
  if (seconds_since(start) >= 600) o.pass = false;
  if (o.pass)
    o.detail = std::to_string(cases.size()) + " rewritings, " + std::to_string(checked) +
               " functional cells up to 4 individuals, 0 discrepancies";
  return o;
}

}  // namespace acceptance
