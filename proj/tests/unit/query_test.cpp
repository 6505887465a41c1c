#include <gtest/gtest.h>

#include <random>

#include "omqrw/query.hpp"

namespace omqrw {
inline void PrintTo(const CQ& q, std::ostream* os) { *os << render(q); }
inline void PrintTo(const UCQ& q, std::ostream* os) { *os << render(q); }
}  // namespace omqrw

using namespace omqrw;

namespace {

const char* kDiamondA = "q(x) :- A(x), r(x,x1), r(x1,y1), r(x1,y2), r(y1,z), r(y2,z), B1(y1), B2(y2).";
const char* kB2 = "q(x) :- r(x,y1), s(x,y2), t(y2,y1), v(y2,y3).";

CQ random_cq(std::mt19937& rng, int vars, int atoms) {
  CQ q("x");
  auto var = [&] {
    int i = static_cast<int>(rng() % static_cast<unsigned>(vars));
    return i == 0 ? std::string("x") : "y" + std::to_string(i);
  };
  for (int i = 0; i < atoms; ++i) {
    if (rng() % 4 == 0)
      q.add(Concept::atom(rng() % 2 ? "A" : "B"), var());
    else
      q.add(rng() % 2 ? "r" : "s", var(), var());
  }
  return q.normalized();
}

}  // namespace

TEST(Cycles, SelfLoopThroughX) {
  EXPECT_FALSE(find_cycle(parse_cq("q(x) :- r(x,x)."), {"x"}));
  EXPECT_TRUE(is_x_acyclic(parse_cq("q(x) :- r(x,x).")));
}

TEST(Cycles, SelfLoopAwayFromX) {
  auto c = find_cycle(parse_cq("q(x) :- s(x,y), r(y,y)."), {"x"});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->text(), "r(y,y)");
}

TEST(Cycles, InverseReadingIsSameAtom) {
  EXPECT_FALSE(find_cycle(parse_cq("q(x) :- r(x,y), r-(y,x)."), {}));
  EXPECT_TRUE(find_cycle(parse_cq("q(x) :- r(x,y), r(y,x)."), {}));
}

TEST(Cycles, ReferenceQueries) {
  auto c = x_cycle(parse_cq(kDiamondA));
  ASSERT_TRUE(c);
  EXPECT_EQ(c->atoms.size(), 4u);
  EXPECT_TRUE(is_x_acyclic(parse_cq(kB2)));
  EXPECT_TRUE(is_connected(parse_cq(kB2)));
}

TEST(Reach, Accessibility) {
  CQ q = parse_cq("q(x) :- r(y,x), s(y,x).");
  EXPECT_TRUE(is_connected(q));
  EXPECT_EQ(dreach(q), VarSet{"x"});
  EXPECT_FALSE(is_x_accessible(q));
  EXPECT_TRUE(is_x_accessible(parse_cq("q(x) :- r(x,y).")));
  EXPECT_FALSE(is_connected(parse_cq("q(x) :- r(x,y), s(z,z).")));
}

TEST(Restrict, Basics) {
  CQ q = parse_cq("q(x) :- A(x), B(y).");
  EXPECT_EQ(restrict(q, VarSet(q.vars.begin(), q.vars.end())), q);
  EXPECT_EQ(restrict(q, {"x"}), parse_cq("q(x) :- A(x)."));
  EXPECT_EQ(q_con(q), parse_cq("q(x) :- A(x)."));
  EXPECT_THROW(restrict(q, {"y"}), Error);
}

TEST(Contractions, Counts) {
  EXPECT_EQ(contractions(parse_cq("q(x) :- A(x).")).size(), 1u);
  auto two = contractions(parse_cq("q(x) :- r(x,y)."));
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], parse_cq("q(x) :- r(x,y)."));
  EXPECT_EQ(two[1], parse_cq("q(x) :- r(x,x)."));
  EXPECT_EQ(contractions(parse_cq("q(x) :- r(x,y), s(y,z).")).size(), 5u);
}

// Bell numbers from the set-partition recurrence.
TEST(Contractions, MatchBellNumbers) {
  std::vector<std::size_t> bell{1, 1, 2, 5, 15, 52};
  for (int n = 1; n <= 5; ++n) {
    CQ q("x");
    for (int i = 1; i < n; ++i) q.add("r" + std::to_string(i), i == 1 ? "x" : "y" + std::to_string(i - 1), "y" + std::to_string(i));
    EXPECT_EQ(contractions(q).size(), bell[static_cast<std::size_t>(n)]);
  }
}

TEST(QAcyc, Examples) {
  UCQ a = build_q_acyc(UCQ({parse_cq("q(x) :- r(x,x).")}), {});
  EXPECT_EQ(a, UCQ({parse_cq("q(x) :- r(x,x).")}));
  UCQ b = build_q_acyc(UCQ({parse_cq("q(x) :- s(x,y), r(y,y).")}), {});
  EXPECT_EQ(b, UCQ({parse_cq("q(x) :- r(x,x), s(x,x).")}));
  UCQ c = build_q_acyc(UCQ({parse_cq("q(x) :- r(x,y).")}), parse_tbox("role p sub r"));
  EXPECT_NE(std::find(c.disjuncts.begin(), c.disjuncts.end(), parse_cq("q(x) :- p(x,y).")), c.disjuncts.end());
}

TEST(QAcyc, AllOutputsXAcyclic) {
  std::mt19937 rng(3);
  TBox t = parse_tbox("role s sub r\nrole r- sub s");
  for (int i = 0; i < 30; ++i) {
    UCQ q({random_cq(rng, 4, 5)});
    for (const auto& p : build_q_acyc(q, t).disjuncts) EXPECT_TRUE(is_x_acyclic(p)) << render(p);
  }
}

TEST(Hom, Basics) {
  CQ q = parse_cq("q(x) :- r(x,y), s(y,z).");
  EXPECT_TRUE(cq_hom(q, q));
  ABox a = parse_abox("s(a,b)\nr(b,b)");
  EXPECT_TRUE(abox_hom(parse_cq("q(x) :- s(x,y), r(y,y)."), a, "a"));
  EXPECT_FALSE(abox_hom(parse_cq("q(x) :- s(x,y), r(y,y)."), a, "b"));
  auto h = cq_hom(parse_cq("q(x) :- r(x,y), r(y,z)."), parse_cq("q(x) :- r(x,x)."));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->at("y"), "x");
  EXPECT_EQ(h->at("z"), "x");
}

TEST(Hom, Composition) {
  std::mt19937 rng(5);
  int composed = 0;
  for (int i = 0; i < 300; ++i) {
    CQ a = random_cq(rng, 4, 4);
    VarMap f, g;
    for (const auto& v : a.vars) f[v] = v == "x" ? v : (rng() % 2 ? "x" : "w" + v);
    CQ b = rename(a, f);
    b.add("r", "x", "x");
    for (const auto& v : b.vars) g[v] = v == "x" || rng() % 3 ? "x" : v;
    CQ c = rename(b, g);
    c.add("s", "x", "z");
    auto h1 = cq_hom(a, b), h2 = cq_hom(b, c);
    if (!h1 || !h2) continue;
    VarMap m;
    for (const auto& [v, w] : *h1) m[v] = h2->at(w);
    CQ img = rename(a, m);
    Structure s = cq_structure(c);
    for (const auto& r : img.role_atoms) EXPECT_TRUE(s.has_binary(r.role, s.find(r.v1), s.find(r.v2)));
    for (const auto& ca : img.concept_atoms) EXPECT_TRUE(s.has_unary(ca.c.text(), s.find(ca.var)));
    ++composed;
  }
  EXPECT_GT(composed, 10);
}

TEST(Containment, Equivalences) {
  UCQ q({parse_cq(kDiamondA)});
  EXPECT_TRUE(ucq_equivalent(q, q));
  EXPECT_TRUE(ucq_equivalent(UCQ({parse_cq("q(x) :- r(x,y), r(x,z).")}), UCQ({parse_cq("q(x) :- r(x,y).")})));
  EXPECT_FALSE(ucq_equivalent(UCQ({parse_cq("q(x) :- r(x,y).")}), UCQ({parse_cq("q(x) :- r(y,x).")})));
}

TEST(Core, Examples) {
  EXPECT_EQ(core(parse_cq("q(x) :- r(x,x).")), parse_cq("q(x) :- r(x,x)."));
  EXPECT_EQ(render(core(parse_cq("q(x) :- r(x,y), r(x,z)."))), "q(x) :- r(x,y).");
}

TEST(Core, IdempotentAndMinimal) {
  std::mt19937 rng(9);
  for (int i = 0; i < 100; ++i) {
    CQ q = random_cq(rng, 5, 6);
    CQ c = core(q);
    EXPECT_TRUE(cq_maps_to(q, c) && cq_maps_to(c, q)) << render(q);
    EXPECT_EQ(core(c), c);
    // No endomorphism of the core misses a variable.
    for (const auto& v : c.vars) {
      if (v == c.answer) continue;
      VarSet keep(c.vars.begin(), c.vars.end());
      keep.erase(v);
      EXPECT_FALSE(cq_maps_to(c, restrict(c, keep))) << render(c);
    }
  }
}

TEST(Subqueries, Enumeration) {
  CQ q = parse_cq("q(x) :- r(x,y), A(y).");
  auto subs = subqueries(q);
  ASSERT_EQ(subs.size(), 4u);
  EXPECT_EQ(subs.front(), q);
  EXPECT_EQ(subs.back(), CQ("x"));
}

TEST(Subqueries, PreserveXAcyclicity) {
  std::mt19937 rng(13);
  for (int i = 0; i < 100; ++i) {
    CQ q = random_cq(rng, 4, 5);
    if (!is_x_acyclic(q)) continue;
    for (const auto& s : subqueries(q)) EXPECT_TRUE(is_x_acyclic(s));
  }
}

// Dropping atoms can shrink FC(x), so f-acyclicity is not inherited.
TEST(Subqueries, FAcyclicityNotInherited) {
  TBox t = parse_tbox("func(s)");
  CQ q = parse_cq("q(x) :- s(x,y), r(y,y).");
  EXPECT_TRUE(is_f_acyclic(q, t));
  EXPECT_FALSE(is_f_acyclic(parse_cq("q(x) :- r(y,y)."), t));
}

TEST(Functional, Closure) {
  CQ p = parse_cq("q(x) :- s(x,y), r(y,y).");
  EXPECT_EQ(functional_closure(p, {}, "x"), VarSet{"x"});
  EXPECT_EQ(functional_closure(p, parse_tbox("func(s)"), "x"), (VarSet{"x", "y"}));
  EXPECT_EQ(functional_closure(p, parse_tbox("func(r)"), "x"), VarSet{"x"});
  EXPECT_EQ(functional_closure(parse_cq("q(x) :- s(y,x)."), parse_tbox("func(s-)"), "x"), (VarSet{"x", "y"}));
}

TEST(Functional, FAcyclic) {
  CQ p = parse_cq("q(x) :- s(x,y), r(y,y).");
  EXPECT_TRUE(is_f_acyclic(p, parse_tbox("func(s)")));
  EXPECT_TRUE(is_f_acyclic(p, parse_tbox("func(r)")));
  EXPECT_FALSE(is_f_acyclic(p, {}));
  TBox t = parse_tbox("func(s1)\nfunc(s2)");
  EXPECT_FALSE(is_f_acyclic(parse_cq("q(x) :- r(x,y), s1(y,z), s2(y,z)."), t));
  EXPECT_TRUE(is_f_acyclic(parse_cq("q(x) :- r(x,y), s1(y,z), s2(y,z), s1(z,y)."), t));
}

TEST(Functional, Clusters) {
  auto g = clusters(parse_cq("q(x) :- s(x,y), r(y,y)."), parse_tbox("func(r)"));
  EXPECT_EQ(g.nfc, VarSet{"y"});
  ASSERT_EQ(g.clusters.size(), 1u);
  EXPECT_FALSE(g.clusters[0].degenerate);
  auto g2 = clusters(parse_cq("q(x) :- s(x,y)."), {});
  ASSERT_EQ(g2.clusters.size(), 1u);
  EXPECT_TRUE(g2.clusters[0].degenerate);
  auto g3 = clusters(parse_cq("q(x) :- r(x,y), s1(y,z), s2(y,z), s1(z,y)."), parse_tbox("func(s1)\nfunc(s2)"));
  ASSERT_EQ(g3.clusters.size(), 1u);
  EXPECT_EQ(g3.clusters[0].vars, (std::vector<std::string>{"y", "z"}));
  EXPECT_THROW(clusters(parse_cq("q(x) :- s(x,y), r(y,y)."), {}), Error);
}
