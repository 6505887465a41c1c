#include <gtest/gtest.h>

#include "omqrw/harness.hpp"
#include "omqrw/rewriter.hpp"

using namespace omqrw;

namespace {

OMQ omq(const std::string& query, const std::string& sigma = "full", const std::string& tbox = "") {
  return parse_omq("[tbox]\n" + tbox + "\n[sigma]\n" + sigma + "\n[query]\n" + query + "\n");
}

Signature sig(std::set<std::string> concepts, std::set<std::string> roles) {
  Signature s;
  s.concepts = std::move(concepts);
  s.roles = std::move(roles);
  return s;
}

}  // namespace

TEST(Enumerate, SingleRoleOneIndividual) {
  auto all = enumerate_aboxes(sig({}, {"r"}), 1);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].size(), 0u);
  EXPECT_EQ(render(all[1]), render(parse_abox("r(a,a)")));
}

TEST(Enumerate, CountsIsomorphismClasses) {
  // Directed graphs with loops on at most 2 unlabelled vertices: 10.
  EXPECT_EQ(enumerate_aboxes(sig({}, {"r"}), 2).size(), 10u);
  // One unary predicate on 3 unlabelled elements: 4 (by the number of A's).
  EXPECT_EQ(enumerate_aboxes(sig({"A"}, {}), 3).size(), 4u);
}

TEST(Enumerate, NoTwoIsomorphic) {
  auto all = enumerate_aboxes(sig({"A"}, {"r"}), 3);
  std::set<std::string> keys;
  for (const auto& a : all) {
    // Brute-force canonical key over all renamings of a, b, c.
    std::vector<std::string> names{"a", "b", "c"};
    std::string best;
    do {
      ABox b;
      std::map<std::string, std::string> m{{"a", names[0]}, {"b", names[1]}, {"c", names[2]}};
      for (const auto& c : a.concepts) b.add(c.c, m[c.ind]);
      for (const auto& r : a.roles) b.add(r.role, m[r.a], m[r.b]);
      std::string s = render(b.normalized());
      if (best.empty() || s < best) best = s;
    } while (std::next_permutation(names.begin(), names.end()));
    EXPECT_TRUE(keys.insert(best).second) << render(a);
  }
}

TEST(Enumerate, FunctionalAndConsistencyFilters) {
  TBox t = parse_tbox("func(r)");
  for (const auto& a : enumerate_aboxes(sig({}, {"r"}), 3, {&t, nullptr, false})) EXPECT_TRUE(is_functional_abox(a, t));
  TBox bot = parse_tbox("A sub bot");
  for (const auto& a : enumerate_aboxes(sig({"A"}, {"r"}), 2, {nullptr, &bot, false})) EXPECT_TRUE(a.concepts.empty());
}

TEST(Generators, Deterministic) {
  RandomCqParams p;
  EXPECT_EQ(render(gen_random_cq(p, 5)), render(gen_random_cq(p, 5)));
  RandomCqParams one;
  one.vars = 1;
  one.atoms = 0;
  EXPECT_EQ(gen_random_cq(one, 1).atom_count(), 0u);
}

TEST(Generators, ThreeColouringQuery) {
  Graph triangle{3, {{0, 1}, {1, 2}, {0, 2}}};
  EXPECT_EQ(gen_3col_query(triangle).role_atoms.size(), 14u);
}

TEST(Verify, SelfLoopRewritingPasses) {
  OMQ q = omq("q(x) :- r(x,x).");
  auto r = rewrite_alci(q);
  for (auto mode : {VerifyMode::Exhaustive, VerifyMode::Monotone}) {
    auto rep = verify_rewriting(q, r.omq, {3, 2, mode, 0, {}});
    EXPECT_TRUE(rep.pass()) << rep.summary();
    EXPECT_TRUE(rep.complete()) << rep.summary();
  }
}

TEST(Verify, CorruptedRewritingFails) {
  OMQ q = omq("q(x) :- r(y,x), s(y,x).", "r, s");
  auto r = rewrite_alci(q);
  OMQ bad = r.omq;
  // Drop the s-step.
  bad.query = IQ{parse_concept("(@p0 implies exists r-. @p0)", {true}), "x"};
  for (auto mode : {VerifyMode::Exhaustive, VerifyMode::Monotone}) {
    auto rep = verify_rewriting(q, bad, {3, 2, mode, 0, {}});
    EXPECT_FALSE(rep.pass()) << rep.summary();
    auto good = verify_rewriting(q, r.omq, {3, 2, mode, 0, {}});
    EXPECT_TRUE(good.pass()) << good.summary();
  }
}

TEST(Verify, ModesAgreeOnRandomMutations) {
  // Exhaustive and monotone verification find discrepancies on the same
  // pairs.
  std::vector<std::string> candidates{"(@p0 implies exists r. @p0)", "(@p0 implies exists r-. @p0)",
                                      "(@p0 implies exists r. exists r. @p0)", "exists r. top",
                                      "(@p0 implies exists r. exists r-. @p0)", "forall r. bot"};
  for (const auto& qs : {"q(x) :- r(x,x).", "q(x) :- r(x,y), r(y,x).", "q(x) :- r(x,y)."}) {
    OMQ q = omq(qs, "r");
    for (const auto& c : candidates) {
      OMQ qp = q;
      qp.query = IQ{parse_concept(c, {true}), "x"};
      auto e = verify_rewriting(q, qp, {2, 2, VerifyMode::Exhaustive, 0, {}});
      auto m = verify_rewriting(q, qp, {2, 2, VerifyMode::Monotone, 0, {}});
      EXPECT_EQ(e.pass(), m.pass()) << qs << " vs " << c;
    }
  }
}

TEST(Verify, FunctionalModesAgree) {
  OMQ q = omq("q(x) :- s(x,y), r(y,y).", "r, s", "func(s)");
  auto r = rewrite_functional(q);
  auto e = verify_rewriting(q, r.omq, {2, 2, VerifyMode::Exhaustive, 0, {}});
  auto m = verify_rewriting(q, r.omq, {2, 2, VerifyMode::Monotone, 0, {}});
  EXPECT_TRUE(e.pass()) << e.summary();
  EXPECT_TRUE(m.pass()) << m.summary();
}

TEST(Containment, Bounded) {
  OMQ q2 = omq("q(x) :- s(x,y), r(y,y).", "r, s");
  EXPECT_EQ(omq_contained_bounded(q2, q2, 2, 1).answer, Answer::Yes);
  OMQ acyc = q2;
  acyc.query = q_con(build_q_acyc(q2.ucq(), TBox{}));
  auto v = omq_contained_bounded(q2, acyc, 2, 1);
  ASSERT_EQ(v.answer, Answer::No);
  ASSERT_TRUE(v.counterexample);
  EXPECT_EQ(v.counterexample->individuals().size(), 2u);
  EXPECT_EQ(omq_contained_bounded(acyc, q2, 2, 1).answer, Answer::Yes);
}

TEST(CertainAnswers, TBoxEntailsCyclicQuery) {
  OMQ q = omq("q(x) :- A(x), r(x,x1), r(x1,y1), r(x1,y2), r(y1,z), r(y2,z), B1(y1), B2(y2).", "full",
              "A sub exists r. exists r. (B1 and B2 and exists r. top)");
  EXPECT_EQ(ucq_certain_answer_bounded(q, parse_abox("A(a)"), "a", 3).answer, Answer::Yes);
  auto no = ucq_certain_answer_bounded(q, parse_abox("B1(a)"), "a", 3);
  EXPECT_EQ(no.answer, Answer::No);
  ASSERT_TRUE(no.countermodel);
}
