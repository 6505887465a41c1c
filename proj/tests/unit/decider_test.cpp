#include <gtest/gtest.h>

#include "omqrw/decider.hpp"

using namespace omqrw;

namespace {

OMQ omq(const std::string& query, const std::string& sigma = "full", const std::string& tbox = "") {
  return parse_omq("[tbox]\n" + tbox + "\n[sigma]\n" + sigma + "\n[query]\n" + query + "\n");
}

const char* kDiamondA = "q(x) :- A(x), r(x,x1), r(x1,y1), r(x1,y2), r(y1,z), r(y2,z), B1(y1), B2(y2).";
const char* kDiamond = "q(x) :- r(x,x1), r(x1,y1), r(x1,y2), r(y1,z), r(y2,z), B1(y1), B2(y2).";
const char* kDiamondTBox = "A sub exists r. exists r. (B1 and B2 and exists r. top)";

Dialect dl(const char* tag) { return Dialect::parse(tag); }

}  // namespace

TEST(EmptyTBox, Examples) {
  EXPECT_EQ(decide_empty_tbox(parse_ucq("q(x) :- r(x,x)."), dl("alc")).verdict, Verdict::Rewritable);
  auto q2 = decide_empty_tbox(parse_ucq("q(x) :- s(x,y), r(y,y)."), dl("alci"));
  EXPECT_EQ(q2.verdict, Verdict::NotRewritable);
  ASSERT_TRUE(q2.cycle);
  EXPECT_EQ(q2.cycle->atoms.size(), 1u);
  UCQ e12 = parse_ucq("q(x) :- r(y,x), s(y,x).");
  EXPECT_EQ(decide_empty_tbox(e12, dl("alci")).verdict, Verdict::Rewritable);
  EXPECT_EQ(decide_empty_tbox(e12, dl("alc")).verdict, Verdict::NotRewritable);
  EXPECT_EQ(decide_empty_tbox(e12, dl("alc+u")).verdict, Verdict::Rewritable);
  // Redundant cycle collapses in the core.
  EXPECT_EQ(decide_empty_tbox(parse_ucq("q(x) :- r(x,y), r(y,z), r(z,y), r(x,w), r(w,w)."), dl("alc")).verdict,
            Verdict::NotRewritable);
  EXPECT_EQ(decide_empty_tbox(parse_ucq("q(x) :- r(x,y), r(y,z), r(x,x)."), dl("alc")).verdict,
            Verdict::Rewritable);
}

TEST(Functional, Examples) {
  auto qs = decide_functional(omq("q(x) :- s(x,y), r(y,y).", "full", "func(s)"));
  EXPECT_EQ(qs.verdict, Verdict::Rewritable) << qs.note;
  auto none = decide_functional(omq("q(x) :- s(x,y), r(y,y)."));
  EXPECT_EQ(none.verdict, Verdict::NotRewritable);
  auto p = decide_functional(omq("q(x) :- r(x,y), s1(y,z), s2(y,z).", "full", "func(s1)\nfunc(s2)"));
  EXPECT_EQ(p.verdict, Verdict::NotRewritable);
  auto pp = decide_functional(omq("q(x) :- r(x,y), s1(y,z), s2(y,z), s1(z,y).", "full", "func(s1)\nfunc(s2)"));
  EXPECT_EQ(pp.verdict, Verdict::Rewritable) << pp.note;
  EXPECT_THROW(decide_functional(omq("q(x) :- r(x,x).", "full", "A sub B")), Error);
}

TEST(QDeco, EmptyTBoxKeepsReachablePart) {
  UCQ d = build_q_deco(omq("q(x) :- r(y,x), s(y,x)."));
  ASSERT_EQ(d.disjuncts.size(), 1u);
  EXPECT_EQ(d.disjuncts[0].vars.size(), 1u);
  UCQ e = build_q_deco(omq("q(x) :- r(y,x).", "full", "A sub exists r. B"));
  for (const auto& p : e.disjuncts) EXPECT_EQ(p.vars.size(), 1u);
  EXPECT_GE(e.disjuncts.size(), 1u);
}

TEST(WithTBox, Examples) {
  auto a = decide_with_tbox(omq(kDiamondA, "full", kDiamondTBox), dl("alc"), 5, 3);
  EXPECT_EQ(a.verdict, Verdict::Rewritable) << a.note;
  auto b = decide_with_tbox(omq(kDiamondA), dl("alci"), 5, 3);
  EXPECT_EQ(b.verdict, Verdict::NotRewritable) << b.note;
  ASSERT_TRUE(b.counterexample);
  auto c = decide_with_tbox(omq(kDiamond, "A", kDiamondTBox), dl("alci"), 5, 3);
  EXPECT_EQ(c.verdict, Verdict::Rewritable) << c.note;
  auto d = decide_with_tbox(omq(kDiamond, "full", kDiamondTBox), dl("alci"), 5, 3);
  EXPECT_EQ(d.verdict, Verdict::NotRewritable) << d.note;
  ASSERT_TRUE(d.counterexample);
  OMQ q14 = omq(kDiamond, "full", kDiamondTBox);
  EXPECT_EQ(ucq_certain_answer_bounded(q14, *d.counterexample, d.individual, 3).answer, Answer::Yes);
  ASSERT_TRUE(d.witness);
  OMQ cmp = q14;
  cmp.query = *d.witness;
  EXPECT_EQ(ucq_certain_answer_bounded(cmp, *d.counterexample, d.individual, 3).answer, Answer::No);
}

TEST(CheckEmpty, Examples) {
  EXPECT_EQ(check_empty(omq("q(x) :- A(x).", "A"), 2, 1).answer, Answer::No);
  OMQ none = omq("q(x) :- A(x).", "A");
  none.sigma = Signature{};
  EXPECT_EQ(check_empty(none, 2, 1).answer, Answer::Yes);
}
