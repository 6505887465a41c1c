#include <gtest/gtest.h>

#include "omqrw/mmsnp.hpp"

using namespace omqrw;
using namespace omqrw::mmsnp;

namespace {

const char* k2Col =
    "pred E/2.\n"
    "so X.\n"
    "rule E(x,y), X(x), X(y) -> false.\n"
    "rule E(x,y) -> X(x) | X(y).\n";

const char* kMonoTriangle =
    "pred E/2.\n"
    "so C.\n"
    "rule E(x,y), E(y,z), E(z,x), C(x), C(y), C(z) -> false.\n"
    "rule E(x,y), E(y,z), E(z,x) -> C(x) | C(y) | C(z).\n";

Instance clique(int n) {
  Instance i;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) i.add("E", {"v" + std::to_string(a), "v" + std::to_string(b)});
  return i;
}

}  // namespace

TEST(Mmsnp, ParseRenderRoundTrip) {
  Sentence s = parse_sentence(k2Col);
  EXPECT_EQ(s.rules.size(), 2u);
  Sentence t = parse_sentence(render(s));
  EXPECT_EQ(s.rules, t.rules);
  EXPECT_EQ(s.schema, t.schema);
  Instance i = parse_instance("E(a,b). N. dom c.");
  EXPECT_EQ(i.size(), 3);
  Instance j = parse_instance(render(i));
  EXPECT_EQ(j.fact_count(), i.fact_count());
  EXPECT_EQ(j.size(), 3);
}

TEST(Mmsnp, ParseErrors) {
  EXPECT_THROW(parse_sentence("pred E/2. rule E(x) -> false."), Error);
  EXPECT_THROW(parse_sentence("pred E/2. rule E(x,y) -> E(x,y)."), Error);
  EXPECT_THROW(parse_sentence("pred E/2. rule F(x,y) -> false."), Error);
  EXPECT_THROW(parse_instance("E(a,"), Error);
}

TEST(Mmsnp, EvalTwoColouring) {
  Sentence s = parse_sentence(k2Col);
  EXPECT_TRUE(eval(s, parse_instance("E(a,b).")));
  EXPECT_FALSE(eval(s, parse_instance("E(a,b). E(b,c). E(c,a).")));
  EXPECT_TRUE(eval(s, parse_instance("E(a,b). E(b,c). E(c,d). E(d,a).")));
  EXPECT_FALSE(eval(s, parse_instance("E(a,a).")));
}

TEST(Mmsnp, EvalMonochromaticTriangle) {
  Sentence s = parse_sentence(kMonoTriangle);
  EXPECT_TRUE(eval(s, clique(3)));
  EXPECT_FALSE(eval(s, clique(6)));
}

TEST(Mmsnp, NullaryRules) {
  Sentence s = parse_sentence("pred N/0, E/2. so X. rule N -> false.");
  EXPECT_TRUE(eval(s, parse_instance("E(a,b).")));
  EXPECT_FALSE(eval(s, parse_instance("N. E(a,b).")));
}

TEST(Mmsnp, IsomorphismInvariance) {
  Sentence s = parse_sentence(k2Col);
  EXPECT_EQ(eval(s, parse_instance("E(a,b). E(b,c). E(c,a).")), eval(s, parse_instance("E(q,p). E(r,q). E(p,r).")));
}

TEST(Mmsnp, ColouredRuleCount) {
  Sentence s = parse_sentence("pred E/2, T/3, N/0. so X. rule E(x,y), X(x) -> false. rule N, T(x,y,z) -> X(z).");
  Sentence c = build_phi_colored(s, {}, {"N"});
  // totality, disjointness, propagation 2 * sum arity^2, guarded copies
  EXPECT_EQ(c.rules.size(), 2u + 2u * (4u + 9u) + 3u);
  EXPECT_EQ(c.so.size(), 3u);
}

TEST(Mmsnp, AcyclicBodies) {
  Sentence s = parse_sentence(kMonoTriangle);
  Sentence a = build_phi_acyc(s);
  for (const auto& r : a.rules) EXPECT_TRUE(body_acyclic(r, s));
  // Identifying all three variables gives a loop, which is cyclic.
  EXPECT_TRUE(a.rules.empty());
  Sentence p = parse_sentence("pred E/2. so X. rule E(x,y), E(y,z), X(x) -> X(z).");
  // Only the identity partition keeps the path shape.
  EXPECT_EQ(build_phi_acyc(p).rules.size(), 1u);
}

TEST(Mmsnp, DisjointUnionCounterexample) {
  Sentence s = parse_sentence("pred U/1, V/1. rule U(x), V(y) -> false.");
  auto r = check_du_preservation(s);
  EXPECT_EQ(r.verdict.answer, Answer::No);
  ASSERT_TRUE(r.certificate);
  EXPECT_LE(r.certificate->instance.size(), 2);
  EXPECT_FALSE(eval(s, r.certificate->instance));
}

TEST(Mmsnp, CspChecks) {
  Sentence tri = parse_sentence(kMonoTriangle);
  auto r = check_csp_definable(tri);
  EXPECT_EQ(r.verdict.answer, Answer::No);
  ASSERT_TRUE(r.certificate);
  EXPECT_LE(r.certificate->instance.size(), 6);
  EXPECT_FALSE(eval(tri, r.certificate->instance));
  EXPECT_TRUE(eval(build_phi_acyc(tri), r.certificate->instance));

  auto c = check_csp_definable(parse_sentence(k2Col));
  EXPECT_EQ(c.verdict.answer, Answer::Unknown);
  EXPECT_NE(c.verdict.note.find("holds up to bound 5"), std::string::npos) << c.verdict.note;
}
