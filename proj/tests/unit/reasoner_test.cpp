#include <gtest/gtest.h>

#include <random>

#include "omqrw/reasoner.hpp"

using namespace omqrw;

namespace {

// Every interpretation over n elements with the given concept and role
// names, with every assignment of individuals to elements.
bool brute_force_model(const ABox& a, const TBox& t, int n, const std::vector<std::string>& concepts,
                       const std::vector<std::string>& roles) {
  std::vector<std::string> inds = a.individuals();
  std::size_t bits = static_cast<std::size_t>(n) * concepts.size() + static_cast<std::size_t>(n * n) * roles.size();
  for (std::uint64_t code = 0; code < (std::uint64_t(1) << bits); ++code) {
    Interpretation i;
    for (int e = 0; e < n; ++e) i.s.add_element("e" + std::to_string(e));
    std::size_t b = 0;
    for (const auto& c : concepts)
      for (int e = 0; e < n; ++e, ++b)
        if (code >> b & 1) i.s.add_unary(c, e);
    for (const auto& r : roles)
      for (int e = 0; e < n; ++e)
        for (int f = 0; f < n; ++f, ++b)
          if (code >> b & 1) i.s.add_binary(r, e, f);
    if (!satisfies(i, t)) continue;
    std::vector<int> map(inds.size(), 0);
    while (true) {
      for (std::size_t k = 0; k < inds.size(); ++k) i.ind[inds[k]] = map[k];
      if (satisfies(i, a)) return true;
      std::size_t k = 0;
      while (k < map.size() && ++map[k] == n) map[k++] = 0;
      if (k == map.size()) break;
    }
  }
  return false;
}

Concept random_concept(std::mt19937& rng, int depth) {
  int pick = static_cast<int>(rng() % (depth > 0 ? 7 : 3));
  const char* names[] = {"A", "B"};
  const char* roles[] = {"r", "s"};
  switch (pick) {
    case 0:
    case 1: return Concept::atom(names[rng() % 2]);
    case 2: return Concept::negation(Concept::atom(names[rng() % 2]));
    case 3: return Concept::conj(random_concept(rng, depth - 1), random_concept(rng, depth - 1));
    case 4: return Concept::disj(random_concept(rng, depth - 1), random_concept(rng, depth - 1));
    case 5: return Concept::exists(Role::named(roles[rng() % 2], rng() % 3 == 0), random_concept(rng, depth - 1));
    default: return Concept::forall(Role::named(roles[rng() % 2], rng() % 3 == 0), random_concept(rng, depth - 1));
  }
}

TBox random_tbox(std::mt19937& rng) {
  TBox t;
  int n = static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) {
    int kind = static_cast<int>(rng() % 6);
    if (kind == 0)
      t.functional.push_back(Role::named(rng() % 2 ? "r" : "s", rng() % 3 == 0));
    else if (kind == 1)
      t.ris.push_back({Role::named("r", rng() % 2 == 0), Role::named("s", false)});
    else
      t.cis.push_back({random_concept(rng, 1), random_concept(rng, 2)});
  }
  return t;
}

ABox random_abox(std::mt19937& rng, int inds, int facts) {
  ABox a;
  auto ind = [&] { return std::string(1, static_cast<char>('a' + rng() % static_cast<unsigned>(inds))); };
  for (int i = 0; i < facts; ++i) {
    if (rng() % 2)
      a.add(rng() % 3 ? Concept::atom(rng() % 2 ? "A" : "B") : Concept::negation(Concept::atom("A")), ind());
    else
      a.add(rng() % 2 ? "r" : "s", ind(), ind());
  }
  return a;
}

}  // namespace

TEST(ModelCheck, Extension) {
  Interpretation i;
  int a = i.s.add_element("a"), b = i.s.add_element("b");
  i.s.add_binary("r", a, b);
  i.s.add_unary("P", b);
  auto ext = extension(i, parse_concept("exists r. P"));
  EXPECT_EQ(ext, (std::vector<char>{1, 0}));
  ext = extension(i, parse_concept("exists r-. top"));
  EXPECT_EQ(ext, (std::vector<char>{0, 1}));
  ext = extension(i, parse_concept("forall u. P"));
  EXPECT_EQ(ext, (std::vector<char>{0, 0}));
}

TEST(Tableau, Examples) {
  EXPECT_TRUE(consistent(parse_abox("A(a)"), TBox{}));
  EXPECT_FALSE(consistent(parse_abox("(P and not P)(a)"), TBox{}));
  EXPECT_FALSE(consistent(parse_abox("r(a,b)\nr(a,c)\nB(b)\n(not B)(c)"), parse_tbox("func(r)")));
  EXPECT_TRUE(consistent(parse_abox("r(a,b)\nr(a,c)\nB(b)"), parse_tbox("func(r)")));
}

TEST(Tableau, FunctionalityExampleAgreesWithBruteForce) {
  ABox a = parse_abox("r(a,b)\nr(a,c)\nB(b)\n(not B)(c)");
  TBox t = parse_tbox("func(r)");
  for (int n = 1; n <= 3; ++n) EXPECT_FALSE(brute_force_model(a, t, n, {"B"}, {"r"}));
}

TEST(Tableau, CyclicTBoxTerminates) {
  TBox t = parse_tbox("A sub exists r. A");
  auto res = tableau(parse_abox("A(a)"), t);
  EXPECT_TRUE(res.consistent);
  ASSERT_TRUE(res.model);
  EXPECT_TRUE(res.verified);
}

TEST(Tableau, InverseAndFunctionality) {
  // Needs an infinite model: every element has an r-successor, r- is
  // functional and a has no r-predecessor.
  TBox t = parse_tbox("top sub exists r. top\nfunc(r-)\nA sub forall r-. bot");
  auto res = tableau(parse_abox("A(a)"), t);
  EXPECT_TRUE(res.consistent);
  EXPECT_FALSE(find_model(parse_abox("A(a)"), t, {3, 1000}).model);
}

TEST(Tableau, UniversalRole) {
  TBox t = parse_tbox("A sub exists u. B\nB sub bot");
  EXPECT_FALSE(consistent(parse_abox("A(a)"), t));
  EXPECT_TRUE(consistent(parse_abox("C(a)"), t));
  EXPECT_FALSE(consistent(parse_abox("C(a)\n(forall u. not C)(b)"), TBox{}));
}

TEST(Tableau, RoleHierarchy) {
  TBox t = parse_tbox("role r sub s\nA sub forall s. B");
  EXPECT_FALSE(consistent(parse_abox("A(a)\nr(a,b)\n(not B)(b)"), t));
  TBox ti = parse_tbox("role r- sub s\nA sub forall s. B");
  EXPECT_FALSE(consistent(parse_abox("A(b)\nr(a,b)\n(not B)(a)"), ti));
  EXPECT_TRUE(consistent(parse_abox("A(a)\nr(a,b)\n(not B)(b)"), ti));
}

TEST(CertainAnswers, InstanceQueries) {
  Concept c = parse_concept("(P implies exists r. P)");
  EXPECT_TRUE(iq_certain_answer(TBox{}, c, parse_abox("r(a,a)"), "a"));
  EXPECT_FALSE(iq_certain_answer(TBox{}, c, parse_abox("r(a,b)\nr(b,a)"), "a"));
  EXPECT_TRUE(iq_certain_answer(TBox{}, Concept::atom("A"), parse_abox("A(a)"), "a"));
  EXPECT_EQ(iq_answers(TBox{}, c, parse_abox("r(a,a)\nr(b,c)")), std::set<std::string>{"a"});
}

TEST(CertainAnswers, EmptyTBoxCQ) {
  EXPECT_EQ(cq_answers_empty_tbox(parse_ucq("q(x) :- r(x,x)."), parse_abox("r(a,a)\nr(b,c)")),
            std::set<std::string>{"a"});
  EXPECT_EQ(cq_answers_empty_tbox(parse_ucq("q(x) :- s(x,y), r(y,y)."), parse_abox("s(a,b)\nr(b,b)")),
            std::set<std::string>{"a"});
  EXPECT_TRUE(cq_answers_empty_tbox(parse_ucq("q(x) :- r(x,x)."), ABox{}).empty());
}

TEST(Functional, Quotient) {
  TBox t = parse_tbox("func(r)");
  std::map<std::string, std::string> rep;
  ABox q = functional_quotient(parse_abox("r(a,b)\nr(a,c)\nr(b,d)\nr(c,e)\nA(e)"), t, &rep);
  EXPECT_EQ(rep["c"], "b");
  EXPECT_EQ(rep["e"], rep["d"]);
  EXPECT_TRUE(is_functional_abox(q, t));
  EXPECT_FALSE(is_functional_abox(parse_abox("r(a,b)\nr(a,c)"), t));
  EXPECT_TRUE(is_functional_abox(parse_abox("r(a,b)\nr(c,b)"), t));
  EXPECT_FALSE(is_functional_abox(parse_abox("r(a,b)\nr(c,b)"), parse_tbox("func(r-)")));
}

TEST(Finder, ModelsAreModels) {
  TBox t = parse_tbox("A sub exists r. (B and exists r. top)");
  auto res = find_model(parse_abox("A(a)"), t);
  ASSERT_TRUE(res.model);
  EXPECT_TRUE(is_model(*res.model, parse_abox("A(a)"), t));
}

TEST(Finder, AvoidsQuery) {
  ABox a = parse_abox("r(a,b)\nr(b,a)");
  UCQ q = parse_ucq("q(x) :- (P implies exists r. P)(x).");
  auto res = find_model(a, TBox{}, {}, {{q, "a"}});
  ASSERT_TRUE(res.model);
  EXPECT_FALSE(extension(*res.model, parse_concept("(P implies exists r. P)"))[0]);
  EXPECT_FALSE(find_model(parse_abox("r(a,a)"), TBox{}, {}, {{q, "a"}}).model);
}

TEST(Finder, MergesUnderFunctionality) {
  TBox t = parse_tbox("func(r)");
  auto res = find_model(parse_abox("r(a,b)\nr(a,c)\nB(b)"), t);
  ASSERT_TRUE(res.model);
  EXPECT_EQ(res.model->ind.at("b"), res.model->ind.at("c"));
}

TEST(CrossOracle, TableauAgreesWithBruteForceOnSmallInputs) {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 150; ++iter) {
    TBox t = random_tbox(rng);
    ABox a = random_abox(rng, 2, 3);
    auto tab = tableau(a, t);
    bool brute = false;
    for (int n = 1; n <= 2 && !brute; ++n) brute = brute_force_model(a, t, n, {"A", "B"}, {"r", "s"});
    if (brute) EXPECT_TRUE(tab.consistent) << render(t) << "\n" << render(a);
    if (tab.model && tab.verified) EXPECT_TRUE(is_model(*tab.model, a, t));
  }
}

TEST(CrossOracle, TableauAgreesWithFinder) {
  std::mt19937 rng(11);
  int decided = 0;
  for (int iter = 0; iter < 400; ++iter) {
    TBox t = random_tbox(rng);
    ABox a = random_abox(rng, 3, 4);
    auto tab = tableau(a, t);
    auto fin = find_model(a, t, {3, 1000});
    if (fin.model) {
      EXPECT_TRUE(is_model(*fin.model, a, t));
      EXPECT_TRUE(tab.consistent) << render(t) << "\n" << render(a);
      ++decided;
    } else if (!tab.consistent) {
      ++decided;
    }
  }
  EXPECT_GT(decided, 350);
}

TEST(Invariants, ConsistencyIsAntiMonotone) {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 100; ++iter) {
    TBox t = random_tbox(rng);
    ABox a = random_abox(rng, 3, 3);
    ABox b = a;
    ABox extra = random_abox(rng, 3, 2);
    for (const auto& c : extra.concepts) b.add(c.c, c.ind);
    for (const auto& r : extra.roles) b.add(r.role, r.a, r.b);
    if (!consistent(a, t)) EXPECT_FALSE(consistent(b, t));
  }
}
