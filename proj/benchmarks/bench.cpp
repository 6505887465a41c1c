#include <benchmark/benchmark.h>

#include "omqrw/decider.hpp"
#include "omqrw/harness.hpp"
#include "omqrw/mmsnp.hpp"
#include "omqrw/query.hpp"
#include "omqrw/rewriter.hpp"

using namespace omqrw;

namespace {

OMQ branching() {
  return parse_omq(
      "[tbox]\n[sigma] r, s, t, v\n[query]\n"
      "q(x) :- P(x), r(x,y), t(z,y), v(z,w), s(w,x), P(z).\n");
}

void BM_Consistency(benchmark::State& state) {
  TBox t = parse_tbox("A sub exists r. (B and forall r-. not A)\nB sub exists s. A\nfunc(s)");
  ABox a = parse_abox("A(a)\nr(a,b)\ns(b,c)\nB(c)\n");
  for (auto _ : state) benchmark::DoNotOptimize(consistent(a, t));
}
BENCHMARK(BM_Consistency);

void BM_PreparedConsistency(benchmark::State& state) {
  TBox t = parse_tbox("A sub exists r. (B and forall r-. not A)\nB sub exists s. A\nfunc(s)");
  PreparedTBox p(t);
  ABox a = parse_abox("A(a)\nr(a,b)\ns(b,c)\nB(c)\n");
  for (auto _ : state) benchmark::DoNotOptimize(p.consistent(a));
}
BENCHMARK(BM_PreparedConsistency);

void BM_Core(benchmark::State& state) {
  RandomCqParams params;
  params.vars = static_cast<int>(state.range(0));
  params.atoms = static_cast<int>(state.range(0)) + 2;
  CQ q = gen_random_cq(params, 17);
  for (auto _ : state) benchmark::DoNotOptimize(core(q));
}
BENCHMARK(BM_Core)->DenseRange(3, 7, 2);

void BM_RewriteAlci(benchmark::State& state) {
  OMQ q = branching();
  for (auto _ : state) benchmark::DoNotOptimize(rewrite_alci(q));
}
BENCHMARK(BM_RewriteAlci);

void BM_DecideEmptyTBox(benchmark::State& state) {
  UCQ q = parse_ucq("q(x) :- r(x,y), s(y,z), r(z,w), s(w,y), r(x,v).");
  Dialect d = Dialect::parse("alci");
  for (auto _ : state) benchmark::DoNotOptimize(decide_empty_tbox(q, d));
}
BENCHMARK(BM_DecideEmptyTBox);

void BM_MmsnpEval(benchmark::State& state) {
  mmsnp::Sentence s = mmsnp::parse_sentence(
      "pred E/2.\nso C.\nrule E(x,y), E(y,z), E(z,x), C(x), C(y), C(z) -> false.\n"
      "rule E(x,y), E(y,z), E(z,x) -> C(x) | C(y) | C(z).\n");
  mmsnp::Instance k;
  int n = static_cast<int>(state.range(0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) k.add("E", {"v" + std::to_string(a), "v" + std::to_string(b)});
  for (auto _ : state) benchmark::DoNotOptimize(mmsnp::eval(s, k));
}
BENCHMARK(BM_MmsnpEval)->DenseRange(4, 6);

}  // namespace
BENCHMARK_MAIN();
