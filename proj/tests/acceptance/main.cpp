#include <chrono>
#include <cstdio>
#include <cstring>
#include <set>

#include "criteria.hpp"
#include "omqrw/syntax.hpp"

namespace acceptance {
bool verbose = false;
}

int main(int argc, char** argv) {
  struct Criterion {
    const char* name;
    acceptance::Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"rewriting shapes", acceptance::rewriting_shapes},
      {"rewriting equivalence", acceptance::rewriting_equivalence},
      {"functional rewritings", acceptance::functional_suite},
      {"empty-TBox decider", acceptance::empty_tbox_decider},
      {"TBox decider", acceptance::tbox_decider},
      {"reasoner cross-oracle", acceptance::reasoner_cross_oracle},
      {"invariant suites", acceptance::invariant_suites},
      {"MMSNP checks", acceptance::mmsnp_checks},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "-v") == 0) {
      acceptance::verbose = true;
    } else {
      int k = std::atoi(argv[i]);
      if (k < 1 || k > 8) {
        std::fprintf(stderr, "usage: %s [-v] [criterion 1-8 ...]\n", argv[0]);
        return 2;
      }
      only.insert(k);
    }
  }
  int failed = 0;
  for (int k = 1; k <= 8; ++k) {
    if (!only.empty() && !only.count(k)) continue;
    const auto& c = criteria[k - 1];
    auto start = std::chrono::steady_clock::now();
    acceptance::Outcome o;
    try {
      o = c.run();
    } catch (const omqrw::Error& e) {
      o = {false, std::string("error: ") + e.what()};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", k, c.name, s, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
