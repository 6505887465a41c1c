#pragma once

#include <string>

namespace acceptance {

// Per-item progress on stderr.
extern bool verbose;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome rewriting_shapes();
Outcome rewriting_equivalence();
Outcome functional_suite();
Outcome empty_tbox_decider();
Outcome tbox_decider();
Outcome reasoner_cross_oracle();
Outcome invariant_suites();
Outcome mmsnp_checks();

}  // namespace acceptance
