#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omqrw/harness.hpp"
#include "omqrw/query.hpp"
#include "omqrw/reasoner.hpp"
#include "omqrw/rewriter.hpp"

namespace omqrw {

enum class Verdict { Rewritable, NotRewritable, Unknown };

const char* verdict_name(Verdict v);

struct Decision {
  Verdict verdict = Verdict::Unknown;
  std::string target;
  // Equivalent subquery (or comparison query) the rewriting was built from.
  std::optional<UCQ> witness;
  std::optional<RewriteResult> rewriting;
  // Structural certificate: offending disjunct and reason.
  std::optional<CQ> offending;
  std::optional<Cycle> cycle;
  // Counterexample: Q holds at `individual`, the comparison query does not.
  std::optional<ABox> counterexample;
  std::string individual;
  std::string note;
  int max_ind = 0;
  int max_extra = 0;
  std::optional<VerificationReport> check;
};

// Exact characterisation for the empty TBox over the full signature:
// minimise, take cores, test x-acyclicity (plus connectedness for ALCI and
// x-accessibility for ALC; only x-acyclicity with the universal role).
Decision decide_empty_tbox(const UCQ& q, const Dialect& target);

struct FunctionalOptions {
  int equivalence_bound = 3;
  bool universal = false;
};

// TBoxes with functionality assertions only. Throws Unsupported for any
// other axiom.
Decision decide_functional(const OMQ& q, const FunctionalOptions& opts = {});

// Decorations of the x-acyclic contractions with subconcepts of the TBox,
// restricted to dreach. Disjuncts whose variables are all reachable stay
// undecorated (the union of their decorations is equivalent to them).
// Throws ResourceLimit above `max_decorations` per disjunct.
UCQ build_q_deco(const OMQ& q, std::size_t max_decorations = 4096);

// Bounded decision for TBoxes without functionality.
Decision decide_with_tbox(const OMQ& q, const Dialect& target, int max_ind = 5, int max_extra = 3);

Verdict3 check_empty(const OMQ& q, int max_ind, int max_extra);

// Picks the procedure matching the TBox.
Decision decide(const OMQ& q, const Dialect& target, int max_ind = 5, int max_extra = 3);

}  // namespace omqrw
