#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "omqrw/structure.hpp"
#include "omqrw/syntax.hpp"

namespace omqrw {

// Finite interpretation. Unary predicates are concept names, binary ones are
// role names; `ind` maps ABox individuals to elements.
struct Interpretation {
  Structure s;
  std::map<std::string, int> ind;

  int size() const { return s.size(); }
  std::string describe() const;
};

// Extension of a concept; role inclusions are not applied, so the structure
// should already be closed under them.
std::vector<char> extension(const Interpretation& i, const Concept& c);
bool satisfies(const Interpretation& i, const TBox& t);
bool satisfies(const Interpretation& i, const ABox& a);
bool is_model(const Interpretation& i, const ABox& a, const TBox& t);

struct ReasonerOptions {
  std::size_t node_budget = 20000;
  // Extract and check a model when consistent.
  bool build_model = true;
};

struct TableauResult {
  bool consistent = false;
  // Folded completion graph; present when consistent. It is checked against
  // TBox and ABox and `verified` records the outcome (folding may break
  // functionality).
  std::optional<Interpretation> model;
  bool verified = false;
  std::size_t nodes = 0;
};

// Consistency of an (extended) ABox with an ALCHIF^u TBox. Throws
// ResourceLimit when the node budget is exceeded.
TableauResult tableau(const ABox& a, const TBox& t, const ReasonerOptions& opts = {});

// TBox compiled once for many consistency checks. ABoxes over `sig` reuse the
// compiled form; anything else is compiled on the fly.
class PreparedTBox {
 public:
  explicit PreparedTBox(const TBox& t, const Signature& sig = {}, const ReasonerOptions& opts = {});

  TableauResult tableau(const ABox& a) const;
  bool consistent(const ABox& a) const;

 private:
  struct Impl;
  TBox tbox_;
  ReasonerOptions opts_;
  std::shared_ptr<Impl> impl_;
};
bool consistent(const ABox& a, const TBox& t, const ReasonerOptions& opts = {});

// A |= C(ind) under T.
bool iq_certain_answer(const TBox& t, const Concept& c, const ABox& a, const std::string& ind,
                       const ReasonerOptions& opts = {});
// Every individual that is a certain answer.
std::set<std::string> iq_answers(const TBox& t, const Concept& c, const ABox& a, const ReasonerOptions& opts = {});

std::set<std::string> cq_answers_empty_tbox(const UCQ& q, const ABox& a);

// Quotient of an ABox under the identifications forced by functionality
// (assertions only; the TBox is assumed to contain nothing else).
ABox functional_quotient(const ABox& a, const TBox& t, std::map<std::string, std::string>* rep = nullptr);
bool is_functional_abox(const ABox& a, const TBox& t);

// Query the model must not satisfy: no disjunct maps with its answer
// variable to `ind`.
struct Avoid {
  UCQ query;
  std::string ind;
};

struct FinderOptions {
  int max_extra = 2;
  // Maximum number of blocking clauses per domain size before giving up.
  std::size_t max_refinements = 100000;
};

struct FinderResult {
  std::optional<Interpretation> model;
  // True when the search ran to completion for every size up to the bound.
  bool exhausted = true;
};

// Model of A and T over |ind(A)| + k elements, k <= max_extra, that avoids
// the given query matches. Functionality is handled by trying every
// identification of individuals.
FinderResult find_model(const ABox& a, const TBox& t, const FinderOptions& opts = {},
                        const std::vector<Avoid>& avoid = {});

enum class Answer { Yes, No, Unknown };

const char* answer_name(Answer a);

struct Verdict3 {
  Answer answer = Answer::Unknown;
  std::optional<Interpretation> countermodel;
  std::optional<ABox> counterexample;
  std::string individual;
  std::string note;
};

// Certain answers to a UCQ-based OMQ. Yes is exact for empty and
// functionality-only TBoxes and sound otherwise (via a rewriting of the
// x-acyclic contractions); No carries a countermodel. Answers are exact both
// ways when the TBox has no functionality and every disjunct is x-acyclic.
class UcqAnswerer {
 public:
  UcqAnswerer(const OMQ& q, int max_extra, const ReasonerOptions& opts = {});

  Verdict3 answer(const ABox& a, const std::string& ind) const;
  // True when every answer is Yes or No.
  bool exact() const { return exact_; }

 private:
  OMQ q_;
  int max_extra_;
  ReasonerOptions opts_;
  bool exact_ = false;
  bool empty_tbox_ = false;
  bool functional_only_ = false;
  std::optional<Concept> acyc_;
};

Verdict3 ucq_certain_answer_bounded(const OMQ& q, const ABox& a, const std::string& ind, int max_extra,
                                    const ReasonerOptions& opts = {});

// Certain answer for either query kind.
Verdict3 certain_answer(const OMQ& q, const ABox& a, const std::string& ind, int max_extra,
                        const ReasonerOptions& opts = {});

}  // namespace omqrw
