#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "omqrw/reasoner.hpp"
#include "omqrw/syntax.hpp"

namespace omqrw {

// Ground facts over individuals 0..n-1, encoded as bits of a 64-bit mask.
// Concept facts come first (optionally followed by their negations), then
// role facts.
class FactSpace {
 public:
  FactSpace(const Signature& sig, int n, bool negated = false);

  int individuals() const { return n_; }
  int size() const { return static_cast<int>(facts_.size()); }
  static std::string individual_name(int i);

  int concept_fact(const std::string& c, int i, bool negated = false) const;
  int role_fact(const std::string& r, int i, int j) const;
  ABox to_abox(std::uint64_t mask) const;
  // Individuals mentioned by the facts of `mask`.
  std::uint32_t mentioned(std::uint64_t mask) const;

  // Smallest image of `mask` under the individual permutations fixing the
  // first `fixed` individuals.
  std::uint64_t canonical(std::uint64_t mask, int fixed = 0) const;

  // Pairs of facts that violate one of the functionality assertions.
  std::vector<std::uint64_t> conflicts(const TBox& t) const;

 private:
  struct Fact {
    int kind;  // 0 concept, 1 negated concept, 2 role
    int sym;
    int a;
    int b;
  };
  std::vector<std::string> concepts_;
  std::vector<std::string> roles_;
  int n_;
  bool negated_;
  std::vector<Fact> facts_;
  // perm_tables_[fixed][perm][byte][value]
  mutable std::vector<std::vector<std::vector<std::vector<std::uint64_t>>>> perm_tables_;
  const std::vector<std::vector<std::vector<std::uint64_t>>>& tables(int fixed) const;
};

struct EnumOptions {
  // Keep only ABoxes satisfying the functionality assertions of this TBox.
  const TBox* functional = nullptr;
  // Keep only ABoxes consistent with this TBox.
  const TBox* consistent_with = nullptr;
  // Extended ABoxes: negated concept names as facts.
  bool negated = false;
};

// Σ-ABoxes with at most max_ind individuals, one per isomorphism class.
// Stop by returning false.
void enumerate_aboxes(const Signature& sigma, int max_ind, const EnumOptions& opts,
                      const std::function<bool(const ABox&)>& visit);
std::vector<ABox> enumerate_aboxes(const Signature& sigma, int max_ind, const EnumOptions& opts = {});

struct Discrepancy {
  ABox abox;
  std::string individual;
  Answer q = Answer::Unknown;
  Answer q_prime = Answer::Unknown;
};

enum class VerifyMode { Auto, Exhaustive, Monotone };

struct VerifyOptions {
  int max_ind = 3;
  int max_extra = 2;
  VerifyMode mode = VerifyMode::Auto;
  // Seconds; 0 means no deadline.
  double deadline = 0;
  ReasonerOptions reasoner;
};

struct VerificationReport {
  std::size_t checked = 0;
  std::vector<Discrepancy> discrepancies;
  std::size_t unknown = 0;
  int max_ind = 0;
  int max_extra = 0;
  std::string mode;
  bool timed_out = false;
  double elapsed = 0;

  bool pass() const { return discrepancies.empty(); }
  bool complete() const { return unknown == 0 && !timed_out; }
  std::string summary() const;
};

// Compares the answers of Q and Q' on Σ-ABoxes (Σ of Q) with at most max_ind
// individuals that are consistent with Q's TBox (and functional when it has
// functionality assertions). Monotone mode checks only the minimal ABoxes
// on which Q holds and the maximal ones on which it fails; it needs a UCQ
// with an empty or functionality-only TBox.
VerificationReport verify_rewriting(const OMQ& q, const OMQ& q_prime, const VerifyOptions& opts = {});

// Q1 ⊆ Q2 over Σ-ABoxes (Σ of Q1) with at most max_ind individuals.
Verdict3 omq_contained_bounded(const OMQ& q1, const OMQ& q2, int max_ind, int max_extra,
                               const ReasonerOptions& opts = {});

struct RandomCqParams {
  int vars = 4;
  int atoms = 5;
  // Probability that an atom is a concept atom.
  double concept_ratio = 0.3;
  std::vector<std::string> concepts{"A", "B"};
  std::vector<std::string> roles{"r", "s"};
};

CQ gen_random_cq(const RandomCqParams& params, std::uint64_t seed);

struct RandomTBoxParams {
  int max_axioms = 3;
  int max_depth = 2;
  // Probabilities of a role inclusion and of a functionality assertion;
  // the rest are concept inclusions.
  double ri_ratio = 0.15;
  double func_ratio = 0.25;
  bool inverse = true;
  std::vector<std::string> concepts{"A", "B"};
  std::vector<std::string> roles{"r", "s"};
};

// 1..max_axioms axioms.
TBox gen_random_tbox(const RandomTBoxParams& params, std::uint64_t seed);

struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
};

// q(x0) = q_G with both edge directions, r(x0,v0), r(v0,x0) and the
// bidirectional r-clique on x0, x1, x2.
CQ gen_3col_query(const Graph& g);

}  // namespace omqrw
