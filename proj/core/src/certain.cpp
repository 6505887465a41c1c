#include <algorithm>

#include "omqrw/query.hpp"
#include "omqrw/reasoner.hpp"
#include "omqrw/rewriter.hpp"

namespace omqrw {

UcqAnswerer::UcqAnswerer(const OMQ& q, int max_extra, const ReasonerOptions& opts)
    : q_(q), max_extra_(max_extra), opts_(opts) {
  if (q_.is_iq()) throw Error(ErrorKind::Precondition, "UCQ expected");
  empty_tbox_ = q_.tbox.empty();
  functional_only_ = !empty_tbox_ && q_.tbox.functionality_only();
  if (empty_tbox_ || functional_only_) {
    exact_ = true;
    return;
  }
  UCQ acyc = minimize_ucq(build_q_acyc(q_.ucq(), q_.tbox));
  if (!acyc.disjuncts.empty()) {
    OMQ a = q_;
    a.query = acyc;
    acyc_ = rewrite_alci_u(a).omq.iq().c;
  }
  exact_ = q_.tbox.functional.empty() && is_x_acyclic(q_.ucq());
}

Verdict3 UcqAnswerer::answer(const ABox& a0, const std::string& ind) const {
  Verdict3 v;
  v.individual = ind;
  ABox a = a0;
  auto inds = a.individuals();
  if (std::find(inds.begin(), inds.end(), ind) == inds.end()) a.add(Concept::top(), ind);
  const UCQ& q = q_.ucq();
  if (empty_tbox_) {
    v.answer = cq_answers_empty_tbox(q, a).count(ind) ? Answer::Yes : Answer::No;
    return v;
  }
  if (functional_only_) {
    std::map<std::string, std::string> rep;
    ABox quotient = functional_quotient(a, q_.tbox, &rep);
    v.answer = cq_answers_empty_tbox(q, quotient).count(rep.at(ind)) ? Answer::Yes : Answer::No;
    return v;
  }
  TableauResult base = tableau(a, q_.tbox, opts_);
  if (!base.consistent) {
    v.answer = Answer::Yes;
    v.note = "ABox inconsistent with the TBox";
    return v;
  }
  for (const auto& p : q.disjuncts)
    if (abox_hom(p, a, ind)) {
      v.answer = Answer::Yes;
      return v;
    }
  if (acyc_) {
    ABox b = a;
    b.add(Concept::negation(*acyc_), ind);
    TableauResult r = tableau(b, q_.tbox, opts_);
    if (!r.consistent) {
      v.answer = Answer::Yes;
      return v;
    }
    if (exact_) {
      v.answer = Answer::No;
      if (r.model && r.verified) v.countermodel = r.model;
      return v;
    }
  } else if (exact_) {
    v.answer = Answer::No;
    return v;
  }
  FinderResult f = find_model(a, q_.tbox, {max_extra_, 100000}, {{q, ind}});
  if (f.model) {
    v.answer = Answer::No;
    v.countermodel = std::move(f.model);
    return v;
  }
  v.note = "no countermodel with at most " + std::to_string(max_extra_) + " extra elements";
  return v;
}

Verdict3 ucq_certain_answer_bounded(const OMQ& q, const ABox& a, const std::string& ind, int max_extra,
                                    const ReasonerOptions& opts) {
  return UcqAnswerer(q, max_extra, opts).answer(a, ind);
}

Verdict3 certain_answer(const OMQ& q, const ABox& a, const std::string& ind, int max_extra,
                        const ReasonerOptions& opts) {
  if (!q.is_iq()) return ucq_certain_answer_bounded(q, a, ind, max_extra, opts);
  Verdict3 v;
  v.individual = ind;
  ABox b = a;
  b.add(Concept::negation(q.iq().c), ind);
  TableauResult r = tableau(b, q.tbox, opts);
  v.answer = r.consistent ? Answer::No : Answer::Yes;
  if (r.consistent && r.model && r.verified) v.countermodel = r.model;
  return v;
}

}  // namespace omqrw
