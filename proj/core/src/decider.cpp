#include "omqrw/decider.hpp"

#include <algorithm>

namespace omqrw {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Rewritable: return "rewritable";
    case Verdict::NotRewritable: return "not-rewritable";
    default: return "unknown";
  }
}

namespace {

ABox canonical_abox(const CQ& p) {
  ABox a;
  for (const auto& c : p.concept_atoms) a.add(c.c, c.var);
  for (const auto& r : p.role_atoms) a.add(r.role, r.v1, r.v2);
  std::vector<std::string> inds = a.individuals();
  for (const auto& v : p.vars)
    if (std::find(inds.begin(), inds.end(), v) == inds.end()) a.add(Concept::top(), v);
  return a;
}

Signature query_signature(const UCQ& q) {
  OMQ tmp;
  tmp.query = q;
  return signature_of(tmp);
}

OMQ with_query(const OMQ& base, const UCQ& q) {
  OMQ out = base;
  out.query = q;
  return out;
}

RewriteResult rewrite_for(const OMQ& q, const Dialect& target) {
  if (target.i) return target.u ? rewrite_alci_u(q) : rewrite_alci(q);
  auto inverse = validate_dialect(q.tbox, Dialect::parse("alchf+u"));
  bool tbox_inverse = std::find(inverse.begin(), inverse.end(), "inverse role") != inverse.end();
  if (tbox_inverse) throw Error(ErrorKind::Unsupported, "target without inverse roles but the TBox uses them");
  return target.u ? rewrite_alc_u(q) : rewrite_alc(q);
}

// Reason a core fails the structural condition for the target.
std::optional<std::string> structural_failure(const CQ& c, const Dialect& target, std::optional<Cycle>& cycle) {
  if (auto cy = x_cycle(c)) {
    cycle = cy;
    return "cycle avoiding " + c.answer + ": " + cy->text();
  }
  if (target.u) return std::nullopt;
  if (target.i) {
    if (!is_connected(c)) return "not connected";
    return std::nullopt;
  }
  VarSet r = dreach(c);
  for (const auto& v : c.vars)
    if (!r.count(v)) return "variable " + v + " is not reachable from " + c.answer + " along role directions";
  return std::nullopt;
}

}  // namespace

Decision decide_empty_tbox(const UCQ& q, const Dialect& target) {
  Decision d;
  d.target = target.tag();
  UCQ m = minimize_ucq(q);
  UCQ cores;
  for (const auto& p : m.disjuncts) cores.disjuncts.push_back(core(p));
  d.witness = cores;
  for (const auto& c : cores.disjuncts) {
    std::optional<Cycle> cy;
    if (auto why = structural_failure(c, target, cy)) {
      d.verdict = Verdict::NotRewritable;
      d.offending = c;
      d.cycle = cy;
      d.note = "core " + render(c) + ": " + *why;
      return d;
    }
  }
  OMQ w;
  w.query = cores;
  w.sigma = query_signature(cores);
  w.dialect = target;
  d.rewriting = rewrite_for(w, target);
  d.verdict = Verdict::Rewritable;
  return d;
}

namespace {

// Identifies the variables that functionality forces to be equal.
CQ functional_normal_form(const CQ& p, const TBox& t) {
  ABox a = canonical_abox(p);
  std::map<std::string, std::string> rep;
  functional_quotient(a, t, &rep);
  VarMap m;
  for (const auto& [v, r] : rep)
    if (v != r) m[v] = r;
  // Keep the answer variable's name.
  if (rep.count(p.answer) && rep.at(p.answer) != p.answer) {
    std::string r = rep.at(p.answer);
    for (auto& [v, to] : m)
      if (to == r) to = p.answer;
    m[r] = p.answer;
    m.erase(p.answer);
  }
  return rename(p, m).normalized();
}

}  // namespace

Decision decide_functional(const OMQ& q, const FunctionalOptions& opts) {
  if (!q.tbox.cis.empty() || !q.tbox.ris.empty())
    throw Error(ErrorKind::Unsupported,
                "rewritability is undecidable once the TBox has axioms besides functionality assertions");
  if (q.is_iq()) throw Error(ErrorKind::Precondition, "UCQ expected");
  Decision d;
  Dialect target = Dialect::parse(opts.universal ? "alcif+u" : "alcif");
  d.target = target.tag();
  d.max_ind = opts.equivalence_bound;
  UCQ m = minimize_ucq(q.ucq());
  UCQ witness;
  for (const auto& p0 : m.disjuncts) {
    CQ p = functional_normal_form(p0, q.tbox);
    std::optional<CQ> found;
    for (const auto& s : subqueries(core(p))) {
      if (!s.has_var(s.answer)) continue;
      if (!is_f_acyclic(s, q.tbox)) continue;
      if (!opts.universal && !is_connected(s)) continue;
      if (!cq_hom(p, s) || !cq_hom(s, p)) continue;
      found = s;
      break;
    }
    if (!found) {
      d.verdict = Verdict::NotRewritable;
      d.offending = p;
      auto fa = check_f_acyclic(core(p), q.tbox);
      if (fa.witness) d.cycle = fa.witness;
      d.note = "no f-acyclic" + std::string(opts.universal ? "" : ", connected") +
               " subquery is equivalent to " + render(p);
      return d;
    }
    witness.disjuncts.push_back(*found);
  }
  d.witness = witness;
  OMQ w = with_query(q, witness);
  d.rewriting = rewrite_functional(w, opts.universal);
  VerifyOptions vo;
  vo.max_ind = opts.equivalence_bound;
  d.check = verify_rewriting(q, d.rewriting->omq, vo);
  if (!d.check->pass()) {
    d.verdict = Verdict::Unknown;
    d.note = "hom-equivalent witness disagrees with the query on functional ABoxes";
    return d;
  }
  d.verdict = Verdict::Rewritable;
  return d;
}

UCQ build_q_deco(const OMQ& q, std::size_t max_decorations) {
  UCQ acyc = minimize_ucq(build_q_acyc(q.ucq(), q.tbox));
  std::vector<Concept> subs;
  {
    std::set<std::string> seen;
    for (const auto& ci : q.tbox.cis)
      for (const auto& side : {ci.lhs, ci.rhs})
        for (const auto& c : subconcepts(side))
          if (!c.is_top() && !c.is_bottom() && c.kind() != Concept::Kind::Not && seen.insert(c.text()).second)
            subs.push_back(c);
  }
  UCQ out;
  for (const auto& p : acyc.disjuncts) {
    VarSet r = dreach(p);
    if (r.size() == p.vars.size()) {
      out.disjuncts.push_back(p);
      continue;
    }
    CQ base = restrict(p, r);
    std::vector<std::string> vars(r.begin(), r.end());
    std::size_t bits = vars.size() * subs.size();
    if (bits >= 63 || (std::size_t(1) << bits) > max_decorations)
      throw Error(ErrorKind::ResourceLimit, "too many decorations for " + render(p));
    ABox full = canonical_abox(p);
    for (std::size_t code = 0; code < (std::size_t(1) << bits); ++code) {
      CQ dec = base;
      ABox a = full;
      std::size_t b = 0;
      for (const auto& v : vars)
        for (const auto& c : subs) {
          Concept lit = (code >> b++ & 1) ? c : Concept::negation(c);
          dec.add(lit, v);
          a.add(lit, v);
        }
      if (!consistent(a, q.tbox)) continue;
      out.disjuncts.push_back(dec.normalized());
    }
  }
  return minimize_ucq(out);
}

Verdict3 check_empty(const OMQ& q, int max_ind, int max_extra) {
  Verdict3 v;
  if (q.sigma.concepts.empty() && q.sigma.roles.empty()) {
    v.answer = Answer::Yes;
    v.note = "empty signature";
    return v;
  }
  if (!q.is_iq()) {
    for (const auto& p : q.ucq().disjuncts) {
      bool inside = true;
      for (const auto& c : p.concept_atoms)
        if (!c.c.is_top() && (!c.c.is_name() || !q.sigma.concepts.count(c.c.name()))) inside = false;
      for (const auto& r : p.role_atoms)
        if (!q.sigma.roles.count(r.role)) inside = false;
      if (!inside) continue;
      ABox a = canonical_abox(p);
      if (!consistent(a, q.tbox)) continue;
      v.answer = Answer::No;
      v.counterexample = a;
      v.individual = p.answer;
      return v;
    }
  }
  FactSpace fs(q.sigma, max_ind);
  if (fs.size() > 24) {
    v.note = "signature too large for the bounded search";
    return v;
  }
  EnumOptions eo;
  if (!q.tbox.functional.empty()) eo.functional = &q.tbox;
  enumerate_aboxes(q.sigma, max_ind, eo, [&](const ABox& a) {
    if (!consistent(a, q.tbox)) return true;
    for (const auto& i : a.individuals()) {
      if (certain_answer(q, a, i, max_extra).answer == Answer::Yes) {
        v.answer = Answer::No;
        v.counterexample = a;
        v.individual = i;
        return false;
      }
    }
    return true;
  });
  if (v.answer == Answer::Unknown) v.note = "no answer on ABoxes with at most " + std::to_string(max_ind) + " individuals";
  return v;
}

Decision decide_with_tbox(const OMQ& q, const Dialect& target, int max_ind, int max_extra) {
  if (!q.tbox.functional.empty())
    throw Error(ErrorKind::Unsupported, "functionality assertions need the functional procedure");
  if (q.is_iq()) throw Error(ErrorKind::Precondition, "UCQ expected");
  Decision d;
  d.target = target.tag();
  d.max_ind = max_ind;
  d.max_extra = max_extra;
  Signature qs = query_signature(q.ucq());
  Signature used = qs;
  used.merge(signature_of(q.tbox));
  bool full = q.sigma.includes(used);
  if (!target.i && !target.u && !full)
    throw Error(ErrorKind::Unsupported,
                "targets without inverse roles are only characterised for the full signature");

  Verdict3 empty = check_empty(q, std::min(max_ind, 2), max_extra);
  if (empty.answer == Answer::Yes) {
    d.verdict = Verdict::Rewritable;
    d.note = "query is empty";
    RewriteResult r;
    r.omq = q;
    r.omq.query = IQ{Concept::bottom(), q.ucq().answer()};
    d.rewriting = r;
    return d;
  }

  UCQ cmp;
  if (!target.i && !target.u)
    cmp = build_q_deco(q);
  else if (target.u)
    cmp = minimize_ucq(build_q_acyc(q.ucq(), q.tbox));
  else
    cmp = minimize_ucq(q_con(build_q_acyc(q.ucq(), q.tbox)));
  d.witness = cmp;
  if (cmp.disjuncts.empty()) {
    d.verdict = Verdict::NotRewritable;
    d.note = "no x-acyclic contraction";
    return d;
  }
  OMQ cmp_q = with_query(q, cmp);
  OMQ cmp_iq = rewrite_alci_u(cmp_q).omq;
  const Concept& c = cmp_iq.iq().c;

  if (q.sigma.includes(qs)) {
    // Q ⊆ Q_cmp iff T, A_p |= C(x) for the canonical ABox A_p of every
    // disjunct; a failing A_p is itself a counterexample.
    for (const auto& p : minimize_ucq(q.ucq()).disjuncts) {
      ABox a = canonical_abox(p);
      if (!consistent(a, q.tbox)) continue;
      if (!iq_certain_answer(q.tbox, c, a, p.answer)) {
        d.verdict = Verdict::NotRewritable;
        d.counterexample = a;
        d.individual = p.answer;
        d.note = "canonical ABox of " + render(p) + " is not an answer of the comparison query";
        return d;
      }
    }
    d.note = "contained in the comparison query (canonical ABoxes)";
  } else {
    Verdict3 v = omq_contained_bounded(q, cmp_iq, max_ind, max_extra);
    if (v.answer == Answer::No) {
      d.verdict = Verdict::NotRewritable;
      d.counterexample = v.counterexample;
      d.individual = v.individual;
      d.note = "bounded counterexample";
      return d;
    }
    if (v.answer == Answer::Unknown) {
      d.verdict = Verdict::Unknown;
      d.note = v.note;
      return d;
    }
    d.note = "contained in the comparison query up to " + std::to_string(max_ind) + " individuals";
  }
  d.rewriting = rewrite_for(cmp_q, target);
  d.verdict = Verdict::Rewritable;
  return d;
}

Decision decide(const OMQ& q, const Dialect& target, int max_ind, int max_extra) {
  if (q.is_iq()) throw Error(ErrorKind::Precondition, "the query is already an IQ");
  if (q.tbox.empty()) {
    // Disjuncts over symbols outside Σ never fire without a TBox.
    UCQ kept;
    for (const auto& p : q.ucq().disjuncts) {
      UCQ single;
      single.disjuncts.push_back(p);
      if (q.sigma.includes(query_signature(single))) kept.disjuncts.push_back(p);
    }
    if (kept.disjuncts.empty()) {
      Decision d;
      d.target = target.tag();
      d.verdict = Verdict::Rewritable;
      d.note = "query is empty over the signature";
      RewriteResult r;
      r.omq = q;
      r.omq.query = IQ{Concept::bottom(), q.ucq().answer()};
      d.rewriting = r;
      return d;
    }
    Decision d = decide_empty_tbox(kept, target);
    if (d.rewriting) d.rewriting->omq.sigma = q.sigma;
    return d;
  }
  if (q.tbox.functionality_only()) {
    FunctionalOptions fo;
    fo.equivalence_bound = std::min(max_ind, 3);
    fo.universal = target.u;
    return decide_functional(q, fo);
  }
  return decide_with_tbox(q, target, max_ind, max_extra);
}

}  // namespace omqrw
