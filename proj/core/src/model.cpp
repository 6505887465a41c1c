#include <algorithm>
#include <sstream>

#include "omqrw/reasoner.hpp"

namespace omqrw {

std::string Interpretation::describe() const {
  std::ostringstream os;
  os << s.describe();
  if (!ind.empty()) {
    os << "; individuals {";
    bool first = true;
    for (const auto& [a, e] : ind) {
      os << (first ? "" : ", ") << a << "->" << s.name(e);
      first = false;
    }
    os << "}";
  }
  return os.str();
}

namespace {

const std::vector<int>& successors(const Interpretation& i, const Role& r, int e) {
  return r.inverse ? i.s.in(r.name, e) : i.s.out(r.name, e);
}

std::vector<char> eval(const Interpretation& i, const Concept& c) {
  std::size_t n = static_cast<std::size_t>(i.size());
  using K = Concept::Kind;
  switch (c.kind()) {
    case K::Top: return std::vector<char>(n, 1);
    case K::Bottom: return std::vector<char>(n, 0);
    case K::Name: {
      const auto* u = i.s.unary(c.name());
      return u ? *u : std::vector<char>(n, 0);
    }
    case K::Not: {
      auto v = eval(i, c.child());
      for (auto& b : v) b = !b;
      return v;
    }
    case K::And:
    case K::Or: {
      auto a = eval(i, c.child(0));
      auto b = eval(i, c.child(1));
      for (std::size_t k = 0; k < n; ++k) a[k] = c.kind() == K::And ? (a[k] && b[k]) : (a[k] || b[k]);
      return a;
    }
    case K::Exists:
    case K::Forall: {
      auto sub = eval(i, c.child());
      bool ex = c.kind() == K::Exists;
      std::vector<char> out(n, 0);
      if (c.role().universal) {
        bool any = std::any_of(sub.begin(), sub.end(), [](char b) { return b; });
        bool all = std::all_of(sub.begin(), sub.end(), [](char b) { return b; });
        std::fill(out.begin(), out.end(), ex ? any : all);
        return out;
      }
      for (int e = 0; e < i.size(); ++e) {
        const auto& succ = successors(i, c.role(), e);
        bool r = ex ? std::any_of(succ.begin(), succ.end(), [&](int f) { return sub[static_cast<std::size_t>(f)]; })
                    : std::all_of(succ.begin(), succ.end(), [&](int f) { return sub[static_cast<std::size_t>(f)]; });
        out[static_cast<std::size_t>(e)] = r;
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<char> extension(const Interpretation& i, const Concept& c) { return eval(i, c); }

bool satisfies(const Interpretation& i, const TBox& t) {
  for (const auto& ci : t.cis) {
    auto l = eval(i, ci.lhs), r = eval(i, ci.rhs);
    for (std::size_t k = 0; k < l.size(); ++k)
      if (l[k] && !r[k]) return false;
  }
  for (const auto& ri : t.ris)
    for (int e = 0; e < i.size(); ++e)
      for (int f : successors(i, ri.sub, e)) {
        const auto& sup = successors(i, ri.sup, e);
        if (std::find(sup.begin(), sup.end(), f) == sup.end()) return false;
      }
  for (const auto& r : t.functional)
    for (int e = 0; e < i.size(); ++e)
      if (successors(i, r, e).size() > 1) return false;
  return true;
}

bool satisfies(const Interpretation& i, const ABox& a) {
  for (const auto& c : a.concepts) {
    auto it = i.ind.find(c.ind);
    if (it == i.ind.end() || !eval(i, c.c)[static_cast<std::size_t>(it->second)]) return false;
  }
  for (const auto& r : a.roles) {
    auto x = i.ind.find(r.a), y = i.ind.find(r.b);
    if (x == i.ind.end() || y == i.ind.end() || !i.s.has_binary(r.role, x->second, y->second)) return false;
  }
  return true;
}

bool is_model(const Interpretation& i, const ABox& a, const TBox& t) { return satisfies(i, a) && satisfies(i, t); }

const char* answer_name(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Unknown: return "unknown";
  }
  return "unknown";
}

}  // namespace omqrw
