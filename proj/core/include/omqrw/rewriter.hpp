#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "omqrw/query.hpp"
#include "omqrw/syntax.hpp"

namespace omqrw {

struct RewriteResult {
  OMQ omq;
  std::set<std::string> fresh;
  // Fresh name -> construction step that introduced it.
  std::map<std::string, std::string> provenance;
  // Tree-shaped intermediate query per disjunct.
  std::vector<CQ> trees;
};

// (P -> OR_p C_p)(x) for x-acyclic, connected q.
RewriteResult rewrite_alci(const OMQ& q);
// As above, Boolean components become conjuncts "exists u. C".
RewriteResult rewrite_alci_u(const OMQ& q);
// Inverse-free IQ over an extended TBox.
RewriteResult rewrite_alch_extend_tbox(const OMQ& q);
// Inverse-free IQ C_pre -> C_con for x-acyclic, x-accessible q.
RewriteResult rewrite_alc(const OMQ& q);
// Inverse-free IQ with universal-role guards for x-acyclic q.
RewriteResult rewrite_alc_u(const OMQ& q);
// ALCI-IQ for f-acyclic connected q under the TBox's functionality
// assertions; `universal` admits disconnected disjuncts.
RewriteResult rewrite_functional(const OMQ& q, bool universal = false);

// Boolean concept query "exists x. C(x)" to the atomic query M(x) over an
// extended TBox. The IQ of `q` holds C.
RewriteResult baq_to_aq(const OMQ& q);

// Concept read off a tree-shaped query rooted at `root`. With `universal`
// every role restriction is a value restriction.
Concept tree_concept(const CQ& tree, const std::string& root, bool universal = false);

}  // namespace omqrw
