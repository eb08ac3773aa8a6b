#pragma once

#include "pptc/guards.hpp"
#include "pptc/term.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pptc {

struct RecSpec;

struct NotClosed : std::runtime_error {
  explicit NotClosed(const std::string& var)
      : std::runtime_error("term is not closed: free recursion variable '" + var + "'"),
        var(var) {}
  std::string var;
};

struct StepLimitExceeded : std::runtime_error {
  explicit StepLimitExceeded(size_t limit)
      : std::runtime_error("rewrite step limit exceeded (" + std::to_string(limit) + ")"),
        limit(limit) {}
  size_t limit;
};

struct RewriteStep {
  std::string rule;
  std::string path;  // child indices from the root, "" = root
  TermPtr before, after;
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
  std::string to_text() const;  // rule-name @ path : before ==> after
};

struct RewriteOptions {
  size_t step_limit = 100000;
  const DataEnv* env = nullptr;   // enables RG8/RG9/RG10/RG11
  const RecSpec* rec = nullptr;   // enables RDP unfolding under projections
};

// Rewrites a closed term to basic-term normal form. Terms are kept canonical
// (A1/A2 are applied silently, standard rewriting modulo AC); every other rule
// application is recorded in the trace, so replaying steps modulo
// canonicalization reproduces the result.
std::pair<TermPtr, RewriteTrace> normalize(const TermPtr& t, const AlgebraDecl& algebra,
                                           const RewriteOptions& opts = {});

// Basic-term grammar: atoms, guards, W.t, t+s, t +[p] s, t |> s, where W is a
// left-merge cluster of atoms/guards (the completeness-proof normal forms use
// cluster-prefixed summands, so W.t must count as basic).
bool is_basic_term(const TermPtr& t);

// Computes the projection-free basic term equal to pi[n](t), unfolding
// recursion variables by RDP as needed (bounded by the step limit).
std::pair<TermPtr, RewriteTrace> project_rewrite(const TermPtr& t, long n,
                                                 const AlgebraDecl& algebra,
                                                 const RewriteOptions& opts = {});

// Re-applies the named rule to step.before and compares with step.after;
// used by the trace audit.
bool audit_step(const RewriteStep& step, const AlgebraDecl& algebra,
                const RewriteOptions& opts = {});

// ---------------------------------------------------------------------------
// Structural eliminations shared with the operational semantics
// ---------------------------------------------------------------------------

// Conflict filtering of the unless operator: every event atom of t transformed
// against the event multiset of the right operand. RecVar leaves keep a
// residual unless node (unfolded lazily by the semantics).
TermPtr unless_eliminate(const TermPtr& t, const std::multiset<std::string>& against,
                         const AlgebraDecl& algebra);

// theta(t) expanded via CE1-CE7/PCE1 before probabilistic resolution.
TermPtr theta_eliminate(const TermPtr& t, const AlgebraDecl& algebra);

// tau_I as structural renaming: events and atomic guards in I become tau.
// Renaming does not cross encap boundaries for events also in H and keeps
// residual hide nodes around recursion variables.
TermPtr hide_rename(const TermPtr& t, const std::vector<std::string>& hidden);

// The single-atom transform behind unless_eliminate (exposed for tests).
TermPtr unless_transform_atom(const std::string& event,
                              const std::multiset<std::string>& against,
                              const AlgebraDecl& algebra);

}  // namespace pptc
