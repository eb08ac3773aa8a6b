#pragma once

#include "pptc/equivalence.hpp"
#include "pptc/parser.hpp"

#include <string>
#include <vector>

namespace pptc {

// Reachable states where the effect of a resolved step is not uniquely
// determined (distinct data successors without a distinguishing guard).
struct DeterminismReport {
  struct Issue {
    std::string term;
    std::string state;
    std::string detail;
  };
  std::vector<Issue> issues;
  bool deterministic() const { return issues.empty(); }
  std::string to_text() const;
};

DeterminismReport check_sufficient_determinism(const SpecFile& spec, const Limits& limits);

// Exhaustive partial-correctness check: from every initial state satisfying
// the precondition, every terminating run ends in a state satisfying the
// postcondition.
bool check_triple_semantic(const HoareTriple& triple, const SpecFile& spec,
                           const Limits& limits);

// The algebraic reading of the same triple: alpha.p ~ alpha.p.beta under the
// rooted branching equivalence (used as a cross-check in the tests).
bool check_triple_algebraic(const HoareTriple& triple, const SpecFile& spec,
                            const Limits& limits);

// ---------------------------------------------------------------------------
// Proof system H
// ---------------------------------------------------------------------------

struct ProofNode {
  std::string rule;  // H1..H10, H10', PH1, assume
  HoareTriple conclusion;
  std::vector<ProofNode> premises;
};

struct CheckResult {
  bool ok = false;
  std::string detail;  // RuleMismatch/SideConditionFails description
};

// Validates that every node instantiates its rule schema and that every
// consequence side condition holds in the data environment. Assumption nodes
// are only legal for hypotheses introduced by an enclosing H10/H10'.
CheckResult check_derivation(const ProofNode& proof, const SpecFile& spec);

// Proof files: one node per line, `RULE { pre } term { post }`, children
// indented by two more spaces than their parent.
ProofNode parse_proof_file(std::string_view src, const SpecFile& spec);

}  // namespace pptc
