#pragma once

#include "pptc/semantics.hpp"

#include <string>
#include <vector>

namespace pptc {

enum class Relation { PStep, PPomset, PHp, PHhp, PRBStep };

Relation relation_from_name(const std::string& name);  // pstep|ppomset|php|phhp|prbstep
std::string relation_name(Relation r);

struct Unsupported : std::runtime_error {
  explicit Unsupported(const std::string& what) : std::runtime_error(what) {}
};

// Verdict with a machine-checkable witness: for partition-based checkers the
// witness is the list of related (left-state, right-state) pairs; for game
// based ones the surviving root assertion. `distinguishing` holds the first
// distinguishing observation when inequivalent.
struct EquivVerdict {
  bool equivalent = false;
  std::string relation;
  size_t witness_size = 0;
  std::vector<std::pair<int, int>> witness;
  std::string distinguishing;

  std::string report() const;
};

EquivVerdict prob_step_bisim(const Plts& p, const Plts& q);
EquivVerdict prob_pomset_bisim(const Plts& p, const Plts& q, size_t max_pomset);
EquivVerdict prob_hp_bisim(const Plts& p, const Plts& q);
EquivVerdict prob_hhp_bisim(const Plts& p, const Plts& q);
EquivVerdict prob_rooted_branching_step_bisim(const Plts& p, const Plts& q);

EquivVerdict check_relation(const Plts& p, const Plts& q, Relation rel, size_t max_pomset = 6);

// Independent transfer-condition validators (used to certify "equivalent"
// verdicts; they re-check the witness against the literal definition).
bool validate_step_witness(const Plts& p, const Plts& q,
                           const std::vector<std::pair<int, int>>& related);
bool validate_branching_witness(const Plts& p, const Plts& q,
                                const std::vector<std::pair<int, int>>& related);

// Builds both transition systems and decides; with a data environment the
// check runs from every initial data state and all must agree.
EquivVerdict equiv_terms(const TermPtr& a, const TermPtr& b, const SpecFile& spec,
                         Relation rel, const Limits& limits);

// Per-depth AIP comparison: pi[n](a) vs pi[n](b) under `rel` for n <= n_max.
struct AipResult {
  std::vector<bool> per_depth;     // index n
  long first_difference = -1;      // -1: none found
  bool equal_up_to(long n) const {
    for (long i = 0; i <= n && i < static_cast<long>(per_depth.size()); ++i)
      if (!per_depth[i]) return false;
    return true;
  }
};
AipResult aip_equal(const TermPtr& a, const TermPtr& b, const SpecFile& spec, long n_max,
                    Relation rel, const Limits& limits);

}  // namespace pptc
