#pragma once

#include "pptc/equivalence.hpp"

#include <set>
#include <string>
#include <vector>

namespace pptc {

struct AbpOptions {
  Rational loss = Rational(1, 2);
  Rational dup = Rational(0);
  int capacity = 1;  // 1 or 2
  size_t trace_depth = 6;
  Limits limits;
};

struct AbpReport {
  bool traces_equal = false;
  std::string first_difference;
  size_t ab_states = 0, buff_states = 0;
  size_t ab_traces = 0, buff_traces = 0;
  bool prbs_equivalent = false;  // reported, not a gate (divergence ambiguity)
  double seconds = 0;
  std::string to_text() const;
};

// The alternating-bit protocol re-encoding as a spec file: symmetric two-way
// protocol with piggybacked acknowledgement tags, capacity-bounded lossy and
// duplicating channels, timeouts as hidden self events, races against a
// reserved `dead` event for component idling. Roots AB and Buff are defined
// as recursion variables; the returned text parses with parse_spec_file.
std::string abp_spec_text(const AbpOptions& opts);

// Observable weak step traces up to the given depth: sequences of non-silent
// step labels reachable through any probabilistic and tau moves.
std::set<std::vector<std::string>> weak_step_traces(const Plts& p, size_t depth);

AbpReport run_abp(const AbpOptions& opts);

}  // namespace pptc
