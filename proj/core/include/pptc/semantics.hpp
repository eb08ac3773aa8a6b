#pragma once

#include "pptc/parser.hpp"
#include "pptc/rewriter.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace pptc {

struct UnguardedRecursion : std::runtime_error {
  explicit UnguardedRecursion(const std::string& name)
      : std::runtime_error("recursion through '" + name +
                           "' does not resolve within the unfold bound"),
        name(name) {}
  std::string name;
};

struct StateCapExceeded : std::runtime_error {
  explicit StateCapExceeded(size_t cap)
      : std::runtime_error("state cap exceeded (" + std::to_string(cap) + ")") {}
};

// A step: a multiset of events executed simultaneously ("tau" included).
struct StepLabel {
  std::multiset<std::string> events;

  bool tau_only() const;
  StepLabel hidden() const;  // taus removed (may become empty)
  std::string str() const;   // {a,b}
  bool operator==(const StepLabel& o) const { return events == o.events; }
  bool operator<(const StepLabel& o) const { return events < o.events; }
};

struct Limits {
  size_t max_states = 20000;
  size_t unfold = 64;
  size_t step_limit = 100000;
  size_t max_pomset = 6;

  // applies PPTC_LIMITS, e.g. "max_states=5000,unfold=32"
  static Limits from_env();
  static Limits from_env(Limits base);
};

// Bound evaluation context for the structured operational semantics.
struct SemCtx {
  const AlgebraDecl* alg = nullptr;
  const RecSpec* rec = nullptr;
  const DataEnv* env = nullptr;  // null: data-free, guards limited to eps/delta
  bool interleave_race_only = true;
  size_t unfold = 64;

  SemCtx() = default;
  explicit SemCtx(const SpecFile& spec, size_t unfold_bound = 64)
      : alg(&spec.algebra),
        rec(spec.recspec.empty() ? nullptr : &spec.recspec),
        env(spec.data_env ? &*spec.data_env : nullptr),
        unfold(unfold_bound) {}
};

// weights over static (fully resolved) terms
using Dist = std::vector<std::pair<Rational, TermPtr>>;

// The full support of mu(t, .) at data state s (s = -1 when data-free):
// canonical, deduplicated, weights sum to exactly 1.
Dist resolve(const TermPtr& t, int s, const SemCtx& cx);

// Clause-based probability distribution function. r may be wrapped in a
// Resolved marker or given as a plain static term.
Rational mu(const TermPtr& t, const TermPtr& r, int s, const SemCtx& cx);

struct Move {
  StepLabel label;
  TermPtr target;  // null = successful termination
  int state;       // successor data state

  bool operator<(const Move& o) const;
  bool operator==(const Move& o) const;
};

// All action steps of a static term at data state s, per the action SOS:
// synchronous steps from parallel operators, communications via gamma,
// race-condition interleavings, encapsulation blocking and projection
// decrements. Guard and epsilon passage is absorbed (see can_terminate).
std::vector<Move> action_steps(const TermPtr& r, int s, const SemCtx& cx);

// True when r may terminate silently at s (epsilon/guard passage to sqrt).
bool can_terminate(const TermPtr& r, int s, const SemCtx& cx);

enum class PKind { Prob, Res, Term };

struct PState {
  PKind kind;
  TermPtr term;  // null for the sqrt states
  int data = -1;
  bool terminating = false;  // Res only: silent edge to sqrt
  int term_target = -1;      // the sqrt state the silent edge points to
};

struct Plts {
  std::vector<PState> states;
  std::vector<std::vector<std::pair<Rational, int>>> prob_edges;
  std::vector<std::vector<std::pair<StepLabel, int>>> act_edges;
  int root = 0;
  int sqrt_state = -1;  // first materialized sqrt (one exists per data state)

  size_t n_transitions() const;
  bool acyclic() const;
  // des (root, n_transitions, n_states); probabilistic edges as
  // (src, "prob 1/3", dst), steps as (src, "{a,b}", dst) and silent
  // termination as (src, "eps", sqrt).
  std::string export_text() const;
};

// Builds the alternating probabilistic transition system of `root` under the
// spec, starting at data state `initial_data` (default: state 0 when a data
// environment is present, -1 otherwise). Deterministic BFS numbering; the
// sqrt state is always materialized.
Plts build_plts(const TermPtr& root, const SpecFile& spec, const Limits& limits,
                int initial_data = -2);

}  // namespace pptc
