#pragma once

#include "pptc/term.hpp"

#include <random>

namespace pptc {

// Random closed terms for property suites. Deterministic per seed.
struct GenOptions {
  std::vector<std::string> events = {"a", "b", "c", "d"};
  std::vector<Rational> probs = {Rational(1, 4), Rational(1, 3), Rational(1, 2),
                                 Rational(2, 3)};
  size_t max_size = 12;
  bool with_constants = true;   // delta, eps, tau leaves
  bool with_prob = true;        // +[p]
  bool with_parallel = true;    // &, ||, |>, |
  bool with_conflict_ops = true;  // theta, <<
  bool with_encap = true;       // encap{H}
  bool with_guards = false;
  std::vector<std::string> guard_atoms;
  bool prob_free = false;       // overrides with_prob
};

TermPtr random_term(std::mt19937_64& rng, const GenOptions& opts);

// A random acyclic (recursion-free) term with at most `max_events` event
// leaves, suitable for the hp/hhp checkers.
TermPtr random_small_acyclic(std::mt19937_64& rng, size_t max_events,
                             const std::vector<std::string>& events);

}  // namespace pptc
