#pragma once

#include "pptc/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pptc {

// ---------------------------------------------------------------------------
// Guard expressions
// ---------------------------------------------------------------------------

enum class GuardKind { Atom, Not, Plus, Prob, Seq, LeftMerge, Delta, Eps };

struct GuardExpr;
using GuardPtr = std::shared_ptr<const GuardExpr>;

struct GuardExpr {
  GuardKind kind;
  std::string atom;  // Atom
  Rational prob;     // Prob
  GuardPtr lhs, rhs;
};

GuardPtr g_atom(std::string name);
GuardPtr g_not(GuardPtr g);
GuardPtr g_plus(GuardPtr a, GuardPtr b);
GuardPtr g_prob(GuardPtr a, Rational p, GuardPtr b);
GuardPtr g_seq(GuardPtr a, GuardPtr b);
GuardPtr g_lmerge(GuardPtr a, GuardPtr b);
GuardPtr g_delta();
GuardPtr g_eps();

int compare(const GuardExpr& a, const GuardExpr& b);
bool equal(const GuardPtr& a, const GuardPtr& b);
std::string to_string(const GuardExpr& g);

// Collects the atomic guard names occurring in g.
void guard_atoms(const GuardPtr& g, std::set<std::string>& out);

// ---------------------------------------------------------------------------
// Process terms
// ---------------------------------------------------------------------------

enum class TermKind {
  Atom,          // declared event
  Delta,         // deadlock
  Epsilon,       // empty process
  Tau,           // silent step
  Guard,         // guard test embedded in a term
  Seq,           // x . y
  Alt,           // x + y
  ProbAlt,       // x +[p] y, 0 < p < 1
  Whole,         // x & y   (whole parallel)
  Par,           // x || y
  LeftMerge,     // x |> y
  Comm,          // x | y   (communication merge)
  ConflictElim,  // theta(x)
  Unless,        // x << y
  Encap,         // encap{H}(x)
  Hide,          // hide{I}(x)
  Project,       // pi[n](x)
  RecVar,        // recursion variable bound by a RecSpec
  Resolved,      // marker for a fully resolved (static) term
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  TermKind kind;
  std::string name;               // Atom event name / RecVar name
  GuardPtr guard;                 // Guard
  Rational prob;                  // ProbAlt
  TermPtr lhs, rhs;               // children; unary operators use lhs
  std::vector<std::string> set;   // Encap/Hide event set, sorted unique
  long depth = 0;                 // Project

  mutable size_t hash_memo = 0;   // 0 = not computed yet
};

struct BadProbability : std::runtime_error {
  explicit BadProbability(const std::string& what) : std::runtime_error(what) {}
};

// Reserved words; not usable as event or variable names.
bool is_reserved_name(const std::string& name);

TermPtr t_atom(std::string event);
TermPtr t_delta();
TermPtr t_eps();
TermPtr t_tau();
TermPtr t_guard(GuardPtr g);
TermPtr t_seq(TermPtr a, TermPtr b);
TermPtr t_alt(TermPtr a, TermPtr b);
// p in {0,1} is normalized away to the surviving operand; p outside [0,1] throws.
TermPtr t_prob(TermPtr a, Rational p, TermPtr b);
TermPtr t_whole(TermPtr a, TermPtr b);
TermPtr t_par(TermPtr a, TermPtr b);
TermPtr t_lmerge(TermPtr a, TermPtr b);
TermPtr t_comm(TermPtr a, TermPtr b);
TermPtr t_celim(TermPtr a);
TermPtr t_unless(TermPtr a, TermPtr b);
TermPtr t_encap(std::vector<std::string> H, TermPtr a);
TermPtr t_hide(std::vector<std::string> I, TermPtr a);
TermPtr t_project(long n, TermPtr a);
TermPtr t_recvar(std::string name);
TermPtr t_resolved(TermPtr a);

// Fixed total term order: Delta < Epsilon < Tau < Atom(name) < Guard < RecVar
// < composites by constructor tag, then lexicographically by children.
int compare(const Term& a, const Term& b);
int compare(const TermPtr& a, const TermPtr& b);
bool equal(const TermPtr& a, const TermPtr& b);
size_t hash_of(const TermPtr& t);

size_t term_size(const TermPtr& t);

// Flattens an Alt spine into its summand list (left-to-right).
std::vector<TermPtr> alt_summands(const TermPtr& t);
// Builds the canonical right-nested Alt over the given summands (must be
// non-empty); does not sort.
TermPtr alt_of(const std::vector<TermPtr>& summands);

// Applies A1/A2 only: flattens + and sorts summands under the fixed term
// order, recursively. Idempotent and semantics-preserving.
TermPtr canonicalize(const TermPtr& t);

// Replaces free recursion variables; unbound names pass through unchanged.
TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& bindings);

std::set<std::string> free_recvars(const TermPtr& t);

// True if no ProbAlt occurs at a position that probabilistic resolution can
// reach (the "x+x=x" side conditions of P1/P4 and B1/B2).
bool prob_free_spine(const TermPtr& t);

// Syntactic over-approximation: the term might terminate without performing
// an action in some data state (epsilon or guard passage).
bool may_pass_silently(const TermPtr& t);

// All event names occurring as Atom leaves.
void event_atoms(const TermPtr& t, std::multiset<std::string>& out);

// ---------------------------------------------------------------------------
// Algebra declarations
// ---------------------------------------------------------------------------

struct AlgebraDecl {
  std::set<std::string> events;
  // gamma, stored once per unordered pair. "delta" as target blocks.
  std::map<std::pair<std::string, std::string>, std::string> comm;
  // strict causal order pairs (a < b), transitively closed by finalize().
  std::set<std::pair<std::string, std::string>> causal;
  std::set<std::pair<std::string, std::string>> conflicts;       // #
  std::set<std::pair<std::string, std::string>> prob_conflicts;  // #p
  std::set<std::pair<std::string, std::string>> races;           // %

  bool is_event(const std::string& e) const { return events.count(e) != 0; }
  // gamma(a,b); nullopt when undefined or mapped to delta (blocked either way).
  std::optional<std::string> gamma(const std::string& a, const std::string& b) const;
  bool lt(const std::string& a, const std::string& b) const;   // strict declared order
  bool in_conflict(const std::string& a, const std::string& b) const;
  bool in_prob_conflict(const std::string& a, const std::string& b) const;
  bool in_race(const std::string& a, const std::string& b) const;
  // Undeclared pairs default to concurrent; a pair is concurrent when it is
  // not strictly ordered either way and not in (probabilistic) conflict.
  // Self-pairs count as concurrent (no strict self-order, # irreflexive).
  bool concurrent(const std::string& a, const std::string& b) const;
  // Extended order used by left-merge side conditions: a < b or a, b concurrent.
  bool leq_ext(const std::string& a, const std::string& b) const;

  // Transitively closes the causal order; returns validation warnings and
  // throws std::runtime_error on hard errors (cyclic order, gamma into
  // eps/tau, reflexive conflicts).
  std::vector<std::string> finalize();
};

// ---------------------------------------------------------------------------
// Recursive specifications
// ---------------------------------------------------------------------------

struct RecSpec {
  std::vector<std::pair<std::string, TermPtr>> equations;  // declaration order

  bool empty() const { return equations.empty(); }
  const TermPtr* find(const std::string& name) const;
  void add(const std::string& name, TermPtr rhs);
};

}  // namespace pptc
