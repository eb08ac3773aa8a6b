#include "pptc/term.hpp"

#include <algorithm>
#include <functional>

namespace pptc {

// ---------------------------------------------------------------------------
// Guards
// ---------------------------------------------------------------------------

static GuardPtr mk_guard(GuardExpr g) {
  return std::make_shared<const GuardExpr>(std::move(g));
}

GuardPtr g_atom(std::string name) {
  GuardExpr g;
  g.kind = GuardKind::Atom;
  g.atom = std::move(name);
  return mk_guard(std::move(g));
}
GuardPtr g_not(GuardPtr x) {
  GuardExpr g;
  g.kind = GuardKind::Not;
  g.lhs = std::move(x);
  return mk_guard(std::move(g));
}
static GuardPtr g_bin(GuardKind k, GuardPtr a, GuardPtr b) {
  GuardExpr g;
  g.kind = k;
  g.lhs = std::move(a);
  g.rhs = std::move(b);
  return mk_guard(std::move(g));
}
GuardPtr g_plus(GuardPtr a, GuardPtr b) { return g_bin(GuardKind::Plus, std::move(a), std::move(b)); }
GuardPtr g_seq(GuardPtr a, GuardPtr b) { return g_bin(GuardKind::Seq, std::move(a), std::move(b)); }
GuardPtr g_lmerge(GuardPtr a, GuardPtr b) { return g_bin(GuardKind::LeftMerge, std::move(a), std::move(b)); }
GuardPtr g_prob(GuardPtr a, Rational p, GuardPtr b) {
  if (!is_probability(p)) throw BadProbability("guard probability outside [0,1]: " + to_string(p));
  if (p == 0) return b;
  if (p == 1) return a;
  GuardExpr g;
  g.kind = GuardKind::Prob;
  g.prob = std::move(p);
  g.lhs = std::move(a);
  g.rhs = std::move(b);
  return mk_guard(std::move(g));
}
GuardPtr g_delta() {
  GuardExpr g;
  g.kind = GuardKind::Delta;
  return mk_guard(std::move(g));
}
GuardPtr g_eps() {
  GuardExpr g;
  g.kind = GuardKind::Eps;
  return mk_guard(std::move(g));
}

int compare(const GuardExpr& a, const GuardExpr& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case GuardKind::Atom:
      return a.atom.compare(b.atom);
    case GuardKind::Delta:
    case GuardKind::Eps:
      return 0;
    case GuardKind::Not:
      return compare(*a.lhs, *b.lhs);
    case GuardKind::Prob: {
      if (int c = compare(*a.lhs, *b.lhs)) return c;
      if (int c = compare(*a.rhs, *b.rhs)) return c;
      if (a.prob != b.prob) return a.prob < b.prob ? -1 : 1;
      return 0;
    }
    default: {
      if (int c = compare(*a.lhs, *b.lhs)) return c;
      return compare(*a.rhs, *b.rhs);
    }
  }
}

bool equal(const GuardPtr& a, const GuardPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return compare(*a, *b) == 0;
}

void guard_atoms(const GuardPtr& g, std::set<std::string>& out) {
  if (!g) return;
  if (g->kind == GuardKind::Atom) out.insert(g->atom);
  guard_atoms(g->lhs, out);
  guard_atoms(g->rhs, out);
}

// ---------------------------------------------------------------------------
// Term construction
// ---------------------------------------------------------------------------

bool is_reserved_name(const std::string& n) {
  return n == "delta" || n == "eps" || n == "tau" || n == "theta" || n == "encap" ||
         n == "hide" || n == "pi";
}

static TermPtr mk(Term t) { return std::make_shared<const Term>(std::move(t)); }

TermPtr t_atom(std::string event) {
  if (event.empty() || is_reserved_name(event))
    throw std::invalid_argument("bad event name: '" + event + "'");
  Term t;
  t.kind = TermKind::Atom;
  t.name = std::move(event);
  return mk(std::move(t));
}
TermPtr t_delta() {
  Term t;
  t.kind = TermKind::Delta;
  return mk(std::move(t));
}
TermPtr t_eps() {
  Term t;
  t.kind = TermKind::Epsilon;
  return mk(std::move(t));
}
TermPtr t_tau() {
  Term t;
  t.kind = TermKind::Tau;
  return mk(std::move(t));
}
TermPtr t_guard(GuardPtr g) {
  Term t;
  t.kind = TermKind::Guard;
  t.guard = std::move(g);
  return mk(std::move(t));
}
static TermPtr t_bin(TermKind k, TermPtr a, TermPtr b) {
  Term t;
  t.kind = k;
  t.lhs = std::move(a);
  t.rhs = std::move(b);
  return mk(std::move(t));
}
TermPtr t_seq(TermPtr a, TermPtr b) { return t_bin(TermKind::Seq, std::move(a), std::move(b)); }
TermPtr t_alt(TermPtr a, TermPtr b) { return t_bin(TermKind::Alt, std::move(a), std::move(b)); }
TermPtr t_whole(TermPtr a, TermPtr b) { return t_bin(TermKind::Whole, std::move(a), std::move(b)); }
TermPtr t_par(TermPtr a, TermPtr b) { return t_bin(TermKind::Par, std::move(a), std::move(b)); }
TermPtr t_lmerge(TermPtr a, TermPtr b) { return t_bin(TermKind::LeftMerge, std::move(a), std::move(b)); }
TermPtr t_comm(TermPtr a, TermPtr b) { return t_bin(TermKind::Comm, std::move(a), std::move(b)); }
TermPtr t_unless(TermPtr a, TermPtr b) { return t_bin(TermKind::Unless, std::move(a), std::move(b)); }

TermPtr t_prob(TermPtr a, Rational p, TermPtr b) {
  if (!is_probability(p)) throw BadProbability("probability outside [0,1]: " + to_string(p));
  if (p == 1) return a;
  if (p == 0) return b;
  Term t;
  t.kind = TermKind::ProbAlt;
  t.prob = std::move(p);
  t.lhs = std::move(a);
  t.rhs = std::move(b);
  return mk(std::move(t));
}
TermPtr t_celim(TermPtr a) {
  Term t;
  t.kind = TermKind::ConflictElim;
  t.lhs = std::move(a);
  return mk(std::move(t));
}
static std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}
TermPtr t_encap(std::vector<std::string> H, TermPtr a) {
  Term t;
  t.kind = TermKind::Encap;
  t.set = sorted_unique(std::move(H));
  t.lhs = std::move(a);
  return mk(std::move(t));
}
TermPtr t_hide(std::vector<std::string> I, TermPtr a) {
  Term t;
  t.kind = TermKind::Hide;
  t.set = sorted_unique(std::move(I));
  t.lhs = std::move(a);
  return mk(std::move(t));
}
TermPtr t_project(long n, TermPtr a) {
  if (n < 0) throw std::invalid_argument("projection depth must be >= 0");
  Term t;
  t.kind = TermKind::Project;
  t.depth = n;
  t.lhs = std::move(a);
  return mk(std::move(t));
}
TermPtr t_recvar(std::string name) {
  if (name.empty() || is_reserved_name(name))
    throw std::invalid_argument("bad recursion variable name: '" + name + "'");
  Term t;
  t.kind = TermKind::RecVar;
  t.name = std::move(name);
  return mk(std::move(t));
}
TermPtr t_resolved(TermPtr a) {
  if (a->kind == TermKind::Resolved) return a;
  Term t;
  t.kind = TermKind::Resolved;
  t.lhs = std::move(a);
  return mk(std::move(t));
}

// ---------------------------------------------------------------------------
// Order, equality, hashing
// ---------------------------------------------------------------------------

static int kind_rank(TermKind k) {
  switch (k) {
    case TermKind::Delta: return 0;
    case TermKind::Epsilon: return 1;
    case TermKind::Tau: return 2;
    case TermKind::Atom: return 3;
    case TermKind::Guard: return 4;
    case TermKind::RecVar: return 5;
    case TermKind::Seq: return 6;
    case TermKind::Alt: return 7;
    case TermKind::ProbAlt: return 8;
    case TermKind::Whole: return 9;
    case TermKind::Par: return 10;
    case TermKind::LeftMerge: return 11;
    case TermKind::Comm: return 12;
    case TermKind::ConflictElim: return 13;
    case TermKind::Unless: return 14;
    case TermKind::Encap: return 15;
    case TermKind::Hide: return 16;
    case TermKind::Project: return 17;
    case TermKind::Resolved: return 18;
  }
  return 99;
}

int compare(const Term& a, const Term& b) {
  int ra = kind_rank(a.kind), rb = kind_rank(b.kind);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind) {
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
      return 0;
    case TermKind::Atom:
    case TermKind::RecVar:
      return a.name.compare(b.name);
    case TermKind::Guard:
      return compare(*a.guard, *b.guard);
    case TermKind::Encap:
    case TermKind::Hide: {
      if (a.set != b.set) return a.set < b.set ? -1 : 1;
      return compare(*a.lhs, *b.lhs);
    }
    case TermKind::Project: {
      if (a.depth != b.depth) return a.depth < b.depth ? -1 : 1;
      return compare(*a.lhs, *b.lhs);
    }
    case TermKind::ConflictElim:
    case TermKind::Resolved:
      return compare(*a.lhs, *b.lhs);
    case TermKind::ProbAlt: {
      if (int c = compare(*a.lhs, *b.lhs)) return c;
      if (int c = compare(*a.rhs, *b.rhs)) return c;
      if (a.prob != b.prob) return a.prob < b.prob ? -1 : 1;
      return 0;
    }
    default: {
      if (int c = compare(*a.lhs, *b.lhs)) return c;
      return compare(*a.rhs, *b.rhs);
    }
  }
}

int compare(const TermPtr& a, const TermPtr& b) {
  if (a == b) return 0;
  return compare(*a, *b);
}

bool equal(const TermPtr& a, const TermPtr& b) { return compare(a, b) == 0; }

static size_t hash_mix(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

static size_t guard_hash(const GuardPtr& g) {
  if (!g) return 0;
  size_t h = static_cast<size_t>(g->kind) * 1315423911u;
  if (g->kind == GuardKind::Atom) h = hash_mix(h, std::hash<std::string>{}(g->atom));
  if (g->kind == GuardKind::Prob) h = hash_mix(h, std::hash<std::string>{}(to_string(g->prob)));
  h = hash_mix(h, guard_hash(g->lhs));
  h = hash_mix(h, guard_hash(g->rhs));
  return h;
}

size_t hash_of(const TermPtr& t) {
  if (t->hash_memo) return t->hash_memo;
  size_t h = static_cast<size_t>(kind_rank(t->kind)) * 2654435761u + 17;
  if (!t->name.empty()) h = hash_mix(h, std::hash<std::string>{}(t->name));
  if (t->guard) h = hash_mix(h, guard_hash(t->guard));
  if (t->kind == TermKind::ProbAlt) h = hash_mix(h, std::hash<std::string>{}(to_string(t->prob)));
  for (const auto& e : t->set) h = hash_mix(h, std::hash<std::string>{}(e));
  if (t->kind == TermKind::Project) h = hash_mix(h, static_cast<size_t>(t->depth));
  if (t->lhs) h = hash_mix(h, hash_of(t->lhs));
  if (t->rhs) h = hash_mix(h, hash_of(t->rhs));
  if (h == 0) h = 1;
  t->hash_memo = h;
  return h;
}

size_t term_size(const TermPtr& t) {
  size_t n = 1;
  if (t->lhs) n += term_size(t->lhs);
  if (t->rhs) n += term_size(t->rhs);
  return n;
}

// ---------------------------------------------------------------------------
// Canonicalization (A1/A2 only)
// ---------------------------------------------------------------------------

std::vector<TermPtr> alt_summands(const TermPtr& t) {
  std::vector<TermPtr> out;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& u) {
    if (u->kind == TermKind::Alt) {
      walk(u->lhs);
      walk(u->rhs);
    } else {
      out.push_back(u);
    }
  };
  walk(t);
  return out;
}

TermPtr alt_of(const std::vector<TermPtr>& summands) {
  if (summands.empty()) throw std::invalid_argument("alt_of: empty summand list");
  TermPtr acc = summands.back();
  for (size_t i = summands.size() - 1; i-- > 0;) acc = t_alt(summands[i], acc);
  return acc;
}

TermPtr canonicalize(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Atom:
    case TermKind::Guard:
    case TermKind::RecVar:
      return t;
    case TermKind::Alt: {
      std::vector<TermPtr> sums;
      for (const auto& s : alt_summands(t)) sums.push_back(canonicalize(s));
      std::sort(sums.begin(), sums.end(),
                [](const TermPtr& a, const TermPtr& b) { return compare(a, b) < 0; });
      return alt_of(sums);
    }
    case TermKind::ProbAlt:
      return t_prob(canonicalize(t->lhs), t->prob, canonicalize(t->rhs));
    case TermKind::Seq:
      return t_seq(canonicalize(t->lhs), canonicalize(t->rhs));
    case TermKind::Whole:
      return t_whole(canonicalize(t->lhs), canonicalize(t->rhs));
    case TermKind::Par:
      return t_par(canonicalize(t->lhs), canonicalize(t->rhs));
    case TermKind::LeftMerge:
      return t_lmerge(canonicalize(t->lhs), canonicalize(t->rhs));
    case TermKind::Comm:
      return t_comm(canonicalize(t->lhs), canonicalize(t->rhs));
    case TermKind::ConflictElim:
      return t_celim(canonicalize(t->lhs));
    case TermKind::Unless:
      return t_unless(canonicalize(t->lhs), canonicalize(t->rhs));
    case TermKind::Encap:
      return t_encap(t->set, canonicalize(t->lhs));
    case TermKind::Hide:
      return t_hide(t->set, canonicalize(t->lhs));
    case TermKind::Project:
      return t_project(t->depth, canonicalize(t->lhs));
    case TermKind::Resolved:
      return t_resolved(canonicalize(t->lhs));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Substitution and variable collection
// ---------------------------------------------------------------------------

TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& bindings) {
  switch (t->kind) {
    case TermKind::RecVar: {
      auto it = bindings.find(t->name);
      return it == bindings.end() ? t : it->second;
    }
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Atom:
    case TermKind::Guard:
      return t;
    default: {
      Term copy = *t;
      copy.hash_memo = 0;
      if (t->lhs) copy.lhs = substitute(t->lhs, bindings);
      if (t->rhs) copy.rhs = substitute(t->rhs, bindings);
      return mk(std::move(copy));
    }
  }
}

std::set<std::string> free_recvars(const TermPtr& t) {
  std::set<std::string> out;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& u) {
    if (u->kind == TermKind::RecVar) out.insert(u->name);
    if (u->lhs) walk(u->lhs);
    if (u->rhs) walk(u->rhs);
  };
  walk(t);
  return out;
}

bool may_pass_silently(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Epsilon:
    case TermKind::Guard:
      return true;
    case TermKind::Delta:
    case TermKind::Atom:
    case TermKind::Tau:
      return false;
    case TermKind::Comm:
      return false;
    case TermKind::Alt:
    case TermKind::ProbAlt:
      return may_pass_silently(t->lhs) || may_pass_silently(t->rhs);
    case TermKind::Seq:
    case TermKind::Whole:
    case TermKind::Par:
    case TermKind::LeftMerge:
      return may_pass_silently(t->lhs) && may_pass_silently(t->rhs);
    case TermKind::Unless:
    case TermKind::ConflictElim:
    case TermKind::Encap:
    case TermKind::Hide:
    case TermKind::Resolved:
      return may_pass_silently(t->lhs);
    case TermKind::Project:
      return t->depth > 0 && may_pass_silently(t->lhs);
    case TermKind::RecVar:
      return true;  // unknown without unfolding
  }
  return true;
}

bool prob_free_spine(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::ProbAlt:
      return false;
    case TermKind::RecVar:
      return false;  // conservative
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Atom:
    case TermKind::Guard:
      return true;
    case TermKind::Seq:
      // the right operand is reached by resolution only through silent
      // passage of the left one
      return prob_free_spine(t->lhs) &&
             (!may_pass_silently(t->lhs) || prob_free_spine(t->rhs));
    case TermKind::Alt:
    case TermKind::Whole:
    case TermKind::Par:
    case TermKind::LeftMerge:
    case TermKind::Comm:
    case TermKind::Unless:
      return prob_free_spine(t->lhs) && (!t->rhs || prob_free_spine(t->rhs));
    case TermKind::ConflictElim:
    case TermKind::Encap:
    case TermKind::Hide:
    case TermKind::Project:
    case TermKind::Resolved:
      return prob_free_spine(t->lhs);
  }
  return false;
}

void event_atoms(const TermPtr& t, std::multiset<std::string>& out) {
  if (t->kind == TermKind::Atom) out.insert(t->name);
  if (t->lhs) event_atoms(t->lhs, out);
  if (t->rhs) event_atoms(t->rhs, out);
}

// ---------------------------------------------------------------------------
// AlgebraDecl
// ---------------------------------------------------------------------------

static std::pair<std::string, std::string> norm_pair(const std::string& a, const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::optional<std::string> AlgebraDecl::gamma(const std::string& a, const std::string& b) const {
  auto it = comm.find(norm_pair(a, b));
  if (it == comm.end() || it->second == "delta") return std::nullopt;
  return it->second;
}

bool AlgebraDecl::lt(const std::string& a, const std::string& b) const {
  return causal.count({a, b}) != 0;
}
bool AlgebraDecl::in_conflict(const std::string& a, const std::string& b) const {
  return conflicts.count(norm_pair(a, b)) != 0;
}
bool AlgebraDecl::in_prob_conflict(const std::string& a, const std::string& b) const {
  return prob_conflicts.count(norm_pair(a, b)) != 0;
}
bool AlgebraDecl::in_race(const std::string& a, const std::string& b) const {
  return races.count(norm_pair(a, b)) != 0;
}
bool AlgebraDecl::concurrent(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  return !lt(a, b) && !lt(b, a) && !in_conflict(a, b) && !in_prob_conflict(a, b);
}
bool AlgebraDecl::leq_ext(const std::string& a, const std::string& b) const {
  return lt(a, b) || concurrent(a, b);
}

std::vector<std::string> AlgebraDecl::finalize() {
  std::vector<std::string> warnings;
  // transitive closure of the strict order
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::pair<std::string, std::string>> add;
    for (const auto& [a, b] : causal)
      for (const auto& [c, d] : causal)
        if (b == c && !causal.count({a, d})) add.push_back({a, d});
    for (auto& p : add) {
      causal.insert(p);
      changed = true;
    }
  }
  for (const auto& [a, b] : causal)
    if (a == b) throw std::runtime_error("causal order is cyclic at '" + a + "'");
  for (const auto& [pair, target] : comm) {
    if (target == "eps" || target == "tau")
      throw std::runtime_error("gamma(" + pair.first + "," + pair.second +
                               ") may not map into eps/tau");
    if (pair.first == pair.second)
      warnings.push_back("gamma declared on identical events (" + pair.first + "," +
                         pair.second + ")");
    if (target != "delta" && !is_event(target))
      warnings.push_back("gamma target '" + target + "' is not a declared event");
  }
  for (const auto& [a, b] : conflicts)
    if (a == b) throw std::runtime_error("conflict relation must be irreflexive: " + a);
  for (const auto& [a, b] : prob_conflicts)
    if (a == b) throw std::runtime_error("probabilistic conflict must be irreflexive: " + a);
  return warnings;
}

// ---------------------------------------------------------------------------
// RecSpec
// ---------------------------------------------------------------------------

const TermPtr* RecSpec::find(const std::string& name) const {
  for (const auto& [n, t] : equations)
    if (n == name) return &t;
  return nullptr;
}

void RecSpec::add(const std::string& name, TermPtr rhs) {
  if (find(name)) throw std::runtime_error("duplicate equation for '" + name + "'");
  equations.emplace_back(name, std::move(rhs));
}

}  // namespace pptc
