#include "pptc/rewriter.hpp"

#include "pptc/parser.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace pptc {

// ---------------------------------------------------------------------------
// Structural eliminations (shared with the semantics)
// ---------------------------------------------------------------------------

namespace {

bool event_free(const TermPtr& t) {
  if (t->kind == TermKind::Atom || t->kind == TermKind::Tau) return false;
  if (t->lhs && !event_free(t->lhs)) return false;
  if (t->rhs && !event_free(t->rhs)) return false;
  return true;
}

// silent-capable and actionless: pure guard/epsilon combinations
bool silent_only(const TermPtr& t) { return event_free(t) && may_pass_silently(t); }

void atoms_in_order(const TermPtr& t, std::vector<std::string>& out) {
  if (t->kind == TermKind::Atom) out.push_back(t->name);
  if (t->lhs) atoms_in_order(t->lhs, out);
  if (t->rhs) atoms_in_order(t->rhs, out);
}

// one unless filtering step of event e against event f (U1-U3/PU1-PU3 with
// the spec's concurrent-default order; protection checked before inherited
// threat)
std::string pair_transform(const std::string& e, const std::string& f, const AlgebraDecl& a) {
  auto conf = [&](const std::string& x, const std::string& y) {
    return a.in_conflict(x, y) || a.in_prob_conflict(x, y);
  };
  if (conf(e, f)) return "tau";
  for (const auto& pr : a.conflicts) {
    const auto check = [&](const std::string& x, const std::string& partner) {
      return x == e && a.leq_ext(partner, f);
    };
    if (check(pr.first, pr.second) || check(pr.second, pr.first)) return e;
  }
  for (const auto& pr : a.prob_conflicts) {
    const auto check = [&](const std::string& x, const std::string& partner) {
      return x == e && a.leq_ext(partner, f);
    };
    if (check(pr.first, pr.second) || check(pr.second, pr.first)) return e;
  }
  for (const auto& pr : a.conflicts) {
    const auto check = [&](const std::string& x, const std::string& partner) {
      return x == f && a.leq_ext(partner, e);
    };
    if (check(pr.first, pr.second) || check(pr.second, pr.first)) return "tau";
  }
  for (const auto& pr : a.prob_conflicts) {
    const auto check = [&](const std::string& x, const std::string& partner) {
      return x == f && a.leq_ext(partner, e);
    };
    if (check(pr.first, pr.second) || check(pr.second, pr.first)) return "tau";
  }
  return e;
}

std::string fold_transform(const std::string& e, const std::vector<std::string>& against,
                           const AlgebraDecl& a) {
  std::string cur = e;
  for (const auto& f : against) {
    if (cur == "tau") break;
    cur = pair_transform(cur, f, a);
  }
  return cur;
}

// converts a pure guard/epsilon combination into a guard expression
GuardPtr to_guard_expr(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Guard: return t->guard;
    case TermKind::Epsilon: return g_eps();
    case TermKind::Delta: return g_delta();
    case TermKind::Seq: return g_seq(to_guard_expr(t->lhs), to_guard_expr(t->rhs));
    case TermKind::Alt: return g_plus(to_guard_expr(t->lhs), to_guard_expr(t->rhs));
    case TermKind::ProbAlt:
      return g_prob(to_guard_expr(t->lhs), t->prob, to_guard_expr(t->rhs));
    case TermKind::LeftMerge:
      return g_lmerge(to_guard_expr(t->lhs), to_guard_expr(t->rhs));
    default:
      throw std::logic_error("not a guard combination: " + std::to_string(int(t->kind)));
  }
}

TermPtr atoms_as_term(const std::vector<std::string>& atoms) {
  TermPtr acc;
  for (const auto& e : atoms) {
    TermPtr at = t_atom(e);
    acc = acc ? t_alt(acc, at) : at;
  }
  return acc;
}

}  // namespace

TermPtr unless_transform_atom(const std::string& event,
                              const std::multiset<std::string>& against,
                              const AlgebraDecl& algebra) {
  std::vector<std::string> v(against.begin(), against.end());
  std::string r = fold_transform(event, v, algebra);
  return r == "tau" ? t_tau() : t_atom(r);
}

static TermPtr unless_elim_ordered(const TermPtr& t, const std::vector<std::string>& against,
                                   const AlgebraDecl& a) {
  if (against.empty()) return t;
  switch (t->kind) {
    case TermKind::Atom: {
      std::string r = fold_transform(t->name, against, a);
      return r == "tau" ? t_tau() : t_atom(r);
    }
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Guard:
      return t;
    case TermKind::RecVar:
      // residual; resolved lazily after RDP unfolding
      return t_unless(t, atoms_as_term(against));
    case TermKind::ConflictElim:
      return unless_elim_ordered(theta_eliminate(t->lhs, a), against, a);
    case TermKind::Unless: {
      std::vector<std::string> inner;
      atoms_in_order(t->rhs, inner);
      if (!free_recvars(t->rhs).empty())
        throw std::runtime_error("unsupported: unless over a recursive right operand");
      return unless_elim_ordered(unless_elim_ordered(t->lhs, inner, a), against, a);
    }
    case TermKind::Encap:
      return t_encap(t->set, unless_elim_ordered(t->lhs, against, a));
    case TermKind::Hide:
      return t_hide(t->set, unless_elim_ordered(t->lhs, against, a));
    case TermKind::Project:
      return t_project(t->depth, unless_elim_ordered(t->lhs, against, a));
    case TermKind::Resolved:
      return t_resolved(unless_elim_ordered(t->lhs, against, a));
    case TermKind::ProbAlt:
      return t_prob(unless_elim_ordered(t->lhs, against, a), t->prob,
                    unless_elim_ordered(t->rhs, against, a));
    default: {
      Term copy = *t;
      copy.hash_memo = 0;
      copy.lhs = unless_elim_ordered(t->lhs, against, a);
      copy.rhs = unless_elim_ordered(t->rhs, against, a);
      return std::make_shared<const Term>(std::move(copy));
    }
  }
}

TermPtr unless_eliminate(const TermPtr& t, const std::multiset<std::string>& against,
                         const AlgebraDecl& algebra) {
  std::vector<std::string> v(against.begin(), against.end());
  return unless_elim_ordered(t, v, algebra);
}

TermPtr theta_eliminate(const TermPtr& t, const AlgebraDecl& a) {
  auto filtered = [&](const TermPtr& x, const TermPtr& other) {
    std::vector<std::string> atoms;
    atoms_in_order(other, atoms);
    if (!free_recvars(other).empty())
      throw std::runtime_error("unsupported: theta over a recursive alternative");
    return unless_elim_ordered(theta_eliminate(x, a), atoms, a);
  };
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Guard:
      return t;
    case TermKind::RecVar:
      return t_celim(t);  // residual
    case TermKind::Alt:
      return t_alt(filtered(t->lhs, t->rhs), filtered(t->rhs, t->lhs));
    case TermKind::ProbAlt:
      return t_prob(filtered(t->lhs, t->rhs), t->prob, filtered(t->rhs, t->lhs));
    case TermKind::Seq:
      return t_seq(theta_eliminate(t->lhs, a), theta_eliminate(t->rhs, a));
    case TermKind::LeftMerge:
      return t_alt(t_lmerge(filtered(t->lhs, t->rhs), t->rhs),
                   t_lmerge(filtered(t->rhs, t->lhs), t->lhs));
    case TermKind::Comm:
      return t_alt(t_comm(filtered(t->lhs, t->rhs), t->rhs),
                   t_comm(filtered(t->rhs, t->lhs), t->lhs));
    case TermKind::Whole:
      return t_alt(t_whole(filtered(t->lhs, t->rhs), t->rhs),
                   t_whole(filtered(t->rhs, t->lhs), t->lhs));
    case TermKind::Par:
      return t_alt(t_par(filtered(t->lhs, t->rhs), t->rhs),
                   t_par(filtered(t->rhs, t->lhs), t->lhs));
    case TermKind::ConflictElim:
      return theta_eliminate(t->lhs, a);
    case TermKind::Unless: {
      std::vector<std::string> atoms;
      atoms_in_order(t->rhs, atoms);
      if (!free_recvars(t->rhs).empty())
        throw std::runtime_error("unsupported: theta over unless with recursive right operand");
      return unless_elim_ordered(theta_eliminate(t->lhs, a), atoms, a);
    }
    case TermKind::Encap:
      return t_encap(t->set, theta_eliminate(t->lhs, a));
    case TermKind::Hide:
      return t_hide(t->set, theta_eliminate(t->lhs, a));
    case TermKind::Project:
      return t_project(t->depth, theta_eliminate(t->lhs, a));
    case TermKind::Resolved:
      return t_resolved(theta_eliminate(t->lhs, a));
  }
  return t;
}

TermPtr hide_rename(const TermPtr& t, const std::vector<std::string>& hidden) {
  // only atomic guards rename structurally (their passage must become a tau
  // action); events are hidden at the transition level by the runtime
  // wrapper, which is the only way to catch communication results
  if (hidden.empty()) return t;
  auto in = [&](const std::string& name) {
    return std::binary_search(hidden.begin(), hidden.end(), name);
  };
  switch (t->kind) {
    case TermKind::Guard:
      if (t->guard->kind == GuardKind::Atom && in(t->guard->atom)) return t_tau();
      return t;
    case TermKind::Atom:
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
      return t;
    case TermKind::RecVar:
      return t_hide(hidden, t);  // residual, unfolded under its own wrapper
    case TermKind::Hide:
      if (t->set == hidden) return t;  // residuals stay as they are
      return t_hide(t->set, hide_rename(t->lhs, hidden));
    default: {
      Term copy = *t;
      copy.hash_memo = 0;
      if (t->lhs) copy.lhs = hide_rename(t->lhs, hidden);
      if (t->rhs) copy.rhs = hide_rename(t->rhs, hidden);
      return std::make_shared<const Term>(std::move(copy));
    }
  }
}

// ---------------------------------------------------------------------------
// Basic terms
// ---------------------------------------------------------------------------

static bool is_cluster(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::Tau:
    case TermKind::Guard:
      return true;
    case TermKind::LeftMerge:
      return is_cluster(t->lhs) && is_cluster(t->rhs);
    default:
      return false;
  }
}

bool is_basic_term(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Guard:
      return true;
    case TermKind::Seq:
      return is_cluster(t->lhs) && is_basic_term(t->rhs);
    case TermKind::Alt:
    case TermKind::ProbAlt:
    case TermKind::LeftMerge:
      return is_basic_term(t->lhs) && is_basic_term(t->rhs);
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Rule engine
// ---------------------------------------------------------------------------

namespace {

struct Ctx {
  const AlgebraDecl& alg;
  const DataEnv* env;
  const RecSpec* rec;  // RDP under projections
  size_t limit;
  size_t count = 0;
  RewriteTrace* trace;
};

struct Fired {
  const char* rule;
  TermPtr after;
};

using MaybeFired = std::optional<Fired>;

bool is_guard_not_of(const TermPtr& g, const TermPtr& h) {
  // h == !g at the guard level
  return g->kind == TermKind::Guard && h->kind == TermKind::Guard &&
         h->guard->kind == GuardKind::Not && equal(h->guard->lhs, g->guard);
}

bool is_atomish(const TermPtr& t) {
  return t->kind == TermKind::Atom || t->kind == TermKind::Tau;
}

bool eval_all_states(const GuardPtr& g, const DataEnv& env, bool want) {
  for (int s = 0; s < env.n_states(); ++s)
    if (eval_guard(g, s, env) != want) return false;
  return true;
}

std::vector<char> guard_column(const GuardPtr& g, const DataEnv& env) {
  std::vector<char> col(env.n_states(), 0);
  for (int s = 0; s < env.n_states(); ++s) col[s] = eval_guard(g, s, env) ? 1 : 0;
  return col;
}

// --- Alt ---

MaybeFired step_alt(const TermPtr& t, Ctx& cx) {
  std::vector<TermPtr> sums = alt_summands(t);
  // RA6: x + delta -> x
  for (size_t i = 0; i < sums.size(); ++i) {
    if (sums[i]->kind == TermKind::Delta) {
      std::vector<TermPtr> rest;
      for (size_t j = 0; j < sums.size(); ++j)
        if (j != i) rest.push_back(sums[j]);
      return Fired{"RA6", alt_of(rest)};
    }
  }
  // RA3: x + x -> x (summands are sorted, duplicates adjacent). Restricted to
  // summands with Dirac resolution: for probabilistic x the two copies of
  // x + x resolve independently and mixed outcomes carry weight, so the
  // unrestricted law is unsound (the parallelism table accordingly weakens
  // A3 to e + e = e).
  for (size_t i = 0; i + 1 < sums.size(); ++i) {
    if (!prob_free_spine(sums[i])) continue;
    if (equal(sums[i], sums[i + 1])) {
      std::vector<TermPtr> rest;
      for (size_t j = 0; j < sums.size(); ++j)
        if (j != i) rest.push_back(sums[j]);
      return Fired{"RA3", alt_of(rest)};
    }
  }
  // RG2: phi + !phi -> eps
  for (size_t i = 0; i < sums.size(); ++i)
    for (size_t j = 0; j < sums.size(); ++j) {
      if (i == j) continue;
      if (is_guard_not_of(sums[i], sums[j])) {
        std::vector<TermPtr> rest;
        rest.push_back(t_eps());
        for (size_t k = 0; k < sums.size(); ++k)
          if (k != i && k != j) rest.push_back(sums[k]);
        return Fired{"RG2", alt_of(rest)};
      }
    }
  // GF (derived): pure guard/epsilon summands fuse into one guard; passage of
  // a probabilistic choice or sum of guards is their disjunction, and keeping
  // them as separate summands would let RA4/RPA5 duplicate a probabilistic
  // continuation across independently passing branches
  {
    std::vector<size_t> silent;
    for (size_t i = 0; i < sums.size(); ++i)
      if (silent_only(sums[i])) silent.push_back(i);
    if (silent.size() >= 2) {
      GuardPtr fused = to_guard_expr(sums[silent[0]]);
      for (size_t k = 1; k < silent.size(); ++k)
        fused = g_plus(fused, to_guard_expr(sums[silent[k]]));
      std::vector<TermPtr> rest{t_guard(fused)};
      for (size_t i = 0; i < sums.size(); ++i)
        if (!std::count(silent.begin(), silent.end(), i)) rest.push_back(sums[i]);
      return Fired{"GF", alt_of(rest)};
    }
  }
  // RPA5: (x +[p] y) + z -> (x + z) +[p] (y + z)
  for (size_t i = sums.size(); i-- > 0;) {
    if (sums[i]->kind == TermKind::ProbAlt) {
      std::vector<TermPtr> with_l, with_r;
      for (size_t j = 0; j < sums.size(); ++j) {
        if (j == i) continue;
        with_l.push_back(sums[j]);
        with_r.push_back(sums[j]);
      }
      with_l.push_back(sums[i]->lhs);
      with_r.push_back(sums[i]->rhs);
      return Fired{"RPA5", t_prob(alt_of(with_l), sums[i]->prob, alt_of(with_r))};
    }
  }
  return std::nullopt;
}

// --- ProbAlt (certified spine normalization) ---

struct SpineNode {
  // the ProbAlt whose rhs is leaf index i (i >= 1); node 1's lhs is leaf 0
  std::vector<TermPtr> leaves;
};

// rebuilds a left-nested spine with the same leaves but a rule applied; the
// weights are tracked by re-applying the schemas, so we only ever transform
// via t_prob on existing nodes

TermPtr rpa1_at(const TermPtr& node) {  // x +[p] y -> y +[1-p] x
  return t_prob(node->rhs, Rational(1) - node->prob, node->lhs);
}

TermPtr rpa2_at(const TermPtr& node) {  // x +[pi] (y +[rho] z) -> (x +[..] y) +[..] z
  const Rational& pi = node->prob;
  const Rational& rho = node->rhs->prob;
  Rational sigma = pi + rho - pi * rho;
  return t_prob(t_prob(node->lhs, pi / sigma, node->rhs->lhs), sigma, node->rhs->rhs);
}

// applies f at the spine position addressed by going left `downs` times
TermPtr apply_on_left_spine(const TermPtr& t, int downs,
                            const std::function<TermPtr(const TermPtr&)>& f) {
  if (downs == 0) return f(t);
  return t_prob(apply_on_left_spine(t->lhs, downs - 1, f), t->prob, t->rhs);
}

void left_spine_leaves(const TermPtr& t, std::vector<TermPtr>& out) {
  if (t->kind == TermKind::ProbAlt) {
    left_spine_leaves(t->lhs, out);
    out.push_back(t->rhs);
  } else {
    out.push_back(t);
  }
}

// finds a node with a ProbAlt right child; returns the number of left steps
// to it, or -1
int find_right_defect(const TermPtr& t, int depth) {
  if (t->kind != TermKind::ProbAlt) return -1;
  int inner = find_right_defect(t->lhs, depth + 1);
  if (inner >= 0) return inner;
  if (t->rhs->kind == TermKind::ProbAlt) return depth;
  return -1;
}

MaybeFired step_proballt(const TermPtr& t, Ctx& cx) {
  // RPG1: phi +[p] !phi -> eps
  if (is_guard_not_of(t->lhs, t->rhs) || is_guard_not_of(t->rhs, t->lhs))
    return Fired{"RPG1", t_eps()};
  // RPA3 at the node itself
  if (equal(t->lhs, t->rhs)) return Fired{"RPA3", t->lhs};
  // GF (derived): probabilistic choice between pure guard combinations is
  // passage disjunction (PG1); fuse before the spine rules touch it
  if (silent_only(t->lhs) && silent_only(t->rhs))
    return Fired{"GF", t_guard(g_prob(to_guard_expr(t->lhs), t->prob, to_guard_expr(t->rhs)))};
  // left-nesting: apply RPA2 at the innermost defect
  int defect = find_right_defect(t, 0);
  if (defect >= 0)
    return Fired{"RPA2", apply_on_left_spine(t, defect, rpa2_at)};

  std::vector<TermPtr> leaves;
  left_spine_leaves(t, leaves);
  const int k = static_cast<int>(leaves.size());
  auto node_of_leaf = [&](int j) { return k - 1 - j; };  // left steps to spine node with rhs = leaf j

  // merge duplicates: bring the two smallest equal leaves together, RPA3 them
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (!equal(leaves[i], leaves[j])) continue;
      if (i == 0 && j == 1) {
        // innermost node is ProbAlt(leaf0, p, leaf1) with equal children
        return Fired{"RPA3",
                     apply_on_left_spine(t, k - 2, [](const TermPtr& n) { return n->lhs; })};
      }
      int lift = (i == 0) ? j : i;
      return Fired{"RPA1", apply_on_left_spine(t, node_of_leaf(lift), rpa1_at)};
    }
  }

  // sort to the canonical order via move-to-front operations
  std::vector<TermPtr> goal = leaves;
  std::sort(goal.begin(), goal.end(),
            [](const TermPtr& a, const TermPtr& b) { return compare(a, b) < 0; });
  bool sorted = true;
  for (int i = 0; i < k; ++i)
    if (!equal(leaves[i], goal[i])) {
      sorted = false;
      break;
    }
  if (sorted) return std::nullopt;
  // smallest i such that leaves start with goal[i..k-1]
  int start = k;  // empty suffix always matches
  for (int i = k - 1; i >= 0; --i) {
    bool match = k - i <= k;
    for (int d = 0; d < k - i && match; ++d) match = equal(leaves[d], goal[i + d]);
    if (match)
      start = i;
    else
      break;
  }
  // next: move goal[start-1] to the front
  int pos = -1;
  for (int j = 0; j < k; ++j)
    if (equal(leaves[j], goal[start - 1])) {
      pos = j;
      break;
    }
  assert(pos >= 1);
  return Fired{"RPA1", apply_on_left_spine(t, node_of_leaf(pos), rpa1_at)};
}

// --- Seq ---

MaybeFired step_seq(const TermPtr& t, Ctx& cx) {
  const TermPtr& x = t->lhs;
  const TermPtr& y = t->rhs;
  if (x->kind == TermKind::Delta) return Fired{"RA7", t_delta()};
  if (x->kind == TermKind::Epsilon) return Fired{"RA8", y};
  if (y->kind == TermKind::Epsilon) return Fired{"RA9", x};
  if (x->kind == TermKind::Alt)
    return Fired{"RA4", t_alt(t_seq(x->lhs, y), t_seq(x->rhs, y))};
  if (x->kind == TermKind::ProbAlt)
    return Fired{"RPA4", t_prob(t_seq(x->lhs, y), x->prob, t_seq(x->rhs, y))};
  if (x->kind == TermKind::Seq)
    return Fired{"RA5", t_seq(x->lhs, t_seq(x->rhs, y))};
  if (x->kind == TermKind::Guard) {
    if (y->kind == TermKind::Delta) return Fired{"RG3", t_delta()};
    if (is_guard_not_of(x, y)) return Fired{"RG1", t_delta()};
    if (y->kind == TermKind::Alt)
      return Fired{"RG4", t_alt(t_seq(x, y->lhs), t_seq(x, y->rhs))};
    if (y->kind == TermKind::ProbAlt)
      return Fired{"RPG2", t_prob(t_seq(x, y->lhs), y->prob, t_seq(x, y->rhs))};
    if (cx.env) {
      // RG9: a jointly unsatisfiable guard prefix collapses to delta
      std::vector<GuardPtr> prefix{x->guard};
      TermPtr rest = y;
      while (rest->kind == TermKind::Guard ||
             (rest->kind == TermKind::Seq && rest->lhs->kind == TermKind::Guard)) {
        if (rest->kind == TermKind::Guard) {
          prefix.push_back(rest->guard);
          rest = nullptr;
          break;
        }
        prefix.push_back(rest->lhs->guard);
        rest = rest->rhs;
      }
      bool joint_unsat = true;
      for (int s = 0; s < cx.env->n_states() && joint_unsat; ++s) {
        bool all = true;
        for (const auto& g : prefix)
          if (!eval_guard(g, s, *cx.env)) {
            all = false;
            break;
          }
        if (all) joint_unsat = false;
      }
      if (cx.env->n_states() > 0 && joint_unsat && prefix.size() > 1)
        return Fired{"RG9", t_delta()};
      // RG10/RG11: weakest-precondition laws psi . e . phi . rest
      if (y->kind == TermKind::Seq && y->lhs->kind == TermKind::Atom) {
        const std::string& e = y->lhs->name;
        TermPtr tail = y->rhs;
        GuardPtr trailing;
        TermPtr after_tail;  // nullptr when the guard ends the term
        if (tail->kind == TermKind::Guard) {
          trailing = tail->guard;
        } else if (tail->kind == TermKind::Seq && tail->lhs->kind == TermKind::Guard) {
          trailing = tail->lhs->guard;
          after_tail = tail->rhs;
        }
        if (trailing) {
          std::vector<char> col = guard_column(x->guard, *cx.env);
          if (col == wp_states(e, trailing, *cx.env)) {
            TermPtr dropped = after_tail ? t_seq(y->lhs, after_tail) : y->lhs;
            return Fired{"RG10", t_seq(x, dropped)};
          }
          if (trailing->kind == GuardKind::Not) {
            std::vector<char> wp = wp_states(e, trailing->lhs, *cx.env);
            for (auto& c : wp) c = c ? 0 : 1;
            if (col == wp) {
              TermPtr dropped = after_tail ? t_seq(y->lhs, after_tail) : y->lhs;
              return Fired{"RG11", t_seq(x, dropped)};
            }
          }
        }
      }
    }
  }
  // derived: a silent-only prefix distributes over probabilistic choice
  if (y->kind == TermKind::ProbAlt && silent_only(x))
    return Fired{"PG2d", t_prob(t_seq(x, y->lhs), y->prob, t_seq(x, y->rhs))};
  return std::nullopt;
}

// --- guards as standalone terms ---

MaybeFired step_guard(const TermPtr& t, Ctx& cx) {
  if (cx.env && cx.env->n_states() > 0) {
    if (eval_all_states(t->guard, *cx.env, true)) return Fired{"RG8", t_eps()};
    if (eval_all_states(t->guard, *cx.env, false)) return Fired{"RG9", t_delta()};
  }
  return std::nullopt;
}

// --- Whole ---

MaybeFired step_whole(const TermPtr& t, Ctx& cx) {
  if (t->rhs->kind == TermKind::ProbAlt)
    return Fired{"PM5", t_prob(t_whole(t->lhs, t->rhs->lhs), t->rhs->prob,
                               t_whole(t->lhs, t->rhs->rhs))};
  if (t->lhs->kind == TermKind::ProbAlt)
    return Fired{"PM6", t_prob(t_whole(t->lhs->lhs, t->rhs), t->lhs->prob,
                               t_whole(t->lhs->rhs, t->rhs))};
  if (prob_free_spine(t->lhs) && prob_free_spine(t->rhs))
    return Fired{"RP1", t_alt(t_par(t->lhs, t->rhs), t_comm(t->lhs, t->rhs))};
  return std::nullopt;
}

// --- Par ---

MaybeFired step_par(const TermPtr& t, Ctx& cx) {
  if (t->rhs->kind == TermKind::ProbAlt)
    return Fired{"RPM1", t_prob(t_par(t->lhs, t->rhs->lhs), t->rhs->prob,
                                t_par(t->lhs, t->rhs->rhs))};
  if (t->lhs->kind == TermKind::ProbAlt)
    return Fired{"RPM2", t_prob(t_par(t->lhs->lhs, t->rhs), t->lhs->prob,
                                t_par(t->lhs->rhs, t->rhs))};
  if (prob_free_spine(t->lhs) && prob_free_spine(t->rhs))
    return Fired{"RP4", t_alt(t_lmerge(t->lhs, t->rhs), t_lmerge(t->rhs, t->lhs))};
  return std::nullopt;
}

// --- LeftMerge ---

MaybeFired step_lmerge(const TermPtr& t, Ctx& cx) {
  const TermPtr& x = t->lhs;
  const TermPtr& y = t->rhs;
  if (x->kind == TermKind::Delta) return Fired{"RP9", t_delta()};
  if (x->kind == TermKind::Epsilon) return Fired{"RP10", y};
  if (y->kind == TermKind::Epsilon) return Fired{"RP11", x};
  if (x->kind == TermKind::Guard && is_guard_not_of(x, y)) return Fired{"RG21", t_delta()};
  // guard components gate the whole merge (see ledger): x |> [g] = [g] . x
  if (y->kind == TermKind::Guard) return Fired{"GLM1", t_seq(y, x)};
  if (x->kind == TermKind::Guard) return Fired{"GLM2", t_seq(x, y)};
  // derived mixture distributions; pulled out before +-distribution so that
  // the duplicated operand always has a Dirac resolution
  if (x->kind == TermKind::ProbAlt)
    return Fired{"LMP1", t_prob(t_lmerge(x->lhs, y), x->prob, t_lmerge(x->rhs, y))};
  if (y->kind == TermKind::ProbAlt)
    return Fired{"LMP2", t_prob(t_lmerge(x, y->lhs), y->prob, t_lmerge(x, y->rhs))};
  if (x->kind == TermKind::Alt && prob_free_spine(y))
    return Fired{"RP8", t_alt(t_lmerge(x->lhs, y), t_lmerge(x->rhs, y))};
  // derived right distribution (sound for the step semantics; see ledger)
  if (y->kind == TermKind::Alt && prob_free_spine(x))
    return Fired{"LMR", t_alt(t_lmerge(x, y->lhs), t_lmerge(x, y->rhs))};
  // cluster-prefix forms of P5-P7 (the completeness normal forms carry
  // left-merge clusters as step prefixes, so the single-event patterns of the
  // table are too narrow); the side condition ranges over all event pairs
  auto cluster_atoms = [&](const TermPtr& c, std::vector<std::string>& out) {
    std::multiset<std::string> ms;
    event_atoms(c, ms);
    out.assign(ms.begin(), ms.end());
  };
  auto cluster_leq = [&](const TermPtr& a, const TermPtr& b) {
    std::vector<std::string> ea, eb;
    cluster_atoms(a, ea);
    cluster_atoms(b, eb);
    for (const auto& e1 : ea)
      for (const auto& e2 : eb)
        if (!cx.alg.leq_ext(e1, e2)) return false;
    return true;
  };
  auto cluster_dead = [&](const TermPtr& a, const TermPtr& b) {
    std::vector<std::string> ea, eb;
    cluster_atoms(a, ea);
    cluster_atoms(b, eb);
    for (const auto& e1 : ea)
      for (const auto& e2 : eb)
        if (!cx.alg.concurrent(e1, e2)) return true;
    return false;
  };
  bool xc = is_cluster(x), yc = is_cluster(y);
  bool xpc = x->kind == TermKind::Seq && is_cluster(x->lhs);
  bool ypc = y->kind == TermKind::Seq && is_cluster(y->lhs);
  // a pair ruled out by declared order or conflict can never take its joint
  // step; these merges are deadlocked
  if ((xc || xpc) && (yc || ypc) &&
      cluster_dead(xc ? x : x->lhs, yc ? y : y->lhs))
    return Fired{"LMD", t_delta()};
  if (xc && ypc && cluster_leq(x, y->lhs))
    return Fired{"RP5", t_seq(t_lmerge(x, y->lhs), y->rhs)};
  if (xpc && yc && cluster_leq(x->lhs, y))
    return Fired{"RP6", t_seq(t_lmerge(x->lhs, y), x->rhs)};
  if (xpc && ypc && cluster_leq(x->lhs, y->lhs))
    return Fired{"RP7", t_seq(t_lmerge(x->lhs, y->lhs), t_whole(x->rhs, y->rhs))};
  return std::nullopt;
}

// --- Comm ---

bool comm_dead_operand(const TermPtr& t) {
  // no single-event initial move is ever possible
  if (t->kind == TermKind::Guard || t->kind == TermKind::Epsilon) return true;
  if (t->kind == TermKind::LeftMerge) return true;  // normalized clusters step jointly
  if (t->kind == TermKind::Seq && t->lhs->kind == TermKind::LeftMerge) return true;
  return false;
}

MaybeFired step_comm(const TermPtr& t, Ctx& cx) {
  const TermPtr& x = t->lhs;
  const TermPtr& y = t->rhs;
  if (y->kind == TermKind::ProbAlt)
    return Fired{"RPM3", t_prob(t_comm(x, y->lhs), y->prob, t_comm(x, y->rhs))};
  if (x->kind == TermKind::ProbAlt)
    return Fired{"RPM4", t_prob(t_comm(x->lhs, y), x->prob, t_comm(x->rhs, y))};
  if (x->kind == TermKind::Alt && prob_free_spine(y))
    return Fired{"RC5", t_alt(t_comm(x->lhs, y), t_comm(x->rhs, y))};
  if (y->kind == TermKind::Alt && prob_free_spine(x))
    return Fired{"RC6", t_alt(t_comm(x, y->lhs), t_comm(x, y->rhs))};
  if (x->kind == TermKind::Delta) return Fired{"RC7", t_delta()};
  if (y->kind == TermKind::Delta) return Fired{"RC8", t_delta()};
  if (x->kind == TermKind::Epsilon) return Fired{"RC9", t_delta()};
  if (y->kind == TermKind::Epsilon) return Fired{"RC10", t_delta()};
  // guard prefixes gate the communication (derived)
  if (x->kind == TermKind::Seq && x->lhs->kind == TermKind::Guard)
    return Fired{"CG1", t_seq(x->lhs, t_comm(x->rhs, y))};
  if (y->kind == TermKind::Seq && y->lhs->kind == TermKind::Guard)
    return Fired{"CG2", t_seq(y->lhs, t_comm(x, y->rhs))};
  if (comm_dead_operand(x) || comm_dead_operand(y)) return Fired{"CG3", t_delta()};
  auto gamma_term = [&](const TermPtr& a, const TermPtr& b) -> TermPtr {
    if (a->kind == TermKind::Tau || b->kind == TermKind::Tau) return t_delta();
    auto c = cx.alg.gamma(a->name, b->name);
    return c ? t_atom(*c) : t_delta();
  };
  if (is_atomish(x) && is_atomish(y)) return Fired{"RC1", gamma_term(x, y)};
  if (is_atomish(x) && y->kind == TermKind::Seq && is_atomish(y->lhs)) {
    TermPtr g = gamma_term(x, y->lhs);
    return Fired{"RC2", g->kind == TermKind::Delta ? t_delta() : t_seq(g, y->rhs)};
  }
  if (x->kind == TermKind::Seq && is_atomish(x->lhs) && is_atomish(y)) {
    TermPtr g = gamma_term(x->lhs, y);
    return Fired{"RC3", g->kind == TermKind::Delta ? t_delta() : t_seq(g, x->rhs)};
  }
  if (x->kind == TermKind::Seq && is_atomish(x->lhs) && y->kind == TermKind::Seq &&
      is_atomish(y->lhs)) {
    TermPtr g = gamma_term(x->lhs, y->lhs);
    return Fired{"RC4",
                 g->kind == TermKind::Delta ? t_delta() : t_seq(g, t_whole(x->rhs, y->rhs))};
  }
  return std::nullopt;
}

// --- Theta / Unless ---

MaybeFired step_theta(const TermPtr& t, Ctx& cx) {
  const TermPtr& x = t->lhs;
  switch (x->kind) {
    case TermKind::Atom:
    case TermKind::Tau:
      return Fired{"RCE1", x};
    case TermKind::Delta:
      return Fired{"RCE2", x};
    case TermKind::Epsilon:
      return Fired{"RCE3", x};
    case TermKind::Guard:
      return Fired{"RG22", x};
    case TermKind::Alt:
      return Fired{"RCE4", t_alt(t_unless(t_celim(x->lhs), x->rhs),
                                 t_unless(t_celim(x->rhs), x->lhs))};
    case TermKind::ProbAlt:
      return Fired{"RPCE1", t_prob(t_unless(t_celim(x->lhs), x->rhs), x->prob,
                                   t_unless(t_celim(x->rhs), x->lhs))};
    case TermKind::Seq:
      return Fired{"RCE5", t_seq(t_celim(x->lhs), t_celim(x->rhs))};
    case TermKind::LeftMerge:
      return Fired{"RCE6", t_alt(t_lmerge(t_unless(t_celim(x->lhs), x->rhs), x->rhs),
                                 t_lmerge(t_unless(t_celim(x->rhs), x->lhs), x->lhs))};
    case TermKind::Comm:
      return Fired{"RCE7", t_alt(t_comm(t_unless(t_celim(x->lhs), x->rhs), x->rhs),
                                 t_comm(t_unless(t_celim(x->rhs), x->lhs), x->lhs))};
    case TermKind::Whole:
      return Fired{"CEW", t_alt(t_whole(t_unless(t_celim(x->lhs), x->rhs), x->rhs),
                                t_whole(t_unless(t_celim(x->rhs), x->lhs), x->lhs))};
    case TermKind::Par:
      return Fired{"CEP", t_alt(t_par(t_unless(t_celim(x->lhs), x->rhs), x->rhs),
                                t_par(t_unless(t_celim(x->rhs), x->lhs), x->lhs))};
    case TermKind::Encap:
      return Fired{"CED", t_encap(x->set, t_celim(x->lhs))};
    case TermKind::Hide:
      return Fired{"CEH", t_hide(x->set, t_celim(x->lhs))};
    case TermKind::Project:
      return Fired{"CEPj", t_project(x->depth, t_celim(x->lhs))};
    case TermKind::Unless:
      return Fired{"CEU", t_unless(t_celim(x->lhs), x->rhs)};
    case TermKind::ConflictElim:
      return Fired{"CECE", t_celim(x->lhs)};
    default:
      return std::nullopt;
  }
}

MaybeFired step_unless(const TermPtr& t, Ctx& cx) {
  const TermPtr& x = t->lhs;
  const TermPtr& y = t->rhs;
  // right operand decomposed to atoms first
  if (y->kind == TermKind::Alt)
    return Fired{"RU12", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::ProbAlt)
    return Fired{"RPU5", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::Seq)
    return Fired{"RU13", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::LeftMerge)
    return Fired{"RU14", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::Comm)
    return Fired{"RU15", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::Whole)
    return Fired{"URW", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::Par)
    return Fired{"URP", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::Unless)
    return Fired{"URI", t_unless(t_unless(x, y->lhs), y->rhs)};
  if (y->kind == TermKind::ConflictElim || y->kind == TermKind::Encap ||
      y->kind == TermKind::Hide || y->kind == TermKind::Project)
    return Fired{"URI", t_unless(x, y->lhs)};  // only the raw atom set matters
  // then the left operand
  if (x->kind == TermKind::Alt)
    return Fired{"RU8", t_alt(t_unless(x->lhs, y), t_unless(x->rhs, y))};
  if (x->kind == TermKind::ProbAlt)
    return Fired{"RPU4", t_prob(t_unless(x->lhs, y), x->prob, t_unless(x->rhs, y))};
  if (x->kind == TermKind::Seq)
    return Fired{"RU9", t_seq(t_unless(x->lhs, y), t_unless(x->rhs, y))};
  if (x->kind == TermKind::LeftMerge)
    return Fired{"RU10", t_lmerge(t_unless(x->lhs, y), t_unless(x->rhs, y))};
  if (x->kind == TermKind::Comm)
    return Fired{"RU11", t_comm(t_unless(x->lhs, y), t_unless(x->rhs, y))};
  if (x->kind == TermKind::Whole)
    return Fired{"UW", t_whole(t_unless(x->lhs, y), t_unless(x->rhs, y))};
  if (x->kind == TermKind::Par)
    return Fired{"UP", t_par(t_unless(x->lhs, y), t_unless(x->rhs, y))};
  if (x->kind == TermKind::Encap)
    return Fired{"UEn", t_encap(x->set, t_unless(x->lhs, y))};
  if (x->kind == TermKind::Hide)
    return Fired{"UHi", t_hide(x->set, t_unless(x->lhs, y))};
  if (x->kind == TermKind::Project)
    return Fired{"UPj", t_project(x->depth, t_unless(x->lhs, y))};
  // atomic cases
  if (x->kind == TermKind::Delta) return Fired{"RU5", t_delta()};
  if (x->kind == TermKind::Epsilon) return Fired{"RU7", t_eps()};  // paper's `-> e` is a typo
  if (x->kind == TermKind::Guard) return Fired{"UGl", x};
  if (y->kind == TermKind::Delta) return Fired{"RU4", x};
  if (y->kind == TermKind::Epsilon) return Fired{"RU6", x};
  if (y->kind == TermKind::Guard) return Fired{"UGr", x};
  if (x->kind == TermKind::Tau) return Fired{"UTl", x};
  if (y->kind == TermKind::Tau) return Fired{"UTr", x};
  if (x->kind == TermKind::Atom && y->kind == TermKind::Atom) {
    const std::string& e = x->name;
    const std::string& f = y->name;
    if (cx.alg.in_conflict(e, f)) return Fired{"RU1", t_tau()};
    if (cx.alg.in_prob_conflict(e, f)) return Fired{"RPU1", t_tau()};
    auto hit = [&](const std::set<std::pair<std::string, std::string>>& rel,
                   const std::string& who, const std::string& vs) {
      for (const auto& pr : rel)
        if ((pr.first == who && cx.alg.leq_ext(pr.second, vs)) ||
            (pr.second == who && cx.alg.leq_ext(pr.first, vs)))
          return true;
      return false;
    };
    if (hit(cx.alg.conflicts, e, f)) return Fired{"RU2", x};
    if (hit(cx.alg.prob_conflicts, e, f)) return Fired{"RPU2", x};
    if (hit(cx.alg.conflicts, f, e)) return Fired{"RU3", t_tau()};
    if (hit(cx.alg.prob_conflicts, f, e)) return Fired{"RPU3", t_tau()};
    return Fired{"UDef", x};
  }
  return std::nullopt;
}

// --- Encap ---

// encapsulating a merge distributes only when no blocked event can still
// communicate into an unblocked result on the inside
bool encap_comm_safe(const std::vector<std::string>& H, const AlgebraDecl& alg) {
  auto in = [&](const std::string& e) { return std::binary_search(H.begin(), H.end(), e); };
  for (const auto& [pair, target] : alg.comm) {
    if (target == "delta" || in(target)) continue;
    if (in(pair.first) || in(pair.second)) return false;
  }
  return true;
}

MaybeFired step_encap(const TermPtr& t, Ctx& cx) {
  const auto& H = t->set;
  const TermPtr& x = t->lhs;
  auto blocked = [&](const std::string& e) {
    return std::binary_search(H.begin(), H.end(), e);
  };
  switch (x->kind) {
    case TermKind::Atom:
      return blocked(x->name) ? Fired{"RD2", t_delta()} : Fired{"RD1", x};
    case TermKind::Tau:
      return Fired{"RD1", x};
    case TermKind::Delta:
      return Fired{"RD3", x};
    case TermKind::Epsilon:
      return Fired{"RD7", x};  // derived: encapsulation does not block passage
    case TermKind::Guard:
      return Fired{"RG23", x};
    case TermKind::Alt:
      return Fired{"RD4", t_alt(t_encap(H, x->lhs), t_encap(H, x->rhs))};
    case TermKind::ProbAlt:
      return Fired{"RPD1", t_prob(t_encap(H, x->lhs), x->prob, t_encap(H, x->rhs))};
    case TermKind::Seq:
      return Fired{"RD5", t_seq(t_encap(H, x->lhs), t_encap(H, x->rhs))};
    case TermKind::LeftMerge:
      if (!(is_cluster(x->lhs) && is_cluster(x->rhs)) && !encap_comm_safe(H, cx.alg))
        return std::nullopt;
      return Fired{"RD6", t_lmerge(t_encap(H, x->lhs), t_encap(H, x->rhs))};
    default:
      return std::nullopt;
  }
}

// --- Hide ---

MaybeFired step_hide(const TermPtr& t, Ctx& cx) {
  const auto& I = t->set;
  const TermPtr& x = t->lhs;
  auto hidden = [&](const std::string& e) {
    return std::binary_search(I.begin(), I.end(), e);
  };
  switch (x->kind) {
    case TermKind::Atom:
      return hidden(x->name) ? Fired{"RTI2", t_tau()} : Fired{"RTI1", x};
    case TermKind::Tau:
      return Fired{"RTI1", x};
    case TermKind::Delta:
      return Fired{"RTI3", x};
    case TermKind::Epsilon:
      return Fired{"RTI7", x};  // derived
    case TermKind::Guard:
      if (x->guard->kind == GuardKind::Atom && hidden(x->guard->atom))
        return Fired{"RG29", t_tau()};
      return Fired{"RG28", x};
    case TermKind::Alt:
      return Fired{"RTI4", t_alt(t_hide(I, x->lhs), t_hide(I, x->rhs))};
    case TermKind::ProbAlt:
      return Fired{"RPTI1", t_prob(t_hide(I, x->lhs), x->prob, t_hide(I, x->rhs))};
    case TermKind::Seq:
      return Fired{"RTI5", t_seq(t_hide(I, x->lhs), t_hide(I, x->rhs))};
    case TermKind::LeftMerge:
      return Fired{"RTI6", t_lmerge(t_hide(I, x->lhs), t_hide(I, x->rhs))};
    default:
      return std::nullopt;
  }
}

// --- Project ---

MaybeFired step_project(const TermPtr& t, Ctx& cx) {
  const long n = t->depth;
  const TermPtr& x = t->lhs;
  if (n == 0) return Fired{"PR5", t_delta()};
  switch (x->kind) {
    case TermKind::Delta:
      return Fired{"PR6", x};
    case TermKind::Epsilon:
      return Fired{"PRE", x};  // derived: passage costs no depth
    case TermKind::Guard:
      return Fired{"PRG1", x};
    case TermKind::Tau:
    case TermKind::Atom:
      return Fired{"PR3", x};
    case TermKind::Alt:
      return Fired{"PR1", t_alt(t_project(n, x->lhs), t_project(n, x->rhs))};
    case TermKind::ProbAlt:
      return Fired{"PPR1", t_prob(t_project(n, x->lhs), x->prob, t_project(n, x->rhs))};
    case TermKind::Seq:
      if (x->lhs->kind == TermKind::Guard)
        return Fired{"PRG2", t_seq(x->lhs, t_project(n, x->rhs))};
      if (x->lhs->kind == TermKind::Epsilon)
        return Fired{"PRE", t_project(n, x->rhs)};
      if (is_cluster(x->lhs))
        return Fired{"PR4", t_seq(x->lhs, t_project(n - 1, x->rhs))};
      return std::nullopt;
    case TermKind::LeftMerge:
      if (is_cluster(x)) return Fired{"PR3", x};
      return Fired{"PR2", t_lmerge(t_project(n, x->lhs), t_project(n, x->rhs))};
    case TermKind::Whole:
      return Fired{"PPR2a", t_whole(t_project(n, x->lhs), t_project(n, x->rhs))};
    case TermKind::Par:
      return Fired{"PPR2b", t_par(t_project(n, x->lhs), t_project(n, x->rhs))};
    case TermKind::Comm:
      return Fired{"PPR2c", t_comm(t_project(n, x->lhs), t_project(n, x->rhs))};
    case TermKind::Encap:
      return Fired{"PRD", t_encap(x->set, t_project(n, x->lhs))};
    case TermKind::Hide:
      return Fired{"PRH", t_hide(x->set, t_project(n, x->lhs))};
    case TermKind::Project:
      return Fired{"PRP", t_project(std::min(n, x->depth), x->lhs)};
    case TermKind::RecVar:
      if (cx.rec) {
        const TermPtr* rhs = cx.rec->find(x->name);
        if (!rhs) throw NotClosed(x->name);
        return Fired{"RDP", t_project(n, *rhs)};
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

MaybeFired step_at(const TermPtr& t, Ctx& cx) {
  switch (t->kind) {
    case TermKind::Alt: return step_alt(t, cx);
    case TermKind::ProbAlt: return step_proballt(t, cx);
    case TermKind::Seq: return step_seq(t, cx);
    case TermKind::Guard: return step_guard(t, cx);
    case TermKind::Whole: return step_whole(t, cx);
    case TermKind::Par: return step_par(t, cx);
    case TermKind::LeftMerge: return step_lmerge(t, cx);
    case TermKind::Comm: return step_comm(t, cx);
    case TermKind::ConflictElim: return step_theta(t, cx);
    case TermKind::Unless: return step_unless(t, cx);
    case TermKind::Encap: return step_encap(t, cx);
    case TermKind::Hide: return step_hide(t, cx);
    case TermKind::Project: return step_project(t, cx);
    default: return std::nullopt;
  }
}

TermPtr nf(TermPtr t, Ctx& cx, const std::string& path);

TermPtr nf_children(const TermPtr& t, Ctx& cx, const std::string& path) {
  if (!t->lhs && !t->rhs) return t;
  Term copy = *t;
  copy.hash_memo = 0;
  if (t->lhs) copy.lhs = nf(t->lhs, cx, path + "0/");
  if (t->rhs) copy.rhs = nf(t->rhs, cx, path + "1/");
  TermPtr rebuilt = std::make_shared<const Term>(std::move(copy));
  // re-normalize constructors with built-in normalization
  if (rebuilt->kind == TermKind::ProbAlt) rebuilt = t_prob(rebuilt->lhs, rebuilt->prob, rebuilt->rhs);
  return rebuilt;
}

TermPtr nf(TermPtr t, Ctx& cx, const std::string& path) {
  for (;;) {
    // theta and unless rewrite raw operands: their laws are syntactic on the
    // operand's event atoms, so normalizing underneath first (e.g. a|b to
    // gamma(a,b)) would change which conflicts the filter sees
    if (t->kind == TermKind::ConflictElim || t->kind == TermKind::Unless) {
      if (t->lhs->kind == TermKind::ConflictElim || t->lhs->kind == TermKind::Unless) {
        TermPtr lhs = nf(t->lhs, cx, path + "0/");
        t = t->kind == TermKind::ConflictElim ? t_celim(lhs) : t_unless(lhs, t->rhs);
      }
      t = canonicalize(t);
    } else {
      t = canonicalize(nf_children(t, cx, path));
    }
    MaybeFired f = step_at(t, cx);
    if (!f) return t;
    if (++cx.count > cx.limit) throw StepLimitExceeded(cx.limit);
    TermPtr after = canonicalize(f->after);
    if (cx.trace) cx.trace->steps.push_back({f->rule, path.empty() ? "/" : path, t, after});
    t = after;
  }
}

}  // namespace

std::string RewriteTrace::to_text() const {
  std::string out;
  for (const auto& s : steps) {
    out += s.rule;
    out += " @ ";
    out += s.path;
    out += " : ";
    out += pretty_print(s.before);
    out += " ==> ";
    out += pretty_print(s.after);
    out += "\n";
  }
  return out;
}

std::pair<TermPtr, RewriteTrace> normalize(const TermPtr& t, const AlgebraDecl& algebra,
                                           const RewriteOptions& opts) {
  auto fv = free_recvars(t);
  if (!fv.empty() && !opts.rec) throw NotClosed(*fv.begin());
  RewriteTrace trace;
  Ctx cx{algebra, opts.env, opts.rec, opts.step_limit, 0, &trace};
  TermPtr result = nf(canonicalize(t), cx, "");
  return {result, std::move(trace)};
}

std::pair<TermPtr, RewriteTrace> project_rewrite(const TermPtr& t, long n,
                                                 const AlgebraDecl& algebra,
                                                 const RewriteOptions& opts) {
  RewriteTrace trace;
  Ctx cx{algebra, opts.env, opts.rec, opts.step_limit, 0, &trace};
  TermPtr result = nf(canonicalize(t_project(n, t)), cx, "");
  std::function<bool(const TermPtr&)> has_proj = [&](const TermPtr& u) {
    if (u->kind == TermKind::Project) return true;
    if (u->lhs && has_proj(u->lhs)) return true;
    return u->rhs && has_proj(u->rhs);
  };
  if (has_proj(result))
    throw std::runtime_error("projection not eliminable (free or unguarded recursion?)");
  return {result, std::move(trace)};
}

bool audit_step(const RewriteStep& step, const AlgebraDecl& algebra,
                const RewriteOptions& opts) {
  Ctx cx{algebra, opts.env, opts.rec, opts.step_limit, 0, nullptr};
  MaybeFired f = step_at(step.before, cx);
  if (!f) return false;
  if (step.rule != f->rule) return false;
  return equal(canonicalize(f->after), step.after);
}

}  // namespace pptc
