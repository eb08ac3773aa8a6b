#include "pptc/semantics.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace pptc {

// ---------------------------------------------------------------------------
// StepLabel / Limits
// ---------------------------------------------------------------------------

bool StepLabel::tau_only() const {
  for (const auto& e : events)
    if (e != "tau") return false;
  return !events.empty();
}

StepLabel StepLabel::hidden() const {
  StepLabel out;
  for (const auto& e : events)
    if (e != "tau") out.events.insert(e);
  return out;
}

std::string StepLabel::str() const {
  std::string s = "{";
  bool first = true;
  for (const auto& e : events) {
    if (!first) s += ",";
    s += e;
    first = false;
  }
  return s + "}";
}

bool Move::operator<(const Move& o) const {
  if (!(label == o.label)) return label < o.label;
  if (state != o.state) return state < o.state;
  if (!target && !o.target) return false;
  if (!target != !o.target) return !target;
  return compare(target, o.target) < 0;
}
bool Move::operator==(const Move& o) const {
  if (!(label == o.label) || state != o.state) return false;
  if (!target || !o.target) return !target == !o.target;
  return equal(target, o.target);
}

Limits Limits::from_env() { return from_env(Limits{}); }

Limits Limits::from_env(Limits base) {
  const char* raw = std::getenv("PPTC_LIMITS");
  if (!raw) return base;
  std::string s(raw);
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    std::string item =
        s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    size_t eq = item.find('=');
    if (eq != std::string::npos) {
      std::string key = item.substr(0, eq);
      size_t value = std::stoul(item.substr(eq + 1));
      if (key == "max_states") base.max_states = value;
      else if (key == "unfold") base.unfold = value;
      else if (key == "step_limit") base.step_limit = value;
      else if (key == "max_pomset") base.max_pomset = value;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return base;
}

// ---------------------------------------------------------------------------
// Silent passage
// ---------------------------------------------------------------------------

namespace {

bool eval_guard_at(const GuardPtr& g, int s, const SemCtx& cx) {
  if (cx.env) return eval_guard(g, s, *cx.env);
  switch (g->kind) {
    case GuardKind::Eps: return true;
    case GuardKind::Delta: return false;
    case GuardKind::Not: return !eval_guard_at(g->lhs, s, cx);
    case GuardKind::Plus:
    case GuardKind::Prob:
      return eval_guard_at(g->lhs, s, cx) || eval_guard_at(g->rhs, s, cx);
    case GuardKind::Seq:
    case GuardKind::LeftMerge:
      return eval_guard_at(g->lhs, s, cx) && eval_guard_at(g->rhs, s, cx);
    case GuardKind::Atom:
      throw MissingDataEnv("guard atom '" + g->atom + "' used without a data environment");
  }
  return false;
}

[[noreturn]] void bad_static(const TermPtr& t, const char* where) {
  throw std::logic_error(std::string("unexpected ") + where +
                         " operand in static term: " + pretty_print(t));
}

}  // namespace

bool can_terminate(const TermPtr& r, int s, const SemCtx& cx) {
  switch (r->kind) {
    case TermKind::Epsilon: return true;
    case TermKind::Guard: return eval_guard_at(r->guard, s, cx);
    case TermKind::Delta:
    case TermKind::Atom:
    case TermKind::Tau:
      return false;
    case TermKind::Alt:
      return can_terminate(r->lhs, s, cx) || can_terminate(r->rhs, s, cx);
    case TermKind::Seq:
      // resolution packs a sequential composition only behind a non-silent
      // prefix; the silent part was split off as a separate summand
      return false;
    case TermKind::LeftMerge:
    case TermKind::Par:
      return can_terminate(r->lhs, s, cx) && can_terminate(r->rhs, s, cx);
    case TermKind::Comm:
      return false;
    case TermKind::Encap:
    case TermKind::Hide:
      return can_terminate(r->lhs, s, cx);
    case TermKind::Project:
      return r->depth > 0 && can_terminate(r->lhs, s, cx);
    case TermKind::Resolved:
      return can_terminate(r->lhs, s, cx);
    default:
      bad_static(r, "can_terminate");
  }
}

// ---------------------------------------------------------------------------
// action_steps
// ---------------------------------------------------------------------------

namespace {

std::vector<int> effect_states(const std::string& event, int s, const SemCtx& cx) {
  if (!cx.env) return {s};
  return cx.env->effect(event, s);
}

bool step_compatible(const StepLabel& a, const StepLabel& b, const AlgebraDecl& alg) {
  for (const auto& e1 : a.events)
    for (const auto& e2 : b.events) {
      if (e1 == "tau" || e2 == "tau") continue;
      if (!alg.concurrent(e1, e2)) return false;
    }
  return true;
}

StepLabel merge_labels(const StepLabel& a, const StepLabel& b) {
  StepLabel out = a;
  out.events.insert(b.events.begin(), b.events.end());
  return out;
}

TermPtr merge_targets(const TermPtr& a, const TermPtr& b) {
  if (!a && !b) return nullptr;
  if (!a) return b;
  if (!b) return a;
  return t_whole(a, b);
}

std::set<std::string> init_events(const std::vector<Move>& moves) {
  std::set<std::string> out;
  for (const auto& m : moves)
    for (const auto& e : m.label.events) out.insert(e);
  return out;
}

void sync_moves(const std::vector<Move>& xs, const std::vector<Move>& ys, const SemCtx& cx,
                std::vector<Move>& out) {
  for (const auto& mx : xs)
    for (const auto& my : ys) {
      if (!step_compatible(mx.label, my.label, *cx.alg)) continue;
      StepLabel label = merge_labels(mx.label, my.label);
      TermPtr target = merge_targets(mx.target, my.target);
      out.push_back({label, target, mx.state});
      if (my.state != mx.state) out.push_back({label, target, my.state});
    }
}

void race_moves(const std::vector<Move>& xs, const TermPtr& other,
                const std::vector<Move>& other_moves, int s, const SemCtx& cx,
                std::vector<Move>& out) {
  const AlgebraDecl& alg = *cx.alg;
  std::set<std::string> enabled = init_events(other_moves);
  bool other_stuck = other_moves.empty() && !can_terminate(other, s, cx);
  for (const auto& mx : xs) {
    if (mx.label.events.size() != 1) continue;
    const std::string& e1 = *mx.label.events.begin();
    bool fires = false;
    if (e1 != "tau") {
      for (const auto& pr : alg.races) {
        std::string partner;
        if (pr.first == e1) partner = pr.second;
        else if (pr.second == e1) partner = pr.first;
        else continue;
        if (!enabled.count(partner)) {
          fires = true;
          break;
        }
      }
    }
    if (!fires && !cx.interleave_race_only && other_stuck) fires = true;
    if (!fires) continue;
    TermPtr target = mx.target ? t_whole(mx.target, other) : other;
    out.push_back({mx.label, target, mx.state});
  }
}

void comm_moves(const std::vector<Move>& xs, const std::vector<Move>& ys, int s,
                const SemCtx& cx, std::vector<Move>& out) {
  for (const auto& mx : xs) {
    if (mx.label.events.size() != 1) continue;
    const std::string& e1 = *mx.label.events.begin();
    if (e1 == "tau") continue;
    for (const auto& my : ys) {
      if (my.label.events.size() != 1) continue;
      const std::string& e2 = *my.label.events.begin();
      if (e2 == "tau") continue;
      auto c = cx.alg->gamma(e1, e2);
      if (!c) continue;
      TermPtr target = merge_targets(mx.target, my.target);
      for (int s2 : effect_states(*c, s, cx))
        out.push_back({StepLabel{{*c}}, target, s2});
    }
  }
}

void dedup(std::vector<Move>& moves) {
  std::sort(moves.begin(), moves.end());
  moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
}

}  // namespace

std::vector<Move> action_steps(const TermPtr& r, int s, const SemCtx& cx) {
  std::vector<Move> out;
  switch (r->kind) {
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Guard:
      break;
    case TermKind::Atom:
      for (int s2 : effect_states(r->name, s, cx))
        out.push_back({StepLabel{{r->name}}, nullptr, s2});
      break;
    case TermKind::Tau:
      out.push_back({StepLabel{{"tau"}}, nullptr, s});  // externally tau(s) = s
      break;
    case TermKind::Alt: {
      out = action_steps(r->lhs, s, cx);
      auto rhs = action_steps(r->rhs, s, cx);
      out.insert(out.end(), rhs.begin(), rhs.end());
      break;
    }
    case TermKind::Seq: {
      for (auto& m : action_steps(r->lhs, s, cx)) {
        TermPtr target = m.target ? t_seq(m.target, r->rhs) : r->rhs;
        out.push_back({std::move(m.label), target, m.state});
      }
      break;
    }
    case TermKind::LeftMerge: {
      auto xs = action_steps(r->lhs, s, cx);
      auto ys = action_steps(r->rhs, s, cx);
      sync_moves(xs, ys, cx, out);
      if (can_terminate(r->rhs, s, cx)) out.insert(out.end(), xs.begin(), xs.end());
      if (can_terminate(r->lhs, s, cx)) out.insert(out.end(), ys.begin(), ys.end());
      break;
    }
    case TermKind::Par: {
      auto xs = action_steps(r->lhs, s, cx);
      auto ys = action_steps(r->rhs, s, cx);
      sync_moves(xs, ys, cx, out);
      if (can_terminate(r->rhs, s, cx)) out.insert(out.end(), xs.begin(), xs.end());
      if (can_terminate(r->lhs, s, cx)) out.insert(out.end(), ys.begin(), ys.end());
      race_moves(xs, r->rhs, ys, s, cx, out);
      race_moves(ys, r->lhs, xs, s, cx, out);
      break;
    }
    case TermKind::Comm: {
      auto xs = action_steps(r->lhs, s, cx);
      auto ys = action_steps(r->rhs, s, cx);
      comm_moves(xs, ys, s, cx, out);
      break;
    }
    case TermKind::Encap: {
      for (auto& m : action_steps(r->lhs, s, cx)) {
        bool blocked = false;
        for (const auto& e : m.label.events)
          if (std::binary_search(r->set.begin(), r->set.end(), e)) {
            blocked = true;
            break;
          }
        if (blocked) continue;
        TermPtr target = m.target ? t_encap(r->set, m.target) : nullptr;
        out.push_back({std::move(m.label), target, m.state});
      }
      break;
    }
    case TermKind::Hide: {
      for (auto& m : action_steps(r->lhs, s, cx)) {
        StepLabel label;
        for (const auto& e : m.label.events)
          label.events.insert(
              std::binary_search(r->set.begin(), r->set.end(), e) ? "tau" : e);
        TermPtr target = m.target ? t_hide(r->set, m.target) : nullptr;
        // hidden steps leave the external data state untouched: tau(s) = s
        int state = label.tau_only() ? s : m.state;
        out.push_back({std::move(label), target, state});
      }
      break;
    }
    case TermKind::Project: {
      if (r->depth == 0) break;
      for (auto& m : action_steps(r->lhs, s, cx)) {
        TermPtr target = m.target ? t_project(r->depth - 1, m.target) : nullptr;
        out.push_back({std::move(m.label), target, m.state});
      }
      break;
    }
    case TermKind::Resolved:
      return action_steps(r->lhs, s, cx);
    default:
      bad_static(r, "action_steps");
  }
  dedup(out);
  return out;
}

// ---------------------------------------------------------------------------
// resolve
// ---------------------------------------------------------------------------

namespace {

void add_weighted(Dist& d, const Rational& w, const TermPtr& t) { d.emplace_back(w, t); }

Dist finish(Dist d) {
  for (auto& [w, t] : d) t = canonicalize(t);
  std::sort(d.begin(), d.end(),
            [](const auto& a, const auto& b) { return compare(a.second, b.second) < 0; });
  Dist out;
  for (auto& [w, t] : d) {
    if (!out.empty() && equal(out.back().second, t))
      out.back().first += w;
    else
      out.emplace_back(w, t);
  }
  return out;
}

// pure guard/epsilon combinations: probabilistic choice between them is
// disjunction for passage purposes (PG1), not a genuine random choice
bool event_free_term(const TermPtr& t) {
  if (t->kind == TermKind::Atom || t->kind == TermKind::Tau) return false;
  if (t->lhs && !event_free_term(t->lhs)) return false;
  if (t->rhs && !event_free_term(t->rhs)) return false;
  return true;
}
bool silent_only_term(const TermPtr& t) {
  return event_free_term(t) && may_pass_silently(t);
}

Dist resolve_impl(const TermPtr& t, int s, const SemCtx& cx, size_t depth);

Dist product(const TermPtr& a, const TermPtr& b, int s, const SemCtx& cx, size_t depth,
             const std::function<TermPtr(const TermPtr&, const TermPtr&)>& combine) {
  Dist da = resolve_impl(a, s, cx, depth);
  Dist db = resolve_impl(b, s, cx, depth);
  Dist out;
  for (const auto& [wa, ra] : da)
    for (const auto& [wb, rb] : db) add_weighted(out, wa * wb, combine(ra, rb));
  return out;
}

TermPtr unfold_recvar(const TermPtr& t, const SemCtx& cx, size_t& depth) {
  if (!cx.rec) throw UnguardedRecursion(t->name);
  const TermPtr* rhs = cx.rec->find(t->name);
  if (!rhs) throw UnguardedRecursion(t->name);
  if (depth == 0) throw UnguardedRecursion(t->name);
  --depth;
  return *rhs;
}

Dist resolve_impl(const TermPtr& t, int s, const SemCtx& cx, size_t depth) {
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Guard:
      return {{Rational(1), t}};
    case TermKind::Seq: {
      Dist dx = resolve_impl(t->lhs, s, cx, depth);
      Dist out;
      for (const auto& [wx, rx] : dx) {
        if (!can_terminate(rx, s, cx)) {
          add_weighted(out, wx, t_seq(rx, t->rhs));
          continue;
        }
        bool acts = !action_steps(rx, s, cx).empty();
        Dist dy = resolve_impl(t->rhs, s, cx, depth);
        for (const auto& [wy, ry] : dy) {
          TermPtr r = acts ? t_alt(t_seq(rx, t->rhs), ry) : ry;
          add_weighted(out, wx * wy, r);
        }
      }
      return finish(std::move(out));
    }
    case TermKind::Alt:
      return finish(product(t->lhs, t->rhs, s, cx, depth,
                            [](const TermPtr& a, const TermPtr& b) { return t_alt(a, b); }));
    case TermKind::ProbAlt: {
      if (silent_only_term(t->lhs) && silent_only_term(t->rhs))
        return finish(product(t->lhs, t->rhs, s, cx, depth,
                              [](const TermPtr& a, const TermPtr& b) { return t_alt(a, b); }));
      Dist out;
      for (auto& [w, r] : resolve_impl(t->lhs, s, cx, depth))
        add_weighted(out, w * t->prob, r);
      for (auto& [w, r] : resolve_impl(t->rhs, s, cx, depth))
        add_weighted(out, w * (Rational(1) - t->prob), r);
      return finish(std::move(out));
    }
    case TermKind::Whole:
      return finish(product(t->lhs, t->rhs, s, cx, depth,
                            [](const TermPtr& a, const TermPtr& b) {
                              return t_alt(t_par(a, b), t_comm(a, b));
                            }));
    case TermKind::Par:
      // stays a parallel composition: the race-condition rules act on
      // parallel states, and without declared races its steps coincide with
      // the left-merge sum anyway
      return finish(product(t->lhs, t->rhs, s, cx, depth,
                            [](const TermPtr& a, const TermPtr& b) { return t_par(a, b); }));
    case TermKind::LeftMerge:
      return finish(product(t->lhs, t->rhs, s, cx, depth,
                            [](const TermPtr& a, const TermPtr& b) { return t_lmerge(a, b); }));
    case TermKind::Comm:
      return finish(product(t->lhs, t->rhs, s, cx, depth,
                            [](const TermPtr& a, const TermPtr& b) { return t_comm(a, b); }));
    case TermKind::ConflictElim: {
      TermPtr x = t->lhs;
      size_t d = depth;
      while (x->kind == TermKind::RecVar) x = unfold_recvar(x, cx, d);
      return resolve_impl(theta_eliminate(x, *cx.alg), s, cx, d);
    }
    case TermKind::Unless: {
      if (!free_recvars(t->rhs).empty())
        throw std::runtime_error("unsupported: unless over a recursive right operand");
      TermPtr x = t->lhs;
      size_t d = depth;
      while (x->kind == TermKind::RecVar) x = unfold_recvar(x, cx, d);
      std::multiset<std::string> against;
      event_atoms(t->rhs, against);
      return resolve_impl(unless_eliminate(x, against, *cx.alg), s, cx, d);
    }
    case TermKind::Encap: {
      Dist out;
      for (auto& [w, r] : resolve_impl(t->lhs, s, cx, depth))
        add_weighted(out, w, t_encap(t->set, r));
      return finish(std::move(out));
    }
    case TermKind::Hide: {
      TermPtr x = t->lhs;
      size_t d = depth;
      while (x->kind == TermKind::RecVar) x = unfold_recvar(x, cx, d);
      Dist out;
      for (auto& [w, r] : resolve_impl(hide_rename(x, t->set), s, cx, d))
        add_weighted(out, w, t_hide(t->set, r));
      return finish(std::move(out));
    }
    case TermKind::Project: {
      Dist out;
      for (auto& [w, r] : resolve_impl(t->lhs, s, cx, depth))
        add_weighted(out, w, t_project(t->depth, r));
      return finish(std::move(out));
    }
    case TermKind::RecVar: {
      size_t d = depth;
      TermPtr body = unfold_recvar(t, cx, d);
      return resolve_impl(body, s, cx, d);
    }
    case TermKind::Resolved:
      return {{Rational(1), canonicalize(t->lhs)}};
  }
  throw std::logic_error("resolve: unhandled term kind");
}

}  // namespace

Dist resolve(const TermPtr& t, int s, const SemCtx& cx) {
  return resolve_impl(canonicalize(t), s, cx, cx.unfold);
}

// ---------------------------------------------------------------------------
// mu (clause-based PDF)
// ---------------------------------------------------------------------------

namespace {

// total probability that t resolves to a silent, actionless term at s
Rational silent_actionless_weight(const TermPtr& t, int s, const SemCtx& cx) {
  Rational w = 0;
  for (const auto& [p, r] : resolve(t, s, cx))
    if (can_terminate(r, s, cx) && action_steps(r, s, cx).empty()) w += p;
  return w;
}

TermPtr term_of_subset(const std::vector<TermPtr>& sums, unsigned mask) {
  std::vector<TermPtr> chosen;
  for (size_t i = 0; i < sums.size(); ++i)
    if (mask & (1u << i)) chosen.push_back(sums[i]);
  return canonicalize(alt_of(chosen));
}

Rational mu_impl(const TermPtr& t, const TermPtr& r, int s, const SemCtx& cx, size_t depth) {
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::Delta:
    case TermKind::Epsilon:
    case TermKind::Tau:
    case TermKind::Guard:
      return equal(t, r) ? Rational(1) : Rational(0);
    case TermKind::Seq: {
      TermPtr y = canonicalize(t->rhs);
      Rational total = 0;
      // packed: r = x'.y with a non-silent prefix
      if (r->kind == TermKind::Seq && equal(canonicalize(r->rhs), y) &&
          !can_terminate(r->lhs, s, cx))
        total += mu_impl(t->lhs, r->lhs, s, cx, depth);
      // split: r = x'.y + y' when the prefix both passes and acts
      if (r->kind == TermKind::Alt) {
        std::vector<TermPtr> sums = alt_summands(r);
        for (size_t i = 0; i < sums.size(); ++i) {
          const TermPtr& cand = sums[i];
          if (cand->kind != TermKind::Seq || !equal(canonicalize(cand->rhs), y)) continue;
          if (!can_terminate(cand->lhs, s, cx)) continue;
          if (action_steps(cand->lhs, s, cx).empty()) continue;
          std::vector<TermPtr> rest;
          for (size_t j = 0; j < sums.size(); ++j)
            if (j != i) rest.push_back(sums[j]);
          if (rest.empty()) continue;
          total += mu_impl(t->lhs, cand->lhs, s, cx, depth) *
                   mu_impl(t->rhs, canonicalize(alt_of(rest)), s, cx, depth);
        }
      }
      // passage only: the prefix vanished entirely
      Rational sa = silent_actionless_weight(t->lhs, s, cx);
      if (sa != 0) total += sa * mu_impl(t->rhs, r, s, cx, depth);
      return total;
    }
    case TermKind::Alt: {
      if (r->kind != TermKind::Alt) return 0;
      std::vector<TermPtr> sums = alt_summands(r);
      if (sums.size() > 16) throw std::runtime_error("mu: alternative too wide");
      Rational total = 0;
      unsigned full = (1u << sums.size()) - 1;
      for (unsigned mask = 1; mask < full; ++mask) {
        Rational a = mu_impl(t->lhs, term_of_subset(sums, mask), s, cx, depth);
        if (a == 0) continue;
        total += a * mu_impl(t->rhs, term_of_subset(sums, full & ~mask), s, cx, depth);
      }
      return total;
    }
    case TermKind::ProbAlt:
      if (silent_only_term(t->lhs) && silent_only_term(t->rhs))
        return mu_impl(t_alt(t->lhs, t->rhs), r, s, cx, depth);
      return t->prob * mu_impl(t->lhs, r, s, cx, depth) +
             (Rational(1) - t->prob) * mu_impl(t->rhs, r, s, cx, depth);
    case TermKind::Whole: {
      if (r->kind != TermKind::Alt) return 0;
      std::vector<TermPtr> sums = alt_summands(r);
      if (sums.size() != 2) return 0;
      const TermPtr& p = sums[0];
      const TermPtr& c = sums[1];
      if (p->kind != TermKind::Par || c->kind != TermKind::Comm) return 0;
      if (!equal(p->lhs, c->lhs) || !equal(p->rhs, c->rhs)) return 0;
      return mu_impl(t->lhs, p->lhs, s, cx, depth) * mu_impl(t->rhs, p->rhs, s, cx, depth);
    }
    case TermKind::Par:
      if (r->kind != TermKind::Par) return 0;
      return mu_impl(t->lhs, r->lhs, s, cx, depth) * mu_impl(t->rhs, r->rhs, s, cx, depth);
    case TermKind::LeftMerge:
      if (r->kind != TermKind::LeftMerge) return 0;
      return mu_impl(t->lhs, r->lhs, s, cx, depth) * mu_impl(t->rhs, r->rhs, s, cx, depth);
    case TermKind::Comm:
      if (r->kind != TermKind::Comm) return 0;
      return mu_impl(t->lhs, r->lhs, s, cx, depth) * mu_impl(t->rhs, r->rhs, s, cx, depth);
    case TermKind::ConflictElim:
      return mu_impl(theta_eliminate(t->lhs, *cx.alg), r, s, cx, depth);
    case TermKind::Unless: {
      std::multiset<std::string> against;
      event_atoms(t->rhs, against);
      return mu_impl(unless_eliminate(t->lhs, against, *cx.alg), r, s, cx, depth);
    }
    case TermKind::Encap:
      if (r->kind != TermKind::Encap || r->set != t->set) return 0;
      return mu_impl(t->lhs, r->lhs, s, cx, depth);
    case TermKind::Hide: {
      if (r->kind != TermKind::Hide || r->set != t->set) return 0;
      TermPtr x = t->lhs;
      size_t d = depth;
      while (x->kind == TermKind::RecVar) {
        if (!cx.rec || d == 0) throw UnguardedRecursion(x->name);
        const TermPtr* rhs = cx.rec->find(x->name);
        if (!rhs) throw UnguardedRecursion(x->name);
        --d;
        x = *rhs;
      }
      return mu_impl(hide_rename(x, t->set), r->lhs, s, cx, d);
    }
    case TermKind::Project:
      if (r->kind != TermKind::Project || r->depth != t->depth) return 0;
      return mu_impl(t->lhs, r->lhs, s, cx, depth);
    case TermKind::RecVar: {
      if (!cx.rec || depth == 0) throw UnguardedRecursion(t->name);
      const TermPtr* rhs = cx.rec->find(t->name);
      if (!rhs) throw UnguardedRecursion(t->name);
      return mu_impl(*rhs, r, s, cx, depth - 1);
    }
    case TermKind::Resolved:
      return mu_impl(t->lhs, r, s, cx, depth);
  }
  return 0;
}

}  // namespace

Rational mu(const TermPtr& t, const TermPtr& r, int s, const SemCtx& cx) {
  TermPtr target = r->kind == TermKind::Resolved ? r->lhs : r;
  return mu_impl(canonicalize(t), canonicalize(target), s, cx, cx.unfold);
}

// ---------------------------------------------------------------------------
// Plts construction
// ---------------------------------------------------------------------------

size_t Plts::n_transitions() const {
  size_t n = 0;
  for (const auto& v : prob_edges) n += v.size();
  for (const auto& v : act_edges) n += v.size();
  for (const auto& st : states)
    if (st.terminating) ++n;
  return n;
}

bool Plts::acyclic() const {
  enum { White, Grey, Black };
  std::vector<int> color(states.size(), White);
  std::function<bool(int)> dfs = [&](int u) {
    color[u] = Grey;
    auto visit = [&](int v) {
      if (color[v] == Grey) return false;
      if (color[v] == White && !dfs(v)) return false;
      return true;
    };
    for (const auto& [w, v] : prob_edges[u])
      if (!visit(v)) return false;
    for (const auto& [l, v] : act_edges[u])
      if (!visit(v)) return false;
    color[u] = Black;
    return true;
  };
  return dfs(root);
}

std::string Plts::export_text() const {
  std::ostringstream os;
  os << "des (" << root << ", " << n_transitions() << ", " << states.size() << ")\n";
  for (size_t i = 0; i < states.size(); ++i) {
    for (const auto& [w, dst] : prob_edges[i])
      os << "(" << i << ", \"prob " << to_string(w) << "\", " << dst << ")\n";
    for (const auto& [l, dst] : act_edges[i])
      os << "(" << i << ", \"" << l.str() << "\", " << dst << ")\n";
    if (states[i].terminating)
      os << "(" << i << ", \"eps\", " << states[i].term_target << ")\n";
  }
  return os.str();
}

Plts build_plts(const TermPtr& root, const SpecFile& spec, const Limits& limits,
                int initial_data) {
  SemCtx cx(spec, limits.unfold);
  if (initial_data == -2) initial_data = cx.env && cx.env->n_states() > 0 ? 0 : -1;

  Plts out;
  struct Key {
    PKind kind;
    TermPtr term;
    int data;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      return hash_of(k.term) * 31 + static_cast<size_t>(k.kind) * 7 +
             static_cast<size_t>(k.data + 7);
    }
  };
  struct KeyEq {
    bool operator()(const Key& a, const Key& b) const {
      return a.kind == b.kind && a.data == b.data && equal(a.term, b.term);
    }
  };
  std::unordered_map<Key, int, KeyHash, KeyEq> index;
  std::deque<int> queue;

  auto intern = [&](PKind kind, const TermPtr& term, int data) {
    Key k{kind, term, data};
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    if (out.states.size() >= limits.max_states) throw StateCapExceeded(limits.max_states);
    int id = static_cast<int>(out.states.size());
    out.states.push_back({kind, term, data, false, -1});
    out.prob_edges.emplace_back();
    out.act_edges.emplace_back();
    index.emplace(k, id);
    queue.push_back(id);
    return id;
  };

  std::map<int, int> sqrts;  // per final data state
  auto sqrt_id = [&](int data) {
    auto it = sqrts.find(data);
    if (it != sqrts.end()) return it->second;
    int id = static_cast<int>(out.states.size());
    out.states.push_back({PKind::Term, nullptr, data, false, -1});
    out.prob_edges.emplace_back();
    out.act_edges.emplace_back();
    sqrts.emplace(data, id);
    if (out.sqrt_state < 0) out.sqrt_state = id;
    return id;
  };

  // a successor that can only pass silently in every resolution is sqrt
  auto pure_termination = [&](const TermPtr& u, int s) {
    for (const auto& [w, r] : resolve(u, s, cx))
      if (!can_terminate(r, s, cx) || !action_steps(r, s, cx).empty()) return false;
    return true;
  };

  out.root = intern(PKind::Prob, canonicalize(root), initial_data);

  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    PState st = out.states[id];
    if (st.kind == PKind::Prob) {
      for (const auto& [w, r] : resolve(st.term, st.data, cx)) {
        int dst = intern(PKind::Res, r, st.data);
        out.prob_edges[id].emplace_back(w, dst);
      }
    } else if (st.kind == PKind::Res) {
      for (const auto& m : action_steps(st.term, st.data, cx)) {
        int dst = m.target && !pure_termination(m.target, m.state)
                      ? intern(PKind::Prob, canonicalize(m.target), m.state)
                      : sqrt_id(m.state);
        out.act_edges[id].emplace_back(m.label, dst);
      }
      if (can_terminate(st.term, st.data, cx)) {
        out.states[id].terminating = true;
        out.states[id].term_target = sqrt_id(st.data);
      }
    }
  }
  if (out.sqrt_state < 0) sqrt_id(initial_data);  // always materialized
  return out;
}

}  // namespace pptc
