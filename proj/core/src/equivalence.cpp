#include "pptc/equivalence.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace pptc {

Relation relation_from_name(const std::string& name) {
  if (name == "pstep") return Relation::PStep;
  if (name == "ppomset") return Relation::PPomset;
  if (name == "php") return Relation::PHp;
  if (name == "phhp") return Relation::PHhp;
  if (name == "prbstep") return Relation::PRBStep;
  throw std::runtime_error("unknown relation '" + name +
                           "' (expected pstep|ppomset|php|phhp|prbstep)");
}

std::string relation_name(Relation r) {
  switch (r) {
    case Relation::PStep: return "pstep";
    case Relation::PPomset: return "ppomset";
    case Relation::PHp: return "php";
    case Relation::PHhp: return "phhp";
    case Relation::PRBStep: return "prbstep";
  }
  return "?";
}

std::string EquivVerdict::report() const {
  std::ostringstream os;
  os << "relation: " << relation << "\n";
  os << "verdict: " << (equivalent ? "equivalent" : "not equivalent") << "\n";
  if (equivalent) {
    os << "witness size: " << witness_size << "\n";
  } else if (!distinguishing.empty()) {
    os << "distinguished by: " << distinguishing << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Disjoint union of two systems
// ---------------------------------------------------------------------------

namespace {

struct Union {
  std::vector<PState> states;
  std::vector<std::vector<std::pair<Rational, int>>> prob;
  std::vector<std::vector<std::pair<StepLabel, int>>> act;
  int root1 = 0, root2 = 0;
  int np = 0;  // states of p occupy [0, np)

  Union(const Plts& p, const Plts& q) {
    np = static_cast<int>(p.states.size());
    states = p.states;
    prob = p.prob_edges;
    act = p.act_edges;
    states.insert(states.end(), q.states.begin(), q.states.end());
    for (size_t i = 0; i < q.states.size(); ++i) {
      auto pe = q.prob_edges[i];
      for (auto& [w, d] : pe) d += np;
      prob.push_back(std::move(pe));
      auto ae = q.act_edges[i];
      for (auto& [l, d] : ae) d += np;
      act.push_back(std::move(ae));
    }
    root1 = p.root;
    root2 = q.root + np;
  }

  size_t size() const { return states.size(); }
  bool terminated(int i) const { return states[i].kind == PKind::Term; }
  bool down(int i) const {  // termination predicate
    return terminated(i) || (states[i].kind == PKind::Res && states[i].terminating);
  }
};

// union-find used for lumping classes
struct UF {
  std::vector<int> parent;
  explicit UF(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::string label_key(const StepLabel& l) { return l.str(); }

// ---------------------------------------------------------------------------
// Strong probabilistic step bisimulation (partition refinement)
// ---------------------------------------------------------------------------

std::vector<int> initial_blocks(const Union& u) {
  std::map<std::pair<int, int>, int> ids;
  std::vector<int> block(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    int kind;
    switch (u.states[i].kind) {
      case PKind::Term: kind = 0; break;
      case PKind::Res: kind = u.states[i].terminating ? 1 : 2; break;
      default: kind = 3; break;
    }
    auto [it, ins] =
        ids.emplace(std::make_pair(kind, u.states[i].data), static_cast<int>(ids.size()));
    block[i] = it->second;
  }
  return block;
}

std::vector<int> refine_step(const Union& u) {
  std::vector<int> block = initial_blocks(u);
  for (;;) {
    std::map<std::string, int> sig_ids;
    std::vector<int> next(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
      std::ostringstream sig;
      sig << block[i] << "|";
      if (u.states[i].kind == PKind::Res) {
        std::set<std::string> items;
        for (const auto& [l, d] : u.act[i]) items.insert(label_key(l) + ">" + std::to_string(block[d]));
        for (const auto& it : items) sig << it << ";";
      } else if (u.states[i].kind == PKind::Prob) {
        std::map<int, Rational> dist;
        for (const auto& [w, d] : u.prob[i]) dist[block[d]] += w;
        for (const auto& [b, w] : dist) sig << b << ":" << to_string(w) << ";";
      }
      auto [it, inserted] = sig_ids.emplace(sig.str(), static_cast<int>(sig_ids.size()));
      next[i] = it->second;
    }
    if (next == block) return block;
    block = std::move(next);
  }
}

std::string explain_step_difference(const Union& u, const std::vector<int>& block) {
  // first difference visible at the roots
  const int r1 = u.root1, r2 = u.root2;
  auto dist = [&](int i) {
    std::map<int, Rational> d;
    for (const auto& [w, t] : u.prob[i]) d[block[t]] += w;
    return d;
  };
  auto d1 = dist(r1), d2 = dist(r2);
  if (d1 != d2) return "root resolution distributions differ over the final classes";
  return "roots separated during refinement";
}

std::vector<std::pair<int, int>> cross_pairs(const Union& u, const std::vector<int>& block) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < u.np; ++i)
    for (size_t j = u.np; j < u.size(); ++j)
      if (block[i] == block[j]) out.emplace_back(i, static_cast<int>(j - u.np));
  return out;
}

}  // namespace

EquivVerdict prob_step_bisim(const Plts& p, const Plts& q) {
  Union u(p, q);
  std::vector<int> block = refine_step(u);
  EquivVerdict v;
  v.relation = "pstep";
  v.equivalent = block[u.root1] == block[u.root2];
  if (v.equivalent) {
    v.witness = cross_pairs(u, block);
    v.witness_size = v.witness.size();
  } else {
    v.distinguishing = explain_step_difference(u, block);
  }
  return v;
}

bool validate_step_witness(const Plts& p, const Plts& q,
                           const std::vector<std::pair<int, int>>& related) {
  Union u(p, q);
  std::set<std::pair<int, int>> rel(related.begin(), related.end());
  auto in_rel = [&](int a, int b_union) { return rel.count({a, b_union - u.np}) != 0; };
  // classes for the mu condition: union-find over the relation
  UF uf(u.size());
  for (const auto& [a, b] : related) uf.unite(a, b + u.np);
  for (const auto& [a, bq] : related) {
    int b = bq + u.np;
    const PState& sa = u.states[a];
    const PState& sb = u.states[b];
    if (sa.kind != sb.kind) return false;  // sqrt isolation included
    if (sa.kind == PKind::Res) {
      if (sa.terminating != sb.terminating) return false;
      for (const auto& [l, d] : u.act[a]) {
        bool ok = false;
        for (const auto& [l2, d2] : u.act[b])
          if (l == l2 && in_rel(d, d2)) {
            ok = true;
            break;
          }
        if (!ok) return false;
      }
      for (const auto& [l, d] : u.act[b]) {
        bool ok = false;
        for (const auto& [l2, d2] : u.act[a])
          if (l == l2 && in_rel(d2, d)) {
            ok = true;
            break;
          }
        if (!ok) return false;
      }
    }
    if (sa.kind == PKind::Prob) {
      std::map<int, Rational> da, db;
      for (const auto& [w, d] : u.prob[a]) da[uf.find(d)] += w;
      for (const auto& [w, d] : u.prob[b]) db[uf.find(d)] += w;
      if (da != db) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Pomset bisimulation
// ---------------------------------------------------------------------------

namespace {

using Pomset = std::vector<std::multiset<std::string>>;  // layer sequence

std::string pomset_key(const Pomset& layers) {
  std::string s;
  for (const auto& l : layers) {
    s += "[";
    for (const auto& e : l) s += e + ",";
    s += "]";
  }
  return s;
}

// all pomset transitions (layer sequence, endpoint) from a resolved state,
// with at most `budget` events in total
void pomset_moves(const Union& u, int res, size_t budget, Pomset& layers,
                  std::vector<std::pair<Pomset, int>>& out) {
  for (const auto& [l, dst] : u.act[res]) {
    if (l.events.size() > budget) continue;
    layers.push_back(l.events);
    out.emplace_back(layers, dst);
    size_t rest = budget - l.events.size();
    if (rest > 0 && dst >= 0 && u.states[dst].kind == PKind::Prob) {
      for (const auto& [w, r2] : u.prob[dst]) pomset_moves(u, r2, rest, layers, out);
    }
    layers.pop_back();
  }
}

std::vector<int> refine_pomset(const Union& u, size_t max_pomset) {
  // precompute pomset move sets
  std::vector<std::vector<std::pair<Pomset, int>>> moves(u.size());
  for (size_t i = 0; i < u.size(); ++i)
    if (u.states[i].kind == PKind::Res) {
      Pomset layers;
      pomset_moves(u, static_cast<int>(i), max_pomset, layers, moves[i]);
    }
  std::vector<int> block = initial_blocks(u);
  for (;;) {
    std::map<std::string, int> sig_ids;
    std::vector<int> next(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
      std::ostringstream sig;
      sig << block[i] << "|";
      if (u.states[i].kind == PKind::Res) {
        std::set<std::string> items;
        for (const auto& [pom, d] : moves[i])
          items.insert(pomset_key(pom) + ">" + std::to_string(block[d]));
        for (const auto& it : items) sig << it << ";";
      } else if (u.states[i].kind == PKind::Prob) {
        std::map<int, Rational> dist;
        for (const auto& [w, d] : u.prob[i]) dist[block[d]] += w;
        for (const auto& [b, w] : dist) sig << b << ":" << to_string(w) << ";";
      }
      auto [it, inserted] = sig_ids.emplace(sig.str(), static_cast<int>(sig_ids.size()));
      next[i] = it->second;
    }
    if (next == block) return block;
    block = std::move(next);
  }
}

}  // namespace

EquivVerdict prob_pomset_bisim(const Plts& p, const Plts& q, size_t max_pomset) {
  Union u(p, q);
  std::vector<int> block = refine_pomset(u, std::max<size_t>(1, max_pomset));
  EquivVerdict v;
  v.relation = "ppomset";
  v.equivalent = block[u.root1] == block[u.root2];
  if (v.equivalent) {
    v.witness = cross_pairs(u, block);
    v.witness_size = v.witness.size();
  } else {
    v.distinguishing = "a pomset transition of one root has no isomorphic counterpart";
  }
  return v;
}

// ---------------------------------------------------------------------------
// Probabilistic (rooted) branching step bisimulation
// ---------------------------------------------------------------------------

namespace {

// states reachable by any sequence of probabilistic and tau-step transitions
std::vector<std::vector<int>> silent_reach(const Union& u) {
  std::vector<std::vector<int>> out(u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    std::vector<char> seen(u.size(), 0);
    std::vector<int> stack{static_cast<int>(i)};
    seen[i] = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      out[i].push_back(x);
      auto push = [&](int y) {
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      };
      for (const auto& [w, d] : u.prob[x]) push(d);
      for (const auto& [l, d] : u.act[x])
        if (l.tau_only()) push(d);
    }
  }
  return out;
}

struct BranchingCtx {
  const Union& u;
  std::vector<std::vector<int>> reach;
  std::vector<char> rel;  // n*n matrix

  explicit BranchingCtx(const Union& un) : u(un), reach(silent_reach(un)) {
    rel.assign(u.size() * u.size(), 0);
    for (size_t a = 0; a < u.size(); ++a)
      for (size_t b = 0; b < u.size(); ++b)
        if (u.states[a].data == u.states[b].data) rel[a * u.size() + b] = 1;
  }
  bool related(int a, int b) const { return rel[a * u.size() + b] != 0; }
  void remove(int a, int b) {
    rel[a * u.size() + b] = 0;
    rel[b * u.size() + a] = 0;
  }
};

bool branching_move_ok(BranchingCtx& cx, int a, int b) {
  // every strong step of a must be answered by b per the branching clauses
  for (const auto& [X, a2] : cx.u.act[a]) {
    bool ok = false;
    if (X.tau_only() && cx.related(a2, b)) ok = true;
    if (!ok) {
      StepLabel want = X.hidden();
      for (int b0 : cx.reach[b]) {
        if (!cx.related(a, b0)) continue;
        for (const auto& [Y, b1] : cx.u.act[b0]) {
          if (!(Y.hidden() == want)) continue;
          // trailing silent closure
          for (int b2 : cx.reach[b1]) {
            if (cx.related(a2, b2)) {
              ok = true;
              break;
            }
          }
          if (ok) break;
        }
        if (ok) break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

bool branching_down_ok(BranchingCtx& cx, int a, int b) {
  if (!cx.u.down(a)) return true;
  for (int b0 : cx.reach[b])
    if (cx.related(a, b0) && cx.u.down(b0)) return true;
  return false;
}

// distribution of a state for the mu clause: probabilistic states resolve,
// resolved and terminated states are Dirac on themselves
std::map<int, Rational> lumped_dist(const BranchingCtx& cx, int i, UF& uf) {
  std::map<int, Rational> d;
  if (cx.u.states[i].kind == PKind::Prob) {
    for (const auto& [w, t] : cx.u.prob[i]) d[uf.find(t)] += w;
  } else {
    d[uf.find(i)] += 1;
  }
  return d;
}

std::vector<char> branching_gfp(BranchingCtx& cx) {
  const size_t n = cx.u.size();
  bool changed = true;
  while (changed) {
    changed = false;
    // transfer + termination clauses
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a + 1; b < n; ++b) {
        if (!cx.related(a, b)) continue;
        if (!branching_move_ok(cx, a, b) || !branching_move_ok(cx, b, a) ||
            !branching_down_ok(cx, a, b) || !branching_down_ok(cx, b, a)) {
          cx.remove(a, b);
          changed = true;
        }
      }
    // mu clause over the classes of the current relation
    UF uf(n);
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a + 1; b < n; ++b)
        if (cx.related(a, b)) uf.unite(a, b);
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a + 1; b < n; ++b) {
        if (!cx.related(a, b)) continue;
        if (lumped_dist(cx, a, uf) != lumped_dist(cx, b, uf)) {
          cx.remove(a, b);
          changed = true;
        }
      }
  }
  return cx.rel;
}

}  // namespace

bool validate_branching_witness(const Plts& p, const Plts& q,
                                const std::vector<std::pair<int, int>>& related) {
  Union u(p, q);
  BranchingCtx cx(u);
  cx.rel.assign(u.size() * u.size(), 0);
  for (size_t i = 0; i < u.size(); ++i) cx.rel[i * u.size() + i] = 1;
  for (const auto& [a, bq] : related) {
    cx.rel[a * u.size() + (bq + u.np)] = 1;
    cx.rel[(bq + u.np) * u.size() + a] = 1;
  }
  UF uf(u.size());
  for (const auto& [a, bq] : related) uf.unite(a, bq + u.np);
  for (size_t a = 0; a < u.size(); ++a)
    for (size_t b = 0; b < u.size(); ++b) {
      if (a == b || !cx.related(a, b)) continue;
      if (!branching_move_ok(cx, a, b) || !branching_down_ok(cx, a, b)) return false;
      if (lumped_dist(cx, a, uf) != lumped_dist(cx, b, uf)) return false;
    }
  return true;
}

EquivVerdict prob_rooted_branching_step_bisim(const Plts& p, const Plts& q) {
  Union u(p, q);
  BranchingCtx cx(u);
  branching_gfp(cx);

  EquivVerdict v;
  v.relation = "prbstep";

  // rooted condition: strong first step, then branching equivalence; resolved
  // states of the two roots are grouped by their strong one-step behaviour
  // strong first step with labels compared tau-stripped (X ~ Y means
  // hat(X) ~ hat(Y) throughout), then branching equivalence
  auto root_eq = [&](int a1, int a2) {
    if (u.down(a1) != u.down(a2)) return false;
    auto half = [&](int x, int y) {
      for (const auto& [X, x2] : u.act[x]) {
        bool ok = false;
        for (const auto& [Y, y2] : u.act[y])
          if (X.hidden() == Y.hidden() && cx.related(x2, y2)) {
            ok = true;
            break;
          }
        if (!ok) return false;
      }
      return true;
    };
    return half(a1, a2) && half(a2, a1);
  };

  std::vector<int> support;
  for (const auto& [w, d] : u.prob[u.root1]) support.push_back(d);
  for (const auto& [w, d] : u.prob[u.root2]) support.push_back(d);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  UF uf(u.size());
  for (size_t i = 0; i < support.size(); ++i)
    for (size_t j = i + 1; j < support.size(); ++j)
      if (root_eq(support[i], support[j])) uf.unite(support[i], support[j]);
  std::map<int, Rational> d1, d2;
  for (const auto& [w, d] : u.prob[u.root1]) d1[uf.find(d)] += w;
  for (const auto& [w, d] : u.prob[u.root2]) d2[uf.find(d)] += w;
  v.equivalent = d1 == d2;

  if (v.equivalent) {
    for (int i = 0; i < u.np; ++i)
      for (size_t j = u.np; j < u.size(); ++j)
        if (cx.related(i, j)) v.witness.emplace_back(i, static_cast<int>(j - u.np));
    v.witness_size = v.witness.size();
  } else {
    v.distinguishing = "root distributions differ over strongly-rooted classes";
  }
  return v;
}

// ---------------------------------------------------------------------------
// hp / hhp bisimulation (acyclic systems, explicit posetal game)
// ---------------------------------------------------------------------------

namespace {

struct Micro {
  // at == true: sitting at `state` (Prob, Res or Term) with no open step.
  // at == false: mid-step at Res `state`, firing `remaining` before moving to
  // `target`.
  bool at = true;
  int state = 0;
  std::multiset<std::string> remaining;
  int target = -1;

  std::string key() const {
    std::string s = at ? "@" : "#";
    s += std::to_string(state);
    if (!at) {
      s += ":";
      for (const auto& e : remaining) s += e + ",";
      s += ">" + std::to_string(target);
    }
    return s;
  }
};

struct GamePos {
  Micro m1, m2;
  std::string key() const { return m1.key() + "|" + m2.key(); }
};

struct HpGame {
  const Union& u;
  bool hereditary;
  std::map<std::string, int> index;
  std::vector<GamePos> positions;
  std::vector<std::vector<int>> preds;
  std::vector<std::vector<std::vector<int>>> responses;  // per position, per attacker move
  std::vector<char> alive;

  explicit HpGame(const Union& un, bool hhp) : u(un), hereditary(hhp) {}

  int intern(const GamePos& g) {
    auto it = index.find(g.key());
    if (it != index.end()) return it->second;
    int id = static_cast<int>(positions.size());
    index.emplace(g.key(), id);
    positions.push_back(g);
    preds.emplace_back();
    responses.emplace_back();
    alive.push_back(1);
    if (positions.size() > 200000) throw Unsupported("hp game too large");
    return id;
  }

  // attacker moves of one side with defender responses on the other
  struct Attack {
    std::vector<int> successors;  // surviving responses required: at least one
  };

  std::vector<Micro> event_moves(const Micro& m, const std::string& e, bool attacker,
                                 std::vector<std::string>* names = nullptr) {
    // all ways this side fires event `e` now (attacker: e chosen freely)
    std::vector<Micro> out;
    if (!m.at) {
      auto fire = [&](const std::string& ev) {
        if (m.remaining.count(ev) == 0) return;
        Micro n = m;
        n.remaining.erase(n.remaining.find(ev));
        if (n.remaining.empty()) {
          n.at = true;
          n.state = n.target;
          n.target = -1;
        }
        out.push_back(n);
        if (names) names->push_back(ev);
      };
      if (attacker) {
        std::set<std::string> uniq(m.remaining.begin(), m.remaining.end());
        for (const auto& ev : uniq) fire(ev);
      } else {
        fire(e);
      }
    } else if (u.states[m.state].kind == PKind::Res) {
      // open a new layer by choosing a step containing the event
      for (const auto& [L, dst] : u.act[m.state]) {
        std::set<std::string> uniq(L.events.begin(), L.events.end());
        for (const auto& ev : uniq) {
          if (!attacker && ev != e) continue;
          Micro n;
          n.at = false;
          n.state = m.state;
          n.remaining = L.events;
          n.remaining.erase(n.remaining.find(ev));
          n.target = dst;
          if (n.remaining.empty()) {
            n.at = true;
            n.state = dst;
            n.target = -1;
          }
          out.push_back(n);
          if (names) names->push_back(ev);
        }
      }
    }
    return out;
  }

  void expand(int id) {
    const GamePos g = positions[id];  // by value: intern() may reallocate
    auto add_attack = [&](const std::vector<GamePos>& succs) {
      std::vector<int> ids;
      for (const auto& s : succs) {
        int sid = intern(s);
        ids.push_back(sid);
        preds[sid].push_back(id);
      }
      responses[id].push_back(std::move(ids));
    };

    // event attacks from side 1
    std::vector<std::string> names;
    std::vector<Micro> moves1 = event_moves(g.m1, "", true, &names);
    for (size_t k = 0; k < moves1.size(); ++k) {
      std::vector<GamePos> succ;
      for (const auto& resp : event_moves(g.m2, names[k], false))
        succ.push_back({moves1[k], resp});
      add_attack(succ);
    }
    // event attacks from side 2
    names.clear();
    std::vector<Micro> moves2 = event_moves(g.m2, "", true, &names);
    for (size_t k = 0; k < moves2.size(); ++k) {
      std::vector<GamePos> succ;
      for (const auto& resp : event_moves(g.m1, names[k], false))
        succ.push_back({resp, moves2[k]});
      add_attack(succ);
    }
    // probabilistic attacks (same-weight edge matching, both directions)
    if (g.m1.at && u.states[g.m1.state].kind == PKind::Prob) {
      for (const auto& [w, t1] : u.prob[g.m1.state]) {
        std::vector<GamePos> succ;
        if (g.m2.at && u.states[g.m2.state].kind == PKind::Prob) {
          for (const auto& [w2, t2] : u.prob[g.m2.state])
            if (w2 == w) succ.push_back({Micro{true, t1, {}, -1}, Micro{true, t2, {}, -1}});
        }
        add_attack(succ);
      }
    }
    if (g.m2.at && u.states[g.m2.state].kind == PKind::Prob) {
      for (const auto& [w, t2] : u.prob[g.m2.state]) {
        std::vector<GamePos> succ;
        if (g.m1.at && u.states[g.m1.state].kind == PKind::Prob) {
          for (const auto& [w1, t1] : u.prob[g.m1.state])
            if (w1 == w) succ.push_back({Micro{true, t1, {}, -1}, Micro{true, t2, {}, -1}});
        }
        add_attack(succ);
      }
    }
  }

  bool static_ok(const GamePos& g) {
    // sqrt isolation and silent termination matching
    if (g.m1.at && g.m2.at && u.states[g.m1.state].data != u.states[g.m2.state].data)
      return false;
    bool t1 = g.m1.at && u.terminated(g.m1.state);
    bool t2 = g.m2.at && u.terminated(g.m2.state);
    if (t1 != t2) return false;
    bool d1 = g.m1.at && u.down(g.m1.state);
    bool d2 = g.m2.at && u.down(g.m2.state);
    if (d1 != d2) return false;
    return true;
  }

  // local mu-class check at probabilistic pairs
  bool mu_ok(const GamePos& g) {
    if (!(g.m1.at && g.m2.at)) return true;
    if (u.states[g.m1.state].kind != PKind::Prob || u.states[g.m2.state].kind != PKind::Prob)
      return true;
    const auto& e1 = u.prob[g.m1.state];
    const auto& e2 = u.prob[g.m2.state];
    // components of the "related targets" bipartite graph
    std::map<int, int> comp;
    UF uf(e1.size() + e2.size());
    for (size_t i = 0; i < e1.size(); ++i)
      for (size_t j = 0; j < e2.size(); ++j) {
        GamePos p{Micro{true, e1[i].second, {}, -1}, Micro{true, e2[j].second, {}, -1}};
        auto it = index.find(p.key());
        if (it != index.end() && alive[it->second]) uf.unite(i, e1.size() + j);
      }
    std::map<int, Rational> d1, d2;
    for (size_t i = 0; i < e1.size(); ++i) d1[uf.find(i)] += e1[i].first;
    for (size_t j = 0; j < e2.size(); ++j) d2[uf.find(e1.size() + j)] += e2[j].first;
    return d1 == d2;
  }

  bool run(int root_id) {
    // forward expansion
    for (size_t i = 0; i < positions.size(); ++i) expand(static_cast<int>(i));
    // greatest fixpoint
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < positions.size(); ++i) {
        if (!alive[i]) continue;
        bool ok = static_ok(positions[i]) && mu_ok(positions[i]);
        if (ok) {
          for (const auto& attack : responses[i]) {
            bool answered = false;
            for (int r : attack)
              if (alive[r]) {
                answered = true;
                break;
              }
            if (!answered) {
              ok = false;
              break;
            }
          }
        }
        if (ok && hereditary) {
          for (int pr : preds[i])
            if (!alive[pr]) {
              ok = false;
              break;
            }
        }
        if (!ok) {
          alive[i] = 0;
          changed = true;
        }
      }
    }
    return alive[root_id] != 0;
  }
};

size_t total_events(const Plts& p) {
  size_t n = 0;
  for (const auto& edges : p.act_edges)
    for (const auto& [l, d] : edges) n += l.events.size();
  return n;
}

EquivVerdict hp_like(const Plts& p, const Plts& q, bool hereditary) {
  if (!p.acyclic() || !q.acyclic())
    throw Unsupported("hp/hhp bisimilarity is only decided on acyclic systems");
  if (total_events(p) > 64 || total_events(q) > 64)
    throw Unsupported("hp/hhp event cap exceeded");
  Union u(p, q);
  HpGame game(u, hereditary);
  int root = game.intern(GamePos{Micro{true, u.root1, {}, -1}, Micro{true, u.root2, {}, -1}});
  EquivVerdict v;
  v.relation = hereditary ? "phhp" : "php";
  v.equivalent = game.run(root);
  if (v.equivalent) {
    size_t n = 0;
    for (char a : game.alive) n += a != 0;
    v.witness_size = n;
  } else {
    v.distinguishing = "no posetal relation survives the transfer conditions";
  }
  return v;
}

}  // namespace

EquivVerdict prob_hp_bisim(const Plts& p, const Plts& q) { return hp_like(p, q, false); }
EquivVerdict prob_hhp_bisim(const Plts& p, const Plts& q) { return hp_like(p, q, true); }

EquivVerdict check_relation(const Plts& p, const Plts& q, Relation rel, size_t max_pomset) {
  switch (rel) {
    case Relation::PStep: return prob_step_bisim(p, q);
    case Relation::PPomset: return prob_pomset_bisim(p, q, max_pomset);
    case Relation::PHp: return prob_hp_bisim(p, q);
    case Relation::PHhp: return prob_hhp_bisim(p, q);
    case Relation::PRBStep: return prob_rooted_branching_step_bisim(p, q);
  }
  throw std::logic_error("bad relation");
}

EquivVerdict equiv_terms(const TermPtr& a, const TermPtr& b, const SpecFile& spec,
                         Relation rel, const Limits& limits) {
  int n_states = spec.data_env ? spec.data_env->n_states() : 0;
  EquivVerdict verdict;
  if (n_states == 0) {
    Plts pa = build_plts(a, spec, limits);
    Plts pb = build_plts(b, spec, limits);
    return check_relation(pa, pb, rel, limits.max_pomset);
  }
  for (int s0 = 0; s0 < n_states; ++s0) {
    Plts pa = build_plts(a, spec, limits, s0);
    Plts pb = build_plts(b, spec, limits, s0);
    verdict = check_relation(pa, pb, rel, limits.max_pomset);
    if (!verdict.equivalent) {
      verdict.distinguishing += " (initial data state " +
                                spec.data_env->state_names[s0] + ")";
      return verdict;
    }
  }
  return verdict;
}

AipResult aip_equal(const TermPtr& a, const TermPtr& b, const SpecFile& spec, long n_max,
                    Relation rel, const Limits& limits) {
  AipResult out;
  RewriteOptions opts;
  opts.step_limit = limits.step_limit;
  opts.rec = spec.recspec.empty() ? nullptr : &spec.recspec;
  opts.env = spec.data_env ? &*spec.data_env : nullptr;
  for (long n = 0; n <= n_max; ++n) {
    TermPtr pa = project_rewrite(a, n, spec.algebra, opts).first;
    TermPtr pb = project_rewrite(b, n, spec.algebra, opts).first;
    bool eq = equiv_terms(pa, pb, spec, rel, limits).equivalent;
    out.per_depth.push_back(eq);
    if (!eq && out.first_difference < 0) out.first_difference = n;
  }
  return out;
}

}  // namespace pptc
