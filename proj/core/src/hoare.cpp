#include "pptc/hoare.hpp"

#include <functional>
#include <sstream>

namespace pptc {

std::string DeterminismReport::to_text() const {
  if (issues.empty()) return "sufficiently deterministic\n";
  std::ostringstream os;
  for (const auto& i : issues)
    os << "nondeterministic effect at " << i.term << " @ " << i.state << ": " << i.detail
       << "\n";
  return os.str();
}

DeterminismReport check_sufficient_determinism(const SpecFile& spec, const Limits& limits) {
  DeterminismReport report;
  if (!spec.root) throw std::runtime_error("spec file has no root");
  int n_states = spec.data_env ? spec.data_env->n_states() : 0;
  for (int s0 = 0; s0 < std::max(1, n_states); ++s0) {
    Plts p = build_plts(spec.root, spec, limits, n_states ? s0 : -1);
    for (size_t i = 0; i < p.states.size(); ++i) {
      if (p.states[i].kind != PKind::Res) continue;
      std::set<int> succ_data;
      for (const auto& [l, d] : p.act_edges[i]) succ_data.insert(p.states[d].data);
      if (succ_data.size() > 1) {
        std::ostringstream detail;
        detail << "reaches " << succ_data.size() << " distinct data states";
        std::string st = p.states[i].data >= 0 && spec.data_env
                             ? spec.data_env->state_names[p.states[i].data]
                             : "-";
        report.issues.push_back({pretty_print(p.states[i].term), st, detail.str()});
      }
    }
  }
  return report;
}

bool check_triple_semantic(const HoareTriple& triple, const SpecFile& spec,
                           const Limits& limits) {
  if (!spec.data_env) throw MissingDataEnv("hoare checking needs a data environment");
  const DataEnv& env = *spec.data_env;
  for (int s0 = 0; s0 < env.n_states(); ++s0) {
    if (!eval_guard(triple.pre, s0, env)) continue;
    Plts p = build_plts(triple.program, spec, limits, s0);
    for (size_t i = 0; i < p.states.size(); ++i) {
      if (p.states[i].kind == PKind::Res && p.states[i].terminating &&
          !eval_guard(triple.post, p.states[i].data, env))
        return false;
      for (const auto& [l, d] : p.act_edges[i])
        if (p.states[d].kind == PKind::Term && !eval_guard(triple.post, p.states[d].data, env))
          return false;
    }
  }
  return true;
}

bool check_triple_algebraic(const HoareTriple& triple, const SpecFile& spec,
                            const Limits& limits) {
  TermPtr guarded = t_seq(t_guard(triple.pre), triple.program);
  TermPtr sealed = t_seq(t_guard(triple.pre), t_seq(triple.program, t_guard(triple.post)));
  SpecFile copy = spec;
  return equiv_terms(guarded, sealed, copy, Relation::PRBStep, limits).equivalent;
}

// ---------------------------------------------------------------------------
// Proof system H
// ---------------------------------------------------------------------------

namespace {

struct Hypo {
  std::string var;
  std::vector<char> pre, post;
};

std::vector<char> column(const GuardPtr& g, const DataEnv& env) {
  std::vector<char> col(env.n_states(), 0);
  for (int s = 0; s < env.n_states(); ++s) col[s] = eval_guard(g, s, env) ? 1 : 0;
  return col;
}

bool implies(const std::vector<char>& a, const std::vector<char>& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

std::vector<char> conj(const std::vector<char>& a, const std::vector<char>& b) {
  std::vector<char> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] && b[i];
  return out;
}

struct Checker {
  const SpecFile& spec;
  const DataEnv& env;

  CheckResult fail(const std::string& what) const { return {false, what}; }

  CheckResult check(const ProofNode& n, const std::vector<Hypo>& hypos) const {
    const HoareTriple& c = n.conclusion;
    auto pre = column(c.pre, env);
    auto post = column(c.post, env);
    auto need_premises = [&](size_t k) -> std::optional<CheckResult> {
      if (n.premises.size() != k)
        return fail("RuleMismatch: " + n.rule + " expects " + std::to_string(k) +
                    " premises, got " + std::to_string(n.premises.size()));
      for (const auto& p : n.premises) {
        CheckResult r = check(p, hypos);
        if (!r.ok) return r;
      }
      return std::nullopt;
    };

    if (n.rule == "assume") {
      if (c.program->kind != TermKind::RecVar)
        return fail("RuleMismatch: assume applies to recursion variables only");
      for (const auto& h : hypos)
        if (h.var == c.program->name && h.pre == pre && h.post == post) return {true, ""};
      return fail("RuleMismatch: no matching hypothesis for " + c.program->name);
    }
    if (n.rule == "H1") {
      if (!n.premises.empty()) return fail("RuleMismatch: H1 takes no premises");
      if (c.program->kind != TermKind::Atom)
        return fail("RuleMismatch: H1 concerns a single event");
      if (pre != wp_states(c.program->name, c.post, env))
        return fail("SideConditionFails: precondition is not wp(" + c.program->name + ", post)");
      return {true, ""};
    }
    if (n.rule == "H2") {
      if (!n.premises.empty()) return fail("RuleMismatch: H2 takes no premises");
      if (c.program->kind != TermKind::Guard)
        return fail("RuleMismatch: H2 concerns a guard");
      // postcondition alpha . phi read as conjunction
      if (post != conj(pre, column(c.program->guard, env)))
        return fail("RuleMismatch: H2 postcondition is not pre AND guard");
      return {true, ""};
    }
    if (n.rule == "H3" || n.rule == "PH1") {
      bool prob = n.rule == "PH1";
      if (c.program->kind != (prob ? TermKind::ProbAlt : TermKind::Alt))
        return fail("RuleMismatch: " + n.rule + " concerns " + (prob ? "+[p]" : "+"));
      if (auto r = need_premises(2)) return *r;
      TermPtr combined = prob ? t_prob(n.premises[0].conclusion.program, c.program->prob,
                                       n.premises[1].conclusion.program)
                              : t_alt(n.premises[0].conclusion.program,
                                      n.premises[1].conclusion.program);
      if (!equal(canonicalize(combined), canonicalize(c.program)))
        return fail("RuleMismatch: premises do not split the program");
      for (const auto& p : n.premises) {
        if (column(p.conclusion.pre, env) != pre || column(p.conclusion.post, env) != post)
          return fail("RuleMismatch: " + n.rule + " premises must share pre/post");
      }
      return {true, ""};
    }
    if (n.rule == "H4") {
      if (c.program->kind != TermKind::Seq)
        return fail("RuleMismatch: H4 concerns sequential composition");
      if (auto r = need_premises(2)) return *r;
      const auto& p1 = n.premises[0].conclusion;
      const auto& p2 = n.premises[1].conclusion;
      if (!equal(canonicalize(t_seq(p1.program, p2.program)), canonicalize(c.program)))
        return fail("RuleMismatch: premises do not split the program");
      if (column(p1.pre, env) != pre || column(p2.post, env) != post ||
          column(p1.post, env) != column(p2.pre, env))
        return fail("RuleMismatch: H4 pre/mid/post chain broken");
      return {true, ""};
    }
    if (n.rule == "H5") {
      if (c.program->kind != TermKind::Whole)
        return fail("RuleMismatch: H5 concerns whole parallel composition");
      if (auto r = need_premises(2)) return *r;
      const auto& p1 = n.premises[0].conclusion;
      const auto& p2 = n.premises[1].conclusion;
      if (!equal(canonicalize(t_whole(p1.program, p2.program)), canonicalize(c.program)))
        return fail("RuleMismatch: premises do not split the program");
      if (pre != conj(column(p1.pre, env), column(p2.pre, env)) ||
          post != conj(column(p1.post, env), column(p2.post, env)))
        return fail("RuleMismatch: H5 pre/post are the merged premise conditions");
      return {true, ""};
    }
    if (n.rule == "H6" || n.rule == "H7" || n.rule == "H8") {
      TermKind want = n.rule == "H6" ? TermKind::ConflictElim
                    : n.rule == "H7" ? TermKind::Encap
                                     : TermKind::Hide;
      if (c.program->kind != want) return fail("RuleMismatch: " + n.rule + " operator");
      if (auto r = need_premises(1)) return *r;
      const auto& p = n.premises[0].conclusion;
      if (!equal(canonicalize(p.program), canonicalize(c.program->lhs)))
        return fail("RuleMismatch: premise program mismatch");
      if (column(p.pre, env) != pre || column(p.post, env) != post)
        return fail("RuleMismatch: " + n.rule + " keeps pre/post");
      return {true, ""};
    }
    if (n.rule == "H9") {
      if (auto r = need_premises(1)) return *r;
      const auto& p = n.premises[0].conclusion;
      if (!equal(canonicalize(p.program), canonicalize(c.program)))
        return fail("RuleMismatch: H9 keeps the program");
      if (!implies(pre, column(p.pre, env)))
        return fail("SideConditionFails: pre does not imply the premise precondition");
      if (!implies(column(p.post, env), post))
        return fail("SideConditionFails: premise postcondition does not imply post");
      return {true, ""};
    }
    if (n.rule == "H10" || n.rule == "H10'") {
      if (c.program->kind != TermKind::RecVar)
        return fail("RuleMismatch: " + n.rule + " concludes about a recursion variable");
      if (n.premises.size() != spec.recspec.equations.size())
        return fail("RuleMismatch: " + n.rule + " needs one premise per equation");
      // hypotheses and equation bodies
      std::vector<Hypo> inner = hypos;
      std::vector<char> zpre, zpost;
      bool found = false;
      std::vector<const ProofNode*> by_eq(spec.recspec.equations.size(), nullptr);
      for (const auto& p : n.premises) {
        bool matched = false;
        for (size_t i = 0; i < spec.recspec.equations.size(); ++i) {
          const auto& [name, body] = spec.recspec.equations[i];
          if (equal(canonicalize(p.conclusion.program), canonicalize(body)) && !by_eq[i]) {
            by_eq[i] = &p;
            inner.push_back(
                {name, column(p.conclusion.pre, env), column(p.conclusion.post, env)});
            if (name == c.program->name) {
              zpre = column(p.conclusion.pre, env);
              zpost = column(p.conclusion.post, env);
              found = true;
            }
            matched = true;
            break;
          }
        }
        if (!matched) return fail("RuleMismatch: premise is not an equation body");
      }
      if (!found || zpre != pre || zpost != post)
        return fail("RuleMismatch: conclusion does not match its equation's premise");
      for (const auto& p : n.premises) {
        CheckResult r = check(p, inner);
        if (!r.ok) return r;
      }
      return {true, ""};
    }
    return fail("RuleMismatch: unknown rule '" + n.rule + "'");
  }
};

}  // namespace

CheckResult check_derivation(const ProofNode& proof, const SpecFile& spec) {
  if (!spec.data_env) throw MissingDataEnv("derivation checking needs a data environment");
  Checker c{spec, *spec.data_env};
  return c.check(proof, {});
}

ProofNode parse_proof_file(std::string_view src, const SpecFile& spec) {
  struct Line {
    int depth;
    std::string rule, pre, term, post;
  };
  std::vector<Line> lines;
  size_t pos = 0;
  int lineno = 0;
  while (pos < src.size()) {
    size_t end = src.find('\n', pos);
    if (end == std::string_view::npos) end = src.size();
    std::string_view raw = src.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    size_t indent = 0;
    while (indent < raw.size() && raw[indent] == ' ') ++indent;
    std::string_view line = raw.substr(indent);
    if (line.empty() || line.substr(0, 2) == "//") continue;
    // RULE { pre } term { post }
    size_t sp = line.find(' ');
    size_t b1 = line.find('{');
    size_t e1 = line.find('}', b1);
    size_t b2 = line.rfind('{');
    size_t e2 = line.rfind('}');
    if (sp == std::string_view::npos || b1 == std::string_view::npos ||
        e1 == std::string_view::npos || b2 == std::string_view::npos || b2 <= e1)
      throw SyntaxError(lineno, 1, "expected RULE { pre } term { post }");
    Line l;
    l.depth = static_cast<int>(indent / 2);
    l.rule = std::string(line.substr(0, sp));
    l.pre = std::string(line.substr(b1 + 1, e1 - b1 - 1));
    l.term = std::string(line.substr(e1 + 1, b2 - e1 - 1));
    l.post = std::string(line.substr(b2 + 1, e2 - b2 - 1));
    lines.push_back(std::move(l));
  }
  if (lines.empty()) throw std::runtime_error("empty proof file");

  std::function<ProofNode(size_t&, int)> build = [&](size_t& i, int depth) -> ProofNode {
    const Line& l = lines[i];
    ProofNode node;
    node.rule = l.rule;
    node.conclusion.pre = parse_guard(l.pre);
    node.conclusion.post = parse_guard(l.post);
    node.conclusion.program = parse_term(l.term, spec.algebra);
    ++i;
    while (i < lines.size() && lines[i].depth == depth + 1)
      node.premises.push_back(build(i, depth + 1));
    return node;
  };
  size_t i = 0;
  ProofNode root = build(i, lines[0].depth);
  if (i != lines.size()) throw std::runtime_error("dangling proof lines");
  return root;
}

}  // namespace pptc
