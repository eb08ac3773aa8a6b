#include "pptc/axioms.hpp"

#include "pptc/parser.hpp"

#include <sstream>

namespace pptc {

std::string AxiomEnv::describe() const {
  std::ostringstream os;
  for (const auto& [k, v] : terms) os << k << "=" << pretty_print(v) << " ";
  for (const auto& [k, v] : events) os << k << "=" << v << " ";
  for (const auto& [k, v] : probs) os << k << "=" << to_string(v) << " ";
  for (const auto& [k, v] : guards) os << k << "=[" << pretty_print(v) << "] ";
  if (!eset.empty()) {
    os << "set={";
    for (const auto& e : eset) os << e << " ";
    os << "} ";
  }
  return os.str();
}

namespace {

// shorthands used by the schema builders
TermPtr V(const AxiomEnv& e, const char* k) { return e.terms.at(k); }
TermPtr E(const AxiomEnv& e, const char* k) {
  const std::string& n = e.events.at(k);
  return n == "tau" ? t_tau() : t_atom(n);
}
Rational P(const AxiomEnv& e, const char* k) { return e.probs.at(k); }
TermPtr G(const AxiomEnv& e, const char* k) { return t_guard(e.guards.at(k)); }
TermPtr GN(const AxiomEnv& e, const char* k) { return t_guard(g_not(e.guards.at(k))); }

TermPtr gamma_term(const AxiomEnv& e, const SpecFile& s, const char* k1, const char* k2) {
  auto c = s.algebra.gamma(e.events.at(k1), e.events.at(k2));
  return c ? t_atom(*c) : t_delta();
}

using Prep = std::function<void(std::mt19937_64&, AxiomEnv&, SpecFile&, const GenOptions&)>;
using Build = std::function<TermPtr(const AxiomEnv&, SpecFile&)>;

void draw_terms(std::mt19937_64& rng, AxiomEnv& env, const GenOptions& g,
                std::initializer_list<const char*> names, bool prob_free = false) {
  GenOptions opts = g;
  opts.prob_free = prob_free;
  for (const char* n : names) env.terms[n] = random_term(rng, opts);
}

void draw_events(std::mt19937_64& rng, AxiomEnv& env, const GenOptions& g,
                 std::initializer_list<const char*> names, bool distinct = true) {
  std::vector<std::string> pool = g.events;
  for (const char* n : names) {
    size_t i = rng() % pool.size();
    env.events[n] = pool[i];
    if (distinct && pool.size() > 1) pool.erase(pool.begin() + i);
  }
}

void draw_probs(std::mt19937_64& rng, AxiomEnv& env, const GenOptions& g,
                std::initializer_list<const char*> names) {
  for (const char* n : names) env.probs[n] = g.probs[rng() % g.probs.size()];
}

void draw_eset(std::mt19937_64& rng, AxiomEnv& env, const GenOptions& g) {
  env.eset.clear();
  for (const auto& e : g.events)
    if (rng() % 2) env.eset.push_back(e);
  if (env.eset.empty()) env.eset.push_back(g.events[rng() % g.events.size()]);
}

// random finite data environment with atoms p and q as the guard alphabet
void attach_env(std::mt19937_64& rng, SpecFile& spec, const GenOptions& g,
                bool deterministic, int n_states_min = 3, int n_states_max = 5) {
  DataEnv env;
  int n = n_states_min + static_cast<int>(rng() % (n_states_max - n_states_min + 1));
  for (int i = 0; i < n; ++i) env.add_state("s" + std::to_string(i));
  for (const char* atom : {"p", "q"}) {
    env.declare_atom(atom);
    for (int s = 0; s < n; ++s) env.set_test(atom, s, rng() % 2 == 0);
  }
  for (const auto& e : g.events)
    for (int s = 0; s < n; ++s) {
      std::vector<int> succ{static_cast<int>(rng() % n)};
      if (!deterministic && rng() % 4 == 0) succ.push_back(static_cast<int>(rng() % n));
      env.set_effect(e, s, std::move(succ));
    }
  spec.data_env = std::move(env);
}

GuardPtr draw_guard(std::mt19937_64& rng, const GenOptions& g, int depth = 2) {
  std::vector<std::string> atoms{"p", "q"};
  std::function<GuardPtr(int)> go = [&](int d) -> GuardPtr {
    if (d <= 0) return g_atom(atoms[rng() % 2]);
    switch (rng() % 6) {
      case 0: return g_atom(atoms[rng() % 2]);
      case 1: return g_not(go(d - 1));
      case 2: return g_plus(go(d - 1), go(d - 1));
      case 3: return g_seq(go(d - 1), go(d - 1));
      case 4: return g_eps();
      default: return g_atom(atoms[rng() % 2]);
    }
  };
  (void)g;
  return go(depth);
}

Prep terms1(bool prob_free = false) {
  return [prob_free](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x"}, prob_free);
  };
}
Prep terms2(bool prob_free = false) {
  return [prob_free](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x", "y"}, prob_free);
  };
}
Prep terms3(bool prob_free = false) {
  return [prob_free](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x", "y", "z"}, prob_free);
  };
}
Prep terms1p() {
  return [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x"});
    draw_probs(rng, env, g, {"pi"});
  };
}
Prep terms2p() {
  return [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x", "y"});
    draw_probs(rng, env, g, {"pi"});
  };
}
Prep terms3p() {
  return [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x", "y", "z"});
    draw_probs(rng, env, g, {"pi"});
  };
}

// conflicts needed by the unless axioms: #(e1,e2) with e3 left concurrent so
// that e2 <= e3 holds by the default order
Prep conflict3(bool probabilistic) {
  return [probabilistic](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec,
                         const GenOptions& g) {
    draw_events(rng, env, g, {"e1", "e2", "e3"});
    auto key = std::minmax(env.events["e1"], env.events["e2"]);
    (probabilistic ? spec.algebra.prob_conflicts : spec.algebra.conflicts)
        .insert({key.first, key.second});
  };
}

Prep guards1() {
  return [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
    attach_env(rng, spec, g, false);
    env.guards["phi"] = draw_guard(rng, g);
  };
}
Prep guards2() {
  return [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
    attach_env(rng, spec, g, false);
    env.guards["phi"] = draw_guard(rng, g);
    env.guards["psi"] = draw_guard(rng, g);
  };
}
Prep guards1_terms(std::vector<const char*> names, bool with_prob = false) {
  return [names, with_prob](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec,
                            const GenOptions& g) {
    attach_env(rng, spec, g, false);
    env.guards["phi"] = draw_guard(rng, g);
    GenOptions opts = g;
    opts.with_guards = true;
    opts.guard_atoms = {"p", "q"};
    for (const char* n : names) env.terms[n] = random_term(rng, opts);
    if (with_prob) draw_probs(rng, env, g, {"pi"});
  };
}
Prep guards2_terms(std::vector<const char*> names, bool with_prob = false) {
  return [names, with_prob](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec,
                            const GenOptions& g) {
    attach_env(rng, spec, g, false);
    env.guards["phi"] = draw_guard(rng, g);
    env.guards["psi"] = draw_guard(rng, g);
    GenOptions opts = g;
    opts.with_guards = true;
    opts.guard_atoms = {"p", "q"};
    for (const char* n : names) env.terms[n] = random_term(rng, opts);
    if (with_prob) draw_probs(rng, env, g, {"pi"});
  };
}

std::vector<AxiomDef> make_table() {
  std::vector<AxiomDef> t;
  auto add = [&](std::string id, std::string table, Relation rel, Build lhs, Build rhs,
                 Prep prep) {
    t.push_back({std::move(id), std::move(table), rel, std::move(lhs), std::move(rhs),
                 std::move(prep)});
  };
  const Relation S = Relation::PStep;
  const Relation RB = Relation::PRBStep;

  // ---- BAPTC ----
  add("A1", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) { return t_alt(V(e, "x"), V(e, "y")); },
      [](const AxiomEnv& e, SpecFile&) { return t_alt(V(e, "y"), V(e, "x")); }, terms2());
  add("A2", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) { return t_alt(t_alt(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) { return t_alt(V(e, "x"), t_alt(V(e, "y"), V(e, "z"))); },
      terms3());
  // Dirac-resolution side condition; the parallelism table weakens this to
  // e + e = e for the same reason
  add("A3", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) { return t_alt(V(e, "x"), V(e, "x")); },
      [](const AxiomEnv& e, SpecFile&) { return V(e, "x"); }, terms1(true));
  add("A4", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(t_alt(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_seq(V(e, "x"), V(e, "z")), t_seq(V(e, "y"), V(e, "z")));
      },
      terms3());
  add("A5", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(t_seq(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) { return t_seq(V(e, "x"), t_seq(V(e, "y"), V(e, "z"))); },
      terms3());
  add("PA1", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) { return t_prob(V(e, "x"), P(e, "pi"), V(e, "y")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(V(e, "y"), Rational(1) - P(e, "pi"), V(e, "x"));
      },
      terms2p());
  add("PA2", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(V(e, "x"), P(e, "pi"), t_prob(V(e, "y"), P(e, "rho"), V(e, "z")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        Rational pi = P(e, "pi"), rho = P(e, "rho");
        Rational sigma = pi + rho - pi * rho;
        return t_prob(t_prob(V(e, "x"), pi / sigma, V(e, "y")), sigma, V(e, "z"));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_terms(rng, env, g, {"x", "y", "z"});
        draw_probs(rng, env, g, {"pi", "rho"});
      });
  add("PA3", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) { return t_prob(V(e, "x"), P(e, "pi"), V(e, "x")); },
      [](const AxiomEnv& e, SpecFile&) { return V(e, "x"); }, terms1p());
  add("PA4", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_prob(V(e, "x"), P(e, "pi"), V(e, "y")), V(e, "z"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_seq(V(e, "x"), V(e, "z")), P(e, "pi"), t_seq(V(e, "y"), V(e, "z")));
      },
      terms3p());
  add("PA5", "baptc", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_prob(V(e, "x"), P(e, "pi"), V(e, "y")), V(e, "z"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_alt(V(e, "x"), V(e, "z")), P(e, "pi"), t_alt(V(e, "y"), V(e, "z")));
      },
      terms3p());

  // ---- parallelism ----
  add("A6", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_alt(V(e, "x"), t_delta()); },
      [](const AxiomEnv& e, SpecFile&) { return V(e, "x"); }, terms1());
  add("A7", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(t_delta(), V(e, "x")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, terms1());
  add("P1", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_whole(V(e, "x"), V(e, "y")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_par(V(e, "x"), V(e, "y")), t_comm(V(e, "x"), V(e, "y")));
      },
      terms2(true));
  add("P2", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_par(V(e, "x"), V(e, "y")); },
      [](const AxiomEnv& e, SpecFile&) { return t_par(V(e, "y"), V(e, "x")); }, terms2());
  add("P3", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_par(t_par(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) { return t_par(V(e, "x"), t_par(V(e, "y"), V(e, "z"))); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        // reassociation regroups the communication merges of the whole
        // components; with pairwise gamma and no handshaking law this is
        // only sound for communication-free alphabets
        spec.algebra.comm.clear();
        draw_terms(rng, env, g, {"x", "y", "z"});
      });
  add("P4", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_par(V(e, "x"), V(e, "y")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_lmerge(V(e, "x"), V(e, "y")), t_lmerge(V(e, "y"), V(e, "x")));
      },
      terms2(true));
  add("P5", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(E(e, "e1"), t_seq(E(e, "e2"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_lmerge(E(e, "e1"), E(e, "e2")), V(e, "y"));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_events(rng, env, g, {"e1", "e2"});
        draw_terms(rng, env, g, {"y"});
      });
  add("P6", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_seq(E(e, "e1"), V(e, "x")), E(e, "e2"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_lmerge(E(e, "e1"), E(e, "e2")), V(e, "x"));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_events(rng, env, g, {"e1", "e2"});
        draw_terms(rng, env, g, {"x"});
      });
  add("P7", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_seq(E(e, "e1"), V(e, "x")), t_seq(E(e, "e2"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_lmerge(E(e, "e1"), E(e, "e2")), t_whole(V(e, "x"), V(e, "y")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_events(rng, env, g, {"e1", "e2"});
        draw_terms(rng, env, g, {"x", "y"});
      });
  add("P8", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_alt(V(e, "x"), V(e, "y")), V(e, "z"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_lmerge(V(e, "x"), V(e, "z")), t_lmerge(V(e, "y"), V(e, "z")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_terms(rng, env, g, {"x", "y"});
        draw_terms(rng, env, g, {"z"}, /*prob_free=*/true);  // z = z + z
      });
  add("P9", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_lmerge(t_delta(), V(e, "x")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, terms1());
  auto comm_prep = [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec,
                      const GenOptions& g) {
    draw_events(rng, env, g, {"e1", "e2"}, false);
    draw_terms(rng, env, g, {"x", "y"});
    if (rng() % 2) {
      auto key = std::minmax(env.events["e1"], env.events["e2"]);
      spec.algebra.comm[{key.first, key.second}] = g.events[rng() % g.events.size()];
    }
  };
  add("C10", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(E(e, "e1"), E(e, "e2")); },
      [](const AxiomEnv& e, SpecFile& s) { return gamma_term(e, s, "e1", "e2"); }, comm_prep);
  add("C11", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_comm(E(e, "e1"), t_seq(E(e, "e2"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile& s) {
        TermPtr c = gamma_term(e, s, "e1", "e2");
        return c->kind == TermKind::Delta ? c : t_seq(c, V(e, "y"));
      },
      comm_prep);
  add("C12", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_comm(t_seq(E(e, "e1"), V(e, "x")), E(e, "e2"));
      },
      [](const AxiomEnv& e, SpecFile& s) {
        TermPtr c = gamma_term(e, s, "e1", "e2");
        return c->kind == TermKind::Delta ? c : t_seq(c, V(e, "x"));
      },
      comm_prep);
  add("C13", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_comm(t_seq(E(e, "e1"), V(e, "x")), t_seq(E(e, "e2"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile& s) {
        TermPtr c = gamma_term(e, s, "e1", "e2");
        return c->kind == TermKind::Delta ? c : t_seq(c, t_whole(V(e, "x"), V(e, "y")));
      },
      comm_prep);
  add("C14", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(t_alt(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_comm(V(e, "x"), V(e, "z")), t_comm(V(e, "y"), V(e, "z")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_terms(rng, env, g, {"x", "y"});
        draw_terms(rng, env, g, {"z"}, /*prob_free=*/true);  // z = z + z
      });
  add("C15", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(V(e, "x"), t_alt(V(e, "y"), V(e, "z"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_comm(V(e, "x"), V(e, "y")), t_comm(V(e, "x"), V(e, "z")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_terms(rng, env, g, {"y", "z"});
        draw_terms(rng, env, g, {"x"}, /*prob_free=*/true);  // x = x + x
      });
  add("C16", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(t_delta(), V(e, "x")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, terms1());
  add("C17", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(V(e, "x"), t_delta()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, terms1());
  add("PM1", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_par(V(e, "x"), t_prob(V(e, "y"), P(e, "pi"), V(e, "z")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_par(V(e, "x"), V(e, "y")), P(e, "pi"), t_par(V(e, "x"), V(e, "z")));
      },
      terms3p());
  add("PM2", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_par(t_prob(V(e, "x"), P(e, "pi"), V(e, "y")), V(e, "z"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_par(V(e, "x"), V(e, "z")), P(e, "pi"), t_par(V(e, "y"), V(e, "z")));
      },
      terms3p());
  add("PM3", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_comm(V(e, "x"), t_prob(V(e, "y"), P(e, "pi"), V(e, "z")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_comm(V(e, "x"), V(e, "y")), P(e, "pi"), t_comm(V(e, "x"), V(e, "z")));
      },
      terms3p());
  add("PM4", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_comm(t_prob(V(e, "x"), P(e, "pi"), V(e, "y")), V(e, "z"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_comm(V(e, "x"), V(e, "z")), P(e, "pi"), t_comm(V(e, "y"), V(e, "z")));
      },
      terms3p());
  add("CE18", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_celim(E(e, "e1")); },
      [](const AxiomEnv& e, SpecFile&) { return E(e, "e1"); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_events(rng, env, g, {"e1"});
      });
  add("CE19", "parallelism", S, [](const AxiomEnv&, SpecFile&) { return t_celim(t_delta()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); },
      [](std::mt19937_64&, AxiomEnv&, SpecFile&, const GenOptions&) {});
  add("CE20", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_celim(t_alt(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_unless(t_celim(V(e, "x")), V(e, "y")),
                     t_unless(t_celim(V(e, "y")), V(e, "x")));
      },
      terms2());
  add("PCE1", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_celim(t_prob(V(e, "x"), P(e, "pi"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_unless(t_celim(V(e, "x")), V(e, "y")), P(e, "pi"),
                      t_unless(t_celim(V(e, "y")), V(e, "x")));
      },
      terms2p());
  add("CE21", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_celim(t_seq(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_celim(V(e, "x")), t_celim(V(e, "y")));
      },
      terms2());
  add("CE22", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_celim(t_lmerge(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_lmerge(t_unless(t_celim(V(e, "x")), V(e, "y")), V(e, "y")),
                     t_lmerge(t_unless(t_celim(V(e, "y")), V(e, "x")), V(e, "x")));
      },
      terms2());
  add("CE23", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_celim(t_comm(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_comm(t_unless(t_celim(V(e, "x")), V(e, "y")), V(e, "y")),
                     t_comm(t_unless(t_celim(V(e, "y")), V(e, "x")), V(e, "x")));
      },
      terms2());
  add("U24", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(E(e, "e1"), E(e, "e2")); },
      [](const AxiomEnv&, SpecFile&) { return t_tau(); }, conflict3(false));
  add("U25", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(E(e, "e1"), E(e, "e3")); },
      [](const AxiomEnv& e, SpecFile&) { return E(e, "e1"); }, conflict3(false));
  add("U26", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(E(e, "e3"), E(e, "e1")); },
      [](const AxiomEnv&, SpecFile&) { return t_tau(); }, conflict3(false));
  add("PU1", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(E(e, "e1"), E(e, "e2")); },
      [](const AxiomEnv&, SpecFile&) { return t_tau(); }, conflict3(true));
  add("PU2", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(E(e, "e1"), E(e, "e3")); },
      [](const AxiomEnv& e, SpecFile&) { return E(e, "e1"); }, conflict3(true));
  add("PU3", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(E(e, "e3"), E(e, "e1")); },
      [](const AxiomEnv&, SpecFile&) { return t_tau(); }, conflict3(true));
  add("U27", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(E(e, "e1"), t_delta()); },
      [](const AxiomEnv& e, SpecFile&) { return E(e, "e1"); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_events(rng, env, g, {"e1"});
      });
  add("U28", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(t_delta(), E(e, "e1")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
        draw_events(rng, env, g, {"e1"});
      });
  add("U29", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(t_alt(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_unless(V(e, "x"), V(e, "z")), t_unless(V(e, "y"), V(e, "z")));
      },
      terms3());
  add("PU4", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(t_prob(V(e, "x"), P(e, "pi"), V(e, "y")), V(e, "z"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_unless(V(e, "x"), V(e, "z")), P(e, "pi"), t_unless(V(e, "y"), V(e, "z")));
      },
      terms3p());
  add("U30", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(t_seq(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_unless(V(e, "x"), V(e, "z")), t_unless(V(e, "y"), V(e, "z")));
      },
      terms3());
  add("U31", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(t_lmerge(V(e, "x"), V(e, "y")), V(e, "z"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_unless(V(e, "x"), V(e, "z")), t_unless(V(e, "y"), V(e, "z")));
      },
      terms3());
  add("U32", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(t_comm(V(e, "x"), V(e, "y")), V(e, "z")); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_comm(t_unless(V(e, "x"), V(e, "z")), t_unless(V(e, "y"), V(e, "z")));
      },
      terms3());
  add("U33", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(V(e, "x"), t_alt(V(e, "y"), V(e, "z"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(t_unless(V(e, "x"), V(e, "y")), V(e, "z"));
      },
      terms3());
  add("PU5", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(V(e, "x"), t_prob(V(e, "y"), P(e, "pi"), V(e, "z")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(t_unless(V(e, "x"), V(e, "y")), V(e, "z"));
      },
      terms3p());
  add("U34", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(V(e, "x"), t_seq(V(e, "y"), V(e, "z"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(t_unless(V(e, "x"), V(e, "y")), V(e, "z"));
      },
      terms3());
  add("U35", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(V(e, "x"), t_lmerge(V(e, "y"), V(e, "z")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(t_unless(V(e, "x"), V(e, "y")), V(e, "z"));
      },
      terms3());
  add("U36", "parallelism", S,
      [](const AxiomEnv& e, SpecFile&) { return t_unless(V(e, "x"), t_comm(V(e, "y"), V(e, "z"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_unless(t_unless(V(e, "x"), V(e, "y")), V(e, "z"));
      },
      terms3());

  // ---- encapsulation ----
  auto eset_prep = [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_eset(rng, env, g);
    draw_terms(rng, env, g, {"x", "y"});
    draw_probs(rng, env, g, {"pi"});
    draw_events(rng, env, g, {"e1"});
  };
  add("D1", "encapsulation", S,
      [](const AxiomEnv& e, SpecFile&) {
        std::vector<std::string> H;  // H minus e1: the event stays
        for (const auto& x : e.eset)
          if (x != e.events.at("e1")) H.push_back(x);
        return t_encap(H, E(e, "e1"));
      },
      [](const AxiomEnv& e, SpecFile&) { return E(e, "e1"); }, eset_prep);
  add("D2", "encapsulation", S,
      [](const AxiomEnv& e, SpecFile&) {
        std::vector<std::string> H = e.eset;
        H.push_back(e.events.at("e1"));
        return t_encap(H, E(e, "e1"));
      },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, eset_prep);
  add("D3", "encapsulation", S,
      [](const AxiomEnv& e, SpecFile&) { return t_encap(e.eset, t_delta()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, eset_prep);
  add("D4", "encapsulation", S,
      [](const AxiomEnv& e, SpecFile&) { return t_encap(e.eset, t_alt(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_encap(e.eset, V(e, "x")), t_encap(e.eset, V(e, "y")));
      },
      eset_prep);
  add("D5", "encapsulation", S,
      [](const AxiomEnv& e, SpecFile&) { return t_encap(e.eset, t_seq(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_encap(e.eset, V(e, "x")), t_encap(e.eset, V(e, "y")));
      },
      eset_prep);
  add("D6", "encapsulation", S,
      [](const AxiomEnv& e, SpecFile&) { return t_encap(e.eset, t_lmerge(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_encap(e.eset, V(e, "x")), t_encap(e.eset, V(e, "y")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        // blocked events may not communicate into unblocked results, else
        // distribution over the merge loses the inner communication
        spec.algebra.comm.clear();
        draw_eset(rng, env, g);
        draw_terms(rng, env, g, {"x", "y"});
      });
  add("PD1", "encapsulation", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_encap(e.eset, t_prob(V(e, "x"), P(e, "pi"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_encap(e.eset, V(e, "x")), P(e, "pi"), t_encap(e.eset, V(e, "y")));
      },
      eset_prep);

  // ---- projection ----
  auto proj_prep = [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x", "y"});
    draw_probs(rng, env, g, {"rho"});
    env.depth = 1 + static_cast<long>(rng() % 4);
    TermPtr c = t_atom(g.events[rng() % g.events.size()]);
    size_t extra = rng() % 3;
    for (size_t i = 0; i < extra; ++i)
      c = t_lmerge(c, t_atom(g.events[rng() % g.events.size()]));
    env.terms["cluster"] = c;
  };
  add("PR1", "projection", S,
      [](const AxiomEnv& e, SpecFile&) { return t_project(e.depth, t_alt(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_project(e.depth, V(e, "x")), t_project(e.depth, V(e, "y")));
      },
      proj_prep);
  add("PPR1", "projection", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_project(e.depth, t_prob(V(e, "x"), P(e, "rho"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_project(e.depth, V(e, "x")), P(e, "rho"), t_project(e.depth, V(e, "y")));
      },
      proj_prep);
  add("PR2", "projection", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_project(e.depth, t_lmerge(V(e, "x"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_project(e.depth, V(e, "x")), t_project(e.depth, V(e, "y")));
      },
      proj_prep);
  add("PR3", "projection", S,
      [](const AxiomEnv& e, SpecFile&) { return t_project(e.depth, V(e, "cluster")); },
      [](const AxiomEnv& e, SpecFile&) { return V(e, "cluster"); }, proj_prep);
  add("PR4", "projection", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_project(e.depth, t_seq(V(e, "cluster"), V(e, "x")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(V(e, "cluster"), t_project(e.depth - 1, V(e, "x")));
      },
      proj_prep);
  add("PR5", "projection", S,
      [](const AxiomEnv& e, SpecFile&) { return t_project(0, V(e, "x")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, proj_prep);
  add("PR6", "projection", S,
      [](const AxiomEnv& e, SpecFile&) { return t_project(e.depth, t_delta()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, proj_prep);

  // ---- silent step (rooted branching) ----
  auto b_prep = [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_terms(rng, env, g, {"x", "w"});
    // x must guard the silent step: a vanishing x (epsilon-like) would lift
    // the tau into the root, where the rooted condition rightly rejects it
    for (int guard = 0; guard < 16 && may_pass_silently(env.terms["x"]); ++guard)
      draw_terms(rng, env, g, {"x"});
    if (may_pass_silently(env.terms["x"]))
      env.terms["x"] = t_seq(t_atom(g.events[rng() % g.events.size()]), env.terms["x"]);
    draw_terms(rng, env, g, {"y", "z"}, true);
    draw_probs(rng, env, g, {"pi"});
  };
  add("B1", "silent", RB,
      [](const AxiomEnv& e, SpecFile&) {
        TermPtr inner = t_alt(V(e, "y"), t_seq(t_tau(), t_alt(V(e, "y"), V(e, "z"))));
        return t_seq(V(e, "x"), t_prob(inner, P(e, "pi"), V(e, "w")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(V(e, "x"), t_prob(t_alt(V(e, "y"), V(e, "z")), P(e, "pi"), V(e, "w")));
      },
      b_prep);
  add("B2", "silent", RB,
      [](const AxiomEnv& e, SpecFile&) {
        TermPtr inner = t_alt(V(e, "y"), t_lmerge(t_tau(), t_alt(V(e, "y"), V(e, "z"))));
        return t_lmerge(V(e, "x"), t_prob(inner, P(e, "pi"), V(e, "w")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(V(e, "x"), t_prob(t_alt(V(e, "y"), V(e, "z")), P(e, "pi"), V(e, "w")));
      },
      b_prep);

  // ---- abstraction (rooted branching) ----
  auto ti_prep = [](std::mt19937_64& rng, AxiomEnv& env, SpecFile&, const GenOptions& g) {
    draw_eset(rng, env, g);
    draw_terms(rng, env, g, {"x", "y"});
    draw_probs(rng, env, g, {"pi"});
    draw_events(rng, env, g, {"e1"});
  };
  add("TI1", "abstraction", RB,
      [](const AxiomEnv& e, SpecFile&) {
        std::vector<std::string> I;
        for (const auto& x : e.eset)
          if (x != e.events.at("e1")) I.push_back(x);
        return t_hide(I, E(e, "e1"));
      },
      [](const AxiomEnv& e, SpecFile&) { return E(e, "e1"); }, ti_prep);
  add("TI2", "abstraction", RB,
      [](const AxiomEnv& e, SpecFile&) {
        std::vector<std::string> I = e.eset;
        I.push_back(e.events.at("e1"));
        return t_hide(I, E(e, "e1"));
      },
      [](const AxiomEnv&, SpecFile&) { return t_tau(); }, ti_prep);
  add("TI3", "abstraction", RB,
      [](const AxiomEnv& e, SpecFile&) { return t_hide(e.eset, t_delta()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, ti_prep);
  add("TI4", "abstraction", RB,
      [](const AxiomEnv& e, SpecFile&) { return t_hide(e.eset, t_alt(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_hide(e.eset, V(e, "x")), t_hide(e.eset, V(e, "y")));
      },
      ti_prep);
  add("PTI1", "abstraction", RB,
      [](const AxiomEnv& e, SpecFile&) {
        return t_hide(e.eset, t_prob(V(e, "x"), P(e, "pi"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_hide(e.eset, V(e, "x")), P(e, "pi"), t_hide(e.eset, V(e, "y")));
      },
      ti_prep);
  add("TI5", "abstraction", RB,
      [](const AxiomEnv& e, SpecFile&) { return t_hide(e.eset, t_seq(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_hide(e.eset, V(e, "x")), t_hide(e.eset, V(e, "y")));
      },
      ti_prep);
  add("TI6", "abstraction", RB,
      [](const AxiomEnv& e, SpecFile&) { return t_hide(e.eset, t_lmerge(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_hide(e.eset, V(e, "x")), t_hide(e.eset, V(e, "y")));
      },
      ti_prep);

  // ---- guards ----
  add("G1", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(G(e, "phi"), GN(e, "phi")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G2", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_alt(G(e, "phi"), GN(e, "phi")); },
      [](const AxiomEnv&, SpecFile&) { return t_eps(); }, guards1());
  add("PG1", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_prob(G(e, "phi"), P(e, "pi"), GN(e, "phi")); },
      [](const AxiomEnv&, SpecFile&) { return t_eps(); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        env.guards["phi"] = draw_guard(rng, g);
        draw_probs(rng, env, g, {"pi"});
      });
  add("G3", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(G(e, "phi"), t_delta()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G4", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(G(e, "phi"), t_alt(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_seq(G(e, "phi"), V(e, "x")), t_seq(G(e, "phi"), V(e, "y")));
      },
      guards1_terms({"x", "y"}));
  add("PG2", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(G(e, "phi"), t_prob(V(e, "x"), P(e, "pi"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_seq(G(e, "phi"), V(e, "x")), P(e, "pi"), t_seq(G(e, "phi"), V(e, "y")));
      },
      guards1_terms({"x", "y"}, true));
  add("G5", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(G(e, "phi"), t_seq(V(e, "x"), V(e, "y"))); },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_seq(G(e, "phi"), V(e, "x")), V(e, "y"));
      },
      guards1_terms({"x", "y"}));
  add("G6", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_alt(G(e, "phi"), G(e, "psi")), V(e, "x"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_alt(t_seq(G(e, "phi"), V(e, "x")), t_seq(G(e, "psi"), V(e, "x")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        env.guards["phi"] = draw_guard(rng, g);
        env.guards["psi"] = draw_guard(rng, g);
        GenOptions opts = g;
        opts.with_guards = true;
        opts.guard_atoms = {"p", "q"};
        opts.prob_free = true;  // + duplicates the continuation's resolution
        env.terms["x"] = random_term(rng, opts);
      });
  add("PG3", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_prob(G(e, "phi"), P(e, "pi"), G(e, "psi")), V(e, "x"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_prob(t_seq(G(e, "phi"), V(e, "x")), P(e, "pi"), t_seq(G(e, "psi"), V(e, "x")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        env.guards["phi"] = draw_guard(rng, g);
        env.guards["psi"] = draw_guard(rng, g);
        env.terms["x"] = t_guard(draw_guard(rng, g));
        draw_probs(rng, env, g, {"pi"});
      });
  add("G7", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_seq(G(e, "phi"), G(e, "psi")), V(e, "x"));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(G(e, "phi"), t_seq(G(e, "psi"), V(e, "x")));
      },
      guards2_terms({"x"}));
  add("G8", "guards", S, [](const AxiomEnv& e, SpecFile&) { return G(e, "phi"); },
      [](const AxiomEnv&, SpecFile&) { return t_eps(); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        GuardPtr psi = draw_guard(rng, g);
        env.guards["phi"] = g_plus(psi, g_not(psi));  // holds in every state
      });
  add("G9", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_seq(G(e, "phi"), G(e, "psi")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        GuardPtr psi = draw_guard(rng, g);
        env.guards["phi"] = psi;  // phi . !phi fails in every state
        env.guards["psi"] = g_not(psi);
      });
  add("G10", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(G(e, "wp"), t_seq(E(e, "e1"), G(e, "phi")));
      },
      [](const AxiomEnv& e, SpecFile&) { return t_seq(G(e, "wp"), E(e, "e1")); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        draw_events(rng, env, g, {"e1"});
        env.guards["phi"] = draw_guard(rng, g);
        env.guards["wp"] =
            weakest_precondition(env.events["e1"], env.guards["phi"], *spec.data_env);
      });
  add("G11", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(GN(e, "wp"), t_seq(E(e, "e1"), GN(e, "phi")));
      },
      [](const AxiomEnv& e, SpecFile&) { return t_seq(GN(e, "wp"), E(e, "e1")); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, /*deterministic=*/true);
        draw_events(rng, env, g, {"e1"});
        env.guards["phi"] = draw_guard(rng, g);
        env.guards["wp"] =
            weakest_precondition(env.events["e1"], env.guards["phi"], *spec.data_env);
      });
  add("G12", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(G(e, "phi"), t_lmerge(V(e, "x"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_lmerge(t_seq(G(e, "phi"), V(e, "x")), t_seq(G(e, "phi"), V(e, "y")));
      },
      guards1_terms({"x", "y"}));
  add("G13", "guards", S,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(G(e, "phi"), t_comm(V(e, "x"), V(e, "y")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_comm(t_seq(G(e, "phi"), V(e, "x")), t_seq(G(e, "phi"), V(e, "y")));
      },
      guards1_terms({"x", "y"}));
  add("G14", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_lmerge(t_delta(), G(e, "phi")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G15", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(G(e, "phi"), t_delta()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G16", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(t_delta(), G(e, "phi")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G17", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_lmerge(G(e, "phi"), t_eps()); },
      [](const AxiomEnv& e, SpecFile&) { return G(e, "phi"); }, guards1());
  add("G18", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_lmerge(t_eps(), G(e, "phi")); },
      [](const AxiomEnv& e, SpecFile&) { return G(e, "phi"); }, guards1());
  add("G19", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(G(e, "phi"), t_eps()); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G20", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_comm(t_eps(), G(e, "phi")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G21", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_lmerge(G(e, "phi"), GN(e, "phi")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); }, guards1());
  add("G22", "guards", S, [](const AxiomEnv& e, SpecFile&) { return t_celim(G(e, "phi")); },
      [](const AxiomEnv& e, SpecFile&) { return G(e, "phi"); }, guards1());
  add("G23", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_encap(e.eset, G(e, "phi")); },
      [](const AxiomEnv& e, SpecFile&) { return G(e, "phi"); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        env.guards["phi"] = draw_guard(rng, g);
        draw_eset(rng, env, g);
      });
  add("G24", "guards", S,
      [](const AxiomEnv& e, SpecFile&) { return t_lmerge(G(e, "phi"), G(e, "psi")); },
      [](const AxiomEnv&, SpecFile&) { return t_delta(); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        attach_env(rng, spec, g, false);
        GuardPtr psi = draw_guard(rng, g);
        env.guards["phi"] = psi;  // jointly unsatisfiable in every state
        env.guards["psi"] = g_not(psi);
      });

  // ---- recursive verification rules ----
  add("VR1", "vr", RB,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_tau(), t_hide(e.eset, t_recvar("Xvr")));
      },
      [](const AxiomEnv& e, SpecFile&) { return t_seq(t_tau(), t_hide(e.eset, V(e, "y"))); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        draw_eset(rng, env, g);
        GenOptions sub = g;
        sub.prob_free = true;
        sub.max_size = std::max<size_t>(2, g.max_size / 2);
        env.terms["y"] = random_term(rng, sub);
        TermPtr cluster = t_atom(env.eset[rng() % env.eset.size()]);
        if (env.eset.size() > 1 && rng() % 2)
          cluster = t_lmerge(cluster, t_atom(env.eset[rng() % env.eset.size()]));
        spec.recspec.add("Xvr", t_alt(env.terms["y"], t_seq(cluster, t_recvar("Xvr"))));
      });
  add("VR2", "vr", RB,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_tau(), t_hide(e.eset, t_recvar("Xvr")));
      },
      [](const AxiomEnv& e, SpecFile&) { return t_seq(t_tau(), t_hide(e.eset, V(e, "z"))); },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        draw_eset(rng, env, g);
        draw_probs(rng, env, g, {"pi"});
        GenOptions sub = g;
        sub.prob_free = true;
        sub.max_size = std::max<size_t>(2, g.max_size / 3);
        TermPtr u = random_term(rng, sub);
        TermPtr w = random_term(rng, sub);
        env.terms["u"] = u;
        env.terms["z"] = t_alt(u, w);  // z = z + u by construction
        TermPtr cluster = t_atom(env.eset[rng() % env.eset.size()]);
        spec.recspec.add("Xvr", t_prob(env.terms["z"], env.probs["pi"],
                                       t_alt(u, t_seq(cluster, t_recvar("Xvr")))));
      });
  add("VR3", "vr", RB,
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_tau(), t_hide(e.eset, t_recvar("Xvr")));
      },
      [](const AxiomEnv& e, SpecFile&) {
        return t_seq(t_tau(), t_hide(e.eset, t_recvar("Yprime")));
      },
      [](std::mt19937_64& rng, AxiomEnv& env, SpecFile& spec, const GenOptions& g) {
        draw_eset(rng, env, g);
        draw_probs(rng, env, g, {"pi"});
        GenOptions sub = g;
        sub.prob_free = true;
        sub.max_size = std::max<size_t>(2, g.max_size / 3);
        TermPtr u = random_term(rng, sub);
        TermPtr w = random_term(rng, sub);
        TermPtr z = t_alt(u, w);
        env.terms["u"] = u;
        env.terms["z"] = z;
        TermPtr ic = t_atom(env.eset[rng() % env.eset.size()]);
        TermPtr jc = t_atom(env.eset[rng() % env.eset.size()]);
        spec.recspec.add("Xvr", t_alt(z, t_seq(ic, t_recvar("Yvr"))));
        spec.recspec.add("Yvr", t_prob(z, env.probs["pi"],
                                       t_alt(u, t_seq(jc, t_recvar("Xvr")))));
        spec.recspec.add("Yprime", t_prob(z, env.probs["pi"],
                                          t_alt(u, t_seq(ic, t_recvar("Yprime")))));
      });

  return t;
}

}  // namespace

const std::vector<AxiomDef>& axiom_table() {
  static std::vector<AxiomDef> defs = make_table();
  return defs;
}

const AxiomDef* find_axiom(const std::string& id) {
  for (const auto& d : axiom_table())
    if (d.id == id) return &d;
  return nullptr;
}

bool check_axiom(const std::string& id, const AxiomEnv& env, SpecFile& spec,
                 const Limits& limits) {
  const AxiomDef* def = find_axiom(id);
  if (!def) throw std::runtime_error("unknown axiom '" + id + "'");
  AxiomEnv copy = env;
  TermPtr lhs = def->lhs(copy, spec);
  TermPtr rhs = def->rhs(copy, spec);
  return equiv_terms(lhs, rhs, spec, def->rel, limits).equivalent;
}

std::string AxiomSuiteReport::to_text() const {
  std::ostringstream os;
  std::string table;
  for (const auto& r : rows) {
    if (r.table != table) {
      table = r.table;
      os << "# " << table << "\n";
    }
    os << (r.failed ? "FAIL " : "pass ") << r.id << "  (" << r.passed << "/"
       << (r.passed + r.failed) << ")";
    if (r.failed) os << "  first failure: " << r.first_failure;
    os << "\n";
  }
  os << (all_passed() ? "all axioms verified\n" : "AXIOM FAILURES PRESENT\n");
  return os.str();
}

AxiomSuiteReport run_axiom_suite(const AxiomSuiteOptions& opts) {
  AxiomSuiteReport report;
  GenOptions gen;
  gen.max_size = opts.term_size;
  for (const AxiomDef& def : axiom_table()) {
    AxiomSuiteReport::Row row;
    row.id = def.id;
    row.table = def.table;
    std::mt19937_64 rng(opts.seed ^ std::hash<std::string>{}(def.id));
    for (int i = 0; i < opts.count; ++i) {
      SpecFile spec = parse_spec_file("events a, b, c, d; comm a b = c;");
      AxiomEnv env;
      def.prepare(rng, env, spec, gen);
      try {
        TermPtr lhs = def.lhs(env, spec);
        TermPtr rhs = def.rhs(env, spec);
        if (def.id == "PA2" && opts.mutate == "pa2") {
          Rational pi = env.probs.at("pi"), rho = env.probs.at("rho");
          Rational sigma = pi + rho - pi * rho;
          rhs = t_prob(t_prob(env.terms.at("x"), rho / sigma, env.terms.at("y")), sigma,
                       env.terms.at("z"));
        }
        bool ok = equiv_terms(lhs, rhs, spec, def.rel, opts.limits).equivalent;
        if (ok) {
          ++row.passed;
        } else {
          ++row.failed;
          if (row.first_failure.empty()) row.first_failure = env.describe();
        }
      } catch (const std::exception& ex) {
        ++row.failed;
        if (row.first_failure.empty())
          row.first_failure = std::string(ex.what()) + " [" + env.describe() + "]";
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace pptc
