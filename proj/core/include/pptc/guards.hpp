#pragma once

#include "pptc/term.hpp"

#include <map>
#include <string>
#include <vector>

namespace pptc {

struct MissingDataEnv : std::runtime_error {
  explicit MissingDataEnv(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownGuardAtom : std::runtime_error {
  explicit UnknownGuardAtom(const std::string& what) : std::runtime_error(what) {}
};

// Finite, table-driven data environment: a state set S, test columns for
// atomic guards and effect rows for events. effect defaults to the identity
// for undeclared (event, state) pairs.
struct DataEnv {
  std::vector<std::string> state_names;
  std::map<std::string, int> state_index;
  // atom -> per-state truth column (size = |S|)
  std::map<std::string, std::vector<char>> test_table;
  // event -> per-state successor sets (empty vector entry = identity)
  std::map<std::string, std::vector<std::vector<int>>> effect_table;

  int n_states() const { return static_cast<int>(state_names.size()); }
  int state_id(const std::string& name) const;
  void add_state(const std::string& name);
  void declare_atom(const std::string& atom);
  bool has_atom(const std::string& atom) const { return test_table.count(atom) != 0; }
  void set_test(const std::string& atom, int s, bool value);
  void set_effect(const std::string& event, int s, std::vector<int> successors);

  bool test_atom(const std::string& atom, int s) const;
  std::vector<int> effect(const std::string& event, int s) const;

  // Registers a derived atom with the given truth column, reusing an existing
  // one with the same column when present. Returns the atom name.
  std::string mint_atom(const std::string& base, const std::vector<char>& column);
};

// Compositional truth value of a guard at state s: negation for !, disjunction
// for + and +[p] (either branch witnesses passage), conjunction for . and |>,
// eps true, delta false.
bool eval_guard(const GuardPtr& g, int s, const DataEnv& env);

// Characteristic guard of { s | for all s' in effect(e,s): test(g,s') }.
// Expressed over declared atoms when one matches exactly, otherwise a derived
// state-set atom is minted.
GuardPtr weakest_precondition(const std::string& event, const GuardPtr& g, DataEnv& env);

// The raw state set behind weakest_precondition.
std::vector<char> wp_states(const std::string& event, const GuardPtr& g, const DataEnv& env);

}  // namespace pptc
