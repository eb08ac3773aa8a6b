#include "pptc/guards.hpp"

#include <algorithm>

namespace pptc {

int DataEnv::state_id(const std::string& name) const {
  auto it = state_index.find(name);
  if (it == state_index.end()) throw std::runtime_error("unknown data state '" + name + "'");
  return it->second;
}

void DataEnv::add_state(const std::string& name) {
  if (state_index.count(name)) throw std::runtime_error("duplicate data state '" + name + "'");
  state_index[name] = static_cast<int>(state_names.size());
  state_names.push_back(name);
}

void DataEnv::declare_atom(const std::string& atom) {
  auto& col = test_table[atom];
  col.resize(state_names.size(), 0);
}

void DataEnv::set_test(const std::string& atom, int s, bool value) {
  auto& col = test_table[atom];
  col.resize(state_names.size(), 0);
  col.at(s) = value ? 1 : 0;
}

void DataEnv::set_effect(const std::string& event, int s, std::vector<int> successors) {
  if (successors.empty()) throw std::runtime_error("effect(" + event + ") must be nonempty");
  auto& row = effect_table[event];
  row.resize(state_names.size());
  std::sort(successors.begin(), successors.end());
  successors.erase(std::unique(successors.begin(), successors.end()), successors.end());
  row.at(s) = std::move(successors);
}

bool DataEnv::test_atom(const std::string& atom, int s) const {
  auto it = test_table.find(atom);
  if (it == test_table.end()) throw UnknownGuardAtom("guard atom '" + atom + "' not declared");
  if (s < 0 || s >= static_cast<int>(it->second.size())) return false;
  return it->second[s] != 0;
}

std::vector<int> DataEnv::effect(const std::string& event, int s) const {
  auto it = effect_table.find(event);
  if (it != effect_table.end() && s >= 0 && s < static_cast<int>(it->second.size()) &&
      !it->second[s].empty())
    return it->second[s];
  return {s};  // identity default
}

std::string DataEnv::mint_atom(const std::string& base, const std::vector<char>& column) {
  for (const auto& [name, col] : test_table)
    if (col == column) return name;
  std::string name = base;
  int n = 0;
  while (test_table.count(name)) name = base + "_" + std::to_string(n++);
  auto& col = test_table[name];
  col = column;
  col.resize(state_names.size(), 0);
  return name;
}

bool eval_guard(const GuardPtr& g, int s, const DataEnv& env) {
  switch (g->kind) {
    case GuardKind::Atom:
      return env.test_atom(g->atom, s);
    case GuardKind::Not:
      return !eval_guard(g->lhs, s, env);
    case GuardKind::Plus:
    case GuardKind::Prob:
      return eval_guard(g->lhs, s, env) || eval_guard(g->rhs, s, env);
    case GuardKind::Seq:
    case GuardKind::LeftMerge:
      return eval_guard(g->lhs, s, env) && eval_guard(g->rhs, s, env);
    case GuardKind::Delta:
      return false;
    case GuardKind::Eps:
      return true;
  }
  return false;
}

std::vector<char> wp_states(const std::string& event, const GuardPtr& g, const DataEnv& env) {
  std::vector<char> out(env.n_states(), 0);
  for (int s = 0; s < env.n_states(); ++s) {
    bool all = true;
    for (int s2 : env.effect(event, s))
      if (!eval_guard(g, s2, env)) {
        all = false;
        break;
      }
    out[s] = all ? 1 : 0;
  }
  return out;
}

GuardPtr weakest_precondition(const std::string& event, const GuardPtr& g, DataEnv& env) {
  std::vector<char> want = wp_states(event, g, env);
  bool all = std::all_of(want.begin(), want.end(), [](char c) { return c != 0; });
  bool none = std::none_of(want.begin(), want.end(), [](char c) { return c != 0; });
  if (all) return g_eps();
  if (none) return g_delta();
  for (const auto& [atom, col] : env.test_table) {
    std::vector<char> c(col);
    c.resize(want.size(), 0);
    if (c == want) return g_atom(atom);
    bool negated = true;
    for (size_t i = 0; i < want.size(); ++i)
      if ((c[i] != 0) == (want[i] != 0)) {
        negated = false;
        break;
      }
    if (negated) return g_not(g_atom(atom));
  }
  return g_atom(env.mint_atom("wp$" + event, want));
}

}  // namespace pptc
