#pragma once

#include "pptc/equivalence.hpp"
#include "pptc/generator.hpp"

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace pptc {

// One concrete instantiation of an axiom schema: closed terms for the term
// variables, events, probabilities and guards for the schema parameters.
struct AxiomEnv {
  std::map<std::string, TermPtr> terms;
  std::map<std::string, std::string> events;
  std::map<std::string, Rational> probs;
  std::map<std::string, GuardPtr> guards;
  std::vector<std::string> eset;  // H or I
  long depth = 1;                 // projection depth

  std::string describe() const;
};

struct AxiomDef {
  std::string id;
  std::string table;  // baptc | parallelism | encapsulation | projection |
                      // silent | abstraction | guards | vr
  Relation rel;
  std::function<TermPtr(const AxiomEnv&, SpecFile&)> lhs, rhs;
  // draws a side-condition-respecting instantiation, mutating the spec
  // (conflicts, gamma, data environment, recursion equations) as needed
  std::function<void(std::mt19937_64&, AxiomEnv&, SpecFile&, const GenOptions&)> prepare;
};

const std::vector<AxiomDef>& axiom_table();
const AxiomDef* find_axiom(const std::string& id);

// Builds both sides of the axiom under the given instantiation and decides
// them under the axiom's equivalence.
bool check_axiom(const std::string& id, const AxiomEnv& env, SpecFile& spec,
                 const Limits& limits);

struct AxiomSuiteOptions {
  uint64_t seed = 0;
  int count = 50;
  size_t term_size = 12;
  Limits limits;
  // test hook: "pa2" corrupts the derived weight of PA2's right-hand side
  std::string mutate;
};

struct AxiomSuiteReport {
  struct Row {
    std::string id, table;
    int passed = 0, failed = 0;
    std::string first_failure;
  };
  std::vector<Row> rows;
  bool all_passed() const {
    for (const auto& r : rows)
      if (r.failed) return false;
    return true;
  }
  std::string to_text() const;
};

AxiomSuiteReport run_axiom_suite(const AxiomSuiteOptions& opts);

}  // namespace pptc
