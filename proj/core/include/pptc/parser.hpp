#pragma once

#include "pptc/guards.hpp"
#include "pptc/term.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pptc {

struct SyntaxError : std::runtime_error {
  SyntaxError(size_t line, size_t col, const std::string& what)
      : std::runtime_error("syntax error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  size_t line, col;
};

struct UnknownEvent : std::runtime_error {
  explicit UnknownEvent(const std::string& name)
      : std::runtime_error("unknown event '" + name + "'"), name(name) {}
  std::string name;
};

struct HoareTriple {
  GuardPtr pre;
  TermPtr program;
  GuardPtr post;
};

// A parsed workbench file: algebra declarations, recursion equations, an
// optional data environment, hoare lines and the root term.
struct SpecFile {
  AlgebraDecl algebra;
  RecSpec recspec;
  std::optional<DataEnv> data_env;
  TermPtr root;  // null when the file declares no root
  std::vector<HoareTriple> triples;
  std::vector<std::string> warnings;
};

// Parses a single term against a fixed algebra. Identifiers starting with an
// uppercase letter are recursion variables; all other identifiers must be
// declared events. The result is canonicalized.
TermPtr parse_term(std::string_view src, const AlgebraDecl& algebra);

GuardPtr parse_guard(std::string_view src);

// Line-oriented spec file: `events a, b;` `comm a b = c;` `order a <= b;`
// `conflict a # b;` `pconflict a #p b;` `race a % b;` `eq X = term;`
// `root term;` plus data blocks `state s0, s1;` `test phi @ s0 = true;`
// `effect a @ s0 = {s1};` and `hoare { pre } term { post };`.
// `//` starts a comment. Events used in terms are auto-declared with a
// warning.
SpecFile parse_spec_file(std::string_view src);

std::string pretty_print(const TermPtr& t);
std::string pretty_print(const GuardPtr& g);

}  // namespace pptc
