#include "pptc/parser.hpp"

#include <cctype>
#include <functional>

namespace pptc {

namespace {

enum class Tok {
  Ident, Number, Dot, Plus, ProbOpen,  // `+[`
  LBracket, RBracket, LBrace, RBrace, LParen, RParen,
  Amp, ParBar, LMerge, Bar, Unless, Bang,
  Comma, Semi, Eq, Leq, At, Hash, HashP, Percent, Slash,
  End
};

struct Token {
  Tok kind;
  std::string text;
  size_t line, col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }
  bool at(Tok k) const { return tok_.kind == k; }
  bool at_word(const char* w) const { return tok_.kind == Tok::Ident && tok_.text == w; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(tok_.line, tok_.col,
                      "expected " + expected + ", got '" + tok_.text + "'");
  }

  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(what);
    return take();
  }

 private:
  void advance() {
    skip_ws();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, "<end>", line_, col_};
      return;
    }
    char c = src_[pos_];
    auto two = [&](char a, char b) {
      return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '\''))
        bump();
      tok_.kind = Tok::Ident;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
      tok_.kind = Tok::Number;
      tok_.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (two('+', '[')) { set(Tok::ProbOpen, "+[", 2); return; }
    if (two('|', '|')) { set(Tok::ParBar, "||", 2); return; }
    if (two('|', '>')) { set(Tok::LMerge, "|>", 2); return; }
    if (two('<', '<')) { set(Tok::Unless, "<<", 2); return; }
    if (two('<', '=')) { set(Tok::Leq, "<=", 2); return; }
    if (two('#', 'p')) { set(Tok::HashP, "#p", 2); return; }
    switch (c) {
      case '.': set(Tok::Dot, ".", 1); return;
      case '+': set(Tok::Plus, "+", 1); return;
      case '[': set(Tok::LBracket, "[", 1); return;
      case ']': set(Tok::RBracket, "]", 1); return;
      case '{': set(Tok::LBrace, "{", 1); return;
      case '}': set(Tok::RBrace, "}", 1); return;
      case '(': set(Tok::LParen, "(", 1); return;
      case ')': set(Tok::RParen, ")", 1); return;
      case '&': set(Tok::Amp, "&", 1); return;
      case '|': set(Tok::Bar, "|", 1); return;
      case '!': set(Tok::Bang, "!", 1); return;
      case ',': set(Tok::Comma, ",", 1); return;
      case ';': set(Tok::Semi, ";", 1); return;
      case '=': set(Tok::Eq, "=", 1); return;
      case '@': set(Tok::At, "@", 1); return;
      case '#': set(Tok::Hash, "#", 1); return;
      case '%': set(Tok::Percent, "%", 1); return;
      case '/': set(Tok::Slash, "/", 1); return;
      default:
        throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
    }
  }

  void set(Tok k, const char* text, size_t n) {
    tok_.kind = k;
    tok_.text = text;
    for (size_t i = 0; i < n; ++i) bump();
  }

  void skip_ws() {
    for (;;) {
      while (pos_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[pos_])))
        bump();
      if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view src_;
  size_t pos_ = 0, line_ = 1, col_ = 1;
  Token tok_;
};

bool is_recvar_name(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class Parser {
 public:
  // algebra may be grown (auto-declaration) when lenient is true.
  Parser(Lexer& lex, AlgebraDecl* algebra, bool lenient, std::vector<std::string>* warnings)
      : lex_(lex), algebra_(algebra), lenient_(lenient), warnings_(warnings) {}

  Rational parse_probability() {
    Token num = lex_.expect(Tok::Number, "a probability");
    Rational r(boost::multiprecision::cpp_int(num.text));
    if (lex_.at(Tok::Slash)) {
      lex_.take();
      Token den = lex_.expect(Tok::Number, "a denominator");
      boost::multiprecision::cpp_int d(den.text);
      if (d == 0) throw SyntaxError(den.line, den.col, "zero denominator");
      r /= Rational(d);
    }
    return r;
  }

  TermPtr parse_term() { return parse_proballt(); }

  GuardPtr parse_guard() { return parse_guard_prob(); }

 private:
  // precedence, loosest first: +[p], +, <<, &, ||, (|> =|), ., unary
  TermPtr parse_proballt() {
    TermPtr t = parse_alt();
    while (lex_.at(Tok::ProbOpen)) {
      Token open = lex_.take();
      Rational p = parse_probability();
      lex_.expect(Tok::RBracket, "']'");
      TermPtr rhs = parse_alt();
      if (!is_probability(p))
        throw SyntaxError(open.line, open.col, "probability " + to_string(p) + " outside [0,1]");
      t = t_prob(t, p, rhs);
    }
    return t;
  }
  TermPtr parse_alt() {
    TermPtr t = parse_unless();
    while (lex_.at(Tok::Plus)) {
      lex_.take();
      t = t_alt(t, parse_unless());
    }
    return t;
  }
  TermPtr parse_unless() {
    TermPtr t = parse_whole();
    while (lex_.at(Tok::Unless)) {
      lex_.take();
      t = t_unless(t, parse_whole());
    }
    return t;
  }
  TermPtr parse_whole() {
    TermPtr t = parse_par();
    while (lex_.at(Tok::Amp)) {
      lex_.take();
      t = t_whole(t, parse_par());
    }
    return t;
  }
  TermPtr parse_par() {
    TermPtr t = parse_merge();
    while (lex_.at(Tok::ParBar)) {
      lex_.take();
      t = t_par(t, parse_merge());
    }
    return t;
  }
  TermPtr parse_merge() {
    TermPtr t = parse_seq();
    for (;;) {
      if (lex_.at(Tok::LMerge)) {
        lex_.take();
        t = t_lmerge(t, parse_seq());
      } else if (lex_.at(Tok::Bar)) {
        lex_.take();
        t = t_comm(t, parse_seq());
      } else {
        break;
      }
    }
    return t;
  }
  TermPtr parse_seq() {
    TermPtr t = parse_primary();
    while (lex_.at(Tok::Dot)) {
      lex_.take();
      t = t_seq(t, parse_primary());
    }
    return t;
  }

  std::vector<std::string> parse_event_set() {
    lex_.expect(Tok::LBrace, "'{'");
    std::vector<std::string> out;
    if (!lex_.at(Tok::RBrace)) {
      for (;;) {
        Token id = lex_.expect(Tok::Ident, "an event name");
        out.push_back(id.text);
        if (!lex_.at(Tok::Comma)) break;
        lex_.take();
      }
    }
    lex_.expect(Tok::RBrace, "'}'");
    return out;
  }

  TermPtr parse_primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::LParen) {
      lex_.take();
      TermPtr inner = parse_term();
      lex_.expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::LBracket) {
      lex_.take();
      GuardPtr g = parse_guard();
      lex_.expect(Tok::RBracket, "']'");
      return t_guard(g);
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "delta") { lex_.take(); return t_delta(); }
      if (t.text == "eps") { lex_.take(); return t_eps(); }
      if (t.text == "tau") { lex_.take(); return t_tau(); }
      if (t.text == "theta") {
        lex_.take();
        lex_.expect(Tok::LParen, "'('");
        TermPtr inner = parse_term();
        lex_.expect(Tok::RParen, "')'");
        return t_celim(inner);
      }
      if (t.text == "encap" || t.text == "hide") {
        bool encap = t.text == "encap";
        lex_.take();
        auto set = parse_event_set();
        for (const auto& e : set) note_event(e, t);
        lex_.expect(Tok::LParen, "'('");
        TermPtr inner = parse_term();
        lex_.expect(Tok::RParen, "')'");
        return encap ? t_encap(std::move(set), inner) : t_hide(std::move(set), inner);
      }
      if (t.text == "pi") {
        lex_.take();
        lex_.expect(Tok::LBracket, "'['");
        Token n = lex_.expect(Tok::Number, "a depth");
        lex_.expect(Tok::RBracket, "']'");
        lex_.expect(Tok::LParen, "'('");
        TermPtr inner = parse_term();
        lex_.expect(Tok::RParen, "')'");
        return t_project(std::stol(n.text), inner);
      }
      Token id = lex_.take();
      if (is_recvar_name(id.text)) return t_recvar(id.text);
      note_event(id.text, id);
      return t_atom(id.text);
    }
    lex_.fail("a term");
  }

  void note_event(const std::string& name, const Token& at) {
    if (algebra_->is_event(name)) return;
    if (!lenient_) throw UnknownEvent(name);
    algebra_->events.insert(name);
    if (warnings_)
      warnings_->push_back("event '" + name + "' used at " + std::to_string(at.line) + ":" +
                           std::to_string(at.col) + " was not declared; auto-declaring");
  }

  // guard grammar mirrors the term operators that form guards
  GuardPtr parse_guard_prob() {
    GuardPtr g = parse_guard_plus();
    while (lex_.at(Tok::ProbOpen)) {
      lex_.take();
      Rational p = parse_probability();
      lex_.expect(Tok::RBracket, "']'");
      g = g_prob(g, p, parse_guard_plus());
    }
    return g;
  }
  GuardPtr parse_guard_plus() {
    GuardPtr g = parse_guard_merge();
    while (lex_.at(Tok::Plus)) {
      lex_.take();
      g = g_plus(g, parse_guard_merge());
    }
    return g;
  }
  GuardPtr parse_guard_merge() {
    GuardPtr g = parse_guard_seq();
    while (lex_.at(Tok::LMerge)) {
      lex_.take();
      g = g_lmerge(g, parse_guard_seq());
    }
    return g;
  }
  GuardPtr parse_guard_seq() {
    GuardPtr g = parse_guard_primary();
    while (lex_.at(Tok::Dot)) {
      lex_.take();
      g = g_seq(g, parse_guard_primary());
    }
    return g;
  }
  GuardPtr parse_guard_primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Bang) {
      lex_.take();
      return g_not(parse_guard_primary());
    }
    if (t.kind == Tok::LParen) {
      lex_.take();
      GuardPtr g = parse_guard_prob();
      lex_.expect(Tok::RParen, "')'");
      return g;
    }
    if (t.kind == Tok::Ident) {
      Token id = lex_.take();
      if (id.text == "delta") return g_delta();
      if (id.text == "eps") return g_eps();
      return g_atom(id.text);
    }
    lex_.fail("a guard");
  }

  Lexer& lex_;
  AlgebraDecl* algebra_;
  bool lenient_;
  std::vector<std::string>* warnings_;
};

void check_events_declared(const TermPtr& t, const AlgebraDecl& a) {
  if (t->kind == TermKind::Atom && !a.is_event(t->name)) throw UnknownEvent(t->name);
  if (t->lhs) check_events_declared(t->lhs, a);
  if (t->rhs) check_events_declared(t->rhs, a);
}

}  // namespace

TermPtr parse_term(std::string_view src, const AlgebraDecl& algebra) {
  Lexer lex(src);
  AlgebraDecl copy = algebra;  // never grown in strict mode
  Parser p(lex, &copy, /*lenient=*/false, nullptr);
  TermPtr t = p.parse_term();
  if (!lex.at(Tok::End)) lex.fail("end of input");
  return canonicalize(t);
}

GuardPtr parse_guard(std::string_view src) {
  Lexer lex(src);
  AlgebraDecl dummy;
  Parser p(lex, &dummy, true, nullptr);
  GuardPtr g = p.parse_guard();
  if (!lex.at(Tok::End)) lex.fail("end of input");
  return g;
}

SpecFile parse_spec_file(std::string_view src) {
  SpecFile out;
  Lexer lex(src);
  Parser terms(lex, &out.algebra, /*lenient=*/true, &out.warnings);

  auto ident = [&](const char* what) { return lex.expect(Tok::Ident, what).text; };
  auto semi = [&] { lex.expect(Tok::Semi, "';'"); };

  auto need_env = [&]() -> DataEnv& {
    if (!out.data_env) out.data_env.emplace();
    return *out.data_env;
  };

  while (!lex.at(Tok::End)) {
    Token head = lex.expect(Tok::Ident, "a directive");
    const std::string& d = head.text;
    if (d == "events") {
      for (;;) {
        out.algebra.events.insert(ident("an event name"));
        if (!lex.at(Tok::Comma)) break;
        lex.take();
      }
      semi();
    } else if (d == "comm") {
      std::string a = ident("an event"), b = ident("an event");
      lex.expect(Tok::Eq, "'='");
      std::string c = ident("an event or delta");
      auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
      auto it = out.algebra.comm.find(key);
      if (it != out.algebra.comm.end() && it->second != c)
        throw SyntaxError(head.line, head.col,
                          "conflicting gamma(" + a + "," + b + ") declarations");
      out.algebra.comm[key] = c;
      semi();
    } else if (d == "order") {
      std::string a = ident("an event");
      lex.expect(Tok::Leq, "'<='");
      std::string b = ident("an event");
      if (a != b) out.algebra.causal.insert({a, b});
      semi();
    } else if (d == "conflict" || d == "pconflict") {
      std::string a = ident("an event");
      if (d == "conflict")
        lex.expect(Tok::Hash, "'#'");
      else
        lex.expect(Tok::HashP, "'#p'");
      std::string b = ident("an event");
      auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
      (d == "conflict" ? out.algebra.conflicts : out.algebra.prob_conflicts).insert(key);
      semi();
    } else if (d == "race") {
      std::string a = ident("an event");
      lex.expect(Tok::Percent, "'%'");
      std::string b = ident("an event");
      auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
      out.algebra.races.insert(key);
      semi();
    } else if (d == "eq") {
      Token name = lex.expect(Tok::Ident, "a recursion variable");
      if (!is_recvar_name(name.text))
        throw SyntaxError(name.line, name.col,
                          "recursion variables start with an uppercase letter");
      lex.expect(Tok::Eq, "'='");
      TermPtr rhs = terms.parse_term();
      semi();
      try {
        out.recspec.add(name.text, canonicalize(rhs));
      } catch (const std::runtime_error& e) {
        throw SyntaxError(name.line, name.col, e.what());
      }
    } else if (d == "root") {
      TermPtr t = terms.parse_term();
      semi();
      out.root = canonicalize(t);
    } else if (d == "state") {
      auto& env = need_env();
      for (;;) {
        env.add_state(ident("a state name"));
        if (!lex.at(Tok::Comma)) break;
        lex.take();
      }
      semi();
    } else if (d == "test") {
      auto& env = need_env();
      std::string atom = ident("a guard atom");
      lex.expect(Tok::At, "'@'");
      std::string st = ident("a state name");
      lex.expect(Tok::Eq, "'='");
      std::string v = ident("true or false");
      if (v != "true" && v != "false")
        throw SyntaxError(head.line, head.col, "test value must be true or false");
      env.declare_atom(atom);
      env.set_test(atom, env.state_id(st), v == "true");
      semi();
    } else if (d == "effect") {
      auto& env = need_env();
      std::string event = ident("an event");
      if (!out.algebra.is_event(event)) {
        out.algebra.events.insert(event);
        out.warnings.push_back("event '" + event + "' in effect line was not declared");
      }
      lex.expect(Tok::At, "'@'");
      std::string st = ident("a state name");
      lex.expect(Tok::Eq, "'='");
      lex.expect(Tok::LBrace, "'{'");
      std::vector<int> succ;
      for (;;) {
        succ.push_back(env.state_id(ident("a state name")));
        if (!lex.at(Tok::Comma)) break;
        lex.take();
      }
      lex.expect(Tok::RBrace, "'}'");
      env.set_effect(event, env.state_id(st), std::move(succ));
      semi();
    } else if (d == "hoare") {
      HoareTriple tr;
      lex.expect(Tok::LBrace, "'{'");
      tr.pre = terms.parse_guard();
      lex.expect(Tok::RBrace, "'}'");
      tr.program = canonicalize(terms.parse_term());
      lex.expect(Tok::LBrace, "'{'");
      tr.post = terms.parse_guard();
      lex.expect(Tok::RBrace, "'}'");
      semi();
      out.triples.push_back(std::move(tr));
    } else {
      throw SyntaxError(head.line, head.col, "unknown directive '" + d + "'");
    }
  }

  // validation
  auto check_vars = [&](const TermPtr& t, const char* where) {
    for (const auto& v : free_recvars(t))
      if (!out.recspec.find(v))
        throw std::runtime_error(std::string("undefined recursion variable '") + v + "' in " +
                                 where);
  };
  for (const auto& [name, rhs] : out.recspec.equations) check_vars(rhs, "equations");
  if (out.root) check_vars(out.root, "root");
  for (const auto& tr : out.triples) check_vars(tr.program, "hoare line");
  for (auto& w : out.algebra.finalize()) out.warnings.push_back(w);
  if (out.data_env) {
    // guard atoms used anywhere must have test columns
    std::set<std::string> used;
    std::function<void(const TermPtr&)> scan = [&](const TermPtr& t) {
      if (t->kind == TermKind::Guard) guard_atoms(t->guard, used);
      if (t->lhs) scan(t->lhs);
      if (t->rhs) scan(t->rhs);
    };
    if (out.root) scan(out.root);
    for (const auto& [name, rhs] : out.recspec.equations) scan(rhs);
    for (const auto& tr : out.triples) {
      scan(tr.program);
      guard_atoms(tr.pre, used);
      guard_atoms(tr.post, used);
    }
    for (const auto& a : used)
      if (!out.data_env->has_atom(a))
        throw std::runtime_error("guard atom '" + a + "' has no test declarations");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pretty printer
// ---------------------------------------------------------------------------

namespace {

int term_level(TermKind k) {
  switch (k) {
    case TermKind::ProbAlt: return 1;
    case TermKind::Alt: return 2;
    case TermKind::Unless: return 3;
    case TermKind::Whole: return 4;
    case TermKind::Par: return 5;
    case TermKind::LeftMerge:
    case TermKind::Comm: return 6;
    case TermKind::Seq: return 7;
    default: return 8;
  }
}

void print_term(const TermPtr& t, int parent_level, bool right_child, std::string& out);

void print_set(const std::vector<std::string>& set, std::string& out) {
  out += '{';
  for (size_t i = 0; i < set.size(); ++i) {
    if (i) out += ", ";
    out += set[i];
  }
  out += '}';
}

void print_guard(const GuardExpr& g, int parent_level, bool right_child, std::string& out) {
  auto level = [](GuardKind k) {
    switch (k) {
      case GuardKind::Prob: return 1;
      case GuardKind::Plus: return 2;
      case GuardKind::LeftMerge: return 6;
      case GuardKind::Seq: return 7;
      default: return 8;
    }
  };
  int lv = level(g.kind);
  bool parens = lv < parent_level || (lv == parent_level && right_child);
  if (parens) out += '(';
  switch (g.kind) {
    case GuardKind::Atom: out += g.atom; break;
    case GuardKind::Delta: out += "delta"; break;
    case GuardKind::Eps: out += "eps"; break;
    case GuardKind::Not:
      out += '!';
      print_guard(*g.lhs, 8, false, out);
      break;
    case GuardKind::Plus:
      print_guard(*g.lhs, lv, false, out);
      out += " + ";
      print_guard(*g.rhs, lv, true, out);
      break;
    case GuardKind::Prob:
      print_guard(*g.lhs, lv, false, out);
      out += " +[" + to_string(g.prob) + "] ";
      print_guard(*g.rhs, lv, true, out);
      break;
    case GuardKind::Seq:
      print_guard(*g.lhs, lv, false, out);
      out += " . ";
      print_guard(*g.rhs, lv, true, out);
      break;
    case GuardKind::LeftMerge:
      print_guard(*g.lhs, lv, false, out);
      out += " |> ";
      print_guard(*g.rhs, lv, true, out);
      break;
  }
  if (parens) out += ')';
}

void print_term(const TermPtr& t, int parent_level, bool right_child, std::string& out) {
  int lv = term_level(t->kind);
  bool parens = lv < parent_level || (lv == parent_level && right_child);
  auto binop = [&](const char* op) {
    if (parens) out += '(';
    print_term(t->lhs, lv, false, out);
    out += op;
    print_term(t->rhs, lv, true, out);
    if (parens) out += ')';
  };
  switch (t->kind) {
    case TermKind::Atom:
    case TermKind::RecVar: out += t->name; return;
    case TermKind::Delta: out += "delta"; return;
    case TermKind::Epsilon: out += "eps"; return;
    case TermKind::Tau: out += "tau"; return;
    case TermKind::Guard:
      out += '[';
      print_guard(*t->guard, 0, false, out);
      out += ']';
      return;
    case TermKind::Seq: binop(" . "); return;
    case TermKind::Alt: binop(" + "); return;
    case TermKind::ProbAlt: {
      if (parens) out += '(';
      print_term(t->lhs, lv, false, out);
      out += " +[" + to_string(t->prob) + "] ";
      print_term(t->rhs, lv, true, out);
      if (parens) out += ')';
      return;
    }
    case TermKind::Whole: binop(" & "); return;
    case TermKind::Par: binop(" || "); return;
    case TermKind::LeftMerge: binop(" |> "); return;
    case TermKind::Comm: binop(" | "); return;
    case TermKind::Unless: binop(" << "); return;
    case TermKind::ConflictElim:
      out += "theta(";
      print_term(t->lhs, 0, false, out);
      out += ')';
      return;
    case TermKind::Encap:
    case TermKind::Hide:
      out += t->kind == TermKind::Encap ? "encap" : "hide";
      print_set(t->set, out);
      out += '(';
      print_term(t->lhs, 0, false, out);
      out += ')';
      return;
    case TermKind::Project:
      out += "pi[" + std::to_string(t->depth) + "](";
      print_term(t->lhs, 0, false, out);
      out += ')';
      return;
    case TermKind::Resolved:
      print_term(t->lhs, parent_level, right_child, out);
      return;
  }
}

}  // namespace

std::string pretty_print(const TermPtr& t) {
  std::string out;
  print_term(t, 0, false, out);
  return out;
}

std::string pretty_print(const GuardPtr& g) {
  std::string out;
  print_guard(*g, 0, false, out);
  return out;
}

std::string to_string(const GuardExpr& g) {
  std::string out;
  print_guard(g, 0, false, out);
  return out;
}

}  // namespace pptc
