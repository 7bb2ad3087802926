#include "ccall/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ccall/error.hpp"

namespace ccall {

namespace {

// ---------------------------------------------------------------------------
// Operators

enum class OpType { XFX, XFY, YFX, FY };

struct OpDef {
  int priority;
  OpType type;
};

const std::map<std::string, OpDef, std::less<>>& infix_ops() {
  static const std::map<std::string, OpDef, std::less<>> ops = {
      {":-", {1200, OpType::XFX}}, {",", {1000, OpType::XFY}},
      {"=", {700, OpType::XFX}},   {"\\=", {700, OpType::XFX}},
      {"is", {700, OpType::XFX}},  {"<", {700, OpType::XFX}},
      {"=<", {700, OpType::XFX}},  {">", {700, OpType::XFX}},
      {">=", {700, OpType::XFX}},  {"=:=", {700, OpType::XFX}},
      {"+", {500, OpType::YFX}},   {"-", {500, OpType::YFX}},
      {"*", {400, OpType::YFX}},   {"//", {400, OpType::YFX}},
      {"/", {400, OpType::YFX}},   {"mod", {400, OpType::YFX}},
  };
  return ops;
}

const OpDef* find_infix(std::string_view name) {
  const auto& ops = infix_ops();
  auto it = ops.find(name);
  return it == ops.end() ? nullptr : &it->second;
}

constexpr int kPrefixMinusPriority = 200;
constexpr int kArgPriority = 999;

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Atom, Var, Int, Punct, End, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::int64_t value = 0;
  bool quoted = false;
  bool layout_before = false;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool is_symbol_char(char c) {
  return std::string_view("#$&*+-./:<=>?@^~\\").find(c) !=
         std::string_view::npos;
}

bool is_alnum(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    bool layout = skip_layout();
    Token tok;
    tok.layout_before = layout;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = Tok::Eof;
      return tok;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        advance();
      }
      tok.kind = Tok::Int;
      tok.text = std::string(text_.substr(start, pos_ - start));
      auto [ptr, ec] = std::from_chars(tok.text.data(),
                                       tok.text.data() + tok.text.size(),
                                       tok.value);
      if (ec != std::errc()) {
        throw SyntaxError(tok.line, tok.column,
                          "integer literal out of range: " + tok.text);
      }
      return tok;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      tok.kind = Tok::Var;
      tok.text = take_while(is_alnum);
      return tok;
    }
    if (std::islower(static_cast<unsigned char>(c))) {
      tok.kind = Tok::Atom;
      tok.text = take_while(is_alnum);
      return tok;
    }
    if (c == '\'') {
      tok.kind = Tok::Atom;
      tok.quoted = true;
      tok.text = quoted_atom(tok);
      return tok;
    }
    if (c == '"') {
      throw SyntaxError(line_, column_, "strings are not supported");
    }
    if (std::string_view("()[],|").find(c) != std::string_view::npos) {
      advance();
      tok.kind = Tok::Punct;
      tok.text = std::string(1, c);
      return tok;
    }
    if (c == '.' && (pos_ + 1 >= text_.size() ||
                     std::isspace(static_cast<unsigned char>(text_[pos_ + 1])) ||
                     text_[pos_ + 1] == '%')) {
      advance();
      tok.kind = Tok::End;
      tok.text = ".";
      return tok;
    }
    if (is_symbol_char(c)) {
      tok.kind = Tok::Atom;
      tok.text = take_while(is_symbol_char);
      return tok;
    }
    throw SyntaxError(line_, column_,
                      std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  bool skip_layout() {
    bool any = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        any = true;
      } else if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        any = true;
      } else {
        break;
      }
    }
    return any;
  }

  template <typename Pred>
  std::string take_while(Pred pred) {
    std::size_t start = pos_;
    while (pos_ < text_.size() && pred(text_[pos_])) advance();
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string quoted_atom(const Token& tok) {
    advance();  // opening quote
    std::string out;
    for (;;) {
      if (pos_ >= text_.size()) {
        throw SyntaxError(tok.line, tok.column, "unterminated quoted atom");
      }
      char c = text_[pos_];
      if (c == '\'') {
        advance();
        if (pos_ < text_.size() && text_[pos_] == '\'') {
          out += '\'';
          advance();
          continue;
        }
        return out;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= text_.size()) continue;
        char e = text_[pos_];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          default:
            throw SyntaxError(line_, column_,
                              std::string("unknown escape '\\") + e + "'");
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { shift(); }

  bool at_eof() const { return tok_.kind == Tok::Eof; }
  const Token& peek() const { return tok_; }

  void reset_variables() {
    var_ids_.clear();
    next_var_ = 0;
  }

  // Parses a term of at most `max_priority`; returns the term and its
  // priority.
  std::pair<Term, int> parse(int max_priority) {
    auto [left, left_priority] = parse_primary(max_priority);
    for (;;) {
      std::string name;
      if (tok_.kind == Tok::Atom && !tok_.quoted) {
        name = tok_.text;
      } else if (tok_.kind == Tok::Punct && tok_.text == ",") {
        name = ",";
      } else {
        break;
      }
      const OpDef* op = find_infix(name);
      if (op == nullptr || op->priority > max_priority) break;
      int left_max = op->type == OpType::YFX ? op->priority : op->priority - 1;
      int right_max =
          op->type == OpType::XFY ? op->priority : op->priority - 1;
      if (left_priority > left_max) break;
      Token op_tok = tok_;
      shift();
      auto [right, _] = parse(right_max);
      left = Term::compound(name, {left, right});
      left_priority = op->priority;
      if (op->type == OpType::XFX) {
        // xfx is non-associative: a following operator of equal priority is
        // a syntax error, reported by the caller's expectation.
        left_priority = op->priority;
      }
    }
    return {left, left_priority};
  }

  Token expect_punct(std::string_view p) {
    if (tok_.kind != Tok::Punct || tok_.text != p) {
      error("expected '" + std::string(p) + "'");
    }
    Token t = tok_;
    shift();
    return t;
  }

  void expect_end() {
    if (tok_.kind != Tok::End) error("expected '.' at end of clause");
    shift();
  }

  [[noreturn]] void error(const std::string& message) const {
    std::string near;
    switch (tok_.kind) {
      case Tok::Eof: near = "end of input"; break;
      case Tok::End: near = "'.'"; break;
      default: near = "'" + tok_.text + "'"; break;
    }
    throw SyntaxError(tok_.line, tok_.column, message + " near " + near);
  }

  void shift() { tok_ = lexer_.next(); }

 private:
  std::pair<Term, int> parse_primary(int max_priority) {
    Token t = tok_;
    switch (t.kind) {
      case Tok::Int:
        shift();
        return {Term::integer(t.value), 0};
      case Tok::Var:
        shift();
        return {variable(t.text), 0};
      case Tok::Punct:
        if (t.text == "(") {
          shift();
          auto [inner, _] = parse(1200);
          expect_punct(")");
          return {inner, 0};
        }
        if (t.text == "[") {
          shift();
          return {list(), 0};
        }
        error("unexpected token");
      case Tok::Atom:
        return atom_or_compound(max_priority);
      case Tok::End:
        error("unexpected end of clause");
      case Tok::Eof:
        error("unexpected end of input");
    }
    error("unexpected token");
  }

  std::pair<Term, int> atom_or_compound(int max_priority) {
    Token t = tok_;
    shift();
    if (tok_.kind == Tok::Punct && tok_.text == "(" && !tok_.layout_before) {
      shift();
      std::vector<Term> args;
      for (;;) {
        args.push_back(parse(kArgPriority).first);
        if (tok_.kind == Tok::Punct && tok_.text == ",") {
          shift();
          continue;
        }
        expect_punct(")");
        break;
      }
      return {Term::compound(t.text, std::move(args)), 0};
    }
    if (!t.quoted && t.text == "-") {
      if (tok_.kind == Tok::Int && !tok_.layout_before) {
        std::int64_t v = -tok_.value;
        shift();
        return {Term::integer(v), 0};
      }
      if (starts_term() && max_priority >= kPrefixMinusPriority) {
        auto [operand, _] = parse(kPrefixMinusPriority);
        return {Term::compound("-", {operand}), kPrefixMinusPriority};
      }
    }
    return {Term::atom(t.text), 0};
  }

  bool starts_term() const {
    switch (tok_.kind) {
      case Tok::Int:
      case Tok::Var:
        return true;
      case Tok::Punct:
        return tok_.text == "(" || tok_.text == "[";
      case Tok::Atom:
        return tok_.quoted || find_infix(tok_.text) == nullptr;
      default:
        return false;
    }
  }

  Term list() {
    if (tok_.kind == Tok::Punct && tok_.text == "]") {
      shift();
      return Term();
    }
    std::vector<Term> items;
    Term tail;
    for (;;) {
      items.push_back(parse(kArgPriority).first);
      if (tok_.kind == Tok::Punct && tok_.text == ",") {
        shift();
        continue;
      }
      if (tok_.kind == Tok::Punct && tok_.text == "|") {
        shift();
        tail = parse(kArgPriority).first;
      }
      expect_punct("]");
      break;
    }
    return make_list(std::move(items), tail);
  }

  Term variable(const std::string& name) {
    if (name == "_") return Term::var(next_var_++, "_");
    auto [it, inserted] = var_ids_.try_emplace(name, next_var_);
    if (inserted) ++next_var_;
    return Term::var(it->second, name);
  }

  Lexer lexer_;
  Token tok_;
  std::unordered_map<std::string, int> var_ids_;
  int next_var_ = 0;
};

PredId parse_indicator(const Term& t, const Token& at) {
  if (t.is_compound() && t.name() == "/" && t.arity() == 2 &&
      t.arg(0).is_atom() && t.arg(1).is_int() && t.arg(1).int_value() >= 0) {
    return {t.arg(0).name(), static_cast<std::size_t>(t.arg(1).int_value())};
  }
  throw SyntaxError(at.line, at.column,
                    "expected predicate indicator name/arity");
}

struct PendingDirective {
  PredId pred;
  std::string kind;
  std::size_t line;
  std::size_t column;
};

}  // namespace

Program parse_program(std::string_view text,
                      std::vector<Diagnostic>* warnings) {
  Program program;
  Parser parser(text);
  std::vector<PendingDirective> directives;

  while (!parser.at_eof()) {
    parser.reset_variables();
    Token start = parser.peek();
    if (start.kind == Tok::Atom && !start.quoted && start.text == ":-") {
      parser.shift();
      Token kind = parser.peek();
      if (kind.kind != Tok::Atom ||
          (kind.text != "table" && kind.text != "bridge")) {
        throw SyntaxError(kind.line, kind.column,
                          "unsupported directive (expected table or bridge)");
      }
      parser.shift();
      Token spec_tok = parser.peek();
      Term spec = parser.parse(1200).first;
      parser.expect_end();
      for (const auto& ind : flatten_conjunction(spec)) {
        PredId pred = parse_indicator(ind, spec_tok);
        auto& set = kind.text == "table" ? program.tabled : program.bridges;
        set.insert(pred);
        directives.push_back({pred, kind.text, start.line, start.column});
      }
      continue;
    }

    Term t = parser.parse(1200).first;
    parser.expect_end();
    Clause clause;
    if (t.is_compound() && t.name() == ":-" && t.arity() == 2) {
      clause.head = t.arg(0);
      clause.body = flatten_conjunction(t.arg(1));
    } else {
      clause.head = t;
    }
    if (!clause.head.is_callable()) {
      throw SyntaxError(start.line, start.column,
                        "clause head must be an atom or compound term");
    }
    for (const auto& goal : clause.body) {
      if (!goal.is_callable()) {
        throw SyntaxError(start.line, start.column,
                          goal.is_var() ? "variable used as a goal; wrap it "
                                          "in call/1"
                                        : "body goal must be callable");
      }
    }
    program.clauses.push_back(std::move(clause));
  }

  for (const auto& pred : program.tabled) {
    if (program.bridges.contains(pred)) {
      throw LoadError(pred.str() + " declared both table and bridge");
    }
  }

  if (warnings != nullptr) {
    std::set<PredId> defined;
    for (const auto& c : program.clauses) defined.insert(c.pred());
    for (const auto& d : directives) {
      if (!defined.contains(d.pred)) {
        warnings->push_back({d.line, d.column,
                             d.kind + " directive for undefined predicate " +
                                 d.pred.str()});
      }
    }
  }
  return program;
}

Term parse_term(std::string_view text) {
  Parser parser(text);
  Term t = parser.parse(1200).first;
  if (parser.peek().kind == Tok::End) parser.shift();
  if (!parser.at_eof()) parser.error("unexpected trailing input");
  return t;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

bool needs_quotes(const std::string& name) {
  if (name == "[]") return false;
  if (name.empty() || !std::islower(static_cast<unsigned char>(name[0]))) {
    return true;
  }
  return !std::all_of(name.begin(), name.end(), is_alnum);
}

std::string quote_atom(const std::string& name) {
  if (!needs_quotes(name)) return name;
  std::string out = "'";
  for (char c : name) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c; break;
    }
  }
  return out + "'";
}

bool valid_var_name(const std::string& name) {
  if (name.empty() || name == "_") return false;
  if (!(std::isupper(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
    return false;
  }
  return std::all_of(name.begin(), name.end(), is_alnum);
}

// Assigns printable, pairwise-distinct names to the variables of one clause
// (or one standalone term).
class VarNamer {
 public:
  const std::string& name(const Term& v) {
    auto it = names_.find(v.var_id());
    if (it != names_.end()) return it->second;
    std::string base = valid_var_name(v.name())
                           ? v.name()
                           : "_G" + std::to_string(v.var_id());
    std::string candidate = base;
    for (int n = 1; used_.contains(candidate); ++n) {
      candidate = base + "_" + std::to_string(n);
    }
    used_.insert(candidate);
    return names_.emplace(v.var_id(), candidate).first->second;
  }

 private:
  std::unordered_map<int, std::string> names_;
  std::unordered_set<std::string> used_;
};

class Printer {
 public:
  Printer(PrintStyle style, VarNamer& namer) : style_(style), namer_(namer) {}

  void print(const Term& t, int max_priority, std::string& out) {
    switch (t.kind()) {
      case Term::Kind::Var:
        out += namer_.name(t);
        return;
      case Term::Kind::Int:
        out += std::to_string(t.int_value());
        return;
      case Term::Kind::Atom:
        out += quote_atom(t.name());
        return;
      case Term::Kind::Compound:
        break;
    }
    if (is_cons(t)) {
      print_list(t, out);
      return;
    }
    if (t.arity() == 2) {
      if (const OpDef* op = find_infix(t.name())) {
        int left_max =
            op->type == OpType::YFX ? op->priority : op->priority - 1;
        int right_max =
            op->type == OpType::XFY ? op->priority : op->priority - 1;
        bool paren = op->priority > max_priority;
        if (paren) out += '(';
        print(t.arg(0), left_max, out);
        out += t.name() == "," ? ", " : " " + t.name() + " ";
        print(t.arg(1), right_max, out);
        if (paren) out += ')';
        return;
      }
    }
    out += quote_atom(t.name());
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
      if (i > 0) out += style_.compact ? "," : ", ";
      print(t.arg(i), kArgPriority, out);
    }
    out += ')';
  }

 private:
  void print_list(const Term& t, std::string& out) {
    out += '[';
    Term cur = t;
    bool first = true;
    while (is_cons(cur)) {
      if (!first) out += style_.compact ? "," : ", ";
      first = false;
      print(cur.arg(0), kArgPriority, out);
      cur = cur.arg(1);
    }
    if (!is_nil(cur)) {
      out += '|';
      print(cur, kArgPriority, out);
    }
    out += ']';
  }

  PrintStyle style_;
  VarNamer& namer_;
};

}  // namespace

std::string print_term(const Term& t, PrintStyle style) {
  VarNamer namer;
  Printer printer(style, namer);
  std::string out;
  printer.print(t, 1200, out);
  return out;
}

std::string print_clause(const Clause& c) {
  VarNamer namer;
  Printer printer({}, namer);
  std::string out;
  // Operator heads (e.g. a clause for =/2) must not bind looser than ':-'.
  printer.print(c.head, kArgPriority, out);
  if (!c.body.empty()) {
    out += " :-";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      out += "\n    ";
      printer.print(c.body[i], kArgPriority, out);
      if (i + 1 < c.body.size()) out += ',';
    }
  }
  out += '.';
  return out;
}

std::string print_program(const Program& p) {
  std::string out;
  for (const auto& pred : p.tabled) {
    out += ":- table " + quote_atom(pred.name) + "/" +
           std::to_string(pred.arity) + ".\n";
  }
  for (const auto& pred : p.bridges) {
    out += ":- bridge " + quote_atom(pred.name) + "/" +
           std::to_string(pred.arity) + ".\n";
  }
  if (!out.empty() && !p.clauses.empty()) out += '\n';
  for (const auto& c : p.clauses) {
    out += print_clause(c);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variants

namespace {

class Renumberer {
 public:
  Term rename(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        auto [it, inserted] = ids_.try_emplace(t.var_id(), next_);
        if (inserted) ++next_;
        return Term::var(it->second, "_" + std::to_string(it->second));
      }
      case Term::Kind::Compound: {
        std::vector<Term> args;
        args.reserve(t.arity());
        for (const auto& a : t.args()) args.push_back(rename(a));
        return Term::compound(t.name(), std::move(args));
      }
      default:
        return t;
    }
  }

 private:
  std::unordered_map<int, int> ids_;
  int next_ = 0;
};

}  // namespace

Term canonical_variant(const Term& t) { return Renumberer().rename(t); }

Clause canonical_clause(const Clause& c) {
  Renumberer r;
  Clause out;
  out.head = r.rename(c.head);
  for (const auto& g : c.body) out.body.push_back(r.rename(g));
  return out;
}

bool is_variant(const Term& a, const Term& b) {
  return canonical_variant(a) == canonical_variant(b);
}

bool structurally_equal(const Program& a, const Program& b) {
  if (a.tabled != b.tabled || a.bridges != b.bridges) return false;
  if (a.clauses.size() != b.clauses.size()) return false;
  for (std::size_t i = 0; i < a.clauses.size(); ++i) {
    if (canonical_clause(a.clauses[i]) != canonical_clause(b.clauses[i])) {
      return false;
    }
  }
  return true;
}

}  // namespace ccall
