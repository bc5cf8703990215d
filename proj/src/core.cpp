#include "hypertree/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hypertree {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

bool is_variable_name(std::string_view text) {
  if (text.empty() || !std::isupper(static_cast<unsigned char>(text[0]))) return false;
  return std::all_of(text.begin() + 1, text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  });
}

bool is_bare_constant(std::string_view text) {
  if (text.empty()) return false;
  unsigned char first = text[0];
  if (!(std::islower(first) || std::isdigit(first))) return false;
  return std::all_of(text.begin() + 1, text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

// ---------------------------------------------------------------------------
// ConjunctiveQuery

ConjunctiveQuery::ConjunctiveQuery(Atom head, std::vector<Atom> body)
    : head_(std::move(head)), body_(std::move(body)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < body_.size(); ++i) {
    body_[i].index = i;
    for (const Term& t : body_[i].args)
      if (t.is_variable()) names.insert(t.name);
  }
  head_.index = 0;
  variables_.assign(names.begin(), names.end());
  for (std::size_t v = 0; v < variables_.size(); ++v) variable_ids_.emplace(variables_[v], v);

  atom_vars_.reserve(body_.size());
  for (const Atom& a : body_) {
    VarSet vs(variables_.size());
    for (const Term& t : a.args)
      if (t.is_variable()) vs.set(variable_ids_.find(t.name)->second);
    atom_vars_.push_back(std::move(vs));
  }

  for (const Term& t : head_.args) {
    if (!t.is_variable()) continue;
    auto it = variable_ids_.find(t.name);
    if (it == variable_ids_.end())
      throw std::invalid_argument("unsafe query: head variable " + t.name +
                                  " does not occur in the body");
    if (std::find(head_vars_.begin(), head_vars_.end(), it->second) == head_vars_.end())
      head_vars_.push_back(it->second);
  }
}

std::optional<std::size_t> ConjunctiveQuery::find_variable(std::string_view name) const {
  auto it = variable_ids_.find(name);
  if (it == variable_ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t ConjunctiveQuery::variable_index(std::string_view name) const {
  auto v = find_variable(name);
  if (!v) throw std::invalid_argument("unknown variable " + std::string(name));
  return *v;
}

VarSet ConjunctiveQuery::vars_of(const AtomSet& atoms) const {
  VarSet out = no_vars();
  for (auto i = atoms.find_first(); i != AtomSet::npos; i = atoms.find_next(i))
    out |= atom_vars_[i];
  return out;
}

VarSet ConjunctiveQuery::all_vars() const {
  VarSet v = no_vars();
  v.set();
  return v;
}

AtomSet ConjunctiveQuery::all_atoms() const {
  AtomSet a = no_atoms();
  a.set();
  return a;
}

std::string ConjunctiveQuery::format(const VarSet& vars) const {
  std::string out = "{";
  bool first = true;
  for (auto v = vars.find_first(); v != VarSet::npos; v = vars.find_next(v)) {
    if (!first) out += ",";
    out += variables_[v];
    first = false;
  }
  return out + "}";
}

std::string ConjunctiveQuery::format_atoms(const AtomSet& atoms) const {
  std::string out = "{";
  bool first = true;
  for (auto i = atoms.find_first(); i != AtomSet::npos; i = atoms.find_next(i)) {
    if (!first) out += ", ";
    out += to_string(body_[i]);
    first = false;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Database

void Database::declare(const std::string& relation, std::size_t arity) {
  auto it = arities_.find(relation);
  if (it != arities_.end()) {
    if (it->second != arity)
      throw std::invalid_argument("relation " + relation + " has arity " +
                                  std::to_string(it->second) + ", not " + std::to_string(arity));
    return;
  }
  arities_.emplace(relation, arity);
  tables_.emplace(relation, Table{});
}

bool Database::add_fact(const std::string& relation, Tuple tuple) {
  declare(relation, tuple.size());
  for (const auto& c : tuple) universe_.insert(c);
  return tables_.find(relation)->second.insert(std::move(tuple)).second;
}

const Database::Table* Database::find(std::string_view relation) const {
  auto it = tables_.find(relation);
  return it == tables_.end() ? nullptr : &it->second;
}

std::optional<std::size_t> Database::arity(std::string_view relation) const {
  auto it = arities_.find(relation);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

std::size_t Database::fact_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tables_) n += t.size();
  return n;
}

std::size_t Database::largest_relation() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tables_) n = std::max(n, t.size());
  return n;
}

// ---------------------------------------------------------------------------
// Lexer shared by the query and fact parsers.

namespace {

enum class Tok { Name, Quoted, LParen, RParen, Comma, Arrow, Dot, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  Token expect(Tok kind, const char* what) {
    if (current_.kind != kind) fail(std::string("expected ") + what);
    return take();
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::string found = current_.kind == Tok::End ? "end of input" : "'" + current_.text + "'";
    throw ParseError(message + ", found " + found, current_.line, current_.column);
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
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

  void advance() {
    skip_space();
    std::size_t line = line_, col = col_;
    if (pos_ >= src_.size()) {
      current_ = {Tok::End, "", line, col};
      return;
    }
    char c = src_[pos_];
    auto single = [&](Tok kind) {
      current_ = {kind, std::string(1, c), line, col};
      bump();
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      case '.': return single(Tok::Dot);
      case '<':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
          bump();
          bump();
          current_ = {Tok::Arrow, "<-", line, col};
          return;
        }
        break;
      case '\'': {
        bump();
        std::string text;
        while (true) {
          if (pos_ >= src_.size()) throw ParseError("unterminated quoted constant", line, col);
          char q = src_[pos_];
          if (q == '\'') {
            bump();
            break;
          }
          if (q == '\\' && pos_ + 1 < src_.size()) {
            bump();
            q = src_[pos_];
          }
          text.push_back(q);
          bump();
        }
        current_ = {Tok::Quoted, std::move(text), line, col};
        return;
      }
      default:
        break;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (!(std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'')) break;
        text.push_back(d);
        bump();
      }
      current_ = {Tok::Name, std::move(text), line, col};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Token current_{Tok::End, "", 1, 1};
};

Term make_term(const Token& t) {
  if (t.kind == Tok::Quoted) return Term::constant(t.text);
  if (is_variable_name(t.text)) return Term::variable(t.text);
  if (is_bare_constant(t.text)) return Term::constant(t.text);
  throw ParseError("malformed term '" + t.text + "'", t.line, t.column);
}

std::string relation_name(Lexer& lex) {
  const Token& t = lex.peek();
  if (t.kind != Tok::Name || !std::isalpha(static_cast<unsigned char>(t.text[0])) ||
      t.text.find('\'') != std::string::npos)
    lex.fail("expected relation name");
  return lex.take().text;
}

std::vector<Term> term_list(Lexer& lex) {
  std::vector<Term> terms;
  lex.expect(Tok::LParen, "'('");
  if (lex.peek().kind == Tok::RParen) {
    lex.take();
    return terms;
  }
  while (true) {
    const Token& t = lex.peek();
    if (t.kind != Tok::Name && t.kind != Tok::Quoted) lex.fail("expected term");
    Token tok = lex.take();
    terms.push_back(make_term(tok));
    if (lex.peek().kind == Tok::Comma) {
      lex.take();
      continue;
    }
    lex.expect(Tok::RParen, "',' or ')'");
    return terms;
  }
}

}  // namespace

ConjunctiveQuery parse_query(std::string_view text) {
  Lexer lex(text);
  if (lex.peek().kind == Tok::End) throw ParseError("empty query", 1, 1);
  Token head_tok = lex.peek();
  Atom head{relation_name(lex), {}, 0};
  if (lex.peek().kind == Tok::LParen) head.args = term_list(lex);
  lex.expect(Tok::Arrow, "'<-'");
  std::vector<Atom> body;
  if (lex.peek().kind != Tok::Dot) {
    while (true) {
      Atom a{relation_name(lex), {}, body.size()};
      a.args = term_list(lex);
      body.push_back(std::move(a));
      if (lex.peek().kind == Tok::Comma) {
        lex.take();
        continue;
      }
      break;
    }
  }
  lex.expect(Tok::Dot, "',' or '.'");
  if (lex.peek().kind != Tok::End) lex.fail("expected end of query");
  try {
    return ConjunctiveQuery(std::move(head), std::move(body));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), head_tok.line, head_tok.column);
  }
}

Database parse_database(std::string_view text) {
  Lexer lex(text);
  Database db;
  while (lex.peek().kind != Tok::End) {
    Token start = lex.peek();
    std::string name = relation_name(lex);
    Database::Tuple tuple;
    if (lex.peek().kind == Tok::LParen) {
      Token open = lex.peek();
      for (Term& t : term_list(lex)) {
        if (t.is_variable())
          throw ParseError("non-ground term " + t.name + " in fact", open.line, open.column);
        tuple.push_back(std::move(t.name));
      }
    }
    lex.expect(Tok::Dot, "'.'");
    auto known = db.arity(name);
    if (known && *known != tuple.size())
      throw ParseError("arity mismatch for relation " + name + ": expected " +
                           std::to_string(*known) + ", got " + std::to_string(tuple.size()),
                       start.line, start.column);
    db.add_fact(name, std::move(tuple));
  }
  return db;
}

Hypergraph query_hypergraph(const ConjunctiveQuery& query) {
  Hypergraph h;
  h.vertices = query.variables();
  for (std::size_t i = 0; i < query.atom_count(); ++i)
    if (query.vars_of(i).any()) h.edges.push_back({i, query.vars_of(i)});
  return h;
}

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const Term& term) {
  if (term.is_variable() || is_bare_constant(term.name)) return term.name;
  std::string out = "'";
  for (char c : term.name) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "'";
}

namespace {

std::string args_to_string(const std::vector<Term>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += to_string(args[i]);
  }
  return out + ")";
}

}  // namespace

std::string to_string(const Atom& atom) { return atom.relation + args_to_string(atom.args); }

std::string to_string(const ConjunctiveQuery& query) {
  std::string out = query.head().relation;
  if (!query.head().args.empty()) out += args_to_string(query.head().args);
  out += " <-";
  for (std::size_t i = 0; i < query.atom_count(); ++i) {
    out += i ? ", " : " ";
    out += to_string(query.atom(i));
  }
  return out + ".";
}

std::string to_string(const Database& db) {
  std::ostringstream out;
  for (const auto& [name, table] : db.relations()) {
    for (const auto& tuple : table) {
      std::vector<Term> args;
      for (const auto& c : tuple) args.push_back(Term::constant(c));
      out << name << args_to_string(args) << ".\n";
    }
  }
  return out.str();
}

}  // namespace hypertree
