#pragma once

// Conjunctive queries, fact databases and the query hypergraph.

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypertree {

// Variable sets are indexed by ConjunctiveQuery::variables(), atom sets by
// body position. Both are sized to the owning query.
using VarSet = boost::dynamic_bitset<>;
using AtomSet = boost::dynamic_bitset<>;

struct Term {
  enum class Kind { Variable, Constant };

  Kind kind = Kind::Constant;
  std::string name;

  static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::Constant, std::move(name)}; }

  bool is_variable() const { return kind == Kind::Variable; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  std::string relation;
  std::vector<Term> args;
  std::size_t index = 0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Syntax error in query or fact text. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A rule `head <- body`. Immutable after construction.
///
/// Variables are numbered by lexicographic order of their names, so the
/// least index of a set is also its least variable name.
class ConjunctiveQuery {
 public:
  ConjunctiveQuery() : ConjunctiveQuery(Atom{"ans", {}, 0}, {}) {}

  /// Body atoms are re-indexed by position. Throws std::invalid_argument if a
  /// head variable does not occur in the body.
  ConjunctiveQuery(Atom head, std::vector<Atom> body);

  const Atom& head() const { return head_; }
  const std::vector<Atom>& body() const { return body_; }
  const Atom& atom(std::size_t i) const { return body_.at(i); }
  std::size_t atom_count() const { return body_.size(); }

  const std::vector<std::string>& variables() const { return variables_; }
  std::size_t variable_count() const { return variables_.size(); }
  const std::string& variable_name(std::size_t v) const { return variables_.at(v); }
  std::optional<std::size_t> find_variable(std::string_view name) const;
  /// Throws std::invalid_argument for names not in var(Q).
  std::size_t variable_index(std::string_view name) const;

  const VarSet& vars_of(std::size_t atom) const { return atom_vars_.at(atom); }
  VarSet vars_of(const AtomSet& atoms) const;

  VarSet no_vars() const { return VarSet(variables_.size()); }
  VarSet all_vars() const;
  AtomSet no_atoms() const { return AtomSet(body_.size()); }
  AtomSet all_atoms() const;

  /// Head variables in order of first occurrence, without repeats.
  const std::vector<std::size_t>& head_variables() const { return head_vars_; }
  bool is_boolean() const { return head_vars_.empty(); }

  std::string format(const VarSet& vars) const;
  std::string format_atoms(const AtomSet& atoms) const;

  friend bool operator==(const ConjunctiveQuery& a, const ConjunctiveQuery& b) {
    return a.head_ == b.head_ && a.body_ == b.body_;
  }

 private:
  Atom head_;
  std::vector<Atom> body_;
  std::vector<std::string> variables_;
  std::map<std::string, std::size_t, std::less<>> variable_ids_;
  std::vector<VarSet> atom_vars_;
  std::vector<std::size_t> head_vars_;
};

/// Ground facts grouped by relation, with set semantics.
class Database {
 public:
  using Tuple = std::vector<std::string>;
  using Table = std::set<Tuple>;

  /// Registers an (possibly empty) relation. Throws std::invalid_argument
  /// when the name is already known with a different arity.
  void declare(const std::string& relation, std::size_t arity);
  /// Returns false when the fact was already present.
  bool add_fact(const std::string& relation, Tuple tuple);

  const Table* find(std::string_view relation) const;
  std::optional<std::size_t> arity(std::string_view relation) const;
  const std::map<std::string, Table, std::less<>>& relations() const { return tables_; }
  const std::set<std::string>& universe() const { return universe_; }
  std::size_t fact_count() const;
  std::size_t largest_relation() const;

 private:
  std::map<std::string, Table, std::less<>> tables_;
  std::map<std::string, std::size_t, std::less<>> arities_;
  std::set<std::string> universe_;
};

struct Hypergraph {
  struct Edge {
    std::size_t atom;
    VarSet vars;
  };
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
};

ConjunctiveQuery parse_query(std::string_view text);
Database parse_database(std::string_view text);

Hypergraph query_hypergraph(const ConjunctiveQuery& query);

/// Constants that do not match the bare constant syntax are single-quoted.
std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const ConjunctiveQuery& query);
/// One `name(c1,...,cn).` line per fact, relations and tuples sorted.
std::string to_string(const Database& db);

bool is_variable_name(std::string_view text);
bool is_bare_constant(std::string_view text);

}  // namespace hypertree
