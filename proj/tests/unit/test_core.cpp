#include "support.hpp"

#include <doctest.h>

using namespace hypertree;

TEST_CASE("parse the enrollment query") {
  auto q = parse_query("ans <- enrolled(S,C,R), teaches(P,C,A), parent(P,S).");
  CHECK(q.atom_count() == 3);
  CHECK(q.is_boolean());
  CHECK(q.variables() == std::vector<std::string>{"A", "C", "P", "R", "S"});
  CHECK(q.atom(1).relation == "teaches");
  CHECK(q.atom(2).index == 2);
}

TEST_CASE("empty body and zero-ary head") {
  auto q = parse_query("ans <- .");
  CHECK(q.atom_count() == 0);
  CHECK(q.is_boolean());
  CHECK(q.variable_count() == 0);
  CHECK(query_hypergraph(q).edges.empty());
}

TEST_CASE("head variables") {
  auto q = parse_query("ans(X) <- r(X,Y).");
  CHECK_FALSE(q.is_boolean());
  REQUIRE(q.head_variables().size() == 1);
  CHECK(q.variable_name(q.head_variables()[0]) == "X");
}

TEST_CASE("constants, quotes and comments") {
  auto q = parse_query("% leading comment\nans(X) <- r(X, a1, 'Big City'), s(X,X). % trailing\n");
  CHECK(q.atom(0).args[1] == Term::constant("a1"));
  CHECK(q.atom(0).args[2] == Term::constant("Big City"));
  CHECK(q.variable_count() == 1);
  CHECK(to_string(q) == "ans(X) <- r(X,a1,'Big City'), s(X,X).");
}

TEST_CASE("primed variable names") {
  auto q = parse_query("ans <- r(X,X'), s(X',Y_1).");
  CHECK(q.variables() == std::vector<std::string>{"X", "X'", "Y_1"});
}

TEST_CASE("query syntax errors carry positions") {
  try {
    parse_query("ans <- r(X,\n  Y");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() >= 3);
  }
  CHECK_THROWS_AS(parse_query(""), ParseError);
  CHECK_THROWS_AS(parse_query("ans <- r(X)"), ParseError);
  CHECK_THROWS_AS(parse_query("ans <- r(X),."), ParseError);
}

TEST_CASE("unsafe head is rejected") {
  CHECK_THROWS_AS(parse_query("ans(Z) <- r(X,Y)."), ParseError);
  CHECK_THROWS_AS(ConjunctiveQuery(Atom{"ans", {Term::variable("Z")}, 0}, {}), std::invalid_argument);
}

TEST_CASE("duplicate atoms stay distinct") {
  auto q = parse_query("ans <- r(X,Y), r(X,Y).");
  CHECK(q.atom_count() == 2);
  CHECK(q.atom(0).index == 0);
  CHECK(q.atom(1).index == 1);
  CHECK(query_hypergraph(q).edges.size() == 2);
}

TEST_CASE("hypergraph of the enrollment query") {
  auto q = support::fixture_query("q1.query");
  auto h = query_hypergraph(q);
  REQUIRE(h.edges.size() == 3);
  CHECK(q.format(h.edges[0].vars) == "{C,R,S}");
  CHECK(q.format(h.edges[1].vars) == "{A,C,P}");
  CHECK(q.format(h.edges[2].vars) == "{P,S}");
  CHECK(h.vertices.size() == 5);
}

TEST_CASE("variable-free atoms have no edge") {
  auto q = parse_query("ans <- r(a,b).");
  auto h = query_hypergraph(q);
  CHECK(h.edges.empty());
  CHECK(h.vertices.empty());
  auto mixed = parse_query("ans <- r(a,b), s(X).");
  CHECK(query_hypergraph(mixed).edges.size() == 1);
}

TEST_CASE("parse databases") {
  auto db = parse_database("r(1,2).\ns(2,3).");
  CHECK(db.relations().size() == 2);
  CHECK(db.universe() == std::set<std::string>{"1", "2", "3"});

  auto dup = parse_database("r(1,2).\nr(1,2).");
  CHECK(dup.find("r")->size() == 1);

  CHECK_THROWS_AS(parse_database("r(1,2).\nr(1)."), ParseError);
  CHECK_THROWS_AS(parse_database("r(X,2)."), ParseError);
}

TEST_CASE("database printing round trip") {
  auto db = parse_database("s(b,'x y').\nr(a).\n% note\nr(c).\n");
  auto text = to_string(db);
  CHECK(text == "r(a).\nr(c).\ns(b,'x y').\n");
  CHECK(to_string(parse_database(text)) == text);
}

TEST_CASE("print and reparse random queries") {
  std::mt19937 rng(11);
  support::RandomShape shape;
  shape.constant_rate = 0.2;
  shape.allow_head = true;
  for (int i = 0; i < 300; ++i) {
    auto q = support::random_query(rng, shape);
    auto again = parse_query(to_string(q));
    CHECK(again == q);
    auto h = query_hypergraph(q);
    std::size_t ground = 0;
    for (std::size_t a = 0; a < q.atom_count(); ++a) ground += q.vars_of(a).none();
    CHECK(h.edges.size() + ground == q.atom_count());
  }
}
