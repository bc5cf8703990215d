#include "support.hpp"

#include "hypertree/components.hpp"
#include "hypertree/detect.hpp"
#include "hypertree/json_io.hpp"

#include <doctest.h>

using namespace hypertree;

namespace {

struct Row {
  std::optional<int> parent;
  std::vector<const char*> chi;
  std::vector<std::size_t> lambda;
};

Hypertree build(const ConjunctiveQuery& q, const std::vector<Row>& rows) {
  Hypertree h;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    HypertreeNode n{static_cast<int>(i), rows[i].parent, q.no_vars(), q.no_atoms()};
    for (const char* v : rows[i].chi) n.chi.set(q.variable_index(v));
    for (std::size_t a : rows[i].lambda) n.lambda.set(a);
    h.nodes.push_back(n);
  }
  return h;
}

Hypertree q1_width2(const ConjunctiveQuery& q) {
  return parse_hypertree_json(support::read_fixture("q1_width2.hd.json"), q);
}

}  // namespace

TEST_CASE("the width-2 enrollment decomposition is valid") {
  auto q = support::fixture_query("q1.query");
  auto h = q1_width2(q);
  CHECK(validate_hd(q, h).valid());
  CHECK(hd_width(h) == 2);
  CHECK(is_complete(q, h));
  CHECK(validate_nf(q, h).report.valid());
}

TEST_CASE("a chi label outside var(lambda) breaks HD3") {
  auto q = support::fixture_query("q1.query");
  auto h = build(q, {{std::nullopt, {"A", "C", "P", "S"}, {1}}, {0, {"C", "R", "S"}, {0}}});
  auto r = validate_hd(q, h);
  CHECK(r.has("HD3"));
  REQUIRE_FALSE(r.violations.empty());
  CHECK(to_string(r.violations.front()).rfind("CONDITION HD3 vertex 0: ", 0) == 0);
}

TEST_CASE("dropping R from the child breaks HD1") {
  auto q = support::fixture_query("q1.query");
  auto h = parse_hypertree_json(support::read_fixture("q1_width2_missing_r.hd.json"), q);
  auto r = validate_hd(q, h);
  CHECK(r.has("HD1"));
}

TEST_CASE("disconnected occurrences break HD2") {
  auto q = parse_query("ans <- r(X,Y), s(Y,Z), t(Z,X).");
  auto h = build(q, {{std::nullopt, {"X", "Y"}, {0}}, {0, {"Y", "Z"}, {1}}, {1, {"Z"}, {2}}, {0, {"X", "Z"}, {2}}});
  auto r = validate_hd(q, h);
  CHECK(r.has("HD2"));
}

TEST_CASE("a variable that reappears below a vertex without it breaks HD4") {
  auto q = parse_query("ans <- r(X,Y), s(Y,Z).");
  auto h = build(q, {{std::nullopt, {"Y"}, {0}}, {0, {"X", "Y", "Z"}, {0, 1}}});
  auto r = validate_hd(q, h);
  CHECK(r.has("HD4"));
  CHECK_FALSE(r.has("HD1"));
}

TEST_CASE("structural errors in trees") {
  auto q = parse_query("ans <- r(X,Y).");
  auto two_roots = build(q, {{std::nullopt, {"X", "Y"}, {0}}, {std::nullopt, {"X"}, {0}}});
  CHECK_THROWS_AS(validate_hd(q, two_roots), DecompositionError);
  auto dangling = build(q, {{std::nullopt, {"X", "Y"}, {0}}, {7, {"X"}, {0}}});
  CHECK_THROWS_AS(validate_hd(q, dangling), DecompositionError);
  auto cycle = build(q, {{1, {"X", "Y"}, {0}}, {0, {"X"}, {0}}});
  CHECK_THROWS_AS(validate_hd(q, cycle), DecompositionError);
}

TEST_CASE("every single deletion of a valid decomposition is rejected") {
  for (auto [qf, hf] : {std::pair{"q1.query", "q1_width2.hd.json"}, std::pair{"q5.query", "q5_width2.hd.json"}}) {
    auto q = support::fixture_query(qf);
    auto h = parse_hypertree_json(support::read_fixture(hf), q);
    REQUIRE(validate_hd(q, h).valid());
    auto mutations = support::single_deletions(h);
    CHECK(mutations.size() > 5);
    for (const auto& m : mutations) {
      CAPTURE(m.description);
      CHECK_FALSE(support::rejection(q, h, m.tree).empty());
    }
  }
}

TEST_CASE("completing the triangle adds one vertex") {
  auto q = support::fixture_query("triangle.query");
  auto h = build(q, {{std::nullopt, {"X", "Y", "Z"}, {0, 1}}});
  REQUIRE(validate_hd(q, h).valid());
  CHECK_FALSE(is_complete(q, h));
  auto c = complete_hd(q, h);
  CHECK(c.size() == h.size() + 1);
  CHECK(is_complete(q, c));
  CHECK(validate_hd(q, c).valid());
  CHECK(hd_width(c) == 2);
  CHECK(complete_hd(q, c) == c);
}

TEST_CASE("normalizing the trivial decomposition") {
  for (const char* f : {"q1.query", "q3.query", "q5.query", "triangle.query"}) {
    auto q = support::fixture_query(f);
    auto t = trivial_hd(q);
    REQUIRE(validate_hd(q, t).valid());
    CHECK(hd_width(t) == q.atom_count());
    auto n = normalize_hd(q, t);
    CHECK(validate_hd(q, n).valid());
    CHECK(validate_nf(q, n).report.valid());
    CHECK(hd_width(n) <= hd_width(t));
  }
}

TEST_CASE("normalizing the non-normal q5 decomposition") {
  auto q = support::fixture_query("q5.query");
  auto h = parse_hypertree_json(support::read_fixture("q5_width2.hd.json"), q);
  REQUIRE(validate_hd(q, h).valid());
  auto nf = validate_nf(q, h);
  CHECK(nf.report.has("NF3"));
  auto n = normalize_hd(q, h);
  CHECK(validate_hd(q, n).valid());
  CHECK(validate_nf(q, n).report.valid());
  CHECK(hd_width(n) <= 2);
  CHECK(n.size() <= q.variable_count());
}

TEST_CASE("normal form bound and component equivalence on emitted trees") {
  for (const auto& q : support::corpus(80)) {
    for (std::size_t k = 1; k <= 3; ++k) {
      auto h = decompose(q, k);
      if (!h) continue;
      CHECK(h->size() <= std::max<std::size_t>(q.variable_count(), 1));
      CHECK(support::component_equivalence_holds(q, *h));
      auto nf = validate_nf(q, *h);
      REQUIRE(nf.report.valid());
      for (const auto& n : h->nodes) {
        CHECK(treecomp(q, *h, n.id) == nf.treecomp.at(n.id));
        CHECK(normalize_hd(q, *h).size() == h->size());
      }
    }
  }
}

TEST_CASE("normalization keeps validity and width on random decompositions") {
  for (const auto& q : support::corpus(60)) {
    auto t = trivial_hd(q);
    auto n = normalize_hd(q, t);
    CHECK(validate_nf(q, n).report.valid());
    CHECK(hd_width(n) <= std::max<std::size_t>(hd_width(t), 1));
    if (auto h = decompose(q, 3)) {
      auto c = complete_hd(q, *h);
      CHECK(validate_hd(q, normalize_hd(q, c)).valid());
      CHECK(hd_width(normalize_hd(q, c)) <= hd_width(c));
    }
  }
}

TEST_CASE("normalize_hd rejects invalid input") {
  auto q = support::fixture_query("q1.query");
  auto h = parse_hypertree_json(support::read_fixture("q1_width2_missing_r.hd.json"), q);
  CHECK_THROWS_AS(normalize_hd(q, h), DecompositionError);
}

TEST_CASE("treecomp of a non-normal tree throws") {
  auto q = support::fixture_query("q5.query");
  auto h = parse_hypertree_json(support::read_fixture("q5_width2.hd.json"), q);
  bool threw = false;
  for (const auto& n : h.nodes) {
    try {
      treecomp(q, h, n.id);
    } catch (const DecompositionError&) {
      threw = true;
    }
  }
  CHECK(threw);
}

TEST_CASE("query decomposition of q4") {
  auto q = support::fixture_query("q4.query");
  auto qd = parse_qd_json(support::read_fixture("q4_width2.qd.json"), q);
  CHECK(validate_qd(q, qd).valid());
  CHECK(qd.is_pure());
  CHECK(qd.width() == 2);
  auto h = qd_to_hd(q, qd);
  CHECK(validate_hd(q, h).valid());
  CHECK(hd_width(h) == 2);
  CHECK(is_complete(q, h));
  CHECK(h.size() == qd.nodes.size());
}

TEST_CASE("query decomposition violations") {
  auto q = support::fixture_query("q4.query");
  auto qd = parse_qd_json(support::read_fixture("q4_width2.qd.json"), q);

  auto uncovered = qd;
  for (auto& n : uncovered.nodes)
    if (n.atoms.test(4) && n.atoms.count() == 1) n.atoms.reset(4), n.atoms.set(1);
  CHECK(validate_qd(q, uncovered).has("QD1"));

  auto tri = support::fixture_query("triangle.query");
  QueryDecomposition gap;
  for (int i = 0; i < 3; ++i) {
    QueryDecompositionNode n{i, i ? std::optional<int>(i - 1) : std::nullopt, tri.no_atoms(), tri.no_vars()};
    n.atoms.set(i == 1 ? 1 : 0);
    if (i == 2) n.atoms.set(2);
    gap.nodes.push_back(n);
  }
  CHECK(validate_qd(tri, gap).has("QD2"));
}

TEST_CASE("impure query decompositions cannot be converted") {
  auto q = support::fixture_query("q1.query");
  auto qd = parse_qd_json(support::read_fixture("q1_impure.qd.json"), q);
  CHECK_FALSE(qd.is_pure());
  CHECK_THROWS_AS(qd_to_hd(q, qd), DecompositionError);
  auto pure = parse_qd_json(support::read_fixture("q1_width2.qd.json"), q);
  CHECK(pure.is_pure());
  auto h = qd_to_hd(q, pure);
  CHECK(validate_hd(q, h).valid());
  CHECK(hd_width(h) == 2);
}

TEST_CASE("join trees of acyclic queries") {
  for (const char* f : {"q2.query", "q3.query"}) {
    auto q = support::fixture_query(f);
    auto h = decompose(q, 1);
    REQUIRE(h);
    auto c = complete_hd(q, *h);
    auto jt = hd_to_jointree(q, c);
    CHECK(jt.nodes.size() == q.atom_count());
    CHECK(validate_jointree(q, jt).valid());
    auto back = jointree_to_hd(q, jt);
    CHECK(validate_hd(q, back).valid());
    CHECK(hd_width(back) == 1);
  }
  auto single = parse_query("ans <- r(X,Y).");
  auto jt = hd_to_jointree(single, trivial_hd(single));
  REQUIRE(jt.nodes.size() == 1);
  CHECK_FALSE(jt.nodes[0].parent.has_value());
}

TEST_CASE("join tree condition JT2") {
  auto q = parse_query("ans <- r(X,Y), s(Y,Z), t(Z,W), u(Z,W).");
  JoinTree bad;
  bad.nodes = {{0, std::nullopt}, {1, 0}, {2, 0}, {3, 2}};
  CHECK(validate_jointree(q, bad).has("JT2"));
  JoinTree good;
  good.nodes = {{0, std::nullopt}, {1, 0}, {2, 1}, {3, 2}};
  CHECK(validate_jointree(q, good).valid());
}

TEST_CASE("hd_to_jointree needs width one") {
  auto q = support::fixture_query("q1.query");
  CHECK_THROWS_AS(hd_to_jointree(q, q1_width2(q)), DecompositionError);
}

TEST_CASE("canonical form ignores ids and sibling order") {
  auto q = support::fixture_query("q5.query");
  auto h = parse_hypertree_json(support::read_fixture("q5_width2.hd.json"), q);
  Hypertree shuffled = h;
  std::reverse(shuffled.nodes.begin() + 1, shuffled.nodes.end());
  for (auto& n : shuffled.nodes) {
    n.id += 10;
    if (n.parent) *n.parent += 10;
  }
  CHECK(isomorphic(h, shuffled));
  CHECK(canonical(h) == canonical(shuffled));
  Hypertree other = h;
  other.nodes.back().chi.reset(other.nodes.back().chi.find_first());
  CHECK_FALSE(isomorphic(h, other));
}

TEST_CASE("json round trip") {
  auto q = support::fixture_query("q5.query");
  auto h = parse_hypertree_json(support::read_fixture("q5_width2.hd.json"), q);
  auto text = to_json(q, h);
  auto doc = parse_hypertree_json(text);
  CHECK(doc.query == q);
  CHECK(doc.tree == h);
  CHECK(text.find("\"query\"") < text.find("\"nodes\""));

  auto q4 = support::fixture_query("q4.query");
  auto qd = parse_qd_json(support::read_fixture("q4_width2.qd.json"), q4);
  auto qdoc = parse_qd_json(to_json(q4, qd));
  CHECK(qdoc.qd == qd);
}

TEST_CASE("json format errors") {
  auto q = support::fixture_query("q1.query");
  CHECK_THROWS_AS(parse_hypertree_json("{", q), FormatError);
  CHECK_THROWS_AS(parse_hypertree_json(R"({"nodes":[{"id":0,"parent":null,"chi":["Q"],"lambda":[0]}]})", q),
                  FormatError);
  CHECK_THROWS_AS(parse_hypertree_json(R"({"nodes":[{"id":0,"parent":null,"chi":["S"],"lambda":[9]}]})", q),
                  FormatError);
  auto other = support::fixture_query("q2.query");
  CHECK_THROWS_AS(parse_hypertree_json(to_json(other, trivial_hd(other)), q), FormatError);
}
