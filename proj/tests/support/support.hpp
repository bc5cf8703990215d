#pragma once

// Fixtures, seeded generators and independent reference checks shared by
// the unit tests and the acceptance runner.

#include "hypertree/decomposition.hpp"
#include "hypertree/hardness.hpp"

#include <random>
#include <string>
#include <vector>

namespace support {

using namespace hypertree;

std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);
ConjunctiveQuery fixture_query(const std::string& name);

struct RandomShape {
  std::size_t min_atoms = 1;
  std::size_t max_atoms = 5;
  std::size_t min_vars = 1;
  std::size_t min_arity = 1;
  std::size_t max_vars = 6;
  std::size_t max_arity = 3;
  /// Probability that an argument is a constant instead of a variable.
  double constant_rate = 0.0;
  bool allow_head = false;
  /// First atoms chain their first two arguments into a cycle of length >= 3.
  bool plant_cycle = false;
};

/// Relations r0..r3 with a fixed arity per name derived from the seed.
ConjunctiveQuery random_query(std::mt19937& rng, const RandomShape& shape = {});
/// Declares every relation of `query`; <= max_facts facts over `constants`.
Database random_database(std::mt19937& rng, const ConjunctiveQuery& query, std::size_t constants = 4,
                         std::size_t max_facts = 20);

/// Queries used wherever the acceptance criteria speak of "the corpus":
/// the fixture queries plus `count` random ones from a fixed seed.
std::vector<ConjunctiveQuery> corpus(std::size_t count);

/// [V]-components by explicit path search between every pair of variables.
std::vector<VarSet> naive_components(const ConjunctiveQuery& query, const VarSet& separator);

/// GYO reduction over arbitrary edge sets.
bool naive_acyclic(std::vector<boost::dynamic_bitset<>> edges);

/// qw(Q) <= k by trying every family of labels of size <= k and testing
/// whether the label hypergraph over atoms and variables is acyclic. Only
/// usable for a handful of atoms.
bool naive_qw_at_most(const ConjunctiveQuery& query, std::size_t k);

/// For every vertex s, the [chi(s)]-components and the
/// [var(lambda(s))]-components that lie inside treecomp(s) coincide.
bool component_equivalence_holds(const ConjunctiveQuery& query, const Hypertree& tree);

/// Instance with a planted exact cover of s in {1,2} plus a few extra sets,
/// shuffled.
X3CInstance random_positive_x3c(std::mt19937& rng);

struct Mutation {
  std::string description;
  Hypertree tree;
};

/// Every tree obtained by deleting one variable from one chi or one atom
/// from one lambda.
std::vector<Mutation> single_deletions(const Hypertree& tree);

/// Condition ids that reject the mutation (HDn, NFn) or "WIDTH".
std::vector<std::string> rejection(const ConjunctiveQuery& query, const Hypertree& original,
                                   const Hypertree& mutated);

}  // namespace support
