#pragma once

// [V]-adjacency and [V]-components of a query.
//
// X is [V]-adjacent to Y when some atom A has {X,Y} within var(A) - V. A
// [V]-component is a maximal set of variables outside V that is pairwise
// connected by chains of [V]-adjacent variables. Every variable outside V
// lies in exactly one component.

#include "hypertree/core.hpp"

#include <vector>

namespace hypertree {

struct Component {
  VarSet separator;
  VarSet members;
  /// Least member, i.e. the lexicographically smallest variable name.
  std::size_t representative = 0;

  friend bool operator==(const Component&, const Component&) = default;
};

/// Throws std::invalid_argument for names that are not variables of the query.
bool v_adjacent(const ConjunctiveQuery& query, const VarSet& separator, std::string_view x,
                std::string_view y);
bool v_adjacent(const ConjunctiveQuery& query, const VarSet& separator, std::size_t x,
                std::size_t y);

/// Components ordered by representative.
std::vector<Component> v_components(const ConjunctiveQuery& query, const VarSet& separator);

/// atoms(C): the atoms with at least one variable in C.
AtomSet atoms_of_component(const ConjunctiveQuery& query, const VarSet& members);
inline AtomSet atoms_of_component(const ConjunctiveQuery& query, const Component& c) {
  return atoms_of_component(query, c.members);
}

}  // namespace hypertree
