#include "hypertree/components.hpp"

#include <numeric>

namespace hypertree {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  // Keeps the smaller index as root so roots are representatives.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }

  std::vector<std::size_t> parent;
};

}  // namespace

bool v_adjacent(const ConjunctiveQuery& query, const VarSet& separator, std::size_t x,
                std::size_t y) {
  if (x >= query.variable_count() || y >= query.variable_count())
    throw std::invalid_argument("variable index out of range");
  if (separator.test(x) || separator.test(y)) return false;
  for (std::size_t i = 0; i < query.atom_count(); ++i) {
    const VarSet& vs = query.vars_of(i);
    if (vs.test(x) && vs.test(y)) return true;
  }
  return false;
}

bool v_adjacent(const ConjunctiveQuery& query, const VarSet& separator, std::string_view x,
                std::string_view y) {
  return v_adjacent(query, separator, query.variable_index(x), query.variable_index(y));
}

std::vector<Component> v_components(const ConjunctiveQuery& query, const VarSet& separator) {
  const std::size_t n = query.variable_count();
  DisjointSets sets(n);
  VarSet touched = query.no_vars();
  for (std::size_t i = 0; i < query.atom_count(); ++i) {
    VarSet free = query.vars_of(i) - separator;
    auto first = free.find_first();
    if (first == VarSet::npos) continue;
    touched |= free;
    for (auto v = free.find_next(first); v != VarSet::npos; v = free.find_next(v))
      sets.unite(first, v);
  }

  std::vector<Component> out;
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (auto v = touched.find_first(); v != VarSet::npos; v = touched.find_next(v)) {
    std::size_t root = sets.find(v);
    if (slot[root] == SIZE_MAX) {
      slot[root] = out.size();
      out.push_back({separator, query.no_vars(), root});
    }
    out[slot[root]].members.set(v);
  }
  return out;
}

AtomSet atoms_of_component(const ConjunctiveQuery& query, const VarSet& members) {
  AtomSet out = query.no_atoms();
  for (std::size_t i = 0; i < query.atom_count(); ++i)
    if (query.vars_of(i).intersects(members)) out.set(i);
  return out;
}

}  // namespace hypertree
