#include "hypertree/detect.hpp"

#include "kdecomp.hpp"

#include <algorithm>
#include <tuple>

namespace hypertree {

namespace {

struct Pair {
  detail::PairKey key;
  VarSet component;
  VarSet separator;
};

}  // namespace

std::optional<Hypertree> decompose_fixpoint(const ConjunctiveQuery& query, std::size_t k) {
  if (k < 1) throw std::invalid_argument("width bound k must be at least 1");
  if (query.atom_count() == 0 || query.variable_count() == 0)
    return detail::degenerate_decomposition(query);

  detail::KDecompProgram program(query, k);
  std::vector<Pair> pairs;
  for (std::size_t r = 0; r < program.size(); ++r)
    for (const auto& c : program.components(r))
      pairs.push_back({{static_cast<long>(r), c.representative}, c.members, program.vars(r)});
  pairs.push_back({program.root_key(), query.all_vars(), query.no_vars()});
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.component.count() < b.component.count();
  });

  // Every sub-component is strictly smaller, so its pair is already settled.
  std::map<detail::PairKey, std::size_t> choice;
  for (const auto& p : pairs) {
    VarSet needed = program.needed(p.component, p.separator);
    for (std::size_t s = 0; s < program.size(); ++s) {
      if (!program.meets(s, needed, p.component)) continue;
      bool all = std::all_of(program.components(s).begin(), program.components(s).end(),
                             [&](const Component& c) {
                               return !c.members.is_subset_of(p.component) ||
                                      choice.count({static_cast<long>(s), c.representative});
                             });
      if (all) {
        choice[p.key] = s;
        break;
      }
    }
  }
  if (!choice.count(program.root_key())) return std::nullopt;
  return program.witness(choice);
}

}  // namespace hypertree
