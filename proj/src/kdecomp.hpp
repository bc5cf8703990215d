#pragma once

// Shared pieces of the two k-decomp engines.

#include "hypertree/components.hpp"
#include "hypertree/detect.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace hypertree::detail {

/// Memo key: (index of the separating k-vertex or kRoot, component
/// representative). The root pair stands for (root, var(Q)).
using PairKey = std::pair<long, std::size_t>;
inline constexpr long kRoot = -1;

class KDecompProgram {
 public:
  KDecompProgram(const ConjunctiveQuery& query, std::size_t k);

  const ConjunctiveQuery& query() const { return query_; }
  std::size_t size() const { return atoms_.size(); }
  const VarSet& vars(std::size_t s) const { return vars_[s]; }
  const AtomSet& atoms(std::size_t s) const { return atoms_[s]; }

  /// Union of var(P) & sep over P in atoms(C).
  VarSet needed(const VarSet& component, const VarSet& separator) const;
  /// Checks 2.a and 2.b of the candidate S for component C.
  bool meets(std::size_t s, const VarSet& needed, const VarSet& component) const {
    return needed.is_subset_of(vars_[s]) && vars_[s].intersects(component);
  }
  /// [var(S)]-components, cached.
  const std::vector<Component>& components(std::size_t s) const;

  PairKey root_key() const { return {kRoot, 0}; }

  /// Rebuilds the witness tree from the chosen k-vertex of each pair.
  Hypertree witness(const std::map<PairKey, std::size_t>& choice) const;

 private:
  const ConjunctiveQuery& query_;
  std::vector<AtomSet> atoms_;
  std::vector<VarSet> vars_;
  mutable std::vector<std::optional<std::vector<Component>>> components_;
};

/// Decomposition used when the body is empty or has no variables at all.
std::optional<Hypertree> degenerate_decomposition(const ConjunctiveQuery& query);

}  // namespace hypertree::detail
