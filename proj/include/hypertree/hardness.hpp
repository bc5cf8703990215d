#pragma once

// Gadgets behind the query-width hardness reduction: strict 3-partition
// systems and the exact-cover-by-3-sets to query translation.

#include "hypertree/decomposition.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypertree {

/// Elements are integers; their numeric order is creation order.
struct ThreePartitionSystem {
  using Class = std::vector<int>;
  using Partition = std::array<Class, 3>;

  std::vector<int> base;
  /// Classes are sorted; slots keep the a/b/c order they were built in.
  std::vector<Partition> partitions;

  friend bool operator==(const ThreePartitionSystem&, const ThreePartitionSystem&) = default;
};

/// Throws std::invalid_argument when m or k is 0 or no m class-disjoint
/// seed partitions exist.
ThreePartitionSystem gen_strict_3ps(std::size_t m, std::size_t k);

/// Partition validity, class uniqueness and strictness over every class
/// triple (repetition allowed). Independent of the generator.
bool verify_strict_3ps(const ThreePartitionSystem& system);

/// `base e1 e2 ...` then one `partition a.. | b.. | c..` line per partition.
std::string to_string(const ThreePartitionSystem& system);

struct X3CInstance {
  std::vector<std::string> ground;
  std::vector<std::array<std::size_t, 3>> sets;  ///< indices into ground, ascending

  std::size_t s() const { return ground.size() / 3; }
};

class X3CError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// First line `s m`, then the ground set, then one 3-set per line. Element
/// names are [A-Za-z0-9_]+; `%` starts a comment.
X3CInstance parse_x3c(std::string_view text);
std::string to_string(const X3CInstance& instance);
/// Throws X3CError when the instance is malformed.
void check_x3c(const X3CInstance& instance);

ConjunctiveQuery x3c_to_query(const X3CInstance& instance);

/// Width-4 pure query decomposition of x3c_to_query(instance) built from an
/// exact cover given as indices into instance.sets.
QueryDecomposition witness_qd_from_cover(const X3CInstance& instance, const std::vector<std::size_t>& cover);

/// Backtracking search; first cover in index order.
std::optional<std::vector<std::size_t>> find_exact_cover(const X3CInstance& instance);

}  // namespace hypertree
