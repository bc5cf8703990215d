#pragma once

// Bounded hypertree width: the k-decomp search with witness extraction, a
// bottom-up fixpoint variant of the same program, acyclicity tests and an
// exhaustive query-width search.

#include "hypertree/decomposition.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace hypertree {

/// A bounded search ran out of budget before reaching an answer.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normal-form decomposition of width <= k, or nullopt when hw(Q) > k.
/// Candidate k-vertices are tried in lexicographic order of their sorted
/// atom indices; the first that works is kept. An empty body gives the
/// empty decomposition. Throws std::invalid_argument for k < 1.
std::optional<Hypertree> decompose(const ConjunctiveQuery& query, std::size_t k);

/// Same answers and witnesses as decompose(), computed bottom-up over every
/// (k-vertex, component) pair in order of component size.
std::optional<Hypertree> decompose_fixpoint(const ConjunctiveQuery& query, std::size_t k);

struct WidthResult {
  std::size_t width = 0;
  Hypertree tree;
};

/// Least k <= k_max with a decomposition.
std::optional<WidthResult> hypertree_width(const ConjunctiveQuery& query, std::size_t k_max);

/// Join tree built from a width-1 decomposition, nullopt for cyclic queries.
std::optional<JoinTree> is_acyclic(const ConjunctiveQuery& query);

/// GYO ear removal on H(Q).
bool gyo_acyclic(const ConjunctiveQuery& query);

/// Pure query decomposition of width <= k, or nullopt if none exists.
/// Exponential; throws InconclusiveError after `budget` search steps.
std::optional<QueryDecomposition> brute_force_qw(const ConjunctiveQuery& query, std::size_t k,
                                                 std::size_t budget = 2'000'000);

namespace detail {

/// Non-empty atom sets of size <= k over n atoms, ordered lexicographically
/// by sorted index tuple: (0) < (0,1) < (0,1,2) < (0,2) < (1) ...
std::vector<std::vector<std::size_t>> k_vertices(std::size_t n, std::size_t k);

}  // namespace detail

}  // namespace hypertree
