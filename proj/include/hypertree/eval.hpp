#pragma once

// Decomposition-guided evaluation of conjunctive queries over fact databases.

#include "hypertree/decomposition.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypertree {

/// Missing relation or arity mismatch between query and database.
class EvalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Automatic width search found nothing up to the cap.
class NoDecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Answer tuples over the head arguments.
using Answer = std::set<std::vector<std::string>>;

/// Sizes seen during one evaluation.
struct EvalStats {
  std::size_t width = 0;
  std::size_t largest_input = 0;
  /// Largest relation built while computing the vertex relations.
  std::size_t largest_shrink = 0;
  /// Largest vertex relation after projection onto chi.
  std::size_t largest_vertex = 0;
  /// Largest relation seen during semijoin passes.
  std::size_t largest_semijoin = 0;
};

struct EvalOptions {
  /// Decomposition to use; found by ascending-width search when absent.
  std::optional<Hypertree> decomposition;
  std::size_t k_cap = 5;
  EvalStats* stats = nullptr;
};

/// One atom p<id>(chi) per decomposition vertex, its relation, and a join
/// tree of the same shape as the decomposition.
struct AcyclicInstance {
  ConjunctiveQuery query;
  Database database;
  JoinTree join_tree;
};

/// Requires a valid complete decomposition of `query`.
AcyclicInstance shrink(const ConjunctiveQuery& query, const Database& db, const Hypertree& tree,
                       EvalStats* stats = nullptr);

/// True iff some substitution maps every body atom into the database. For a
/// non-Boolean query this decides whether the answer is non-empty.
bool eval_boolean(const ConjunctiveQuery& query, const Database& db, const EvalOptions& options = {});

Answer eval_full(const ConjunctiveQuery& query, const Database& db, const EvalOptions& options = {});

/// Backtracking over facts. Throws InconclusiveError after `budget` steps.
Answer brute_force_eval(const ConjunctiveQuery& query, const Database& db,
                        std::size_t budget = 50'000'000);

/// One `ans(c1,...,cn).` line per tuple, in sorted order.
std::string format_answer(const ConjunctiveQuery& query, const Answer& answer);

}  // namespace hypertree
