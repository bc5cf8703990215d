#pragma once

// Hypertrees, query decompositions and join trees, with their validators and
// the structural transformations between them.

#include "hypertree/core.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypertree {

/// Malformed tree, dangling reference, or a violated precondition.
class DecompositionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct HypertreeNode {
  int id = 0;
  std::optional<int> parent;
  VarSet chi;
  AtomSet lambda;

  friend bool operator==(const HypertreeNode&, const HypertreeNode&) = default;
};

/// Rooted tree with chi (variables) and lambda (atoms) labels. An empty node
/// list is the decomposition of the empty-body query.
struct Hypertree {
  std::vector<HypertreeNode> nodes;

  const HypertreeNode& node(int id) const;
  std::size_t size() const { return nodes.size(); }

  friend bool operator==(const Hypertree&, const Hypertree&) = default;
};

struct QueryDecompositionNode {
  int id = 0;
  std::optional<int> parent;
  AtomSet atoms;
  VarSet vars;

  friend bool operator==(const QueryDecompositionNode&, const QueryDecompositionNode&) = default;
};

struct QueryDecomposition {
  std::vector<QueryDecompositionNode> nodes;

  /// Pure iff no label contains a variable.
  bool is_pure() const;
  std::size_t width() const;

  friend bool operator==(const QueryDecomposition&, const QueryDecomposition&) = default;
};

/// One vertex per body atom.
struct JoinTree {
  struct Node {
    std::size_t atom;
    std::optional<std::size_t> parent;
  };
  std::vector<Node> nodes;
};

struct Violation {
  /// HD1-HD4, NF1-NF3, QD1-QD3 or JT1-JT2.
  std::string condition;
  std::vector<int> vertices;
  std::string witness;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  bool has(std::string_view condition) const;
};

/// `CONDITION <id> vertex <v>: <witness>`
std::string to_string(const Violation& v);

struct NormalFormReport {
  ValidationReport report;
  /// Defined for every vertex whose NF conditions hold.
  std::map<int, VarSet> treecomp;
};

ValidationReport validate_hd(const ConjunctiveQuery& query, const Hypertree& tree);
std::size_t hd_width(const Hypertree& tree);
bool is_complete(const ConjunctiveQuery& query, const Hypertree& tree);

/// Adds a leaf {A} / var(A) for every atom A that is not strongly covered,
/// under the first vertex in canonical preorder whose chi covers var(A).
Hypertree complete_hd(const ConjunctiveQuery& query, const Hypertree& tree);

/// Rewrites a valid hypertree decomposition into normal form without
/// increasing its width. Output vertex ids follow preorder.
Hypertree normalize_hd(const ConjunctiveQuery& query, const Hypertree& tree);

NormalFormReport validate_nf(const ConjunctiveQuery& query, const Hypertree& tree);
/// Throws DecompositionError when the decomposition is not in normal form.
VarSet treecomp(const ConjunctiveQuery& query, const Hypertree& tree, int vertex);

ValidationReport validate_qd(const ConjunctiveQuery& query, const QueryDecomposition& qd);

/// Same tree with lambda = label and chi = var(label). Rejects impure or
/// invalid input.
Hypertree qd_to_hd(const ConjunctiveQuery& query, const QueryDecomposition& qd);

/// Width-1 complete decomposition to join tree by merging every vertex with
/// lambda {A} into the preorder-least vertex whose labels are {A} / var(A).
JoinTree hd_to_jointree(const ConjunctiveQuery& query, const Hypertree& tree);
Hypertree jointree_to_hd(const ConjunctiveQuery& query, const JoinTree& tree);
ValidationReport validate_jointree(const ConjunctiveQuery& query, const JoinTree& tree);

/// Single vertex holding every atom and variable.
Hypertree trivial_hd(const ConjunctiveQuery& query);

/// Children ordered by (least atom, least variable, labels, subtree) and ids
/// renumbered in preorder. Two decompositions are isomorphic iff their
/// canonical forms are equal.
Hypertree canonical(const Hypertree& tree);
bool isomorphic(const Hypertree& a, const Hypertree& b);
/// Positions into tree.nodes, visiting children in canonical order.
std::vector<std::size_t> canonical_preorder(const Hypertree& tree);

namespace detail {

/// Parent/children arrays over positions of a node vector.
struct TreeIndex {
  std::size_t root = 0;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<std::vector<std::size_t>> children;
  std::map<int, std::size_t> position;
  /// Preorder in node-vector child order.
  std::vector<std::size_t> preorder;
};

/// Throws DecompositionError unless ids are unique, exactly one node has no
/// parent and every parent link reaches it.
template <typename Node>
TreeIndex index_tree(const std::vector<Node>& nodes);

/// True when the marked positions induce a connected subgraph (or none).
bool connected_subset(const TreeIndex& index, const std::vector<bool>& marked);

}  // namespace detail

}  // namespace hypertree
