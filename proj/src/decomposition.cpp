#include "hypertree/decomposition.hpp"

#include "hypertree/components.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

namespace hypertree {

namespace detail {

template <typename Node>
TreeIndex index_tree(const std::vector<Node>& nodes) {
  TreeIndex ix;
  const std::size_t n = nodes.size();
  ix.parent.assign(n, std::nullopt);
  ix.children.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    if (!ix.position.emplace(nodes[i].id, i).second)
      throw DecompositionError("duplicate vertex id " + std::to_string(nodes[i].id));
  }
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < n; ++i) {
    if (!nodes[i].parent) {
      if (root) throw DecompositionError("more than one root vertex");
      root = i;
      continue;
    }
    auto it = ix.position.find(*nodes[i].parent);
    if (it == ix.position.end())
      throw DecompositionError("vertex " + std::to_string(nodes[i].id) + " has unknown parent " +
                               std::to_string(*nodes[i].parent));
    ix.parent[i] = it->second;
    ix.children[it->second].push_back(i);
  }
  if (n == 0) return ix;
  if (!root) throw DecompositionError("no root vertex");
  ix.root = *root;
  std::vector<std::size_t> stack{ix.root};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    ix.preorder.push_back(v);
    for (auto it = ix.children[v].rbegin(); it != ix.children[v].rend(); ++it) stack.push_back(*it);
  }
  if (ix.preorder.size() != n) throw DecompositionError("parent links contain a cycle");
  return ix;
}

template TreeIndex index_tree(const std::vector<HypertreeNode>&);
template TreeIndex index_tree(const std::vector<QueryDecompositionNode>&);

bool connected_subset(const TreeIndex& index, const std::vector<bool>& marked) {
  std::size_t tops = 0;
  for (std::size_t v = 0; v < marked.size(); ++v) {
    if (!marked[v]) continue;
    if (!index.parent[v] || !marked[*index.parent[v]]) ++tops;
  }
  return tops <= 1;
}

}  // namespace detail

using detail::index_tree;
using detail::TreeIndex;

namespace {

void check_sizes(const ConjunctiveQuery& query, const VarSet& vars, const AtomSet& atoms, int id) {
  if (vars.size() != query.variable_count() || atoms.size() != query.atom_count())
    throw DecompositionError("vertex " + std::to_string(id) +
                             " references atoms or variables outside the query");
}

template <typename Node>
std::vector<int> ids_of(const std::vector<Node>& nodes, const std::vector<std::size_t>& pos) {
  std::vector<int> out;
  for (std::size_t p : pos) out.push_back(nodes[p].id);
  return out;
}

// Vertices that are the top of a marked region; more than one means the
// region is disconnected.
std::vector<std::size_t> region_tops(const TreeIndex& ix, const std::vector<bool>& marked) {
  std::vector<std::size_t> tops;
  for (std::size_t v : ix.preorder)
    if (marked[v] && (!ix.parent[v] || !marked[*ix.parent[v]])) tops.push_back(v);
  return tops;
}

// chi(T_p) for every position.
std::vector<VarSet> subtree_chi(const Hypertree& tree, const TreeIndex& ix) {
  std::vector<VarSet> out;
  out.reserve(tree.nodes.size());
  for (const auto& n : tree.nodes) out.push_back(n.chi);
  for (auto it = ix.preorder.rbegin(); it != ix.preorder.rend(); ++it)
    if (ix.parent[*it]) out[*ix.parent[*it]] |= out[*it];
  return out;
}

}  // namespace

const HypertreeNode& Hypertree::node(int id) const {
  for (const auto& n : nodes)
    if (n.id == id) return n;
  throw DecompositionError("no vertex with id " + std::to_string(id));
}

bool QueryDecomposition::is_pure() const {
  return std::none_of(nodes.begin(), nodes.end(), [](const auto& n) { return n.vars.any(); });
}

std::size_t QueryDecomposition::width() const {
  std::size_t w = 0;
  for (const auto& n : nodes) w = std::max(w, n.atoms.count() + n.vars.count());
  return w;
}

bool ValidationReport::has(std::string_view condition) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.condition == condition; });
}

std::string to_string(const Violation& v) {
  std::string out = "CONDITION " + v.condition + " vertex ";
  if (v.vertices.empty()) out += "-";
  for (std::size_t i = 0; i < v.vertices.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v.vertices[i]);
  }
  return out + ": " + v.witness;
}

// ---------------------------------------------------------------------------
// Hypertree decompositions

ValidationReport validate_hd(const ConjunctiveQuery& query, const Hypertree& tree) {
  ValidationReport report;
  if (tree.nodes.empty()) {
    for (std::size_t a = 0; a < query.atom_count(); ++a)
      report.violations.push_back({"HD1", {}, "atom " + to_string(query.atom(a)) + " uncovered"});
    return report;
  }
  TreeIndex ix = index_tree(tree.nodes);
  for (const auto& n : tree.nodes) check_sizes(query, n.chi, n.lambda, n.id);
  const auto& nodes = tree.nodes;

  for (std::size_t a = 0; a < query.atom_count(); ++a) {
    bool covered = std::any_of(nodes.begin(), nodes.end(),
                               [&](const auto& n) { return query.vars_of(a).is_subset_of(n.chi); });
    if (!covered)
      report.violations.push_back({"HD1", {}, "atom " + to_string(query.atom(a)) + " uncovered"});
  }

  for (std::size_t v = 0; v < query.variable_count(); ++v) {
    std::vector<bool> marked(nodes.size());
    for (std::size_t p = 0; p < nodes.size(); ++p) marked[p] = nodes[p].chi.test(v);
    auto tops = region_tops(ix, marked);
    if (tops.size() > 1)
      report.violations.push_back({"HD2", ids_of(nodes, tops),
                                   "variable " + query.variable_name(v) + " disconnected"});
  }

  for (std::size_t p : ix.preorder) {
    VarSet extra = nodes[p].chi - query.vars_of(nodes[p].lambda);
    if (extra.any())
      report.violations.push_back(
          {"HD3", {nodes[p].id}, "chi exceeds var(lambda) by " + query.format(extra)});
  }

  auto below = subtree_chi(tree, ix);
  for (std::size_t p : ix.preorder) {
    VarSet leak = (query.vars_of(nodes[p].lambda) & below[p]) - nodes[p].chi;
    if (leak.any())
      report.violations.push_back(
          {"HD4", {nodes[p].id}, "var(lambda) meets the subtree outside chi: " + query.format(leak)});
  }
  return report;
}

std::size_t hd_width(const Hypertree& tree) {
  std::size_t w = 0;
  for (const auto& n : tree.nodes) w = std::max(w, n.lambda.count());
  return w;
}

bool is_complete(const ConjunctiveQuery& query, const Hypertree& tree) {
  for (std::size_t a = 0; a < query.atom_count(); ++a) {
    bool strong = std::any_of(tree.nodes.begin(), tree.nodes.end(), [&](const auto& n) {
      return n.lambda.test(a) && query.vars_of(a).is_subset_of(n.chi);
    });
    if (!strong) return false;
  }
  return true;
}

Hypertree complete_hd(const ConjunctiveQuery& query, const Hypertree& tree) {
  if (!validate_hd(query, tree).valid())
    throw DecompositionError("complete_hd needs a valid hypertree decomposition");
  Hypertree out = tree;
  if (tree.nodes.empty()) return out;
  auto order = canonical_preorder(tree);
  int next_id = 0;
  for (const auto& n : tree.nodes) next_id = std::max(next_id, n.id + 1);
  for (std::size_t a = 0; a < query.atom_count(); ++a) {
    const VarSet& vars = query.vars_of(a);
    bool strong = std::any_of(out.nodes.begin(), out.nodes.end(), [&](const auto& n) {
      return n.lambda.test(a) && vars.is_subset_of(n.chi);
    });
    if (strong) continue;
    auto host = std::find_if(order.begin(), order.end(),
                             [&](std::size_t p) { return vars.is_subset_of(tree.nodes[p].chi); });
    AtomSet lambda = query.no_atoms();
    lambda.set(a);
    out.nodes.push_back({next_id++, tree.nodes[*host].id, vars, lambda});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

struct CanonicalOrder {
  std::vector<std::string> signature;
  std::vector<std::vector<std::size_t>> children;
};

std::string bits_key(const boost::dynamic_bitset<>& b) {
  std::string out;
  for (auto i = b.find_first(); i != boost::dynamic_bitset<>::npos; i = b.find_next(i))
    out += std::to_string(i) + ",";
  return out;
}

CanonicalOrder canonical_order(const Hypertree& tree, const TreeIndex& ix) {
  const auto& nodes = tree.nodes;
  CanonicalOrder co;
  co.signature.resize(nodes.size());
  co.children = ix.children;
  auto key = [&](std::size_t p) {
    return std::make_tuple(nodes[p].lambda.find_first(), nodes[p].chi.find_first(),
                           std::cref(co.signature[p]));
  };
  for (auto it = ix.preorder.rbegin(); it != ix.preorder.rend(); ++it) {
    std::size_t p = *it;
    auto& kids = co.children[p];
    std::sort(kids.begin(), kids.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::string sig = "[" + bits_key(nodes[p].lambda) + "|" + bits_key(nodes[p].chi);
    for (std::size_t c : kids) sig += co.signature[c];
    co.signature[p] = sig + "]";
  }
  return co;
}

}  // namespace

std::vector<std::size_t> canonical_preorder(const Hypertree& tree) {
  if (tree.nodes.empty()) return {};
  TreeIndex ix = index_tree(tree.nodes);
  CanonicalOrder co = canonical_order(tree, ix);
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{ix.root};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    out.push_back(v);
    const auto& kids = co.children[v];
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

Hypertree canonical(const Hypertree& tree) {
  Hypertree out;
  if (tree.nodes.empty()) return out;
  TreeIndex ix = index_tree(tree.nodes);
  auto order = canonical_preorder(tree);
  std::vector<int> new_id(tree.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_id[order[i]] = static_cast<int>(i);
  for (std::size_t p : order) {
    const auto& n = tree.nodes[p];
    std::optional<int> parent;
    if (ix.parent[p]) parent = new_id[*ix.parent[p]];
    out.nodes.push_back({new_id[p], parent, n.chi, n.lambda});
  }
  return out;
}

bool isomorphic(const Hypertree& a, const Hypertree& b) { return canonical(a) == canonical(b); }

Hypertree trivial_hd(const ConjunctiveQuery& query) {
  Hypertree h;
  if (query.atom_count() == 0) return h;
  h.nodes.push_back({0, std::nullopt, query.all_vars(), query.all_atoms()});
  return h;
}

// ---------------------------------------------------------------------------
// Normal form checks

NormalFormReport validate_nf(const ConjunctiveQuery& query, const Hypertree& tree) {
  if (!validate_hd(query, tree).valid())
    throw DecompositionError("validate_nf needs a valid hypertree decomposition");
  NormalFormReport out;
  if (tree.nodes.empty()) return out;
  TreeIndex ix = index_tree(tree.nodes);
  const auto& nodes = tree.nodes;
  auto below = subtree_chi(tree, ix);
  out.treecomp.emplace(nodes[ix.root].id, query.all_vars());

  for (std::size_t s : ix.preorder) {
    if (!ix.parent[s]) continue;
    std::size_t r = *ix.parent[s];
    const VarSet& chi_r = nodes[r].chi;
    const VarSet& chi_s = nodes[s].chi;
    int sid = nodes[s].id;

    std::vector<VarSet> touching;
    for (auto& c : v_components(query, chi_r))
      if (c.members.intersects(below[s])) touching.push_back(std::move(c.members));
    bool cond1 = touching.size() == 1 && below[s] == (touching[0] | (chi_s & chi_r));
    if (!cond1) {
      out.report.violations.push_back(
          {"NF1", {sid},
           "chi(T_s) = " + query.format(below[s]) + " meets " + std::to_string(touching.size()) +
               " [parent]-component(s) without matching one exactly"});
    } else if (!chi_s.intersects(touching[0])) {
      out.report.violations.push_back(
          {"NF2", {sid}, "chi misses its component " + query.format(touching[0])});
    } else {
      out.treecomp.emplace(sid, touching[0]);
    }
    VarSet missing = (query.vars_of(nodes[s].lambda) & chi_r) - chi_s;
    if (missing.any()) {
      out.report.violations.push_back(
          {"NF3", {sid}, "var(lambda) shares " + query.format(missing) + " with the parent chi"});
      out.treecomp.erase(sid);
    }
  }
  return out;
}

VarSet treecomp(const ConjunctiveQuery& query, const Hypertree& tree, int vertex) {
  auto nf = validate_nf(query, tree);
  if (!nf.report.valid()) throw DecompositionError("decomposition is not in normal form");
  auto it = nf.treecomp.find(vertex);
  if (it == nf.treecomp.end()) throw DecompositionError("no vertex with id " + std::to_string(vertex));
  return it->second;
}

// ---------------------------------------------------------------------------
// Query decompositions

ValidationReport validate_qd(const ConjunctiveQuery& query, const QueryDecomposition& qd) {
  ValidationReport report;
  if (qd.nodes.empty()) {
    for (std::size_t a = 0; a < query.atom_count(); ++a)
      report.violations.push_back({"QD1", {}, "atom " + to_string(query.atom(a)) + " in no label"});
    return report;
  }
  TreeIndex ix = index_tree(qd.nodes);
  const auto& nodes = qd.nodes;
  for (const auto& n : nodes) check_sizes(query, n.vars, n.atoms, n.id);

  for (std::size_t a = 0; a < query.atom_count(); ++a) {
    std::vector<bool> marked(nodes.size());
    for (std::size_t p = 0; p < nodes.size(); ++p) marked[p] = nodes[p].atoms.test(a);
    auto tops = region_tops(ix, marked);
    if (tops.empty())
      report.violations.push_back({"QD1", {}, "atom " + to_string(query.atom(a)) + " in no label"});
    else if (tops.size() > 1)
      report.violations.push_back(
          {"QD2", ids_of(nodes, tops), "atom " + to_string(query.atom(a)) + " disconnected"});
  }

  std::vector<VarSet> reach;
  for (const auto& n : nodes) reach.push_back(n.vars | query.vars_of(n.atoms));
  for (std::size_t v = 0; v < query.variable_count(); ++v) {
    std::vector<bool> marked(nodes.size());
    for (std::size_t p = 0; p < nodes.size(); ++p) marked[p] = reach[p].test(v);
    auto tops = region_tops(ix, marked);
    if (tops.size() > 1)
      report.violations.push_back({"QD3", ids_of(nodes, tops),
                                   "variable " + query.variable_name(v) + " disconnected"});
  }
  return report;
}

Hypertree qd_to_hd(const ConjunctiveQuery& query, const QueryDecomposition& qd) {
  for (const auto& n : qd.nodes) {
    if (n.vars.any())
      throw DecompositionError("query decomposition is not pure: vertex " + std::to_string(n.id) +
                               " carries variables " + query.format(n.vars));
  }
  if (!validate_qd(query, qd).valid())
    throw DecompositionError("qd_to_hd needs a valid query decomposition");
  Hypertree h;
  for (const auto& n : qd.nodes) h.nodes.push_back({n.id, n.parent, query.vars_of(n.atoms), n.atoms});
  return h;
}

// ---------------------------------------------------------------------------
// Join trees

ValidationReport validate_jointree(const ConjunctiveQuery& query, const JoinTree& tree) {
  ValidationReport report;
  std::vector<int> seen(query.atom_count(), 0);
  for (const auto& n : tree.nodes) {
    if (n.atom >= query.atom_count()) throw DecompositionError("join tree names a missing atom");
    ++seen[n.atom];
  }
  for (std::size_t a = 0; a < query.atom_count(); ++a)
    if (seen[a] != 1)
      report.violations.push_back({"JT1", {}, "atom " + to_string(query.atom(a)) + " appears " +
                                                  std::to_string(seen[a]) + " times"});
  if (!report.valid() || tree.nodes.empty()) return report;

  std::vector<QueryDecompositionNode> shape;
  for (const auto& n : tree.nodes) {
    std::optional<int> parent;
    if (n.parent) parent = static_cast<int>(*n.parent);
    shape.push_back({static_cast<int>(n.atom), parent, query.no_atoms(), query.no_vars()});
  }
  TreeIndex ix = index_tree(shape);
  for (std::size_t v = 0; v < query.variable_count(); ++v) {
    std::vector<bool> marked(shape.size());
    for (std::size_t p = 0; p < shape.size(); ++p) marked[p] = query.vars_of(tree.nodes[p].atom).test(v);
    auto tops = region_tops(ix, marked);
    if (tops.size() > 1)
      report.violations.push_back({"JT2", ids_of(shape, tops),
                                   "variable " + query.variable_name(v) + " disconnected"});
  }
  return report;
}

Hypertree jointree_to_hd(const ConjunctiveQuery& query, const JoinTree& tree) {
  Hypertree h;
  for (const auto& n : tree.nodes) {
    AtomSet lambda = query.no_atoms();
    lambda.set(n.atom);
    std::optional<int> parent;
    if (n.parent) parent = static_cast<int>(*n.parent);
    h.nodes.push_back({static_cast<int>(n.atom), parent, query.vars_of(n.atom), lambda});
  }
  return h;
}

JoinTree hd_to_jointree(const ConjunctiveQuery& query, const Hypertree& tree) {
  if (hd_width(tree) > 1) throw DecompositionError("join tree conversion needs width 1");
  if (!validate_hd(query, tree).valid())
    throw DecompositionError("join tree conversion needs a valid hypertree decomposition");
  if (!is_complete(query, tree))
    throw DecompositionError("join tree conversion needs a complete decomposition");
  JoinTree jt;
  if (tree.nodes.empty()) return jt;

  const auto& nodes = tree.nodes;
  const std::size_t n = nodes.size();
  TreeIndex ix = index_tree(nodes);
  auto order = canonical_preorder(tree);

  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t p = 0; p < n; ++p)
    if (ix.parent[p]) {
      adj[p].insert(*ix.parent[p]);
      adj[*ix.parent[p]].insert(p);
    }

  std::vector<std::optional<std::size_t>> keeper(query.atom_count());
  for (std::size_t p : order) {
    auto a = nodes[p].lambda.find_first();
    if (a == AtomSet::npos || keeper[a]) continue;
    if (nodes[p].chi == query.vars_of(a)) keeper[a] = p;
  }

  // Removing p splits the tree; every piece not containing `target` is
  // re-hung on target.
  auto first_hop = [&](std::size_t from, std::size_t to) {
    std::vector<std::optional<std::size_t>> prev(n);
    std::vector<bool> seen(n);
    std::vector<std::size_t> queue{to};
    seen[to] = true;
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (std::size_t w : adj[queue[i]])
        if (!seen[w]) {
          seen[w] = true;
          prev[w] = queue[i];
          queue.push_back(w);
        }
    return *prev[from];
  };

  std::vector<std::size_t> replaced_by(n);
  std::vector<bool> alive(n, true);
  for (std::size_t p = 0; p < n; ++p) replaced_by[p] = p;
  for (std::size_t p : order) {
    auto a = nodes[p].lambda.find_first();
    std::optional<std::size_t> target;
    if (a != AtomSet::npos) {
      if (*keeper[a] == p) continue;
      target = *keeper[a];
    } else if (!adj[p].empty()) {
      target = *std::min_element(adj[p].begin(), adj[p].end(), [&](std::size_t x, std::size_t y) {
        return std::find(order.begin(), order.end(), x) < std::find(order.begin(), order.end(), y);
      });
    }
    alive[p] = false;
    if (!target) continue;
    std::size_t hop = adj[p].count(*target) ? *target : first_hop(p, *target);
    for (std::size_t w : adj[p]) {
      adj[w].erase(p);
      if (w != hop) {
        adj[w].insert(*target);
        adj[*target].insert(w);
      }
    }
    adj[p].clear();
    replaced_by[p] = *target;
  }

  std::size_t root = ix.root;
  while (!alive[root]) root = replaced_by[root];

  std::vector<std::optional<std::size_t>> parent(n);
  std::vector<bool> seen(n);
  std::vector<std::size_t> queue{root};
  seen[root] = true;
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (std::size_t w : adj[queue[i]])
      if (!seen[w]) {
        seen[w] = true;
        parent[w] = queue[i];
        queue.push_back(w);
      }
  for (std::size_t a = 0; a < query.atom_count(); ++a) {
    std::size_t p = *keeper[a];
    std::optional<std::size_t> parent_atom;
    if (parent[p]) parent_atom = nodes[*parent[p]].lambda.find_first();
    jt.nodes.push_back({a, parent_atom});
  }
  return jt;
}

}  // namespace hypertree
