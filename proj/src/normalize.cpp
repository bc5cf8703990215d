#include "hypertree/components.hpp"
#include "hypertree/decomposition.hpp"

#include <algorithm>
#include <stdexcept>

namespace hypertree {

namespace {

struct Vertex {
  VarSet chi;
  AtomSet lambda;
  int parent = -1;
  std::vector<int> children;
  bool alive = true;
};

class Workspace {
 public:
  Workspace(const ConjunctiveQuery& query, const Hypertree& tree) : query_(query) {
    auto ix = detail::index_tree(tree.nodes);
    for (const auto& n : tree.nodes) vs_.push_back({n.chi, n.lambda, -1, {}, true});
    for (std::size_t p = 0; p < tree.nodes.size(); ++p) {
      if (ix.parent[p]) vs_[p].parent = static_cast<int>(*ix.parent[p]);
      for (std::size_t c : ix.children[p]) vs_[p].children.push_back(static_cast<int>(c));
    }
    root_ = static_cast<int>(ix.root);
  }

  // Top-down pass; returns true when anything changed.
  bool sweep() {
    bool any = false;
    std::vector<int> queue{root_};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int r = queue[i];
      if (!vs_[r].alive) continue;
      while (fix_children(r)) {
        any = true;
        if (++steps_ > limit()) throw std::logic_error("normalization did not converge");
      }
      for (int c : vs_[r].children) queue.push_back(c);
    }
    return any;
  }

  Hypertree result() const {
    Hypertree out;
    std::vector<std::pair<int, int>> stack{{root_, -1}};
    while (!stack.empty()) {
      auto [v, parent] = stack.back();
      stack.pop_back();
      int id = static_cast<int>(out.nodes.size());
      std::optional<int> p;
      if (parent >= 0) p = parent;
      out.nodes.push_back({id, p, vs_[v].chi, vs_[v].lambda});
      const auto& kids = vs_[v].children;
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back({*it, id});
    }
    return out;
  }

 private:
  std::size_t limit() const { return 64 + 16 * vs_.size() * (query_.variable_count() + 1); }

  std::vector<int> subtree(int s) const {
    std::vector<int> out{s};
    for (std::size_t i = 0; i < out.size(); ++i)
      for (int c : vs_[out[i]].children) out.push_back(c);
    return out;
  }

  VarSet chi_below(int s) const {
    VarSet out = query_.no_vars();
    for (int v : subtree(s)) out |= vs_[v].chi;
    return out;
  }

  void kill(int s) {
    for (int v : subtree(s)) vs_[v].alive = false;
  }

  void replace_child(int r, int s, const std::vector<int>& with) {
    auto& kids = vs_[r].children;
    auto it = std::find(kids.begin(), kids.end(), s);
    it = kids.erase(it);
    kids.insert(it, with.begin(), with.end());
    for (int w : with) vs_[w].parent = r;
  }

  bool fix_children(int r) {
    const VarSet chi_r = vs_[r].chi;
    auto comps = v_components(query_, chi_r);
    for (int s : std::vector<int>(vs_[r].children)) {
      VarSet below = chi_below(s);
      std::vector<VarSet> touching;
      for (const auto& c : comps)
        if (c.members.intersects(below)) touching.push_back(c.members);

      if (touching.size() == 1 && below == (touching[0] | (vs_[s].chi & chi_r))) {
        if (vs_[s].chi.is_subset_of(chi_r)) {
          std::vector<int> grandchildren = vs_[s].children;
          vs_[s].alive = false;
          vs_[s].children.clear();
          replace_child(r, s, grandchildren);
          return true;
        }
        VarSet missing = (query_.vars_of(vs_[s].lambda) & chi_r) - vs_[s].chi;
        if (missing.any()) {
          vs_[s].chi |= missing;
          return true;
        }
        continue;
      }

      std::vector<int> tops;
      auto members = subtree(s);
      for (const VarSet& c : touching) {
        VarSet keep = c | chi_r;
        std::vector<int> copy_of(vs_.size(), -1);
        for (int v : members) {
          if (!vs_[v].chi.intersects(c)) continue;
          int fresh = static_cast<int>(vs_.size());
          Vertex n{vs_[v].chi & keep, vs_[v].lambda, -1, {}, true};
          int parent = v == s ? -1 : copy_of[vs_[v].parent];
          vs_.push_back(std::move(n));
          copy_of.push_back(-1);
          copy_of[v] = fresh;
          if (parent >= 0) {
            vs_[fresh].parent = parent;
            vs_[parent].children.push_back(fresh);
          } else {
            tops.push_back(fresh);
          }
        }
      }
      kill(s);
      replace_child(r, s, tops);
      return true;
    }
    return false;
  }

  const ConjunctiveQuery& query_;
  std::vector<Vertex> vs_;
  int root_ = 0;
  std::size_t steps_ = 0;
};

}  // namespace

Hypertree normalize_hd(const ConjunctiveQuery& query, const Hypertree& tree) {
  if (!validate_hd(query, tree).valid())
    throw DecompositionError("normalize_hd needs a valid hypertree decomposition");
  if (tree.nodes.empty()) return tree;
  Workspace ws(query, tree);
  for (int round = 0; ws.sweep(); ++round)
    if (round > 64) throw std::logic_error("normalization did not converge");
  return ws.result();
}

}  // namespace hypertree
