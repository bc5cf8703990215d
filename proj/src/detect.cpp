#include "hypertree/detect.hpp"

#include "kdecomp.hpp"

#include <algorithm>

namespace hypertree {

namespace detail {

std::vector<std::vector<std::size_t>> k_vertices(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> current;
  auto extend = [&](auto&& self, std::size_t from) -> void {
    for (std::size_t i = from; i < n; ++i) {
      current.push_back(i);
      out.push_back(current);
      if (current.size() < k) self(self, i + 1);
      current.pop_back();
    }
  };
  if (k > 0) extend(extend, 0);
  return out;
}

KDecompProgram::KDecompProgram(const ConjunctiveQuery& query, std::size_t k) : query_(query) {
  for (const auto& tuple : k_vertices(query.atom_count(), k)) {
    AtomSet a = query.no_atoms();
    for (std::size_t i : tuple) a.set(i);
    vars_.push_back(query.vars_of(a));
    atoms_.push_back(std::move(a));
  }
  components_.resize(atoms_.size());
}

VarSet KDecompProgram::needed(const VarSet& component, const VarSet& separator) const {
  VarSet out = query_.no_vars();
  for (std::size_t a = 0; a < query_.atom_count(); ++a)
    if (query_.vars_of(a).intersects(component)) out |= query_.vars_of(a) & separator;
  return out;
}

const std::vector<Component>& KDecompProgram::components(std::size_t s) const {
  if (!components_[s]) components_[s] = v_components(query_, vars_[s]);
  return *components_[s];
}

Hypertree KDecompProgram::witness(const std::map<PairKey, std::size_t>& choice) const {
  Hypertree out;
  auto build = [&](auto&& self, PairKey key, const VarSet& component, const VarSet& parent_chi,
                   std::optional<int> parent) -> void {
    std::size_t s = choice.at(key);
    int id = static_cast<int>(out.nodes.size());
    VarSet chi = vars_[s] & (parent_chi | component);
    out.nodes.push_back({id, parent, chi, atoms_[s]});
    for (const auto& c : components(s))
      if (c.members.is_subset_of(component))
        self(self, {static_cast<long>(s), c.representative}, c.members, chi, id);
  };
  build(build, root_key(), query_.all_vars(), query_.no_vars(), std::nullopt);
  return out;
}

std::optional<Hypertree> degenerate_decomposition(const ConjunctiveQuery& query) {
  if (query.atom_count() == 0) return Hypertree{};
  if (query.variable_count() > 0) return std::nullopt;
  AtomSet lambda = query.no_atoms();
  lambda.set(0);
  Hypertree h;
  h.nodes.push_back({0, std::nullopt, query.no_vars(), lambda});
  return h;
}

}  // namespace detail

namespace {

class Recursion {
 public:
  Recursion(const ConjunctiveQuery& query, std::size_t k) : program_(query, k) {}

  std::optional<Hypertree> run() {
    const auto& q = program_.query();
    if (!decomposable(program_.root_key(), q.all_vars(), q.no_vars())) return std::nullopt;
    return program_.witness(choice_);
  }

 private:
  bool decomposable(detail::PairKey key, const VarSet& component, const VarSet& separator) {
    if (auto it = status_.find(key); it != status_.end()) return it->second;
    VarSet needed = program_.needed(component, separator);
    bool found = false;
    for (std::size_t s = 0; s < program_.size() && !found; ++s) {
      if (!program_.meets(s, needed, component)) continue;
      found = true;
      for (const auto& c : program_.components(s)) {
        if (!c.members.is_subset_of(component)) continue;
        if (!decomposable({static_cast<long>(s), c.representative}, c.members, program_.vars(s))) {
          found = false;
          break;
        }
      }
      if (found) choice_[key] = s;
    }
    status_[key] = found;
    return found;
  }

  detail::KDecompProgram program_;
  std::map<detail::PairKey, bool> status_;
  std::map<detail::PairKey, std::size_t> choice_;
};

}  // namespace

std::optional<Hypertree> decompose(const ConjunctiveQuery& query, std::size_t k) {
  if (k < 1) throw std::invalid_argument("width bound k must be at least 1");
  if (query.atom_count() == 0 || query.variable_count() == 0)
    return detail::degenerate_decomposition(query);
  return Recursion(query, k).run();
}

std::optional<WidthResult> hypertree_width(const ConjunctiveQuery& query, std::size_t k_max) {
  for (std::size_t k = 1; k <= k_max; ++k)
    if (auto h = decompose(query, k)) return WidthResult{k, std::move(*h)};
  return std::nullopt;
}

std::optional<JoinTree> is_acyclic(const ConjunctiveQuery& query) {
  auto h = decompose(query, 1);
  if (!h) return std::nullopt;
  return hd_to_jointree(query, complete_hd(query, *h));
}

bool gyo_acyclic(const ConjunctiveQuery& query) {
  std::vector<VarSet> edges;
  for (std::size_t a = 0; a < query.atom_count(); ++a) edges.push_back(query.vars_of(a));
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < query.variable_count(); ++v) {
      std::size_t holders = 0;
      for (const auto& e : edges) holders += e.test(v);
      if (holders == 1)
        for (auto& e : edges)
          if (e.test(v)) {
            e.reset(v);
            changed = true;
          }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      bool ear = edges[i].none();
      for (std::size_t j = 0; j < edges.size() && !ear; ++j)
        ear = j != i && edges[i].is_subset_of(edges[j]);
      if (ear) {
        edges.erase(edges.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return edges.empty();
}

}  // namespace hypertree
