#include "hypertree/detect.hpp"

#include <map>
#include <numeric>

namespace hypertree {

namespace {

// Elements are atoms 0..n-1 followed by variables n..n+v-1. A vertex labelled
// S holds ext(S) = S + var(S). solve(E, R) asks for a subtree under a vertex
// labelled R holding exactly the elements E outside ext(R).
using Elements = boost::dynamic_bitset<>;

class QueryWidthSearch {
 public:
  QueryWidthSearch(const ConjunctiveQuery& query, std::size_t k, std::size_t budget)
      : query_(query), n_(query.atom_count()), budget_(budget) {
    for (const auto& tuple : detail::k_vertices(n_, k)) {
      AtomSet atoms = query.no_atoms();
      for (std::size_t a : tuple) atoms.set(a);
      VarSet vars = query.vars_of(atoms);
      labels_.push_back(atoms);
      vars_.push_back(vars);
      ext_.push_back(extend(atoms, vars));
    }
  }

  std::optional<QueryDecomposition> run() {
    Elements all(n_ + query_.variable_count());
    all.set();
    if (!solve(all, kRoot)) return std::nullopt;
    QueryDecomposition qd;
    emit(all, kRoot, std::nullopt, qd);
    return qd;
  }

 private:
  static constexpr long kRoot = -1;

  struct Entry {
    bool ok = false;
    std::size_t label = 0;
    std::vector<Elements> blocks;
  };

  Elements extend(const AtomSet& atoms, const VarSet& vars) const {
    Elements e(n_ + query_.variable_count());
    for (auto a = atoms.find_first(); a != AtomSet::npos; a = atoms.find_next(a)) e.set(a);
    for (auto v = vars.find_first(); v != VarSet::npos; v = vars.find_next(v)) e.set(n_ + v);
    return e;
  }

  void step() {
    if (++steps_ > budget_) throw InconclusiveError("query width search exceeded its step budget");
  }

  // Atoms glued to their variables inside `rest`.
  std::vector<Elements> groups(const Elements& rest) const {
    const std::size_t size = rest.size();
    std::vector<std::size_t> parent(size);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t a = 0; a < n_; ++a) {
      if (!rest.test(a)) continue;
      const VarSet& vs = query_.vars_of(a);
      for (auto v = vs.find_first(); v != VarSet::npos; v = vs.find_next(v))
        if (rest.test(n_ + v)) parent[find(n_ + v)] = find(a);
    }
    std::map<std::size_t, Elements> by_root;
    for (auto e = rest.find_first(); e != Elements::npos; e = rest.find_next(e)) {
      auto [it, fresh] = by_root.try_emplace(find(e), Elements(size));
      it->second.set(e);
    }
    std::vector<Elements> out;
    for (auto& [root, g] : by_root) out.push_back(std::move(g));
    std::sort(out.begin(), out.end(),
              [](const Elements& a, const Elements& b) { return a.find_first() < b.find_first(); });
    return out;
  }

  // Splits the groups into blocks that each hang below `label`.
  bool distribute(std::vector<Elements> remaining, std::size_t label, std::vector<Elements>& blocks) {
    if (remaining.empty()) return true;
    Elements first = remaining.front();
    std::vector<Elements> others(remaining.begin() + 1, remaining.end());
    const std::size_t m = others.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      step();
      Elements block = first;
      std::vector<Elements> rest;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask >> i & 1)
          block |= others[i];
        else
          rest.push_back(others[i]);
      }
      if (!solve(block, static_cast<long>(label))) continue;
      blocks.push_back(block);
      if (distribute(std::move(rest), label, blocks)) return true;
      blocks.pop_back();
    }
    return false;
  }

  bool solve(const Elements& elements, long parent) {
    auto key = std::make_pair(elements, parent);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.ok;
    Elements parent_ext(elements.size());
    VarSet parent_vars = query_.no_vars();
    if (parent != kRoot) {
      parent_ext = ext_[parent];
      parent_vars = vars_[parent];
    }
    Elements allowed = elements | parent_ext;
    Entry entry;
    for (std::size_t s = 0; s < labels_.size() && !entry.ok; ++s) {
      step();
      if (!ext_[s].is_subset_of(allowed) || !ext_[s].intersects(elements)) continue;
      bool separates = true;
      for (std::size_t a = 0; a < n_ && separates; ++a)
        if (elements.test(a) && !labels_[s].test(a))
          separates = (query_.vars_of(a) & parent_vars).is_subset_of(vars_[s]);
      if (!separates) continue;
      std::vector<Elements> blocks;
      if (distribute(groups(elements - ext_[s]), s, blocks)) {
        entry.ok = true;
        entry.label = s;
        entry.blocks = std::move(blocks);
      }
    }
    bool ok = entry.ok;
    memo_.emplace(std::move(key), std::move(entry));
    return ok;
  }

  void emit(const Elements& elements, long parent, std::optional<int> parent_id,
            QueryDecomposition& qd) {
    const Entry& entry = memo_.at({elements, parent});
    int id = static_cast<int>(qd.nodes.size());
    qd.nodes.push_back({id, parent_id, labels_[entry.label], query_.no_vars()});
    for (const auto& block : entry.blocks) emit(block, static_cast<long>(entry.label), id, qd);
  }

  const ConjunctiveQuery& query_;
  std::size_t n_;
  std::size_t budget_;
  std::size_t steps_ = 0;
  std::vector<AtomSet> labels_;
  std::vector<VarSet> vars_;
  std::vector<Elements> ext_;
  std::map<std::pair<Elements, long>, Entry> memo_;
};

}  // namespace

std::optional<QueryDecomposition> brute_force_qw(const ConjunctiveQuery& query, std::size_t k,
                                                 std::size_t budget) {
  if (k < 1) throw std::invalid_argument("width bound k must be at least 1");
  if (query.atom_count() == 0) return QueryDecomposition{};
  return QueryWidthSearch(query, k, budget).run();
}

}  // namespace hypertree
