#include "hypertree/hardness.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace hypertree {

namespace {

using Partition = ThreePartitionSystem::Partition;

bool shares_class(const Partition& a, const Partition& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x == y) return true;
  return false;
}

// Class-disjoint 3-partitions of {0..n-1}, taken greedily in lexicographic
// order of their restricted growth strings.
std::vector<Partition> seed_partitions(int n, std::size_t m) {
  std::vector<Partition> chosen;
  std::vector<int> rgs(n, 0);
  auto visit = [&]() {
    Partition p;
    for (int e = 0; e < n; ++e) p[rgs[e]].push_back(e);
    for (const auto& q : chosen)
      if (shares_class(p, q)) return;
    chosen.push_back(std::move(p));
  };
  auto fill = [&](auto&& self, int pos, int used) -> void {
    if (chosen.size() >= m) return;
    if (n - pos < 3 - used) return;
    if (pos == n) {
      visit();
      return;
    }
    for (int b = 0; b <= std::min(used, 2); ++b) {
      rgs[pos] = b;
      self(self, pos + 1, std::max(used, b + 1));
    }
  };
  fill(fill, 0, 0);
  return chosen;
}

std::size_t least_class(const Partition& p, const std::vector<bool>& excluded) {
  std::size_t best = 3;
  for (std::size_t c = 0; c < 3; ++c) {
    if (excluded[c]) continue;
    if (best == 3 || p[c].front() < p[best].front()) best = c;
  }
  return best;
}

bool valid_identifier(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
  });
}

}  // namespace

ThreePartitionSystem gen_strict_3ps(std::size_t m, std::size_t k) {
  if (m == 0 || k == 0) throw std::invalid_argument("3PS parameters m and k must be positive");
  int n = static_cast<int>(std::max<std::size_t>(2 * m, 3));
  ThreePartitionSystem sys;
  sys.partitions = seed_partitions(n, m);
  if (sys.partitions.size() < m)
    throw std::invalid_argument("only " + std::to_string(sys.partitions.size()) +
                                " class-disjoint 3-partitions exist on the seed set; m = " +
                                std::to_string(m) + " is infeasible");
  for (int e = 0; e < n; ++e) sys.base.push_back(e);

  const std::size_t classes = 3 * m;
  auto cls = [&](std::size_t c) -> ThreePartitionSystem::Class& { return sys.partitions[c / 3][c % 3]; };
  int next = n;
  for (std::size_t i = 0; i < classes; ++i)
    for (std::size_t j = i; j < classes; ++j)
      for (std::size_t l = j; l < classes; ++l) {
        bool is_sigma = i != j && j != l && i / 3 == j / 3 && j / 3 == l / 3;
        if (is_sigma) continue;
        std::vector<bool> in_union(next, false);
        for (std::size_t c : {i, j, l})
          for (int e : cls(c)) in_union[e] = true;
        if (!std::all_of(in_union.begin(), in_union.end(), [](bool b) { return b; })) continue;
        int fresh = next++;
        sys.base.push_back(fresh);
        for (std::size_t p = 0; p < m; ++p) {
          std::vector<bool> excluded(3, false);
          for (std::size_t c : {i, j, l})
            if (c / 3 == p) excluded[c % 3] = true;
          cls(3 * p + least_class(sys.partitions[p], excluded)).push_back(fresh);
        }
      }

  for (std::size_t slot = 0; slot < 3; ++slot)
    for (std::size_t x = 0; x < k; ++x) {
      int fresh = next++;
      sys.base.push_back(fresh);
      for (auto& p : sys.partitions) p[slot].push_back(fresh);
    }
  return sys;
}

bool verify_strict_3ps(const ThreePartitionSystem& system) {
  std::set<int> base(system.base.begin(), system.base.end());
  if (base.size() != system.base.size() || system.partitions.empty()) return false;

  std::vector<std::set<int>> classes;
  std::vector<std::size_t> owner;
  for (std::size_t p = 0; p < system.partitions.size(); ++p) {
    std::set<int> seen;
    std::size_t total = 0;
    for (const auto& c : system.partitions[p]) {
      if (c.empty()) return false;
      std::set<int> s(c.begin(), c.end());
      if (s.size() != c.size()) return false;
      total += s.size();
      seen.insert(s.begin(), s.end());
      if (std::find(classes.begin(), classes.end(), s) != classes.end()) return false;
      classes.push_back(std::move(s));
      owner.push_back(p);
    }
    if (seen != base || total != base.size()) return false;
  }

  for (std::size_t i = 0; i < classes.size(); ++i)
    for (std::size_t j = i; j < classes.size(); ++j)
      for (std::size_t l = j; l < classes.size(); ++l) {
        std::set<int> u = classes[i];
        u.insert(classes[j].begin(), classes[j].end());
        u.insert(classes[l].begin(), classes[l].end());
        if (u.size() < base.size()) continue;
        bool is_sigma = i != j && j != l && i != l && owner[i] == owner[j] && owner[j] == owner[l];
        if (!is_sigma) return false;
      }
  return true;
}

std::string to_string(const ThreePartitionSystem& system) {
  std::ostringstream out;
  out << "base";
  for (int e : system.base) out << ' ' << e;
  out << '\n';
  for (const auto& p : system.partitions) {
    out << "partition";
    for (std::size_t c = 0; c < 3; ++c) {
      if (c) out << " |";
      for (int e : p[c]) out << ' ' << e;
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Exact cover by 3-sets

void check_x3c(const X3CInstance& instance) {
  if (instance.ground.empty() || instance.ground.size() % 3 != 0)
    throw X3CError("ground set size must be a positive multiple of 3");
  std::set<std::string> names;
  for (const auto& g : instance.ground) {
    if (!valid_identifier(g)) throw X3CError("bad element name '" + g + "'");
    if (!names.insert(g).second) throw X3CError("duplicate element " + g);
  }
  if (instance.sets.empty()) throw X3CError("the collection of 3-sets is empty");
  for (const auto& d : instance.sets) {
    for (std::size_t x : d)
      if (x >= instance.ground.size()) throw X3CError("3-set references a missing element");
    if (!(d[0] < d[1] && d[1] < d[2])) throw X3CError("3-set elements must be distinct");
  }
}

X3CInstance parse_x3c(std::string_view text) {
  std::vector<std::vector<std::string>> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto pct = line.find('%'); pct != std::string::npos) line.erase(pct);
    std::istringstream words(line);
    std::vector<std::string> row;
    for (std::string w; words >> w;) row.push_back(w);
    if (!row.empty()) lines.push_back(std::move(row));
  }
  if (lines.size() < 2 || lines[0].size() != 2) throw X3CError("expected a header line 's m'");
  std::size_t s = 0, m = 0;
  try {
    s = std::stoul(lines[0][0]);
    m = std::stoul(lines[0][1]);
  } catch (const std::exception&) {
    throw X3CError("header must hold two integers");
  }
  if (s == 0 || m == 0) throw X3CError("s and m must be positive");
  X3CInstance out;
  out.ground = lines[1];
  if (out.ground.size() != 3 * s) throw X3CError("ground set must have 3s elements");
  if (lines.size() != 2 + m) throw X3CError("expected " + std::to_string(m) + " 3-set lines");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < out.ground.size(); ++i) index[out.ground[i]] = i;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].size() != 3) throw X3CError("each 3-set line must name three elements");
    std::array<std::size_t, 3> d{};
    for (std::size_t j = 0; j < 3; ++j) {
      auto it = index.find(lines[i][j]);
      if (it == index.end()) throw X3CError("unknown element " + lines[i][j]);
      d[j] = it->second;
    }
    std::sort(d.begin(), d.end());
    out.sets.push_back(d);
  }
  check_x3c(out);
  return out;
}

std::string to_string(const X3CInstance& instance) {
  std::ostringstream out;
  out << instance.s() << ' ' << instance.sets.size() << '\n';
  for (std::size_t i = 0; i < instance.ground.size(); ++i) out << (i ? " " : "") << instance.ground[i];
  out << '\n';
  for (const auto& d : instance.sets)
    out << instance.ground[d[0]] << ' ' << instance.ground[d[1]] << ' ' << instance.ground[d[2]] << '\n';
  return out.str();
}

namespace {

struct Layout {
  std::size_t s, m;
  std::size_t block(std::size_t level, std::size_t i) const { return 8 * level + i; }
  std::size_t link(std::size_t level) const { return 8 * (s + 1) + level - 1; }
  std::size_t omega(std::size_t set, std::size_t slot) const { return 8 * (s + 1) + s + 3 * set + slot; }
  std::size_t size() const { return 8 * (s + 1) + s + 3 * m; }
};

std::string base_var(int e) { return "B" + std::to_string(e); }

std::string grid_var(std::size_t level, std::size_t i, std::size_t j) {
  return "V" + std::to_string(level) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

}  // namespace

ConjunctiveQuery x3c_to_query(const X3CInstance& instance) {
  check_x3c(instance);
  const std::size_t s = instance.s(), m = instance.sets.size();
  ThreePartitionSystem sigma = gen_strict_3ps(m + 1, 2);
  const auto& s0 = sigma.partitions[0];

  auto vars = [](const std::vector<int>& elements) {
    std::vector<Term> out;
    for (int e : elements) out.push_back(Term::variable(base_var(e)));
    return out;
  };
  auto pi = [](std::size_t level, std::size_t i) {
    std::vector<Term> out;
    for (std::size_t k = 1; k < i; ++k) out.push_back(Term::variable(grid_var(level, k, i)));
    for (std::size_t k = i + 1; k <= 8; ++k) out.push_back(Term::variable(grid_var(level, i, k)));
    return out;
  };
  auto make = [](std::string rel, std::initializer_list<std::vector<Term>> parts) {
    Atom a{std::move(rel), {}, 0};
    for (const auto& p : parts) a.args.insert(a.args.end(), p.begin(), p.end());
    return a;
  };

  std::vector<Term> sa1 = vars({s0[0].front()});
  std::vector<Term> sa2 = vars(std::vector<int>(s0[0].begin() + 1, s0[0].end()));
  std::vector<Term> sb = vars(s0[1]);
  std::vector<Term> sc = vars(s0[2]);

  std::vector<Atom> body;
  for (std::size_t l = 0; l <= s; ++l) {
    std::vector<Term> z{Term::variable("Z" + std::to_string(l))};
    std::vector<Term> y{Term::variable("Y" + std::to_string(l))};
    body.push_back(make("q", {pi(l, 1), sa1, z}));
    body.push_back(make("p_a", {pi(l, 2), sa2}));
    body.push_back(make("p_b", {pi(l, 3), sb}));
    body.push_back(make("p_c", {pi(l, 4), sc}));
    body.push_back(make("q", {pi(l, 5), sa1, y}));
    body.push_back(make("p_a", {pi(l, 6), sa2}));
    body.push_back(make("p_b", {pi(l, 7), sb}));
    body.push_back(make("p_c", {pi(l, 8), sc}));
  }
  for (std::size_t l = 1; l <= s; ++l)
    body.push_back(make("link", {{Term::variable("Y" + std::to_string(l - 1))},
                                 {Term::variable("Z" + std::to_string(l))}}));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t slot = 0; slot < 3; ++slot) {
      std::vector<Term> x{Term::variable("X_" + instance.ground[instance.sets[i][slot]])};
      body.push_back(make("s", {x, vars(sigma.partitions[i + 1][slot])}));
    }
  return ConjunctiveQuery(Atom{"ans", {}, 0}, std::move(body));
}

QueryDecomposition witness_qd_from_cover(const X3CInstance& instance, const std::vector<std::size_t>& cover) {
  check_x3c(instance);
  const std::size_t s = instance.s(), m = instance.sets.size();
  if (cover.size() != s) throw X3CError("a cover must use exactly s sets");
  std::vector<int> covered(instance.ground.size(), 0);
  for (std::size_t d : cover) {
    if (d >= m) throw X3CError("cover references a missing 3-set");
    for (std::size_t x : instance.sets[d]) ++covered[x];
  }
  if (std::any_of(covered.begin(), covered.end(), [](int c) { return c != 1; }))
    throw X3CError("the chosen sets do not partition the ground set");

  Layout layout{s, m};
  const std::size_t n = layout.size();
  QueryDecomposition qd;
  auto add = [&](std::vector<std::size_t> atoms, std::optional<int> parent) {
    AtomSet label(n);
    for (std::size_t a : atoms) label.set(a);
    int id = static_cast<int>(qd.nodes.size());
    qd.nodes.push_back({id, parent, label, VarSet()});
    return id;
  };

  int va = add({layout.block(0, 0), layout.block(0, 1), layout.block(0, 2), layout.block(0, 3)}, std::nullopt);
  int vb = add({layout.block(0, 4), layout.block(0, 5), layout.block(0, 6), layout.block(0, 7)}, va);
  for (std::size_t l = 1; l <= s; ++l) {
    std::size_t d = cover[l - 1];
    int vc = add({layout.link(l), layout.omega(d, 0), layout.omega(d, 1), layout.omega(d, 2)}, vb);
    for (std::size_t i = 0; i < m; ++i) {
      if (i == d) continue;
      for (std::size_t slot = 0; slot < 3; ++slot) {
        std::size_t x = instance.sets[i][slot];
        const auto& mine = instance.sets[d];
        if (std::find(mine.begin(), mine.end(), x) != mine.end()) add({layout.omega(i, slot)}, vc);
      }
    }
    va = add({layout.block(l, 0), layout.block(l, 1), layout.block(l, 2), layout.block(l, 3)}, vc);
    vb = add({layout.block(l, 4), layout.block(l, 5), layout.block(l, 6), layout.block(l, 7)}, va);
  }

  auto query = x3c_to_query(instance);
  for (auto& node : qd.nodes) node.vars = query.no_vars();
  return qd;
}

std::optional<std::vector<std::size_t>> find_exact_cover(const X3CInstance& instance) {
  check_x3c(instance);
  std::vector<bool> used(instance.ground.size(), false);
  std::vector<std::size_t> chosen;
  auto search = [&](auto&& self) -> bool {
    auto first = std::find(used.begin(), used.end(), false);
    if (first == used.end()) return true;
    std::size_t x = static_cast<std::size_t>(first - used.begin());
    for (std::size_t i = 0; i < instance.sets.size(); ++i) {
      const auto& d = instance.sets[i];
      if (std::find(d.begin(), d.end(), x) == d.end()) continue;
      if (used[d[0]] || used[d[1]] || used[d[2]]) continue;
      for (std::size_t e : d) used[e] = true;
      chosen.push_back(i);
      if (self(self)) return true;
      chosen.pop_back();
      for (std::size_t e : d) used[e] = false;
    }
    return false;
  };
  if (!search(search)) return std::nullopt;
  return chosen;
}

}  // namespace hypertree
