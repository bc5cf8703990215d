#include "support.hpp"

#include "hypertree/components.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef HYPERTREE_FIXTURE_DIR
#error "HYPERTREE_FIXTURE_DIR must be defined"
#endif

namespace support {

std::string fixture_path(const std::string& name) { return std::string(HYPERTREE_FIXTURE_DIR) + "/" + name; }

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ConjunctiveQuery fixture_query(const std::string& name) { return parse_query(read_fixture(name)); }

ConjunctiveQuery random_query(std::mt19937& rng, const RandomShape& shape) {
  static const char* names[] = {"A", "B", "C", "D", "E", "F", "G", "H"};
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::size_t nvars = pick(shape.min_vars, shape.max_vars);
  std::size_t natoms = pick(shape.min_atoms, shape.max_atoms);
  std::size_t arity[4];
  for (auto& a : arity) a = pick(shape.min_arity, shape.max_arity);
  std::bernoulli_distribution constant(shape.constant_rate);

  std::size_t cycle = 0;
  if (shape.plant_cycle && natoms >= 3 && nvars >= 3) cycle = pick(3, std::min(natoms, nvars));

  std::vector<Atom> body;
  std::set<std::string> used;
  for (std::size_t i = 0; i < natoms; ++i) {
    std::size_t r = pick(0, 3);
    Atom atom{"r" + std::to_string(r), {}, i};
    for (std::size_t j = 0; j < arity[r]; ++j) {
      if (i < cycle && j < 2) {
        std::string v = names[(i + j) % cycle];
        used.insert(v);
        atom.args.push_back(Term::variable(v));
      } else if (constant(rng)) {
        atom.args.push_back(Term::constant("c" + std::to_string(pick(0, 3))));
      } else {
        std::string v = names[pick(0, nvars - 1)];
        used.insert(v);
        atom.args.push_back(Term::variable(v));
      }
    }
    body.push_back(std::move(atom));
  }
  Atom head{"ans", {}, 0};
  if (shape.allow_head && !used.empty() && pick(0, 1) == 1) {
    std::vector<std::string> pool(used.begin(), used.end());
    std::size_t width = pick(1, std::min<std::size_t>(3, pool.size()));
    for (std::size_t i = 0; i < width; ++i) head.args.push_back(Term::variable(pool[pick(0, pool.size() - 1)]));
  }
  return ConjunctiveQuery(std::move(head), std::move(body));
}

Database random_database(std::mt19937& rng, const ConjunctiveQuery& query, std::size_t constants,
                         std::size_t max_facts) {
  Database db;
  std::vector<std::pair<std::string, std::size_t>> relations;
  for (const auto& atom : query.body()) {
    if (!db.arity(atom.relation)) relations.push_back({atom.relation, atom.args.size()});
    db.declare(atom.relation, atom.args.size());
  }
  std::size_t facts = std::uniform_int_distribution<std::size_t>(0, max_facts)(rng);
  std::uniform_int_distribution<std::size_t> rel(0, relations.size() - 1), val(0, constants - 1);
  for (std::size_t i = 0; i < facts; ++i) {
    const auto& [name, arity] = relations[rel(rng)];
    Database::Tuple t;
    for (std::size_t j = 0; j < arity; ++j) t.push_back("c" + std::to_string(val(rng)));
    db.add_fact(name, std::move(t));
  }
  return db;
}

std::vector<ConjunctiveQuery> corpus(std::size_t count) {
  std::vector<ConjunctiveQuery> out;
  for (const char* f : {"q1.query", "q2.query", "q3.query", "q4.query", "q5.query", "triangle.query"})
    out.push_back(fixture_query(f));
  std::mt19937 rng(20261015);
  RandomShape loose;
  loose.constant_rate = 0.1;
  loose.allow_head = true;
  RandomShape dense = loose;
  dense.min_atoms = 3;
  dense.min_vars = 3;
  dense.min_arity = 2;
  RandomShape cyclic = dense;
  cyclic.plant_cycle = true;
  const RandomShape* shapes[] = {&loose, &dense, &cyclic};
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_query(rng, *shapes[i % 3]));
  return out;
}

std::vector<VarSet> naive_components(const ConjunctiveQuery& query, const VarSet& separator) {
  const std::size_t n = query.variable_count();
  auto adjacent = [&](std::size_t x, std::size_t y) {
    for (std::size_t a = 0; a < query.atom_count(); ++a) {
      const VarSet& vs = query.vars_of(a);
      if (vs.test(x) && vs.test(y) && !separator.test(x) && !separator.test(y)) return true;
    }
    return false;
  };
  std::vector<VarSet> out;
  std::vector<bool> done(n, false);
  for (std::size_t x = 0; x < n; ++x) {
    if (done[x] || !adjacent(x, x)) continue;
    VarSet comp(n);
    std::vector<std::size_t> frontier{x};
    comp.set(x);
    while (!frontier.empty()) {
      std::size_t u = frontier.back();
      frontier.pop_back();
      for (std::size_t w = 0; w < n; ++w)
        if (!comp.test(w) && adjacent(u, w)) {
          comp.set(w);
          frontier.push_back(w);
        }
    }
    for (std::size_t w = 0; w < n; ++w)
      if (comp.test(w)) done[w] = true;
    out.push_back(comp);
  }
  return out;
}

bool naive_acyclic(std::vector<boost::dynamic_bitset<>> edges) {
  for (bool changed = true; changed;) {
    changed = false;
    if (edges.empty()) break;
    const std::size_t width = edges.front().size();
    for (std::size_t x = 0; x < width; ++x) {
      std::size_t count = 0;
      for (const auto& e : edges) count += e.test(x);
      if (count != 1) continue;
      for (auto& e : edges) e.reset(x);
      changed = true;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      bool drop = edges[i].none();
      for (std::size_t j = 0; j < edges.size() && !drop; ++j) drop = i != j && edges[i].is_subset_of(edges[j]);
      if (drop) {
        edges.erase(edges.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return edges.empty();
}

bool naive_qw_at_most(const ConjunctiveQuery& query, std::size_t k) {
  const std::size_t n = query.atom_count(), v = query.variable_count();
  if (n == 0) return true;
  std::vector<boost::dynamic_bitset<>> bags;
  std::vector<unsigned> masks;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
    boost::dynamic_bitset<> ext(n + v);
    for (std::size_t a = 0; a < n; ++a)
      if (mask >> a & 1) {
        ext.set(a);
        const VarSet& vs = query.vars_of(a);
        for (auto x = vs.find_first(); x != VarSet::npos; x = vs.find_next(x)) ext.set(n + x);
      }
    bags.push_back(ext);
    masks.push_back(mask);
  }
  if (bags.size() > 20) throw std::logic_error("too many labels for the naive query-width check");
  const unsigned all = (1u << n) - 1;
  for (unsigned long family = 1; family < (1ul << bags.size()); ++family) {
    unsigned covered = 0;
    std::vector<boost::dynamic_bitset<>> edges;
    for (std::size_t b = 0; b < bags.size(); ++b)
      if (family >> b & 1) {
        covered |= masks[b];
        edges.push_back(bags[b]);
      }
    if (covered == all && naive_acyclic(edges)) return true;
  }
  return false;
}

bool component_equivalence_holds(const ConjunctiveQuery& query, const Hypertree& tree) {
  auto nf = validate_nf(query, tree);
  if (!nf.report.valid()) return false;
  for (const auto& node : tree.nodes) {
    const VarSet& tc = nf.treecomp.at(node.id);
    auto inside = [&](const VarSet& sep) {
      std::vector<VarSet> out;
      for (const auto& c : v_components(query, sep))
        if (c.members.is_subset_of(tc)) out.push_back(c.members);
      return out;
    };
    if (inside(node.chi) != inside(query.vars_of(node.lambda))) return false;
  }
  return true;
}

X3CInstance random_positive_x3c(std::mt19937& rng) {
  std::size_t s = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
  X3CInstance out;
  for (std::size_t i = 0; i < 3 * s; ++i) out.ground.push_back("e" + std::to_string(i));
  std::vector<std::size_t> order(3 * s);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  auto sorted = [](std::array<std::size_t, 3> d) {
    std::sort(d.begin(), d.end());
    return d;
  };
  for (std::size_t i = 0; i < s; ++i) out.sets.push_back(sorted({order[3 * i], order[3 * i + 1], order[3 * i + 2]}));
  std::size_t extra = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
  for (std::size_t i = 0; i < extra; ++i) {
    std::shuffle(order.begin(), order.end(), rng);
    out.sets.push_back(sorted({order[0], order[1], order[2]}));
  }
  std::shuffle(out.sets.begin(), out.sets.end(), rng);
  return out;
}

std::vector<Mutation> single_deletions(const Hypertree& tree) {
  std::vector<Mutation> out;
  for (std::size_t p = 0; p < tree.nodes.size(); ++p) {
    const auto& node = tree.nodes[p];
    for (auto v = node.chi.find_first(); v != VarSet::npos; v = node.chi.find_next(v)) {
      Hypertree m = tree;
      m.nodes[p].chi.reset(v);
      out.push_back({"vertex " + std::to_string(node.id) + " chi -var#" + std::to_string(v), m});
    }
    for (auto a = node.lambda.find_first(); a != AtomSet::npos; a = node.lambda.find_next(a)) {
      Hypertree m = tree;
      m.nodes[p].lambda.reset(a);
      out.push_back({"vertex " + std::to_string(node.id) + " lambda -atom#" + std::to_string(a), m});
    }
  }
  return out;
}

std::vector<std::string> rejection(const ConjunctiveQuery& query, const Hypertree& original,
                                   const Hypertree& mutated) {
  std::set<std::string> conds;
  auto report = validate_hd(query, mutated);
  for (const auto& v : report.violations) conds.insert(v.condition);
  if (report.valid() && validate_nf(query, original).report.valid())
    for (const auto& v : validate_nf(query, mutated).report.violations) conds.insert(v.condition);
  if (hd_width(original) != hd_width(mutated)) conds.insert("WIDTH");
  return {conds.begin(), conds.end()};
}

}  // namespace support
