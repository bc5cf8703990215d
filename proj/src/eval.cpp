#include "hypertree/eval.hpp"

#include "hypertree/detect.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace hypertree {

namespace {

using Row = std::vector<int>;

struct RowHash {
  std::size_t operator()(const Row& r) const noexcept {
    std::size_t h = r.size();
    for (int x : r) h ^= std::hash<int>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

// Rows over sorted variable indices, duplicate free.
struct Relation {
  std::vector<std::size_t> vars;
  std::vector<Row> rows;

  std::size_t size() const { return rows.size(); }
};

void dedup(std::vector<Row>& rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

// Positions of `sub` inside `vars`; sub must be contained in vars.
std::vector<std::size_t> positions(const std::vector<std::size_t>& vars, const std::vector<std::size_t>& sub) {
  std::vector<std::size_t> out;
  for (std::size_t v : sub) out.push_back(std::lower_bound(vars.begin(), vars.end(), v) - vars.begin());
  return out;
}

std::vector<std::size_t> intersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

Row pick(const Row& row, const std::vector<std::size_t>& at) {
  Row out;
  out.reserve(at.size());
  for (std::size_t i : at) out.push_back(row[i]);
  return out;
}

Relation project(const Relation& r, const std::vector<std::size_t>& vars) {
  Relation out{intersect(r.vars, vars), {}};
  auto at = positions(r.vars, out.vars);
  for (const auto& row : r.rows) out.rows.push_back(pick(row, at));
  dedup(out.rows);
  return out;
}

Relation join(const Relation& a, const Relation& b) {
  auto common = intersect(a.vars, b.vars);
  Relation out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(out.vars));
  auto a_key = positions(a.vars, common);
  auto b_key = positions(b.vars, common);
  std::vector<std::pair<int, std::size_t>> sources;  // 0 = a, 1 = b
  for (std::size_t v : out.vars) {
    auto ia = std::lower_bound(a.vars.begin(), a.vars.end(), v);
    if (ia != a.vars.end() && *ia == v)
      sources.push_back({0, static_cast<std::size_t>(ia - a.vars.begin())});
    else
      sources.push_back({1, static_cast<std::size_t>(std::lower_bound(b.vars.begin(), b.vars.end(), v) - b.vars.begin())});
  }
  std::unordered_map<Row, std::vector<const Row*>, RowHash> index;
  for (const auto& row : b.rows) index[pick(row, b_key)].push_back(&row);
  for (const auto& row : a.rows) {
    auto it = index.find(pick(row, a_key));
    if (it == index.end()) continue;
    for (const Row* other : it->second) {
      Row merged;
      merged.reserve(sources.size());
      for (auto [side, i] : sources) merged.push_back(side == 0 ? row[i] : (*other)[i]);
      out.rows.push_back(std::move(merged));
    }
  }
  dedup(out.rows);
  return out;
}

Relation semijoin(const Relation& a, const Relation& b) {
  auto common = intersect(a.vars, b.vars);
  auto a_key = positions(a.vars, common);
  auto b_key = positions(b.vars, common);
  std::unordered_set<Row, RowHash> keys;
  for (const auto& row : b.rows) keys.insert(pick(row, b_key));
  Relation out{a.vars, {}};
  for (const auto& row : a.rows)
    if (keys.count(pick(row, a_key))) out.rows.push_back(row);
  return out;
}

std::vector<std::size_t> members(const VarSet& vars) {
  std::vector<std::size_t> out;
  for (auto v = vars.find_first(); v != VarSet::npos; v = vars.find_next(v)) out.push_back(v);
  return out;
}

void check_schema(const ConjunctiveQuery& query, const Database& db) {
  for (const auto& atom : query.body()) {
    auto arity = db.arity(atom.relation);
    if (!arity) throw EvalError("relation " + atom.relation + " is missing from the database");
    if (*arity != atom.args.size())
      throw EvalError("relation " + atom.relation + " has arity " + std::to_string(*arity) +
                      " in the database but " + std::to_string(atom.args.size()) + " in the query");
  }
}

// Constants as dense integers.
class Dictionary {
 public:
  int id(const std::string& c) {
    auto [it, fresh] = ids_.try_emplace(c, static_cast<int>(names_.size()));
    if (fresh) names_.push_back(c);
    return it->second;
  }
  const std::string& name(int id) const { return names_[id]; }

 private:
  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
};

// The query's atoms as selected relations over their variables.
class Instance {
 public:
  Instance(const ConjunctiveQuery& query, const Database& db) : query_(query) {
    check_schema(query, db);
    for (const auto& atom : query.body()) {
      const Database::Table& table = *db.find(atom.relation);
      largest_input_ = std::max(largest_input_, table.size());
      Relation r{members(query.vars_of(atom.index)), {}};
      auto at = positions_for(atom, r.vars);
      for (const auto& tuple : table) {
        Row row(r.vars.size(), -1);
        bool keep = true;
        for (std::size_t i = 0; i < tuple.size() && keep; ++i) {
          const Term& t = atom.args[i];
          int value = dict_.id(tuple[i]);
          if (!t.is_variable()) {
            keep = t.name == tuple[i];
          } else {
            int& slot = row[at[i]];
            keep = slot < 0 || slot == value;
            slot = value;
          }
        }
        if (keep) r.rows.push_back(std::move(row));
      }
      dedup(r.rows);
      if (r.vars.empty() && r.rows.empty()) satisfiable_ = false;
      atoms_.push_back(std::move(r));
    }
  }

  const Relation& atom(std::size_t i) const { return atoms_[i]; }
  /// False when a variable-free atom has no matching fact.
  bool ground_atoms_hold() const { return satisfiable_; }
  std::size_t largest_input() const { return largest_input_; }
  const std::string& name(int id) const { return dict_.name(id); }

 private:
  std::vector<std::size_t> positions_for(const Atom& atom, const std::vector<std::size_t>& vars) const {
    std::vector<std::size_t> at(atom.args.size(), 0);
    for (std::size_t i = 0; i < atom.args.size(); ++i)
      if (atom.args[i].is_variable())
        at[i] = std::lower_bound(vars.begin(), vars.end(), *query_.find_variable(atom.args[i].name)) -
                vars.begin();
    return at;
  }

  const ConjunctiveQuery& query_;
  Dictionary dict_;
  std::vector<Relation> atoms_;
  std::size_t largest_input_ = 0;
  bool satisfiable_ = true;
};

struct Shrunk {
  detail::TreeIndex index;
  std::vector<Relation> vertex;
};

Shrunk shrink_relations(const ConjunctiveQuery& query, const Instance& inst, const Hypertree& tree,
                        EvalStats* stats) {
  Shrunk out{detail::index_tree(tree.nodes), {}};
  for (const auto& node : tree.nodes) {
    auto chi = members(node.chi);
    Relation acc{{}, {Row{}}};
    for (auto a = node.lambda.find_first(); a != AtomSet::npos; a = node.lambda.find_next(a)) {
      const VarSet& vars = query.vars_of(a);
      if (!vars.intersects(node.chi)) continue;
      const Relation& r = inst.atom(a);
      acc = join(acc, vars.is_subset_of(node.chi) ? r : project(r, chi));
      if (stats) stats->largest_shrink = std::max(stats->largest_shrink, acc.size());
    }
    acc = project(acc, chi);
    if (stats) stats->largest_vertex = std::max(stats->largest_vertex, acc.size());
    out.vertex.push_back(std::move(acc));
  }
  return out;
}

Hypertree choose_decomposition(const ConjunctiveQuery& query, const EvalOptions& options, EvalStats* stats) {
  Hypertree tree;
  if (options.decomposition) {
    auto report = validate_hd(query, *options.decomposition);
    if (!report.valid())
      throw DecompositionError("supplied decomposition is invalid: " + to_string(report.violations.front()));
    tree = *options.decomposition;
  } else {
    auto found = hypertree_width(query, options.k_cap);
    if (!found)
      throw NoDecompositionError("no decomposition of width <= " + std::to_string(options.k_cap) + " found");
    tree = std::move(found->tree);
  }
  if (stats) stats->width = hd_width(tree);
  return is_complete(query, tree) ? tree : complete_hd(query, tree);
}

void upward(Shrunk& s, EvalStats* stats) {
  for (auto it = s.index.preorder.rbegin(); it != s.index.preorder.rend(); ++it) {
    if (!s.index.parent[*it]) continue;
    auto& parent = s.vertex[*s.index.parent[*it]];
    parent = semijoin(parent, s.vertex[*it]);
    if (stats) stats->largest_semijoin = std::max(stats->largest_semijoin, parent.size());
  }
}

void downward(Shrunk& s, EvalStats* stats) {
  for (std::size_t v : s.index.preorder) {
    if (!s.index.parent[v]) continue;
    s.vertex[v] = semijoin(s.vertex[v], s.vertex[*s.index.parent[v]]);
    if (stats) stats->largest_semijoin = std::max(stats->largest_semijoin, s.vertex[v].size());
  }
}

Answer head_tuples(const ConjunctiveQuery& query, const Instance& inst, const Relation& r) {
  Answer out;
  std::vector<std::optional<std::size_t>> at;
  for (const Term& t : query.head().args) {
    if (!t.is_variable()) {
      at.push_back(std::nullopt);
      continue;
    }
    std::size_t v = *query.find_variable(t.name);
    at.push_back(std::lower_bound(r.vars.begin(), r.vars.end(), v) - r.vars.begin());
  }
  for (const auto& row : r.rows) {
    std::vector<std::string> tuple;
    for (std::size_t i = 0; i < at.size(); ++i)
      tuple.push_back(at[i] ? inst.name(row[*at[i]]) : query.head().args[i].name);
    out.insert(std::move(tuple));
  }
  return out;
}

Answer constant_head(const ConjunctiveQuery& query, bool holds) {
  Answer out;
  if (!holds) return out;
  std::vector<std::string> tuple;
  for (const Term& t : query.head().args) tuple.push_back(t.name);
  out.insert(std::move(tuple));
  return out;
}

}  // namespace

AcyclicInstance shrink(const ConjunctiveQuery& query, const Database& db, const Hypertree& tree,
                       EvalStats* stats) {
  auto report = validate_hd(query, tree);
  if (!report.valid()) throw DecompositionError("shrink needs a valid decomposition: " + to_string(report.violations.front()));
  if (!is_complete(query, tree)) throw DecompositionError("shrink needs a complete decomposition");
  Instance inst(query, db);
  if (stats) stats->largest_input = inst.largest_input();
  Shrunk s = shrink_relations(query, inst, tree, stats);

  AcyclicInstance out;
  std::vector<Atom> body;
  for (std::size_t p = 0; p < tree.nodes.size(); ++p) {
    std::string name = "p" + std::to_string(tree.nodes[p].id);
    Atom atom{name, {}, p};
    for (std::size_t v : s.vertex[p].vars) atom.args.push_back(Term::variable(query.variable_name(v)));
    out.database.declare(name, atom.args.size());
    for (const auto& row : s.vertex[p].rows) {
      Database::Tuple tuple;
      for (int x : row) tuple.push_back(inst.name(x));
      out.database.add_fact(name, std::move(tuple));
    }
    body.push_back(std::move(atom));
    std::optional<std::size_t> parent = s.index.parent[p];
    out.join_tree.nodes.push_back({p, parent});
  }
  out.query = ConjunctiveQuery(query.head(), std::move(body));
  return out;
}

bool eval_boolean(const ConjunctiveQuery& query, const Database& db, const EvalOptions& options) {
  Instance inst(query, db);
  if (options.stats) options.stats->largest_input = inst.largest_input();
  if (!inst.ground_atoms_hold()) return false;
  if (query.atom_count() == 0) return true;
  Hypertree tree = choose_decomposition(query, options, options.stats);
  Shrunk s = shrink_relations(query, inst, tree, options.stats);
  upward(s, options.stats);
  return !s.vertex[s.index.root].rows.empty();
}

Answer eval_full(const ConjunctiveQuery& query, const Database& db, const EvalOptions& options) {
  Instance inst(query, db);
  if (options.stats) options.stats->largest_input = inst.largest_input();
  if (!inst.ground_atoms_hold()) return {};
  if (query.atom_count() == 0) return constant_head(query, true);
  Hypertree tree = choose_decomposition(query, options, options.stats);
  Shrunk s = shrink_relations(query, inst, tree, options.stats);
  upward(s, options.stats);
  if (s.vertex[s.index.root].rows.empty()) return {};
  downward(s, options.stats);

  auto head = query.head_variables();
  std::sort(head.begin(), head.end());
  for (auto it = s.index.preorder.rbegin(); it != s.index.preorder.rend(); ++it) {
    std::size_t v = *it;
    for (std::size_t c : s.index.children[v]) s.vertex[v] = join(s.vertex[v], s.vertex[c]);
    std::vector<std::size_t> keep = head;
    if (s.index.parent[v]) {
      auto& up = s.vertex[*s.index.parent[v]].vars;
      keep.insert(keep.end(), up.begin(), up.end());
      std::sort(keep.begin(), keep.end());
    }
    s.vertex[v] = project(s.vertex[v], keep);
    for (std::size_t c : s.index.children[v]) s.vertex[c] = {};
  }
  return head_tuples(query, inst, s.vertex[s.index.root]);
}

Answer brute_force_eval(const ConjunctiveQuery& query, const Database& db, std::size_t budget) {
  check_schema(query, db);
  std::vector<std::vector<const Database::Tuple*>> facts;
  for (const auto& atom : query.body()) {
    facts.emplace_back();
    for (const auto& t : *db.find(atom.relation)) facts.back().push_back(&t);
  }
  std::vector<std::optional<std::string>> theta(query.variable_count());
  std::size_t steps = 0;
  Answer out;
  auto search = [&](auto&& self, std::size_t i) -> void {
    if (++steps > budget) throw InconclusiveError("brute-force evaluation exceeded its step budget");
    if (i == query.atom_count()) {
      std::vector<std::string> tuple;
      for (const Term& t : query.head().args)
        tuple.push_back(t.is_variable() ? *theta[*query.find_variable(t.name)] : t.name);
      out.insert(std::move(tuple));
      return;
    }
    const Atom& atom = query.atom(i);
    for (const auto* fact : facts[i]) {
      std::vector<std::size_t> bound;
      bool ok = true;
      for (std::size_t j = 0; j < atom.args.size() && ok; ++j) {
        const Term& t = atom.args[j];
        if (!t.is_variable()) {
          ok = t.name == (*fact)[j];
          continue;
        }
        auto& slot = theta[*query.find_variable(t.name)];
        if (!slot) {
          slot = (*fact)[j];
          bound.push_back(*query.find_variable(t.name));
        } else {
          ok = *slot == (*fact)[j];
        }
      }
      if (ok) self(self, i + 1);
      for (std::size_t v : bound) theta[v].reset();
    }
  };
  search(search, 0);
  return out;
}

std::string format_answer(const ConjunctiveQuery& query, const Answer& answer) {
  std::string out;
  for (const auto& tuple : answer) {
    out += query.head().relation + "(";
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) out += ",";
      out += to_string(Term::constant(tuple[i]));
    }
    out += ").\n";
  }
  return out;
}

}  // namespace hypertree
