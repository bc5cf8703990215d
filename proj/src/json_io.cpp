#include "hypertree/json_io.hpp"

#include <json.hpp>

namespace hypertree {

using json = nlohmann::ordered_json;

namespace {

json names(const ConjunctiveQuery& query, const VarSet& vars) {
  json out = json::array();
  for (auto v = vars.find_first(); v != VarSet::npos; v = vars.find_next(v))
    out.push_back(query.variable_name(v));
  return out;
}

json indices(const AtomSet& atoms) {
  json out = json::array();
  for (auto a = atoms.find_first(); a != AtomSet::npos; a = atoms.find_next(a)) out.push_back(a);
  return out;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(std::string("missing field \"") + key + "\"");
  return *it;
}

const json& nodes_of(const json& doc) {
  if (!doc.is_object()) throw FormatError("top level must be an object");
  const json& nodes = field(doc, "nodes");
  if (!nodes.is_array()) throw FormatError("\"nodes\" must be an array");
  return nodes;
}

ConjunctiveQuery embedded_query(const json& doc) {
  if (!doc.is_object()) throw FormatError("top level must be an object");
  const json& q = field(doc, "query");
  if (!q.is_string()) throw FormatError("\"query\" must be a string");
  return parse_query(q.get<std::string>());
}

void check_embedded(const json& doc, const ConjunctiveQuery& query) {
  if (!doc.is_object() || !doc.contains("query")) return;
  if (!(embedded_query(doc) == query))
    throw FormatError("decomposition was written for a different query");
}

int node_id(const json& node) {
  const json& id = field(node, "id");
  if (!id.is_number_integer()) throw FormatError("\"id\" must be an integer");
  return id.get<int>();
}

std::optional<int> node_parent(const json& node) {
  auto it = node.find("parent");
  if (it == node.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw FormatError("\"parent\" must be an integer or null");
  return it->get<int>();
}

std::size_t atom_ref(const ConjunctiveQuery& query, const json& value) {
  if (!value.is_number_integer()) throw FormatError("atom references must be integers");
  auto i = value.get<long long>();
  if (i < 0 || static_cast<std::size_t>(i) >= query.atom_count())
    throw FormatError("atom index " + std::to_string(i) + " out of range");
  return static_cast<std::size_t>(i);
}

std::size_t var_ref(const ConjunctiveQuery& query, const json& value) {
  if (!value.is_string()) throw FormatError("variable references must be strings");
  auto v = query.find_variable(value.get<std::string>());
  if (!v) throw FormatError("unknown variable " + value.get<std::string>());
  return *v;
}

Hypertree read_tree(const json& doc, const ConjunctiveQuery& query) {
  Hypertree tree;
  for (const json& node : nodes_of(doc)) {
    if (!node.is_object()) throw FormatError("node entries must be objects");
    HypertreeNode n{node_id(node), node_parent(node), query.no_vars(), query.no_atoms()};
    const json& chi = field(node, "chi");
    const json& lambda = field(node, "lambda");
    if (!chi.is_array() || !lambda.is_array()) throw FormatError("\"chi\" and \"lambda\" must be arrays");
    for (const json& v : chi) n.chi.set(var_ref(query, v));
    for (const json& a : lambda) n.lambda.set(atom_ref(query, a));
    tree.nodes.push_back(std::move(n));
  }
  try {
    detail::index_tree(tree.nodes);
  } catch (const DecompositionError& e) {
    throw FormatError(e.what());
  }
  return tree;
}

QueryDecomposition read_qd(const json& doc, const ConjunctiveQuery& query) {
  QueryDecomposition qd;
  for (const json& node : nodes_of(doc)) {
    if (!node.is_object()) throw FormatError("node entries must be objects");
    QueryDecompositionNode n{node_id(node), node_parent(node), query.no_atoms(), query.no_vars()};
    const json& label = field(node, "label");
    if (!label.is_array()) throw FormatError("\"label\" must be an array");
    for (const json& item : label) {
      if (item.is_object() && item.size() == 1 && item.contains("atom"))
        n.atoms.set(atom_ref(query, item["atom"]));
      else if (item.is_object() && item.size() == 1 && item.contains("var"))
        n.vars.set(var_ref(query, item["var"]));
      else
        throw FormatError("label items must be {\"atom\": i} or {\"var\": name}");
    }
    qd.nodes.push_back(std::move(n));
  }
  try {
    detail::index_tree(qd.nodes);
  } catch (const DecompositionError& e) {
    throw FormatError(e.what());
  }
  return qd;
}

json parent_json(const std::optional<int>& parent) { return parent ? json(*parent) : json(nullptr); }

}  // namespace

std::string to_json(const ConjunctiveQuery& query, const Hypertree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({{"id", n.id}, {"parent", parent_json(n.parent)}, {"chi", names(query, n.chi)},
                     {"lambda", indices(n.lambda)}});
  json doc = {{"query", to_string(query)}, {"nodes", nodes}};
  return doc.dump(2) + "\n";
}

std::string to_json(const ConjunctiveQuery& query, const QueryDecomposition& qd) {
  json nodes = json::array();
  for (const auto& n : qd.nodes) {
    json label = json::array();
    for (auto a = n.atoms.find_first(); a != AtomSet::npos; a = n.atoms.find_next(a))
      label.push_back({{"atom", a}});
    for (auto v = n.vars.find_first(); v != VarSet::npos; v = n.vars.find_next(v))
      label.push_back({{"var", query.variable_name(v)}});
    nodes.push_back({{"id", n.id}, {"parent", parent_json(n.parent)}, {"label", label}});
  }
  json doc = {{"query", to_string(query)}, {"nodes", nodes}};
  return doc.dump(2) + "\n";
}

HypertreeDocument parse_hypertree_json(std::string_view text) {
  json doc = parse_json(text);
  ConjunctiveQuery q = embedded_query(doc);
  Hypertree tree = read_tree(doc, q);
  return {std::move(q), std::move(tree)};
}

QueryDecompositionDocument parse_qd_json(std::string_view text) {
  json doc = parse_json(text);
  ConjunctiveQuery q = embedded_query(doc);
  QueryDecomposition qd = read_qd(doc, q);
  return {std::move(q), std::move(qd)};
}

Hypertree parse_hypertree_json(std::string_view text, const ConjunctiveQuery& query) {
  json doc = parse_json(text);
  check_embedded(doc, query);
  return read_tree(doc, query);
}

QueryDecomposition parse_qd_json(std::string_view text, const ConjunctiveQuery& query) {
  json doc = parse_json(text);
  check_embedded(doc, query);
  return read_qd(doc, query);
}

}  // namespace hypertree
