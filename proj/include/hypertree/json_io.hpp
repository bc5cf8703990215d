#pragma once

// JSON file formats for hypertree and query decompositions.
//
//   {"query": "<query text>", "nodes": [{"id": 0, "parent": null,
//     "chi": ["X", ...], "lambda": [0, ...]}, ...]}
//
// Query decompositions replace chi/lambda by
//   "label": [{"atom": 0}, {"var": "X"}, ...]

#include "hypertree/decomposition.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypertree {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HypertreeDocument {
  ConjunctiveQuery query;
  Hypertree tree;
};

struct QueryDecompositionDocument {
  ConjunctiveQuery query;
  QueryDecomposition qd;
};

std::string to_json(const ConjunctiveQuery& query, const Hypertree& tree);
std::string to_json(const ConjunctiveQuery& query, const QueryDecomposition& qd);

/// Throws FormatError on malformed JSON, unknown variables or out-of-range
/// atom indices, and ParseError when the embedded query does not parse.
HypertreeDocument parse_hypertree_json(std::string_view text);
QueryDecompositionDocument parse_qd_json(std::string_view text);

/// Same, but the labels are resolved against `query`; the embedded query
/// text, when present, must denote the same query.
Hypertree parse_hypertree_json(std::string_view text, const ConjunctiveQuery& query);
QueryDecomposition parse_qd_json(std::string_view text, const ConjunctiveQuery& query);

}  // namespace hypertree
