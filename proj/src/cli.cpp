#include "hypertree/cli.hpp"

#include "hypertree/detect.hpp"
#include "hypertree/eval.hpp"
#include "hypertree/hardness.hpp"
#include "hypertree/json_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace hypertree {

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

std::string jointree_text(const ConjunctiveQuery& q, const JoinTree& jt) {
  std::string out;
  for (const auto& n : jt.nodes) {
    out += std::to_string(n.atom) + " " + to_string(q.atom(n.atom)) + " parent ";
    out += n.parent ? std::to_string(*n.parent) : std::string("-");
    out += "\n";
  }
  return out;
}

struct Options {
  std::string query_file, second_file, out_file, hd_file, x3c_file, engine = "memo";
  std::size_t k = 0, k_max = 0, k_cap = 5;
  std::vector<std::size_t> three_ps;
  bool nf = false, complete = false, qd = false, brute = false, boolean = false;
};

int cmd_decompose(const Options& o, std::ostream& out, std::ostream& err) {
  auto q = parse_query(read_file(o.query_file));
  auto h = o.engine == "fixpoint" ? decompose_fixpoint(q, o.k) : decompose(q, o.k);
  if (!h) {
    out << "no decomposition of width <= " << o.k << "\n";
    return kNegative;
  }
  std::ostringstream summary;
  summary << "width " << hd_width(*h) << " vertices " << h->size() << "\n";
  if (o.out_file.empty()) {
    err << summary.str();
    out << to_json(q, *h);
  } else {
    write_file(o.out_file, to_json(q, *h));
    out << summary.str();
  }
  return kOk;
}

int cmd_check(const Options& o, std::ostream& out) {
  auto q = parse_query(read_file(o.query_file));
  std::string text = read_file(o.second_file);
  std::vector<Violation> violations;
  if (o.qd) {
    auto qd = parse_qd_json(text, q);
    violations = validate_qd(q, qd).violations;
    if (violations.empty()) out << "valid query decomposition, width " << qd.width() << "\n";
  } else {
    auto h = parse_hypertree_json(text, q);
    violations = validate_hd(q, h).violations;
    if (violations.empty() && o.nf) violations = validate_nf(q, h).report.violations;
    if (violations.empty() && o.complete && !is_complete(q, h)) {
      for (std::size_t a = 0; a < q.atom_count(); ++a) {
        bool strong = std::any_of(h.nodes.begin(), h.nodes.end(), [&](const auto& n) {
          return n.lambda.test(a) && q.vars_of(a).is_subset_of(n.chi);
        });
        if (!strong) violations.push_back({"COMPLETE", {}, "atom " + to_string(q.atom(a)) + " not strongly covered"});
      }
    }
    if (violations.empty()) out << "valid hypertree decomposition, width " << hd_width(h) << "\n";
  }
  for (const auto& v : violations) out << to_string(v) << "\n";
  return violations.empty() ? kOk : kNegative;
}

int cmd_width(const Options& o, std::ostream& out) {
  auto q = parse_query(read_file(o.query_file));
  auto r = hypertree_width(q, o.k_max);
  if (!r) {
    out << "no decomposition of width <= " << o.k_max << "\n";
    return kNegative;
  }
  out << r->width << "\n";
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  auto q = parse_query(read_file(o.query_file));
  auto db = parse_database(read_file(o.second_file));
  EvalOptions opts;
  opts.k_cap = o.k_cap;
  if (!o.hd_file.empty()) opts.decomposition = parse_hypertree_json(read_file(o.hd_file), q);
  bool as_boolean = o.boolean || q.is_boolean();
  if (as_boolean) {
    bool answer = eval_boolean(q, db, opts);
    if (!o.brute) {
      out << (answer ? "true" : "false") << "\n";
      return answer ? kOk : kNegative;
    }
    bool oracle = !brute_force_eval(q, db).empty();
    out << "hypertree: " << (answer ? "true" : "false") << "\n";
    out << "brute-force: " << (oracle ? "true" : "false") << "\n";
    if (answer != oracle) {
      err << "answers differ\n";
      return kInternal;
    }
    return answer ? kOk : kNegative;
  }
  Answer answer = eval_full(q, db, opts);
  if (!o.brute) {
    out << format_answer(q, answer);
    return kOk;
  }
  Answer oracle = brute_force_eval(q, db);
  out << "% hypertree\n" << format_answer(q, answer) << "% brute-force\n" << format_answer(q, oracle);
  if (answer != oracle) {
    err << "answers differ\n";
    return kInternal;
  }
  return kOk;
}

int cmd_acyclic(const Options& o, std::ostream& out) {
  auto q = parse_query(read_file(o.query_file));
  auto jt = is_acyclic(q);
  if (!jt) {
    out << "cyclic\n";
    return kNegative;
  }
  out << "acyclic\n" << jointree_text(q, *jt);
  return kOk;
}

int cmd_gen_hard(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.three_ps.empty()) {
    auto sys = gen_strict_3ps(o.three_ps[0], o.three_ps[1]);
    if (!verify_strict_3ps(sys)) {
      err << "generated system failed verification\n";
      return kInternal;
    }
    if (o.out_file.empty())
      out << to_string(sys);
    else
      write_file(o.out_file, to_string(sys));
    return kOk;
  }
  if (o.x3c_file.empty()) throw std::invalid_argument("gen-hard needs --3ps or --x3c");
  auto instance = parse_x3c(read_file(o.x3c_file));
  auto q = x3c_to_query(instance);
  auto cover = find_exact_cover(instance);
  std::optional<QueryDecomposition> qd;
  if (cover) qd = witness_qd_from_cover(instance, *cover);
  if (o.out_file.empty()) {
    out << to_string(q) << "\n";
    if (qd) out << to_json(q, *qd);
  } else {
    write_file(o.out_file + ".query", to_string(q) + "\n");
    if (qd) write_file(o.out_file + ".qd.json", to_json(q, *qd));
    out << "atoms " << q.atom_count() << " variables " << q.variable_count() << "\n";
  }
  if (!qd) err << "instance has no exact cover; no witness written\n";
  return kOk;
}

int cmd_oracle_qw(const Options& o, std::ostream& out) {
  auto q = parse_query(read_file(o.query_file));
  auto qd = brute_force_qw(q, o.k);
  if (!qd) {
    out << "no query decomposition of width <= " << o.k << "\n";
    return kNegative;
  }
  out << to_json(q, *qd);
  return kOk;
}

int cmd_oracle_eval(const Options& o, std::ostream& out) {
  auto q = parse_query(read_file(o.query_file));
  auto db = parse_database(read_file(o.second_file));
  Answer a = brute_force_eval(q, db);
  if (q.is_boolean()) {
    out << (a.empty() ? "false" : "true") << "\n";
    return a.empty() ? kNegative : kOk;
  }
  out << format_answer(q, a);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypertree decompositions of conjunctive queries", "hwq"};
  app.require_subcommand(1);
  Options o;

  auto* decompose_cmd = app.add_subcommand("decompose", "Find a normal-form decomposition of width <= k");
  decompose_cmd->add_option("query", o.query_file, "Query file")->required();
  decompose_cmd->add_option("-k,--width", o.k, "Width bound")->required()->check(CLI::PositiveNumber);
  decompose_cmd->add_option("-o,--output", o.out_file, "Decomposition file to write");
  decompose_cmd->add_option("--engine", o.engine, "memo or fixpoint")->check(CLI::IsMember({"memo", "fixpoint"}));

  auto* check_cmd = app.add_subcommand("check", "Validate a decomposition file");
  check_cmd->add_option("query", o.query_file, "Query file")->required();
  check_cmd->add_option("decomposition", o.second_file, "Decomposition file")->required();
  check_cmd->add_flag("--nf", o.nf, "Also check normal form");
  check_cmd->add_flag("--complete", o.complete, "Also check completeness");
  check_cmd->add_flag("--qd", o.qd, "File holds a query decomposition");

  auto* width_cmd = app.add_subcommand("width", "Compute hypertree width up to a bound");
  width_cmd->add_option("query", o.query_file, "Query file")->required();
  width_cmd->add_option("--max", o.k_max, "Largest width to try")->required()->check(CLI::PositiveNumber);

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a query over a fact file");
  eval_cmd->add_option("query", o.query_file, "Query file")->required();
  eval_cmd->add_option("database", o.second_file, "Fact file")->required();
  eval_cmd->add_option("--hd", o.hd_file, "Decomposition to use");
  eval_cmd->add_flag("--brute", o.brute, "Cross-check against brute-force evaluation");
  eval_cmd->add_flag("--boolean", o.boolean, "Only decide whether an answer exists");
  eval_cmd->add_option("--k-cap", o.k_cap, "Largest width tried automatically")->check(CLI::PositiveNumber);

  auto* acyclic_cmd = app.add_subcommand("acyclic", "Test acyclicity and print a join tree");
  acyclic_cmd->add_option("query", o.query_file, "Query file")->required();

  auto* gen_cmd = app.add_subcommand("gen-hard", "Generate hardness gadgets");
  auto* ps = gen_cmd->add_option("--3ps", o.three_ps, "Strict 3-partition system for m k")->expected(2);
  auto* x3c = gen_cmd->add_option("--x3c", o.x3c_file, "Exact cover instance to translate");
  gen_cmd->add_option("-o,--output", o.out_file, "Output file (prefix for --x3c)");
  ps->excludes(x3c);

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive reference computations");
  oracle_cmd->require_subcommand(1);
  auto* oracle_qw = oracle_cmd->add_subcommand("qw", "Search for a pure query decomposition");
  oracle_qw->add_option("query", o.query_file, "Query file")->required();
  oracle_qw->add_option("-k,--width", o.k, "Width bound")->required()->check(CLI::PositiveNumber);
  auto* oracle_eval = oracle_cmd->add_subcommand("eval", "Evaluate by backtracking");
  oracle_eval->add_option("query", o.query_file, "Query file")->required();
  oracle_eval->add_option("database", o.second_file, "Fact file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (decompose_cmd->parsed()) return cmd_decompose(o, out, err);
    if (check_cmd->parsed()) return cmd_check(o, out);
    if (width_cmd->parsed()) return cmd_width(o, out);
    if (eval_cmd->parsed()) return cmd_eval(o, out, err);
    if (acyclic_cmd->parsed()) return cmd_acyclic(o, out);
    if (gen_cmd->parsed()) return cmd_gen_hard(o, out, err);
    if (oracle_qw->parsed()) return cmd_oracle_qw(o, out);
    if (oracle_eval->parsed()) return cmd_oracle_eval(o, out);
  } catch (const ParseError& e) {
    err << "parse error at " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << e.what() << "\n";
    return kInternal;
  } catch (const NoDecompositionError& e) {
    err << e.what() << "\n";
    return kInternal;
  } catch (const InconclusiveError& e) {
    err << "inconclusive: " << e.what() << "\n";
    return kInternal;
  } catch (const FormatError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace hypertree
