#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semijoin/corpus.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"
#include "semijoin/game.hpp"
#include "semijoin/gf.hpp"
#include "semijoin/gf_eval.hpp"
#include "semijoin/gf_parser.hpp"
#include "semijoin/repl.hpp"
#include "semijoin/report.hpp"
#include "semijoin/sa.hpp"
#include "semijoin/sa_parser.hpp"
#include "semijoin/sat_search.hpp"
#include "semijoin/synth.hpp"
#include "semijoin/translate.hpp"

namespace semijoin {

namespace cli {

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw IoError("cannot write '" + path + "'");
}

inline Database load_database_file(const std::string& path) {
  std::string text = read_file(path);
  try {
    return load_database(text);
  } catch (const Error& e) {
    throw CheckError(path + ": " + e.what());
  }
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  return out;
}

// Node count of the printed tree, counting shared subformulas once per use.
inline double formula_tree_size(const Formula& f, std::unordered_map<const void*, double>& memo) {
  if (auto it = memo.find(f.id()); it != memo.end()) return it->second;
  double n = 1;
  switch (f.kind()) {
    case Formula::Kind::kNot: n += formula_tree_size(f.child(0), memo); break;
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr:
    case Formula::Kind::kImplies:
    case Formula::Kind::kIff:
    case Formula::Kind::kExists:
      n += formula_tree_size(f.child(0), memo) + formula_tree_size(f.child(1), memo);
      break;
    default: break;
  }
  memo.emplace(f.id(), n);
  return n;
}

inline std::uint64_t default_seed() {
  if (const char* s = std::getenv("SEMIJOIN_LAB_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw CheckError("SEMIJOIN_LAB_SEED must be a non-negative integer");
    }
  }
  return 1;
}

inline Omega pick_omega(const std::string& choice, const Database& a, const Database& b) {
  if (choice == "eq") return Omega::equality();
  if (choice == "order") return Omega::ordered();
  return default_omega(a, b);
}

inline std::optional<std::size_t> parse_rounds(const std::string& s) {
  if (s == "inf") return std::nullopt;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw CheckError("--rounds expects a non-negative integer or 'inf'");
  }
}

inline void print_tuples(std::ostream& out, const Database& db, const TupleSet& s, std::size_t arity) {
  if (arity == 0) {
    out << (s.empty() ? "false" : "true") << "\n";
    return;
  }
  for (const Tuple& t : s) out << db.format_tuple(t) << "\n";
}

struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

}  // namespace cli

// Runs the command line `args` (without the program name).  Exit codes: 0
// success, 1 I/O failure or oversized output, 2 parse or check error, 3 failed
// internal cross-check.
inline int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  using namespace cli;
  Context ctx{in, out, err};
  CLI::App app{"Semijoin algebra, guarded fragment and the semijoin game", "semijoin-lab"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();
  bool quiet = false;
  std::optional<std::uint64_t> seed_opt;
  app.add_flag("-q,--quiet", quiet, "print only the verdict or result");
  app.add_option("--seed", seed_opt, "seed for randomized commands (default: $SEMIJOIN_LAB_SEED or 1)");

  std::function<void()> action;

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate an SA expression or GF formula on a database");
  std::string eval_db, eval_expr, eval_lang = "sa", eval_vars;
  bool eval_file = false;
  eval->add_option("db", eval_db, "database document")->required();
  eval->add_option("expr", eval_expr, "expression text (or a path with --file)")->required();
  eval->add_option("--lang", eval_lang, "sa or gf")->check(CLI::IsMember({"sa", "gf"}));
  eval->add_flag("--file", eval_file, "read the expression from the given path");
  eval->add_option("--vars", eval_vars, "GF output variables, comma separated (default: sorted free variables)");
  eval->callback([&] {
    action = [&] {
      Database db = load_database_file(eval_db);
      std::string text = eval_file ? read_file(eval_expr) : eval_expr;
      if (eval_lang == "sa") {
        SAExpr e = parse_sa(text);
        SATyping t = check_sa(e, db.schema());
        print_tuples(ctx.out, db, eval_sa(e, db), t.arity);
      } else {
        Formula f = parse_gf(text);
        if (!check_guarded(f, db.schema())) throw CheckError("formula is not guarded");
        std::vector<std::string> vars = eval_vars.empty() ? f.free_vars() : split_list(eval_vars);
        print_tuples(ctx.out, db, gf_result_set(f, db, vars), vars.size());
      }
    };
  });

  // translate
  auto* tr = app.add_subcommand("translate", "translate between SA= and GF");
  std::string tr_dir, tr_expr, tr_schema, tr_db, tr_rel, tr_inj, tr_vars;
  double tr_max = 1e6;
  tr->add_option("--direction", tr_dir, "sa2gf or gf2sa")->required()->check(CLI::IsMember({"sa2gf", "gf2sa"}));
  tr->add_option("expr", tr_expr, "expression or formula text")->required();
  tr->add_option("--schema", tr_schema, "schema such as R/2,S/1");
  tr->add_option("--db", tr_db, "take the schema from this database document");
  tr->add_option("--rel", tr_rel, "target relation R (gf2sa)");
  tr->add_option("--injection", tr_inj, "injection f as i:f(i) pairs, e.g. 1:2,2:1 (gf2sa)");
  tr->add_option("--vars", tr_vars, "free variables in order (gf2sa; default x1..xk)");
  tr->add_option("--max-size", tr_max, "refuse to print results with more tree nodes than this");
  tr->callback([&] {
    action = [&] {
      Schema schema;
      if (!tr_db.empty())
        schema = load_database_file(tr_db).schema();
      else if (!tr_schema.empty())
        schema = parse_schema(tr_schema);
      else
        throw CheckError("translate needs --schema or --db");
      if (tr_dir == "sa2gf") {
        Formula f = sa_to_gf(parse_sa(tr_expr), schema);
        std::unordered_map<const void*, double> memo;
        double size = formula_tree_size(f, memo);
        if (size > tr_max) throw IoError("formula has " + std::to_string(static_cast<long long>(size)) + " nodes; raise --max-size to print it");
        ctx.out << to_string(f) << "\n";
        return;
      }
      Formula f = parse_gf(tr_expr);
      if (tr_rel.empty()) throw CheckError("gf2sa needs --rel");
      SAExpr e = SAExpr::relation(tr_rel);
      if (tr_inj.empty()) {
        if (!f.free_vars().empty())
          throw CheckError("formula has free variables; give --injection");
        e = gf_sentence_to_sa0(f, tr_rel, schema);
      } else {
        InjectionSpec spec = parse_injection(tr_rel, tr_inj);
        std::vector<std::string> vars = tr_vars.empty() ? output_vars(spec.f.size()) : split_list(tr_vars);
        e = gf_to_sa(f, vars, spec, schema);
      }
      if (tree_size(e) > tr_max)
        throw IoError("expression has " + std::to_string(static_cast<long long>(tree_size(e))) + " nodes; raise --max-size to print it");
      ctx.out << to_string(e) << "\n";
    };
  });

  // game / distinguish / repl share the pair-of-databases options
  struct PairOptions {
    std::string a, b, start_a = "()", start_b = "()", omega = "auto";
  };
  auto add_pair = [](CLI::App* sub, PairOptions& p) {
    sub->add_option("dbA", p.a, "database document A")->required();
    sub->add_option("dbB", p.b, "database document B")->required();
    sub->add_option("--start-a", p.start_a, "start tuple in A, e.g. (a,b)");
    sub->add_option("--start-b", p.start_b, "start tuple in B");
    sub->add_option("--omega", p.omega, "auto (order iff both databases declare one), eq or order")
        ->check(CLI::IsMember({"auto", "eq", "order"}));
  };
  struct Loaded {
    Game game;
    int a, b;
  };
  auto load_pair = [](const PairOptions& p) {
    Database a = load_database_file(p.a), b = load_database_file(p.b);
    Omega omega = pick_omega(p.omega, a, b);
    Tuple ta = a.parse_tuple(p.start_a), tb = b.parse_tuple(p.start_b);
    Game g(std::move(a), std::move(b), omega);
    int ia = g.require(Side::kA, ta), ib = g.require(Side::kB, tb);
    return Loaded{std::move(g), ia, ib};
  };

  auto* game = app.add_subcommand("game", "solve the semijoin game between two databases");
  PairOptions game_pair;
  std::string game_rounds = "inf", game_report_path;
  bool game_strategy = false, game_expr = false;
  add_pair(game, game_pair);
  game->add_option("--rounds", game_rounds, "number of rounds or inf");
  game->add_option("--report", game_report_path, "write a JSON report to this path");
  game->add_flag("--strategy", game_strategy, "include the duplicator strategy in the report");
  game->add_flag("--expression", game_expr, "include a distinguishing expression in the report");
  game->callback([&] {
    action = [&] {
      auto rounds = parse_rounds(game_rounds);
      Loaded l = load_pair(game_pair);
      bool dup = l.game.wins(l.a, l.b, rounds);
      ctx.out << (dup ? "DUPLICATOR" : "SPOILER") << "\n";
      if (!quiet) {
        if (!dup) ctx.out << "spoiler rank: " << l.game.rank(l.a, l.b) << "\n";
        ctx.out << "omega: " << l.game.omega().to_string() << "\n";
        ctx.out << "configurations in fixpoint: " << l.game.fixpoint().size() << " of "
                << l.game.size(Side::kA) * l.game.size(Side::kB) << "\n";
        ctx.out << "refinement rounds: " << l.game.rounds() << "\n";
      }
      if (!game_report_path.empty()) {
        ReportOptions opt{game_strategy, game_expr, rounds};
        write_file(game_report_path, game_report(l.game, l.a, l.b, opt).dump(2) + "\n");
      }
    };
  });

  auto* dist = app.add_subcommand("distinguish", "synthesize an SA expression separating two tuples");
  PairOptions dist_pair;
  add_pair(dist, dist_pair);
  dist->callback([&] {
    action = [&] {
      Loaded l = load_pair(dist_pair);
      auto e = distinguish(l.game, l.a, l.b);
      if (!e) {
        ctx.out << "none: the duplicator wins the unbounded game\n";
        return;
      }
      if (!quiet)
        ctx.out << "# spoiler rank " << l.game.rank(l.a, l.b) << ", " << dag_size(*e) << " distinct subexpressions\n";
      ctx.out << to_string(*e) << "\n";
    };
  });

  auto* repl = app.add_subcommand("repl", "play the game interactively");
  PairOptions repl_pair;
  std::string repl_side = "spoiler";
  std::optional<std::size_t> repl_max;
  add_pair(repl, repl_pair);
  repl->add_option("--side", repl_side, "your role: spoiler or duplicator")
      ->check(CLI::IsMember({"spoiler", "duplicator"}));
  repl->add_option("--max-rounds", repl_max, "stop after this many rounds");
  repl->callback([&] {
    action = [&] {
      Loaded l = load_pair(repl_pair);
      ReplOptions opt;
      opt.human_spoiler = repl_side == "spoiler";
      opt.seed = seed_opt ? *seed_opt : default_seed();
      opt.max_rounds = repl_max;
      run_repl(l.game, l.a, l.b, opt, ctx.in, ctx.out);
    };
  });

  // corpus
  auto* corpus = app.add_subcommand("corpus", "built-in database pairs");
  corpus->require_subcommand(1);
  auto* clist = corpus->add_subcommand("list", "list the named instances");
  clist->callback([&] {
    action = [&] {
      for (const auto& name : corpus_names()) {
        NamedInstance inst = corpus_instance(name);
        ctx.out << name << ": " << inst.description << "\n";
      }
    };
  });
  auto* cemit = corpus->add_subcommand("emit", "write the database documents of an instance");
  std::string emit_name, emit_side, emit_out;
  std::size_t emit_m = 3;
  cemit->add_option("--name", emit_name, "instance name")->required();
  cemit->add_option("--m", emit_m, "odd size parameter of ordered-transitivity");
  cemit->add_option("--side", emit_side, "A or B (default: both in one object)")->check(CLI::IsMember({"A", "B"}));
  cemit->add_option("--out", emit_out, "write PREFIX_A.json and PREFIX_B.json instead of printing");
  cemit->callback([&] {
    action = [&] {
      NamedInstance inst = corpus_instance(emit_name, emit_m);
      if (!emit_out.empty()) {
        write_file(emit_out + "_A.json", dump_database(inst.a));
        write_file(emit_out + "_B.json", dump_database(inst.b));
      } else if (emit_side == "A") {
        ctx.out << dump_database(inst.a);
      } else if (emit_side == "B") {
        ctx.out << dump_database(inst.b);
      } else {
        ctx.out << nlohmann::json{{"A", to_json(inst.a)}, {"B", to_json(inst.b)}}.dump(2) << "\n";
      }
    };
  });

  // search
  auto* search = app.add_subcommand("search", "search for a game-equivalent pair that splits a query");
  std::string search_query;
  WitnessOptions wopt;
  std::string search_out;
  search->add_option("--query", search_query, "transitive or cartesian")
      ->required()
      ->check(CLI::IsMember({"transitive", "cartesian"}));
  search->add_option("--max-values", wopt.max_values, "values per database");
  search->add_option("--budget", wopt.budget, "candidate databases to generate");
  search->add_option("--out", search_out, "write PREFIX_A.json and PREFIX_B.json");
  search->callback([&] {
    action = [&] {
      wopt.seed = seed_opt ? *seed_opt : default_seed();
      QueryOracle q = search_query == "transitive" ? QueryOracle([](const Database& d) { return is_transitive(d); })
                                                   : QueryOracle([](const Database& d) { return is_cartesian_closed(d); });
      auto r = find_witness_pair(q, q, wopt);
      if (!r) {
        ctx.out << "not found within " << wopt.budget << " candidates\n";
        return;
      }
      if (!quiet) ctx.out << "# certified after " << r->candidates << " candidates\n";
      if (!search_out.empty()) {
        write_file(search_out + "_A.json", dump_database(r->a));
        write_file(search_out + "_B.json", dump_database(r->b));
      } else {
        ctx.out << nlohmann::json{{"A", to_json(r->a)}, {"B", to_json(r->b)}}.dump(2) << "\n";
      }
    };
  });

  // sat-search
  auto* sat = app.add_subcommand("sat-search", "bounded search for a database where an expression is nonempty");
  std::string sat_expr, sat_schema;
  std::size_t sat_max = 3, sat_budget = 1000000;
  sat->add_option("expr", sat_expr, "SA expression")->required();
  sat->add_option("--schema", sat_schema, "schema such as D/2,S/1")->required();
  sat->add_option("--max-values", sat_max, "largest number of values to try");
  sat->add_option("--budget", sat_budget, "databases to evaluate at most");
  sat->callback([&] {
    action = [&] {
      SAExpr e = parse_sa(sat_expr);
      auto r = sat_search(e, parse_schema(sat_schema), sat_max, sat_budget);
      if (!r) {
        ctx.out << "none found with at most " << sat_max << " values\n";
        return;
      }
      if (!quiet) ctx.out << "# found after " << r->examined << " databases\n";
      ctx.out << dump_database(r->db);
    };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (action) action();
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace semijoin
