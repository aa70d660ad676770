// igrowth: growth series of indexed grammars by exhaustive derivation and by
// the generalized DSV functional-equation solver, with a built-in corpus of
// worked examples and reference sequences to compare against.

#include <chrono>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "igrowth/corpus.hpp"
#include "igrowth/dsv.hpp"
#include "igrowth/grammar.hpp"
#include "igrowth/oracle.hpp"
#include "igrowth/series.hpp"

using nlohmann::json;
using namespace igrowth;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitMismatch = 4;

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> coeff_strings(const std::vector<BigInt>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(c.get_str());
  return out;
}

std::string join_coeffs(const std::vector<BigInt>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].get_str();
  return out + "]";
}

struct AnalyzeOptions {
  std::string path;
  int order = 20;
  std::string method = "both";  // oracle | dsv | both | generic
  std::string mode = "derivations";
  std::string keys = "auto";  // auto | exact | parikh
  int depth = -1;
  int max_stack = -1;
  int max_items = -1;
  long long max_forms = 50'000'000;
  bool json_out = false;
};

oracle::DerivationConfig oracle_caps(const AnalyzeOptions& o) {
  oracle::DerivationConfig caps;
  caps.max_len = o.order;
  caps.max_stack = o.max_stack > 0 ? o.max_stack : o.order + 2;
  caps.max_items = o.max_items > 0 ? o.max_items : std::max(64, 4 * o.order + 16);
  caps.max_forms = o.max_forms;
  return caps;
}

// Depth cap from an empirical balance fit, 2N+2 when the fit fails.
int pick_depth_cap(const Grammar& g, int order, std::vector<std::string>& notes) {
  oracle::DerivationConfig caps;
  caps.max_len = std::min(order, 16);
  caps.max_stack = caps.max_len + 4;
  caps.max_items = 64;
  caps.max_forms = 2'000'000;
  oracle::BalanceEstimate est = oracle::estimate_balance(g, caps);
  if (est.satisfied && !est.witnessed_pairs.empty()) {
    notes.push_back("depth cap " + std::to_string(est.c * order + est.k) + " from balance fit C=" +
                    std::to_string(est.c) + ", K=" + std::to_string(est.k));
    return est.c * order + est.k;
  }
  notes.push_back("no balance fit within bounds; depth cap defaults to " +
                  std::to_string(2 * order + 2));
  return 2 * order + 2;
}

// Key policy: "exact"/"parikh" are obeyed literally (parikh fails loudly if
// the equivalence gate rejects it). "auto" follows the loading class, then
// degrades gracefully: gate-rejected parikh falls back to exact, and an
// exact-key memo explosion retries through the gate with parikh keys.
dsv::SolveResult run_solver(const Grammar& g, const AnalyzeOptions& o, bool force_exact,
                            std::vector<std::string>& notes) {
  dsv::EvalConfig cfg;
  cfg.order = o.order;
  cfg.depth_cap = o.depth > 0 ? o.depth : pick_depth_cap(g, o.order, notes);
  bool automatic = !force_exact && o.keys == "auto";
  if (force_exact || o.keys == "exact") {
    cfg.key_mode = dsv::KeyMode::exact_stack;
  } else if (o.keys == "parikh") {
    cfg.key_mode = dsv::KeyMode::parikh_tuple;
  } else {
    cfg.key_mode = dsv::default_key_mode(classify_loading(g));
  }
  if (automatic && cfg.key_mode == dsv::KeyMode::parikh_tuple) {
    try {
      return dsv::solve_checked(g, cfg);
    } catch (const SolveError& e) {
      if (e.kind != SolveErrorKind::parikh_unsound) throw;
      notes.push_back(std::string("falling back to exact stack keys: ") + e.what());
      cfg.key_mode = dsv::KeyMode::exact_stack;
    }
  }
  if (automatic && cfg.key_mode == dsv::KeyMode::exact_stack) {
    try {
      return dsv::solve_checked(g, cfg);
    } catch (const Error& e) {
      if (std::string(e.what()).find("memo exceeded") == std::string::npos) throw;
      cfg.key_mode = dsv::KeyMode::parikh_tuple;
      try {
        dsv::SolveResult r = dsv::solve_checked(g, cfg);
        notes.push_back("exact stack keys exceeded the memo budget; "
                        "parikh keys passed the equivalence gate and were used instead");
        return r;
      } catch (const std::exception&) {
        throw e;  // report the original explosion
      }
    }
  }
  return dsv::solve_checked(g, cfg);
}

int cmd_analyze(const AnalyzeOptions& o) {
  auto t0 = std::chrono::steady_clock::now();
  Grammar g = parse_grammar(read_file(o.path));
  LoadingClass lc = classify_loading(g);

  bool want_oracle = o.method == "oracle" || o.method == "both";
  bool want_solver = o.method == "dsv" || o.method == "generic" || o.method == "both";

  std::vector<std::string> flags;
  series::CountVector distinct, derivations;
  bool oracle_ran = false, oracle_truncated = false;
  if (want_oracle) {
    oracle::WordCounts words = oracle::enumerate_words(g, oracle_caps(o));
    distinct = oracle::counts_to_vector(words, o.order, series::CountMode::distinct_words);
    derivations = oracle::counts_to_vector(words, o.order, series::CountMode::derivations);
    oracle_ran = true;
    oracle_truncated = words.truncated;
    if (oracle_truncated) flags.push_back("oracle_truncated");
  }

  dsv::SolveResult sr;
  bool solver_ran = false;
  if (want_solver) {
    try {
      sr = run_solver(g, o, o.method == "generic", flags);
      solver_ran = true;
      for (const auto& w : sr.warnings) flags.push_back(w);
    } catch (const std::exception& e) {
      std::cerr << "solver error: " << e.what() << "\n";
      return kExitSolver;
    }
  }

  // Cross-check: solver series counts derivations, so it is compared against
  // the derivations-mode oracle vector regardless of the display mode.
  std::string verdict = "NONE";
  int first_diff = -1;
  if (oracle_ran && solver_ran) {
    for (int i = 0; i <= o.order && first_diff < 0; ++i)
      if (sr.series[i] != derivations.coeffs[i]) first_diff = i;
    if (first_diff < 0) {
      verdict = "EQUAL";
    } else if (!oracle_truncated || sr.series[first_diff] < derivations.coeffs[first_diff]) {
      verdict = "UNEQUAL";  // truncated oracle counts are lower bounds
    } else {
      verdict = "INCOMPARABLE";
      flags.push_back("oracle truncated; solver exceeds its lower bounds");
    }
  }

  const std::vector<BigInt>& shown =
      solver_ran && !oracle_ran
          ? sr.series.coeffs()
          : (o.mode == "words" ? distinct.coeffs : derivations.coeffs);

  double ms = ms_since(t0);
  if (o.json_out) {
    json j;
    j["name"] = o.path;
    j["method"] = o.method;
    j["order"] = o.order;
    j["coeffs"] = coeff_strings(shown);
    j["class"] = to_string(lc.kind);
    j["flags"] = flags;
    j["verdict"] = verdict;
    j["ms"] = ms;
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "grammar:  " << o.path << "\n";
    std::cout << "class:    " << to_string(lc.kind) << " (" << lc.evidence << ")\n";
    if (oracle_ran) {
      std::cout << "oracle:   words       " << join_coeffs(distinct.coeffs) << "\n";
      std::cout << "          derivations " << join_coeffs(derivations.coeffs)
                << (oracle_truncated ? "  [truncated: lower bounds]" : "") << "\n";
    }
    if (solver_ran) {
      std::cout << "solver:   derivations " << join_coeffs(sr.series.coeffs()) << "\n";
      std::cout << "          rounds " << sr.rounds << ", depth " << sr.stabilization_depth
                << "\n";
    }
    for (const auto& f : flags) std::cout << "note:     " << f << "\n";
    if (verdict != "NONE") {
      std::cout << "verdict:  " << verdict;
      if (first_diff >= 0) std::cout << " (first difference at z^" << first_diff << ")";
      std::cout << "\n";
    }
    std::cout << "elapsed:  " << ms << " ms\n";
  }
  return verdict == "UNEQUAL" ? kExitMismatch : 0;
}

int cmd_check(const std::string& path) {
  Grammar g = parse_grammar(read_file(path));
  StructureReport rep = check_structure(g);
  LoadingClass lc = classify_loading(g);

  std::cout << "epsilon_free:   " << (rep.epsilon_free ? "yes" : "no") << "\n";
  std::cout << "strict_reduced: " << (rep.strict_reduced ? "yes" : "no") << "\n";
  auto print_set = [](const char* label, const std::set<std::string>& s) {
    std::cout << label;
    if (s.empty()) {
      std::cout << "none";
    } else {
      bool first = true;
      for (const auto& v : s) {
        std::cout << (first ? "" : " ") << v;
        first = false;
      }
    }
    std::cout << "\n";
  };
  print_set("unreachable:    ", rep.unreachable_vars);
  print_set("unproductive:   ", rep.unproductive_vars);
  for (const auto& n : rep.notes) std::cout << "note:           " << n << "\n";
  std::cout << "loading:        " << to_string(lc.kind) << "\n";
  std::cout << "evidence:       " << lc.evidence << "\n";
  if (!lc.loaders.empty()) {
    std::cout << "loaders:        ";
    for (size_t i = 0; i < lc.loaders.size(); ++i)
      std::cout << (i ? " -> " : "") << g.variable_names[lc.loaders[i].first] << "("
                << g.index_names[lc.loaders[i].second] << ")";
    std::cout << "\n";
  }

  oracle::DerivationConfig caps;
  caps.max_len = 12;
  caps.max_stack = 16;
  caps.max_items = 64;
  caps.max_forms = 2'000'000;
  oracle::BalanceEstimate est = oracle::estimate_balance(g, caps);
  std::cout << "balance:        ";
  if (est.satisfied)
    std::cout << "depth <= " << est.c << "*len + " << est.k << " over " << est.witnessed_pairs.size()
              << " witnessed pairs\n";
  else
    std::cout << "no fit with C <= 8 within bounds\n";

  auto dups = oracle::ambiguity_scan(g, caps);
  if (dups.empty()) {
    std::cout << "ambiguity:      none within bounds (words up to length " << caps.max_len
              << ")\n";
  } else {
    std::cout << "ambiguity:      " << dups.size() << " duplicated words; first: "
              << oracle::format_word(g, dups[0].first) << " (" << dups[0].second.get_str()
              << " parse trees)\n";
  }
  return 0;
}

int cmd_corpus_list() {
  for (const auto& e : corpus::entries()) {
    std::string kind;
    switch (e.kind) {
      case corpus::ExpectedKind::reference: kind = "reference:" + e.reference; break;
      case corpus::ExpectedKind::rational: kind = "rational " + e.rational; break;
      case corpus::ExpectedKind::derived: kind = "derived coefficients"; break;
      case corpus::ExpectedKind::oracle_only: kind = "oracle only"; break;
    }
    std::printf("%-15s N=%-3d %-28s %s\n", e.name.c_str(), e.order, kind.c_str(),
                e.provenance.c_str());
  }
  return 0;
}

int cmd_corpus_run(const std::string& name, bool json_out) {
  std::vector<const corpus::CorpusEntry*> selected;
  for (const auto& e : corpus::entries())
    if (name.empty() || e.name == name) selected.push_back(&e);
  if (selected.empty()) {
    std::cerr << "no corpus entry named '" << name << "'\n";
    return kExitParse;
  }
  std::vector<std::future<corpus::EntryResult>> futures;
  futures.reserve(selected.size());
  for (const auto* e : selected)
    futures.push_back(std::async(std::launch::async, [e] { return corpus::run_entry(*e); }));
  bool all = true;
  for (auto& f : futures) {
    corpus::EntryResult r = f.get();
    all = all && r.pass;
    if (json_out) {
      json j{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"ms", r.ms}};
      std::cout << j.dump() << "\n";
    } else {
      std::printf("%-4s %-15s %8.1f ms  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.ms,
                  r.detail.c_str());
    }
  }
  return all ? 0 : 1;
}

int cmd_compare(const std::string& path, const std::string& against, int order,
                const std::string& method) {
  Grammar g = parse_grammar(read_file(path));

  std::vector<BigInt> expected;
  if (against.rfind("rational:", 0) == 0) {
    auto [p, q] = series::parse_rational(against.substr(9));
    expected = series::expand_rational(p, q, order).coeffs();
  } else if (against.rfind("file:", 0) == 0) {
    std::istringstream in(read_file(against.substr(5)));
    std::string tok;
    while (in >> tok) {
      while (!tok.empty() && (tok.back() == ',' || tok.back() == ']')) tok.pop_back();
      if (!tok.empty() && tok.front() == '[') tok.erase(tok.begin());
      if (!tok.empty()) expected.emplace_back(tok);
    }
    expected.resize(order + 1, 0);
  } else {
    expected = series::reference_sequence(series::parse_reference_kind(against), order).coeffs;
  }

  std::vector<BigInt> got;
  std::vector<std::string> notes;
  if (method == "oracle") {
    AnalyzeOptions o;
    o.order = order;
    got = oracle::growth_coefficients(g, oracle_caps(o), series::CountMode::distinct_words).coeffs;
  } else {
    AnalyzeOptions o;
    o.order = order;
    try {
      dsv::SolveResult sr = run_solver(g, o, false, notes);
      got = sr.series.coeffs();
      for (const auto& w : sr.warnings) std::cerr << "note: " << w << "\n";
    } catch (const std::exception& e) {
      std::cerr << "solver error: " << e.what() << "\n";
      return kExitSolver;
    }
  }

  for (int i = 0; i <= order; ++i) {
    if (got[i] != expected[i]) {
      std::cout << "first difference at z^" << i << ": got " << got[i].get_str() << ", expected "
                << expected[i].get_str() << "\n";
      return kExitMismatch;
    }
  }
  std::cout << "EQUAL up to N=" << order << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growth series of indexed grammars: exhaustive enumeration, generalized DSV "
               "solving, and a corpus of worked examples"};
  app.require_subcommand(1);

  AnalyzeOptions aopt;
  auto* analyze = app.add_subcommand("analyze", "compute growth coefficients of a grammar file");
  analyze->add_option("path", aopt.path, "grammar file")->required();
  analyze->add_option("-N,--order", aopt.order, "highest coefficient order");
  analyze->add_option("--method", aopt.method, "oracle|dsv|both|generic (generic = dsv with exact stack keys)")
      ->check(CLI::IsMember({"oracle", "dsv", "both", "generic"}));
  analyze->add_option("--mode", aopt.mode, "words|derivations (displayed oracle vector)")
      ->check(CLI::IsMember({"words", "derivations"}));
  analyze->add_option("--keys", aopt.keys,
                      "auto|exact|parikh solver memo keys (auto follows the loading class)")
      ->check(CLI::IsMember({"auto", "exact", "parikh"}));
  analyze->add_option("--depth", aopt.depth, "solver stack depth cap (default: balance fit)");
  analyze->add_option("--max-stack", aopt.max_stack, "oracle stack bound");
  analyze->add_option("--max-items", aopt.max_items, "oracle sentential form bound");
  analyze->add_option("--max-forms", aopt.max_forms, "oracle expansion budget");
  analyze->add_flag("--json", aopt.json_out, "one JSON object on stdout");

  std::string check_path;
  auto* check = app.add_subcommand("check", "structure, loading class, balance, ambiguity");
  check->add_option("path", check_path, "grammar file")->required();

  auto* corpus_cmd = app.add_subcommand("corpus", "embedded example corpus");
  auto* corpus_list = corpus_cmd->add_subcommand("list", "list entries");
  std::string run_name;
  bool corpus_json = false;
  auto* corpus_run = corpus_cmd->add_subcommand("run", "run entries and check expected results");
  corpus_run->add_option("name", run_name, "entry name (default: all)");
  corpus_run->add_flag("--json", corpus_json, "one JSON object per entry");
  corpus_cmd->require_subcommand(1);

  std::string cmp_path, cmp_against, cmp_method = "dsv";
  int cmp_order = 20;
  auto* compare = app.add_subcommand("compare", "compare coefficients against a reference");
  compare->add_option("path", cmp_path, "grammar file")->required();
  compare->add_option("--against", cmp_against,
                      "partitions|tau|sigma|phi|pow2_floor_sqrt|rational:P/Q|file:PATH")
      ->required();
  compare->add_option("-N,--order", cmp_order, "comparison order");
  compare->add_option("--method", cmp_method, "dsv|oracle")
      ->check(CLI::IsMember({"dsv", "oracle"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(aopt);
    if (*check) return cmd_check(check_path);
    if (*corpus_list) return cmd_corpus_list();
    if (*corpus_run) return cmd_corpus_run(run_name, corpus_json);
    if (*compare) return cmd_compare(cmp_path, cmp_against, cmp_order, cmp_method);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
