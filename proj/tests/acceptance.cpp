// Acceptance suite: one line per criterion, exact integer equality
// throughout. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "igrowth/corpus.hpp"
#include "igrowth/dsv.hpp"
#include "igrowth/grammar.hpp"
#include "igrowth/oracle.hpp"
#include "igrowth/series.hpp"

using namespace igrowth;
using series::CountMode;
using series::TruncSeries;

namespace {

struct Check {
  std::string name;
  std::function<std::string()> body;  // empty string = pass
};

Grammar corpus_grammar(const char* name) {
  return parse_grammar(corpus::find_entry(name)->grammar_text);
}

std::string diff_coeffs(const std::vector<BigInt>& got, const std::vector<BigInt>& want,
                        int from, int to, const std::string& what) {
  for (int n = from; n <= to; ++n)
    if (got[n] != want[n])
      return what + ": first difference at z^" + std::to_string(n) + " (got " +
             got[n].get_str() + ", want " + want[n].get_str() + ")";
  return "";
}

// Oracle and solver vectors for a corpus entry at its verified caps.
struct EntryRun {
  series::CountVector words;
  series::CountVector derivations;
  dsv::SolveResult solved;
  bool solver_ran = false;
};

EntryRun run_entry_paths(const corpus::CorpusEntry& e) {
  EntryRun r;
  Grammar g = parse_grammar(e.grammar_text);
  oracle::WordCounts wc = oracle::enumerate_words(g, e.caps);
  r.words = oracle::counts_to_vector(wc, e.order, CountMode::distinct_words);
  r.derivations = oracle::counts_to_vector(wc, e.order, CountMode::derivations);
  if (e.run_solver) {
    dsv::EvalConfig cfg;
    cfg.order = e.order;
    cfg.depth_cap = e.depth_cap;
    cfg.key_mode = e.key_mode;
    r.solved = dsv::solve(g, cfg);
    r.solver_ran = true;
  }
  return r;
}

std::vector<Check> make_checks() {
  std::vector<Check> checks;

  checks.push_back({"1. sqr: powers of two at N=64, solver and oracle", [] {
    EntryRun r = run_entry_paths(*corpus::find_entry("sqr"));
    std::vector<BigInt> want(65, 0);
    for (long long p = 1; p <= 64; p *= 2) want[p] = 1;
    if (auto d = diff_coeffs(r.solved.series.coeffs(), want, 0, 64, "solver"); !d.empty())
      return d;
    if (auto d = diff_coeffs(r.words.coeffs, want, 0, 64, "oracle"); !d.empty()) return d;
    return std::string();
  }});

  checks.push_back({"2. gm_partitions: partition numbers at N=20 (p(5)=7)", [] {
    EntryRun r = run_entry_paths(*corpus::find_entry("gm_partitions"));
    auto p = series::reference_sequence(series::ReferenceKind::partitions, 20).coeffs;
    if (r.words.coeffs[5] != 7) return std::string("p(5) != 7");
    if (auto d = diff_coeffs(r.solved.series.coeffs(), p, 1, 20, "solver"); !d.empty()) return d;
    return diff_coeffs(r.words.coeffs, p, 1, 20, "oracle");
  }});

  checks.push_back({"3. intermediate: 2^floor(sqrt(n)) at N=25", [] {
    EntryRun r = run_entry_paths(*corpus::find_entry("intermediate"));
    auto w = series::reference_sequence(series::ReferenceKind::pow2_floor_sqrt, 25).coeffs;
    if (auto d = diff_coeffs(r.solved.series.coeffs(), w, 0, 25, "solver"); !d.empty()) return d;
    return diff_coeffs(r.words.coeffs, w, 0, 25, "oracle");
  }});

  checks.push_back({"4. divisors: tau(n) at N=30, table prefix [1,2,2,3,2,4]", [] {
    EntryRun r = run_entry_paths(*corpus::find_entry("divisors"));
    auto tau = series::reference_sequence(series::ReferenceKind::tau, 30).coeffs;
    std::vector<long> head{1, 2, 2, 3, 2, 4};
    for (int n = 1; n <= 6; ++n)
      if (r.words.coeffs[n] != head[n - 1]) return std::string("printed table prefix mismatch");
    if (auto d = diff_coeffs(r.solved.series.coeffs(), tau, 0, 30, "solver"); !d.empty())
      return d;
    return diff_coeffs(r.words.coeffs, tau, 0, 30, "oracle");
  }});

  checks.push_back({"5. sigma: sigma(n) at N=24 from trial division", [] {
    EntryRun r = run_entry_paths(*corpus::find_entry("sigma"));
    auto sig = series::reference_sequence(series::ReferenceKind::sigma, 24).coeffs;
    if (auto d = diff_coeffs(r.solved.series.coeffs(), sig, 0, 24, "solver"); !d.empty())
      return d;
    return diff_coeffs(r.words.coeffs, sig, 0, 24, "oracle");
  }});

  checks.push_back({"6. double_ww: 1/(1-2z^2) at N=20", [] {
    EntryRun r = run_entry_paths(*corpus::find_entry("double_ww"));
    std::vector<BigInt> want(21, 0);
    for (int k = 0; 2 * k <= 20; ++k) want[2 * k] = BigInt(1) << k;
    if (auto d = diff_coeffs(r.solved.series.coeffs(), want, 0, 20, "solver"); !d.empty())
      return d;
    return diff_coeffs(r.words.coeffs, want, 0, 20, "oracle");
  }});

  checks.push_back({"7. serial: solver = oracle = sum_j z^(3j)/((1-z^j)(1-z^(2j))) at N=15", [] {
    const auto* e = corpus::find_entry("serial");
    EntryRun r = run_entry_paths(*e);
    if (r.solved.loading.kind != LoadingKind::serial)
      return std::string("expected the serial loading class");
    std::vector<BigInt> formula = e->derived(15);
    if (auto d = diff_coeffs(r.solved.series.coeffs(), formula, 0, 15, "solver"); !d.empty())
      return d;
    return diff_coeffs(r.words.coeffs, formula, 0, 15, "oracle");
  }});

  checks.push_back({"8. hard_recursion: solver = oracle derivation counts at N=12", [] {
    EntryRun r = run_entry_paths(*corpus::find_entry("hard_recursion"));
    return diff_coeffs(r.solved.series.coeffs(), r.derivations.coeffs, 0, 12,
                       "solver vs oracle");
  }});

  checks.push_back({"9. ordering: exact-stack solver (M=13) = oracle; Parikh check fails on N", [] {
    Grammar g = corpus_grammar("ordering");
    dsv::EvalConfig cfg;
    cfg.order = 12;
    cfg.depth_cap = 13;
    cfg.key_mode = dsv::KeyMode::exact_stack;
    dsv::SolveResult sr = dsv::solve(g, cfg);
    oracle::DerivationConfig caps = corpus::find_entry("ordering")->caps;
    auto oracle_counts = oracle::growth_coefficients(g, caps, CountMode::derivations);
    if (auto d = diff_coeffs(sr.series.coeffs(), oracle_counts.coeffs, 0, 12, "solver vs oracle");
        !d.empty())
      return d;
    dsv::ParikhCheckResult pc = dsv::parikh_equivalence_check(g, 4, 12);
    int n = g.variable_id("N");
    if (pc.per_variable.at(n)) return std::string("Parikh check unexpectedly true for N");
    StackString ab{g.index_id("alpha"), g.index_id("beta"), kBottomIndex};
    StackString ba{g.index_id("beta"), g.index_id("alpha"), kBottomIndex};
    if (!pc.witnesses.count(n) || pc.witnesses.at(n).a != ab || pc.witnesses.at(n).b != ba)
      return std::string("witness pair is not alpha beta $ vs beta alpha $");
    return std::string();
  }});

  checks.push_back({"10. bg: coprime 12x12 grid, diagonal phi to 20; bg_full = z^2/(1-z)^2", [] {
    const auto* simp = corpus::find_entry("bg_simplified");
    Grammar g = parse_grammar(simp->grammar_text);
    oracle::WordCounts words = oracle::enumerate_words(g, simp->caps);
    auto grid = oracle::parikh_grid(words, {g.terminal_id("v"), g.terminal_id("h")});
    for (int i = 0; i <= 12; ++i)
      for (int j = 0; j <= 12; ++j) {
        auto it = grid.cells.find({i, j});
        BigInt got = it == grid.cells.end() ? 0 : it->second;
        BigInt want = (i >= 1 && j >= 1 && std::gcd(i, j) == 1) ? 1 : 0;
        if (got != want)
          return "grid[" + std::to_string(i) + "," + std::to_string(j) + "] = " + got.get_str();
      }
    auto diag = series::diagonal_sum(oracle::to_bivariate(grid, 20, 20), 20);
    auto phi = series::reference_sequence(series::ReferenceKind::phi, 20).coeffs;
    if (auto d = diff_coeffs(diag.coeffs, phi, 2, 20, "diagonal sums vs phi"); !d.empty())
      return d;

    EntryRun full = run_entry_paths(*corpus::find_entry("bg_full"));
    std::vector<BigInt> nm1(21, 0);
    for (int n = 2; n <= 20; ++n) nm1[n] = n - 1;
    return diff_coeffs(full.words.coeffs, nm1, 0, 20, "bg_full vs n-1");
  }});

  checks.push_back({"11. amb_quad: z^4(1+3z)/((1-z)^3(1+z)^2) at N=20, no ambiguity to 14", [] {
    const auto* e = corpus::find_entry("amb_quad");
    Grammar g = parse_grammar(e->grammar_text);
    oracle::WordCounts words = oracle::enumerate_words(g, e->caps);
    auto distinct = oracle::counts_to_vector(words, 20, CountMode::distinct_words);
    auto [p, q] = series::parse_rational("z^4(1+3z)/((1-z)^3(1+z)^2)");
    auto want = series::expand_rational(p, q, 20).coeffs();
    if (auto d = diff_coeffs(distinct.coeffs, want, 0, 20, "oracle vs rational"); !d.empty())
      return d;
    for (const auto& [w, c] : words.counts)
      if (w.size() <= 14 && c >= 2)
        return "ambiguous word within length 14: " + oracle::format_word(g, w);
    return std::string();
  }});

  checks.push_back({"12. composites: support, tau(c)-2 parse trees, 0^6 first ambiguous", [] {
    const auto* e = corpus::find_entry("composites");
    Grammar g = parse_grammar(e->grammar_text);
    oracle::WordCounts words = oracle::enumerate_words(g, e->caps);
    auto distinct = oracle::counts_to_vector(words, 24, CountMode::distinct_words);
    auto trees = oracle::counts_to_vector(words, 24, CountMode::derivations);
    auto is_composite = [](int n) {
      for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return true;
      return false;
    };
    for (int n = 0; n <= 24; ++n) {
      if (distinct.coeffs[n] != (is_composite(n) ? 1 : 0))
        return "word support wrong at length " + std::to_string(n);
      BigInt want = 0;
      for (int d = 2; d < n; ++d)
        if (n % d == 0 && n / d >= 2) want += 1;
      if (trees.coeffs[n] != want)
        return "parse-tree count wrong at length " + std::to_string(n) + " (got " +
               trees.coeffs[n].get_str() + ", want " + want.get_str() + ")";
    }
    for (const auto& [w, c] : words.counts)
      if (c >= 2) {
        if (oracle::format_word(g, w) != "000000")
          return "first ambiguous word is " + oracle::format_word(g, w);
        break;
      }
    return std::string();
  }});

  checks.push_back({"13. properties: ring laws, inverses, monotonicity, M/M+1, classical DSV", [] {
    // series ring laws and division inverses on random data
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> d(-9, 9);
    auto random_series = [&](int order) {
      TruncSeries s(order);
      for (int i = 0; i <= order; ++i) s[i] = d(rng);
      return s;
    };
    for (int iter = 0; iter < 25; ++iter) {
      TruncSeries a = random_series(8), b = random_series(8), c = random_series(8);
      if (!((a + b) + c == a + (b + c)) || !(a * b == b * a) ||
          !((a * b) * c == a * (b * c)) || !(a * (b + c) == a * b + a * c))
        return std::string("series ring law failed");
      b[0] = 1;
      if (!((a / b) * b == a)) return std::string("division inverse failed");
      std::vector<BigInt> p{d(rng), d(rng), d(rng)}, q{1, d(rng), d(rng)};
      if (!(series::expand_rational(p, q, 8) * TruncSeries(8, q) == TruncSeries(8, p)))
        return std::string("expand_rational inverse failed");
    }

    // oracle monotonicity under budget increase
    Grammar gm = corpus_grammar("gm_partitions");
    oracle::DerivationConfig small, large;
    small.max_len = 8;
    small.max_stack = 10;
    large.max_len = 10;
    large.max_stack = 12;
    auto ws = oracle::enumerate_words(gm, small);
    auto wl = oracle::enumerate_words(gm, large);
    for (const auto& [w, c] : ws.counts) {
      auto it = wl.counts.find(w);
      if (it == wl.counts.end() || it->second < c)
        return std::string("oracle monotonicity violated");
    }

    // solver depth stability across the whole solver-enabled corpus
    for (const auto& e : corpus::entries()) {
      if (!e.run_solver) continue;
      Grammar g = parse_grammar(e.grammar_text);
      dsv::EvalConfig cfg;
      cfg.order = std::min(e.order, 16);
      cfg.depth_cap = e.depth_cap;
      cfg.key_mode = e.key_mode;
      cfg.ambiguity_probe = false;
      try {
        dsv::solve_checked(g, cfg);
      } catch (const std::exception& ex) {
        return e.name + ": depth stability failed: " + ex.what();
      }
    }

    // classical DSV degeneracy on an index-free grammar, and on anbncn
    Grammar cfg_free =
        parse_grammar("start S\nvars S\nterminals a b c\nS -> a S b c | a b c\n");
    dsv::EvalConfig ec;
    ec.order = 12;
    ec.depth_cap = 13;
    auto r = dsv::solve(cfg_free, ec);
    if (r.loading.kind != LoadingKind::index_free)
      return std::string("expected index_free classification");
    for (int n = 0; n <= 12; ++n)
      if (r.series[n] != (n > 0 && n % 3 == 0 ? 1 : 0))
        return std::string("index-free grammar series wrong at z^" + std::to_string(n));
    EntryRun abc = run_entry_paths(*corpus::find_entry("anbncn"));
    for (int n = 0; n <= 24; ++n)
      if (abc.solved.series[n] != (n > 0 && n % 3 == 0 ? 1 : 0))
        return std::string("anbncn series wrong at z^" + std::to_string(n));
    return std::string();
  }});

  return checks;
}

}  // namespace

int main() {
  auto checks = make_checks();
  int failures = 0;
  double total_ms = 0;
  for (auto& c : checks) {
    auto t0 = std::chrono::steady_clock::now();
    std::string err;
    try {
      err = c.body();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    total_ms += ms;
    std::printf("%-4s %-72s %9.1f ms%s%s\n", err.empty() ? "PASS" : "FAIL", c.name.c_str(), ms,
                err.empty() ? "" : "  -- ", err.c_str());
    if (!err.empty()) ++failures;
  }
  std::printf("%d/%zu acceptance criteria passed (%.1f s total)\n",
              static_cast<int>(checks.size()) - failures, checks.size(), total_ms / 1000.0);
  return failures == 0 ? 0 : 1;
}
