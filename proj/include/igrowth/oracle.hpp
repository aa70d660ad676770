#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "igrowth/grammar.hpp"
#include "igrowth/series.hpp"

namespace igrowth::oracle {

// One slot of a sentential form: a terminal, or a variable carrying its own
// index stack.
struct FormItem {
  bool is_terminal = false;
  int id = -1;
  StackString stack;  // variables only
};
using SententialForm = std::vector<FormItem>;

struct DerivationConfig {
  int max_len = 20;              // bound on terminal word length
  int max_stack = 24;            // prune stacks longer than this
  int max_items = 96;            // bound on sentential-form length
  long long max_forms = 10'000'000;  // global expansion budget
};

// All forms obtainable by rewriting the leftmost variable of `form` with each
// applicable production. A pop rule applies only when the stack top matches;
// after an optional pop every rhs variable receives the residual stack with
// its push string prepended. Returns an empty list for a dead form.
std::vector<SententialForm> step_expand(const SententialForm& form, const Grammar& g);

// Words are terminal-id sequences ordered by length, then lexicographically
// by terminal name.
struct WordLess {
  std::shared_ptr<const std::vector<int>> name_rank;  // rank[id] = sorted-name position
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const;
};

struct WordCounts {
  std::map<std::vector<int>, BigInt, WordLess> counts;  // word -> parse trees
  bool truncated = false;
};

std::string format_word(const Grammar& g, const std::vector<int>& word);

// Exhaustive leftmost-derivation enumeration: counts parse trees (= leftmost
// derivations) per word of length <= max_len. `truncated` is conservative:
// it is set whenever the stack, item, or form budget suppressed a branch not
// already known to be dead; counts are exact lower bounds in that case, and
// exact values whenever the suppressed branches could not have produced
// words within max_len.
WordCounts enumerate_words(const Grammar& g, const DerivationConfig& cfg);

series::CountVector growth_coefficients(const Grammar& g, const DerivationConfig& cfg,
                                        series::CountMode mode);
series::CountVector counts_to_vector(const WordCounts& words, int order, series::CountMode mode);

// All words with parse-tree count >= 2 within bounds, sorted by length then
// lexicographically.
std::vector<std::pair<std::vector<int>, BigInt>> ambiguity_scan(const Grammar& g,
                                                                const DerivationConfig& cfg);

struct ParikhGrid {
  std::vector<int> axes;                       // terminal ids
  std::map<std::vector<int>, BigInt> cells;    // axis count vector -> distinct words
  bool truncated = false;
};

// Distinct-word counts keyed by per-axis terminal counts; terminals outside
// the axes do not contribute to the key.
ParikhGrid parikh_grid(const Grammar& g, const DerivationConfig& cfg,
                       const std::vector<int>& axes);
ParikhGrid parikh_grid(const WordCounts& words, const std::vector<int>& axes);

// A two-axis grid densified up to (nx, ny); cells beyond the bounds are
// dropped.
series::BivariateGrid to_bivariate(const ParikhGrid& grid, int nx, int ny);

struct BalanceEstimate {
  int c = 1;
  int k = 0;
  bool satisfied = false;
  std::vector<std::pair<int, int>> witnessed_pairs;  // (max stack depth, word length)
};

// Fits depth <= C*len + K over all complete derivations found within budget:
// minimal C from {1,2,4,8} with K <= 16, then minimal K. satisfied = false
// when no such fit exists.
BalanceEstimate estimate_balance(const Grammar& g, const DerivationConfig& cfg);

}  // namespace igrowth::oracle
