#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "igrowth/grammar.hpp"
#include "igrowth/series.hpp"
#include "igrowth/stack_arena.hpp"

namespace igrowth::dsv {

// The functional-equation view of a grammar: per variable, its productions
// bucketed as pop rules (keyed by the popped symbol), flat rules (no pops,
// no pushes), and push rules (some rhs variable carries a push string).
// Alternation reads as a formal sum, concatenation as a product, a terminal
// as the monomial z, and the empty word as 1. The non-push alternatives of a
// loader collectively form its W-expression.
struct EquationSystem {
  struct Buckets {
    std::map<int, std::vector<int>> pop_rules;  // popped symbol -> production ids
    std::vector<int> flat_rules;
    std::vector<int> push_rules;
  };
  const Grammar* grammar = nullptr;
  std::vector<Buckets> per_variable;

  std::string format_rhs(int production) const;   // e.g. "z^2*N*M", "1"
  std::string w_expression(int variable) const;   // e.g. "G*T + G"
};

EquationSystem build_equation_view(const Grammar& g);

enum class KeyMode { exact_stack, parikh_tuple };

struct EvalConfig {
  int order = 20;
  int depth_cap = -1;           // stacks longer than this evaluate to 0; -1 = 2*order+2
  int max_rounds = -1;          // fixed-point pass bound; -1 = order+2
  KeyMode key_mode = KeyMode::exact_stack;
  int parikh_check_depth = 6;   // reachable-stack depth used to gate parikh keys
  bool ambiguity_probe = true;  // small oracle scan to warn on ambiguous grammars

  int effective_depth() const { return depth_cap >= 0 ? depth_cap : 2 * order + 2; }
  int effective_rounds() const { return max_rounds >= 0 ? max_rounds : order + 2; }
};

struct SolveResult {
  series::TruncSeries series;  // counts derivations of each length
  LoadingClass loading;
  int stabilization_depth = 0;  // deepest stack actually evaluated
  int rounds = 0;
  std::vector<std::string> warnings;
};

// Derivation-counting series of a single variable at a given stack,
// truncated at cfg.order, under the approximation that evaluation at stack
// length > depth_cap contributes 0. Same-level and cross-level recursion are
// resolved jointly by iterating the memo table to a fixed point from zero.
// One Evaluator owns one memo table; repeated eval calls share it.
class Evaluator {
 public:
  Evaluator(const Grammar& g, const EvalConfig& cfg);
  ~Evaluator();
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  series::TruncSeries eval(int var, const StackString& stack);

  int rounds_used() const;           // of the most recent eval
  int stabilization_depth() const;   // deepest stack evaluated so far
  const EquationSystem& equations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ParikhWitness {
  StackString a, b;  // Parikh-equivalent reachable stacks with differing series
};

struct ParikhCheckResult {
  std::map<int, bool> per_variable;
  bool all_equivalent = true;
  std::map<int, ParikhWitness> witnesses;  // first failing pair per variable,
                                           // members in (length, lex) order
};

// For each variable: do all pairs of Parikh-equivalent reachable stacks of
// length <= depth induce identical series at the given order? Members are
// evaluated with exact keys, depth-capped a fixed margin beyond `depth`, so
// this is an empirical gate: inequivalence that only surfaces past the cap
// is not detected. Pop-driven inequivalence (the usual kind) is.
ParikhCheckResult parikh_equivalence_check(const Grammar& g, int depth, int order);

// Evaluates the start variable at the empty stack. Push recursion terminates
// because chains beyond depth_cap contribute 0; the result equals the sum of
// the per-stack functions over all reachable stacks, truncated at the order.
// parikh_tuple keys require the equivalence check to pass at
// cfg.parikh_check_depth (throws SolveError/parikh_unsound otherwise); they
// collapse the memo key space to count vectors, polynomial for serial
// grammars. exact_stack keys grow with the reachable stack language, up to
// 2^depth_cap for general multi-symbol loading.
SolveResult solve(const Grammar& g, const EvalConfig& cfg);

// solve at depth_cap and depth_cap+1; throws SolveError/depth_exhausted if
// the two series disagree (the cap demonstrably truncated real contributions).
SolveResult solve_checked(const Grammar& g, const EvalConfig& cfg);

KeyMode default_key_mode(const LoadingClass& lc);

}  // namespace igrowth::dsv
