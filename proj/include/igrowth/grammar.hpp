#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "igrowth/common.hpp"

namespace igrowth {

// Index symbols are small ids within a grammar; id 0 is the reserved
// bottom-of-stack marker `$`, declared symbols start at 1.
constexpr int kBottomIndex = 0;

// A stack of index symbols, topmost first. A well-formed stack contains at
// most one `$`, and only as its last (bottom-most) symbol. The start
// variable begins a derivation with an empty stack; `$` enters a stack only
// because a production pushes it explicitly.
using StackString = std::vector<int>;

struct RhsSymbol {
  bool is_terminal = false;
  int id = -1;            // terminal id or variable id
  std::vector<int> push;  // for variables: pushed index symbols, topmost first
};

struct Production {
  int lhs = -1;
  std::optional<int> pop;  // present exactly for `V[x] -> ...` forms
  std::vector<RhsSymbol> rhs;  // empty = epsilon
};

class Grammar {
 public:
  std::vector<std::string> variable_names;
  std::vector<std::string> terminal_names;
  std::vector<std::string> index_names;  // index_names[0] == "$"
  int start = -1;
  std::vector<Production> productions;

  int variable_id(const std::string& name) const;  // -1 if absent
  int terminal_id(const std::string& name) const;
  int index_id(const std::string& name) const;

  const std::vector<int>& productions_of(int var) const;

  // Throws Error on undeclared ids, start out of range, bad `$` placement.
  void validate() const;

  // Called once after construction; builds the per-variable production index.
  void seal();

 private:
  std::vector<std::vector<int>> by_var_;
};

Grammar parse_grammar(const std::string& text);
std::string render_grammar(const Grammar& g);

// Structural equality: same symbol names per namespace, same start, and the
// same multiset of productions (order-insensitive).
bool grammar_equal(const Grammar& a, const Grammar& b);

struct StructureOptions {
  int max_items = 32;
  int max_stack = 16;
  long long max_forms = 200000;
};

struct StructureReport {
  bool epsilon_free = false;
  bool strict_reduced = false;
  std::set<std::string> unreachable_vars;
  std::set<std::string> unproductive_vars;  // within the search bound
  std::vector<std::string> notes;
};

// Report-only analysis. epsilon_free follows the classical convention: the
// only permitted epsilon production has lhs = start. strict_reduced means
// every production pops or pushes at most one index symbol in total.
// Reachability and productivity are bounded searches, reported as such.
StructureReport check_structure(const Grammar& g, const StructureOptions& opt = {});

enum class LoadingKind { index_free, single_index, serial, general };

struct LoadingClass {
  LoadingKind kind = LoadingKind::general;
  // For single_index / serial: the loader chain in loading order, i.e. the
  // first pair's symbol sits at the bottom of every reachable stack (above
  // `$`) and the last pair's symbol on top.
  std::vector<std::pair<int, int>> loaders;  // (variable, index symbol)
  std::string evidence;
};

const char* to_string(LoadingKind k);

// Strongest applicable class: index_free if no index symbols are declared;
// single_index if exactly one index symbol exists and exactly one variable
// self-pushes it; serial if the loaders form a hand-off chain so every
// reachable stack is f_n^* ... f_1^* $; otherwise general.
LoadingClass classify_loading(const Grammar& g);

}  // namespace igrowth
