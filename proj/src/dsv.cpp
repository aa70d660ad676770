#include "igrowth/dsv.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "igrowth/oracle.hpp"

namespace igrowth::dsv {

using series::TruncSeries;

// ---------------------------------------------------------------------------
// Equation view

EquationSystem build_equation_view(const Grammar& g) {
  EquationSystem sys;
  sys.grammar = &g;
  sys.per_variable.resize(g.variable_names.size());
  for (size_t pi = 0; pi < g.productions.size(); ++pi) {
    const Production& p = g.productions[pi];
    auto& b = sys.per_variable[p.lhs];
    if (p.pop) {
      b.pop_rules[*p.pop].push_back(static_cast<int>(pi));
      continue;
    }
    bool pushes = false;
    for (const auto& item : p.rhs)
      if (!item.is_terminal && !item.push.empty()) pushes = true;
    (pushes ? b.push_rules : b.flat_rules).push_back(static_cast<int>(pi));
  }
  return sys;
}

std::string EquationSystem::format_rhs(int production) const {
  const Production& p = grammar->productions[production];
  int zpow = 0;
  std::vector<std::string> factors;
  for (const auto& item : p.rhs) {
    if (item.is_terminal) {
      ++zpow;
      continue;
    }
    std::string f = grammar->variable_names[item.id];
    if (!item.push.empty()) {
      f += '[';
      for (size_t i = 0; i < item.push.size(); ++i)
        f += (i ? " " : "") + grammar->index_names[item.push[i]];
      f += ']';
    }
    factors.push_back(std::move(f));
  }
  std::string out;
  if (zpow == 1) out = "z";
  if (zpow > 1) out = "z^" + std::to_string(zpow);
  for (const auto& f : factors) {
    if (!out.empty()) out += "*";
    out += f;
  }
  return out.empty() ? "1" : out;
}

std::string EquationSystem::w_expression(int variable) const {
  const auto& b = per_variable[variable];
  std::vector<std::string> alts;
  for (int pi : b.flat_rules) alts.push_back(format_rhs(pi));
  for (const auto& [sym, pis] : b.pop_rules)
    for (int pi : pis) alts.push_back(format_rhs(pi));
  std::string out;
  for (const auto& a : alts) {
    if (!out.empty()) out += " + ";
    out += a;
  }
  return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

using Node = detail::StackArena::Node;

struct KeyHash {
  size_t operator()(const std::pair<int, const Node*>& k) const {
    return std::hash<const void*>()(k.second) * 1000003u + static_cast<size_t>(k.first);
  }
};

constexpr int kMaxRecursionDepth = 10000;
constexpr size_t kMemoCoeffCap = 8'000'000;  // entries * (order+1) coefficient slots

}  // namespace

struct Evaluator::Impl {
  const Grammar& g;
  EvalConfig cfg;
  EquationSystem sys;
  detail::StackArena arena;

  struct Entry {
    TruncSeries value;
    unsigned visited = 0;
  };
  std::unordered_map<std::pair<int, const Node*>, Entry, KeyHash> memo;
  std::unordered_map<const Node*, const Node*> canon_cache;

  unsigned round = 0;
  bool changed = false;
  int depth_reached = 0;
  int rounds_used = 0;
  int call_depth = 0;

  Impl(const Grammar& g_, const EvalConfig& c) : g(g_), cfg(c), sys(build_equation_view(g_)) {}

  const Node* canonical(const Node* stack) {
    if (cfg.key_mode == KeyMode::exact_stack) return stack;
    auto it = canon_cache.find(stack);
    if (it != canon_cache.end()) return it->second;
    StackString v = detail::StackArena::to_vector(stack);
    std::sort(v.begin(), v.end(), std::greater<int>());  // $ (id 0) sinks to the bottom
    const Node* c = arena.from_vector(v);
    canon_cache.emplace(stack, c);
    return c;
  }

  TruncSeries fixpoint(int var, const Node* root_stack) {
    int max_rounds = cfg.effective_rounds();
    TruncSeries result;
    for (rounds_used = 1; rounds_used <= max_rounds; ++rounds_used) {
      ++round;
      changed = false;
      result = visit(var, root_stack);
      if (!changed) return result;
    }
    throw SolveError(SolveErrorKind::no_stabilization,
                     "fixed-point iteration still changing after " + std::to_string(max_rounds) +
                         " passes; the grammar has an unproductive same-level cycle "
                         "(an epsilon cycle yields unboundedly many derivations)");
  }

  TruncSeries visit(int var, const Node* stack) {
    int len = detail::StackArena::length(stack);
    if (len > cfg.effective_depth()) return TruncSeries::zero(cfg.order);
    if (len > depth_reached) depth_reached = len;

    auto key = std::make_pair(var, canonical(stack));
    Entry& e = memo.try_emplace(key, Entry{TruncSeries::zero(cfg.order), 0}).first->second;
    if (e.visited == round) return e.value;
    e.visited = round;
    if (memo.size() * (static_cast<size_t>(cfg.order) + 1) > kMemoCoeffCap)
      throw Error("solver memo exceeded " + std::to_string(memo.size()) +
                  " entries at order " + std::to_string(cfg.order) +
                  "; the stack language is too wide for exact keys at this depth "
                  "(lower --depth/-N, or try --keys parikh)");

    if (++call_depth > kMaxRecursionDepth) {
      --call_depth;
      throw Error("evaluation recursion depth exceeded; grammar too irregular for this solver");
    }

    TruncSeries total = TruncSeries::zero(cfg.order);
    for (int pi : g.productions_of(var)) {
      const Production& p = g.productions[pi];
      const Node* rest = stack;
      if (p.pop) {
        if (!rest || rest->sym != *p.pop) continue;
        rest = rest->next;
      }
      int shift = 0;
      bool dead = false;
      std::vector<TruncSeries> factors;
      for (const auto& item : p.rhs) {
        if (item.is_terminal) {
          ++shift;
          continue;
        }
        const Node* st = rest;
        if (!item.push.empty()) {
          if (item.push.back() == kBottomIndex && rest != nullptr) {
            dead = true;  // $ cannot land above existing symbols
            break;
          }
          for (auto it = item.push.rbegin(); it != item.push.rend(); ++it)
            st = arena.push(st, *it);
        }
        factors.push_back(visit(item.id, st));
      }
      if (dead || shift > cfg.order) continue;
      TruncSeries term = TruncSeries::one(cfg.order);
      for (const auto& f : factors) term = term * f;
      if (shift > 0) {  // multiply by z^shift
        TruncSeries shifted = TruncSeries::zero(cfg.order);
        for (int i = 0; i + shift <= cfg.order; ++i) shifted[i + shift] = term[i];
        term = shifted;
      }
      total = total + term;
    }
    --call_depth;

    // Re-fetch: recursion may have rehashed the memo table.
    Entry& e2 = memo.find(key)->second;
    if (!(e2.value == total)) {
      e2.value = total;
      changed = true;
    }
    return e2.value;
  }
};

Evaluator::Evaluator(const Grammar& g, const EvalConfig& cfg) : impl_(new Impl(g, cfg)) {}
Evaluator::~Evaluator() = default;

series::TruncSeries Evaluator::eval(int var, const StackString& stack) {
  return impl_->fixpoint(var, impl_->arena.from_vector(stack));
}

int Evaluator::rounds_used() const { return impl_->rounds_used; }
int Evaluator::stabilization_depth() const { return impl_->depth_reached; }
const EquationSystem& Evaluator::equations() const { return impl_->sys; }

// ---------------------------------------------------------------------------
// Parikh equivalence check

namespace {

// Deterministic BFS over reachable (variable, stack) pairs up to the given
// stack length.
std::vector<std::pair<int, StackString>> reachable_pairs(const Grammar& g, int depth,
                                                         long long max_pairs) {
  std::set<std::pair<int, StackString>> seen;
  std::vector<std::pair<int, StackString>> queue;
  queue.push_back({g.start, {}});
  seen.insert(queue[0]);
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    auto [var, stack] = queue[qi];
    for (int pi : g.productions_of(var)) {
      const Production& p = g.productions[pi];
      StackString rest = stack;
      if (p.pop) {
        if (rest.empty() || rest.front() != *p.pop) continue;
        rest.erase(rest.begin());
      }
      for (const auto& item : p.rhs) {
        if (item.is_terminal) continue;
        if (!item.push.empty() && item.push.back() == kBottomIndex && !rest.empty()) continue;
        StackString next = item.push;
        next.insert(next.end(), rest.begin(), rest.end());
        if (static_cast<int>(next.size()) > depth) continue;
        std::pair<int, StackString> pr{item.id, std::move(next)};
        if (static_cast<long long>(seen.size()) < max_pairs && seen.insert(pr).second)
          queue.push_back(std::move(pr));
      }
    }
  }
  return queue;
}

}  // namespace

ParikhCheckResult parikh_equivalence_check(const Grammar& g, int depth, int order) {
  ParikhCheckResult res;
  for (size_t v = 0; v < g.variable_names.size(); ++v) res.per_variable[static_cast<int>(v)] = true;

  auto pairs = reachable_pairs(g, depth, 500000);

  // Group by (variable, Parikh class); the sorted stack is the class tag.
  std::map<std::pair<int, StackString>, std::vector<StackString>> groups;
  for (auto& [var, stack] : pairs) {
    StackString tag = stack;
    std::sort(tag.begin(), tag.end(), std::greater<int>());
    groups[{var, tag}].push_back(stack);
  }

  constexpr int kEvalMargin = 6;
  EvalConfig cfg;
  cfg.order = order;
  cfg.depth_cap = depth + kEvalMargin;
  cfg.key_mode = KeyMode::exact_stack;
  Evaluator ev(g, cfg);

  for (auto& [key, members] : groups) {
    const int var = key.first;
    if (members.size() < 2 || !res.per_variable[var]) continue;
    std::sort(members.begin(), members.end(), [](const StackString& a, const StackString& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });
    TruncSeries first = ev.eval(var, members[0]);
    for (size_t i = 1; i < members.size(); ++i) {
      TruncSeries other = ev.eval(var, members[i]);
      if (!(other == first)) {
        res.per_variable[var] = false;
        res.all_equivalent = false;
        res.witnesses.emplace(var, ParikhWitness{members[0], members[i]});
        break;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// solve

KeyMode default_key_mode(const LoadingClass& lc) {
  switch (lc.kind) {
    case LoadingKind::single_index:
    case LoadingKind::serial:
      return KeyMode::parikh_tuple;
    default:
      return KeyMode::exact_stack;
  }
}

namespace {

SolveResult solve_impl(const Grammar& g, const EvalConfig& cfg, bool run_gate) {
  SolveResult res;
  res.loading = classify_loading(g);

  if (cfg.key_mode == KeyMode::parikh_tuple && run_gate) {
    ParikhCheckResult check = parikh_equivalence_check(g, cfg.parikh_check_depth, cfg.order);
    if (!check.all_equivalent) {
      std::string msg = "parikh_tuple keys are unsound for this grammar";
      if (!check.witnesses.empty()) {
        const auto& [var, w] = *check.witnesses.begin();
        auto fmt = [&](const StackString& s) {
          std::string out;
          for (size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + g.index_names[s[i]];
          return out;
        };
        msg += ": variable " + g.variable_names[var] + " differs on stacks [" + fmt(w.a) +
               "] vs [" + fmt(w.b) + "]";
      }
      throw SolveError(SolveErrorKind::parikh_unsound, msg);
    }
    res.warnings.push_back("parikh keys validated on reachable stacks to depth " +
                           std::to_string(cfg.parikh_check_depth));
  }

  Evaluator ev(g, cfg);
  res.series = ev.eval(g.start, {});
  res.rounds = ev.rounds_used();
  res.stabilization_depth = ev.stabilization_depth();

  if (cfg.ambiguity_probe) {
    oracle::DerivationConfig probe;
    probe.max_len = std::min(cfg.order, 10);
    probe.max_stack = probe.max_len + 4;
    probe.max_items = 64;
    probe.max_forms = 200000;
    auto dups = oracle::ambiguity_scan(g, probe);
    if (!dups.empty())
      res.warnings.push_back("ambiguous grammar: series counts derivations, not words (first: " +
                             oracle::format_word(g, dups[0].first) + " has " +
                             dups[0].second.get_str() + " parse trees)");
  }
  return res;
}

}  // namespace

SolveResult solve(const Grammar& g, const EvalConfig& cfg) { return solve_impl(g, cfg, true); }

SolveResult solve_checked(const Grammar& g, const EvalConfig& cfg) {
  SolveResult at_m = solve_impl(g, cfg, true);
  EvalConfig deeper = cfg;
  deeper.depth_cap = cfg.effective_depth() + 1;
  deeper.ambiguity_probe = false;
  // The gate depends on cfg.parikh_check_depth and the order, not on the
  // depth cap; one pass covers both runs.
  SolveResult at_m1 = solve_impl(g, deeper, false);
  if (!(at_m.series == at_m1.series)) {
    int first = 0;
    while (at_m.series[first] == at_m1.series[first]) ++first;
    throw SolveError(SolveErrorKind::depth_exhausted,
                     "series changes between depth caps " +
                         std::to_string(cfg.effective_depth()) + " and " +
                         std::to_string(cfg.effective_depth() + 1) + " (first at z^" +
                         std::to_string(first) +
                         "); raise --depth or check that the grammar is balanced");
  }
  return at_m;
}

}  // namespace igrowth::dsv
