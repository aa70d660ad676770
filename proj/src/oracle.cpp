#include "igrowth/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

#include "igrowth/stack_arena.hpp"

namespace igrowth::oracle {

bool WordLess::operator()(const std::vector<int>& a, const std::vector<int>& b) const {
  if (a.size() != b.size()) return a.size() < b.size();
  const std::vector<int>* rank = name_rank ? name_rank.get() : nullptr;
  for (size_t i = 0; i < a.size(); ++i) {
    int ra = rank ? (*rank)[a[i]] : a[i];
    int rb = rank ? (*rank)[b[i]] : b[i];
    if (ra != rb) return ra < rb;
  }
  return false;
}

std::string format_word(const Grammar& g, const std::vector<int>& word) {
  if (word.empty()) return "eps";
  std::string out;
  for (int t : word) out += g.terminal_names[t];
  return out;
}

// ---------------------------------------------------------------------------
// step_expand: reference single-step semantics over plain vectors.

std::vector<SententialForm> step_expand(const SententialForm& form, const Grammar& g) {
  std::vector<SententialForm> out;
  size_t head = 0;
  while (head < form.size() && form[head].is_terminal) ++head;
  if (head == form.size()) return out;
  const FormItem& item = form[head];
  for (int pi : g.productions_of(item.id)) {
    const Production& p = g.productions[pi];
    StackString rest = item.stack;
    if (p.pop) {
      if (rest.empty() || rest.front() != *p.pop) continue;
      rest.erase(rest.begin());
    }
    SententialForm next(form.begin(), form.begin() + head);
    bool ok = true;
    for (const auto& r : p.rhs) {
      if (r.is_terminal) {
        next.push_back({true, r.id, {}});
        continue;
      }
      if (!r.push.empty() && r.push.back() == kBottomIndex && !rest.empty()) {
        ok = false;  // $ would land above existing symbols
        break;
      }
      StackString st = r.push;
      st.insert(st.end(), rest.begin(), rest.end());
      next.push_back({false, r.id, std::move(st)});
    }
    if (!ok) continue;
    next.insert(next.end(), form.begin() + head + 1, form.end());
    out.push_back(std::move(next));
  }
  return out;
}

// ---------------------------------------------------------------------------
// The enumeration engine: iterative depth-first search over leftmost
// derivations. Stacks are hash-consed so copies are pointer-sized; completed
// words accumulate exact parse-tree counts.

namespace {

constexpr long long kInfYield = std::numeric_limits<long long>::max() / 4;

// Stack-blind lower bound on the terminal yield of each variable, assuming
// every pop is available. Sound for pruning: true yields are never smaller.
std::vector<long long> min_yields(const Grammar& g) {
  std::vector<long long> y(g.variable_names.size(), kInfYield);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : g.productions) {
      long long total = 0;
      for (const auto& item : p.rhs) {
        if (item.is_terminal)
          total += 1;
        else
          total += y[item.id];
        if (total >= kInfYield) {
          total = kInfYield;
          break;
        }
      }
      if (total < y[p.lhs]) {
        y[p.lhs] = total;
        changed = true;
      }
    }
  }
  return y;
}

struct PendItem {
  bool is_terminal;
  int id;
  const detail::StackArena::Node* stack;  // variables only
};

// Pending suffixes of sentential forms are persistent cons lists: a child
// form shares its tail with the parent, so one expansion costs O(|rhs|)
// instead of O(form length). Nodes live in a flat LIFO arena (index-linked,
// -1 = nil) rolled back on backtrack, keeping memory proportional to the
// derivation path.
struct PendNode {
  PendItem item;
  int next;
};

class Engine {
 public:
  Engine(const Grammar& g, const DerivationConfig& cfg, bool track_balance)
      : g_(g),
        cfg_(cfg),
        track_balance_(track_balance),
        yield_(min_yields(g)),
        budget_(cfg.max_forms) {
    max_path_ = std::max<long long>(4096, 8LL * cfg.max_items * (cfg.max_len + 2));
    // Explore non-pushing productions first so that when a budget dies the
    // truncated result is dense in short words. Exploration order does not
    // affect which derivations exist, only which are reached first.
    prod_order_.resize(g.variable_names.size());
    for (size_t v = 0; v < prod_order_.size(); ++v) {
      auto& order = prod_order_[v];
      for (int round = 0; round < 2; ++round)
        for (int pi : g.productions_of(static_cast<int>(v))) {
          bool pushes = false;
          for (const auto& item : g.productions[pi].rhs)
            if (!item.is_terminal && !item.push.empty()) pushes = true;
          if ((round == 0) == !pushes) order.push_back(pi);
        }
    }
  }

  void run() {
    pend_arena_.reserve(1 << 16);
    int init = alloc({false, g_.start, nullptr}, -1);
    push_child(init, 1, yield_[g_.start], 0);
    while (!frames_.empty()) {
      if (budget_ <= 0) {
        truncated_ = true;
        while (!frames_.empty()) pop_frame();
        break;
      }
      Frame& f = frames_.back();
      const auto& prods = prod_order_[pend_arena_[f.pending].item.id];
      if (f.cursor >= prods.size()) {
        pop_frame();
        continue;
      }
      const Production& p = g_.productions[prods[f.cursor++]];
      expand(f, p);
    }
  }

  bool truncated() const { return truncated_; }
  const std::map<std::vector<int>, BigInt>& raw_counts() const { return counts_; }
  const std::set<std::pair<int, int>>& balance_pairs() const { return pairs_; }

 private:
  struct Frame {
    int pending;                  // front is always a variable
    long long pending_count;      // items in the pending list
    long long pending_yield;      // sum of per-item minimal yields
    size_t cursor = 0;
    int emitted = 0;              // terminals this frame appended to word_
    int saved_max_depth = 0;
    size_t watermark = 0;         // pend arena size before this frame
  };

  int alloc(PendItem item, int next) {
    pend_arena_.push_back(PendNode{item, next});
    return static_cast<int>(pend_arena_.size()) - 1;
  }

  void expand(const Frame& f, const Production& p) {
    const PendItem head = pend_arena_[f.pending].item;
    const auto* rest = head.stack;
    if (p.pop) {
      if (!rest || rest->sym != *p.pop) return;
      rest = rest->next;
    }
    --budget_;

    // Resolve rhs stacks and prune before building any node.
    rhs_buf_.clear();
    int new_depth = cur_max_depth_;
    long long yield_delta = -yield_[head.id];
    for (const auto& item : p.rhs) {
      if (item.is_terminal) {
        rhs_buf_.push_back({true, item.id, nullptr});
        yield_delta += 1;
        continue;
      }
      const detail::StackArena::Node* st = rest;
      if (!item.push.empty()) {
        if (item.push.back() == kBottomIndex && rest != nullptr) return;  // dead
        for (auto it = item.push.rbegin(); it != item.push.rend(); ++it)
          st = arena_.push(st, *it);
      }
      int len = detail::StackArena::length(st);
      if (len > cfg_.max_stack) {
        truncated_ = true;
        return;
      }
      if (len > new_depth) new_depth = len;
      rhs_buf_.push_back({false, item.id, st});
      yield_delta += yield_[item.id];
    }
    long long new_yield = f.pending_yield + yield_delta;
    if (static_cast<long long>(word_.size()) + new_yield > cfg_.max_len)
      return;  // cannot reach a word within bound
    long long new_count = f.pending_count - 1 + static_cast<long long>(rhs_buf_.size());
    if (static_cast<long long>(word_.size()) + new_count > cfg_.max_items) {
      truncated_ = true;
      return;
    }
    if (static_cast<long long>(frames_.size()) >= max_path_) {
      truncated_ = true;
      return;
    }
    int child = pend_arena_[f.pending].next;
    for (auto it = rhs_buf_.rbegin(); it != rhs_buf_.rend(); ++it) child = alloc(*it, child);
    push_child(child, new_count, new_yield, new_depth);
  }

  // Emits leading terminals, then either records a completed word or pushes
  // a frame whose pending front is a variable.
  void push_child(int pending, long long count, long long yield, int depth) {
    int emitted = 0;
    while (pending >= 0 && pend_arena_[pending].item.is_terminal) {
      word_.push_back(pend_arena_[pending].item.id);
      ++emitted;
      --count;
      --yield;
      pending = pend_arena_[pending].next;
    }
    if (static_cast<int>(word_.size()) > cfg_.max_len) {
      word_.resize(word_.size() - emitted);
      return;  // dead: terminals never disappear
    }
    if (pending < 0) {
      counts_[word_] += 1;
      if (track_balance_)
        pairs_.insert({std::max(depth, cur_max_depth_), static_cast<int>(word_.size())});
      word_.resize(word_.size() - emitted);
      return;
    }
    Frame f;
    f.pending = pending;
    f.pending_count = count;
    f.pending_yield = yield;
    f.emitted = emitted;
    f.saved_max_depth = cur_max_depth_;
    f.watermark = pend_arena_.size();
    cur_max_depth_ = std::max(cur_max_depth_, depth);
    frames_.push_back(f);
  }

  void pop_frame() {
    Frame& f = frames_.back();
    word_.resize(word_.size() - f.emitted);
    cur_max_depth_ = f.saved_max_depth;
    pend_arena_.resize(f.watermark);
    frames_.pop_back();
  }

  const Grammar& g_;
  DerivationConfig cfg_;
  bool track_balance_;
  std::vector<long long> yield_;
  long long budget_;
  long long max_path_;
  std::vector<std::vector<int>> prod_order_;
  detail::StackArena arena_;
  std::vector<PendNode> pend_arena_;
  std::vector<PendItem> rhs_buf_;
  std::vector<Frame> frames_;
  std::vector<int> word_;
  int cur_max_depth_ = 0;
  bool truncated_ = false;
  std::map<std::vector<int>, BigInt> counts_;
  std::set<std::pair<int, int>> pairs_;
};

std::vector<int> name_rank(const Grammar& g) {
  std::vector<int> order(g.terminal_names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return g.terminal_names[a] < g.terminal_names[b]; });
  std::vector<int> rank(g.terminal_names.size());
  for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  return rank;
}

}  // namespace

WordCounts enumerate_words(const Grammar& g, const DerivationConfig& cfg) {
  Engine e(g, cfg, false);
  e.run();
  WordCounts out;
  auto rank = std::make_shared<const std::vector<int>>(name_rank(g));
  out.counts = std::map<std::vector<int>, BigInt, WordLess>(WordLess{rank});
  out.truncated = e.truncated();
  for (const auto& [w, c] : e.raw_counts()) out.counts.emplace(w, c);
  return out;
}

series::CountVector counts_to_vector(const WordCounts& words, int order, series::CountMode mode) {
  series::CountVector out;
  out.mode = mode;
  out.truncated = words.truncated;
  out.coeffs.assign(order + 1, 0);
  for (const auto& [w, c] : words.counts) {
    if (static_cast<int>(w.size()) > order) continue;
    out.coeffs[w.size()] += mode == series::CountMode::distinct_words ? BigInt(1) : c;
  }
  return out;
}

series::CountVector growth_coefficients(const Grammar& g, const DerivationConfig& cfg,
                                        series::CountMode mode) {
  return counts_to_vector(enumerate_words(g, cfg), cfg.max_len, mode);
}

std::vector<std::pair<std::vector<int>, BigInt>> ambiguity_scan(const Grammar& g,
                                                                const DerivationConfig& cfg) {
  WordCounts words = enumerate_words(g, cfg);
  std::vector<std::pair<std::vector<int>, BigInt>> out;
  for (const auto& [w, c] : words.counts)
    if (c >= 2) out.emplace_back(w, c);
  return out;
}

ParikhGrid parikh_grid(const WordCounts& words, const std::vector<int>& axes) {
  ParikhGrid grid;
  grid.axes = axes;
  grid.truncated = words.truncated;
  for (const auto& [w, c] : words.counts) {
    std::vector<int> key(axes.size(), 0);
    for (int t : w)
      for (size_t i = 0; i < axes.size(); ++i)
        if (axes[i] == t) ++key[i];
    grid.cells[key] += 1;
  }
  return grid;
}

ParikhGrid parikh_grid(const Grammar& g, const DerivationConfig& cfg,
                       const std::vector<int>& axes) {
  for (int a : axes)
    if (a < 0 || a >= static_cast<int>(g.terminal_names.size()))
      throw Error("parikh_grid axis is not a terminal of the grammar");
  return parikh_grid(enumerate_words(g, cfg), axes);
}

series::BivariateGrid to_bivariate(const ParikhGrid& grid, int nx, int ny) {
  if (grid.axes.size() != 2) throw Error("bivariate view requires exactly two axes");
  series::BivariateGrid out(nx, ny);
  for (const auto& [key, c] : grid.cells)
    if (key[0] <= nx && key[1] <= ny) out.at(key[0], key[1]) = c;
  return out;
}

BalanceEstimate estimate_balance(const Grammar& g, const DerivationConfig& cfg) {
  Engine e(g, cfg, true);
  e.run();
  BalanceEstimate est;
  est.witnessed_pairs.assign(e.balance_pairs().begin(), e.balance_pairs().end());
  constexpr int kMaxK = 16;
  for (int c : {1, 2, 4, 8}) {
    long long k_req = 0;
    for (auto [depth, len] : est.witnessed_pairs)
      k_req = std::max<long long>(k_req, depth - static_cast<long long>(c) * len);
    if (k_req <= kMaxK) {
      est.c = c;
      est.k = static_cast<int>(k_req);
      est.satisfied = true;
      return est;
    }
  }
  est.satisfied = false;
  return est;
}

}  // namespace igrowth::oracle
