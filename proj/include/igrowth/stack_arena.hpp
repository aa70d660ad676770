#pragma once

#include <deque>
#include <unordered_map>
#include <vector>

#include "igrowth/grammar.hpp"

namespace igrowth::detail {

// Hash-consed immutable index stacks. Nodes live as long as the arena; equal
// stacks share one node, so pointer equality is value equality and pops are
// shared-tail views. nullptr is the empty stack. Pushes of the first few
// symbol ids go through per-node child slots instead of the intern map;
// grammars rarely have more than two or three index symbols.
class StackArena {
 public:
  static constexpr int kFastSyms = 4;

  struct Node {
    int sym;
    const Node* next;
    int len;
    mutable const Node* kids[kFastSyms];
  };

  StackArena() {
    for (auto& r : roots_) r = nullptr;
  }

  const Node* push(const Node* tail, int sym) {
    if (sym < kFastSyms) {
      const Node* const* slot = tail ? &tail->kids[sym] : &roots_[sym];
      if (*slot) return *slot;
      const Node* n = make(tail, sym);
      *const_cast<const Node**>(slot) = n;
      return n;
    }
    Key k{sym, tail};
    auto it = intern_.find(k);
    if (it != intern_.end()) return it->second;
    const Node* n = make(tail, sym);
    intern_.emplace(k, n);
    return n;
  }

  // Builds from a topmost-first vector.
  const Node* from_vector(const StackString& s) {
    const Node* n = nullptr;
    for (auto it = s.rbegin(); it != s.rend(); ++it) n = push(n, *it);
    return n;
  }

  static StackString to_vector(const Node* n) {
    StackString out;
    for (; n; n = n->next) out.push_back(n->sym);
    return out;
  }

  static int length(const Node* n) { return n ? n->len : 0; }
  static int top(const Node* n) { return n->sym; }

 private:
  const Node* make(const Node* tail, int sym) {
    pool_.push_back(Node{sym, tail, length(tail) + 1, {nullptr, nullptr, nullptr, nullptr}});
    return &pool_.back();
  }

  struct Key {
    int sym;
    const Node* next;
    bool operator==(const Key& o) const { return sym == o.sym && next == o.next; }
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      size_t h = std::hash<const void*>()(k.next);
      return h ^ (static_cast<size_t>(k.sym) * 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
    }
  };
  std::deque<Node> pool_;
  const Node* roots_[kFastSyms];
  std::unordered_map<Key, const Node*, KeyHash> intern_;
};

}  // namespace igrowth::detail
