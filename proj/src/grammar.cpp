#include "igrowth/grammar.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace igrowth {

namespace {

int find_name(const std::vector<std::string>& names, const std::string& s) {
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == s) return static_cast<int>(i);
  return -1;
}

}  // namespace

int Grammar::variable_id(const std::string& name) const { return find_name(variable_names, name); }
int Grammar::terminal_id(const std::string& name) const { return find_name(terminal_names, name); }
int Grammar::index_id(const std::string& name) const { return find_name(index_names, name); }

const std::vector<int>& Grammar::productions_of(int var) const { return by_var_.at(var); }

void Grammar::seal() {
  by_var_.assign(variable_names.size(), {});
  for (size_t i = 0; i < productions.size(); ++i)
    by_var_[productions[i].lhs].push_back(static_cast<int>(i));
}

void Grammar::validate() const {
  if (start < 0 || start >= static_cast<int>(variable_names.size()))
    throw Error("grammar has no valid start variable");
  if (index_names.empty() || index_names[0] != "$")
    throw Error("index table must reserve id 0 for $");
  auto check_index = [&](int x) {
    if (x < 0 || x >= static_cast<int>(index_names.size()))
      throw Error("undeclared index symbol id in production");
  };
  for (const auto& p : productions) {
    if (p.lhs < 0 || p.lhs >= static_cast<int>(variable_names.size()))
      throw Error("undeclared variable on production lhs");
    if (p.pop) check_index(*p.pop);
    for (const auto& item : p.rhs) {
      if (item.is_terminal) {
        if (item.id < 0 || item.id >= static_cast<int>(terminal_names.size()))
          throw Error("undeclared terminal in production rhs");
        if (!item.push.empty()) throw Error("terminal cannot carry a push string");
      } else {
        if (item.id < 0 || item.id >= static_cast<int>(variable_names.size()))
          throw Error("undeclared variable in production rhs");
        for (size_t i = 0; i < item.push.size(); ++i) {
          check_index(item.push[i]);
          if (item.push[i] == kBottomIndex && i + 1 != item.push.size())
            throw Error("$ may only be the last symbol of a push string");
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  std::string text;
  int col;  // 1-based
};

std::vector<Token> lex_line(const std::string& line, int lineno) {
  std::vector<Token> out;
  size_t i = 0;
  auto is_ident = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    int col = static_cast<int>(i) + 1;
    if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      out.push_back({"->", col});
      i += 2;
    } else if (c == '|' || c == '[' || c == ']' || c == '$') {
      out.push_back({std::string(1, c), col});
      ++i;
    } else if (is_ident(c)) {
      size_t j = i;
      while (j < line.size() && is_ident(line[j])) ++j;
      out.push_back({line.substr(i, j - i), col});
      i = j;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", lineno, col);
    }
  }
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, int lineno) : toks_(std::move(toks)), lineno_(lineno) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token& peek() const {
    if (done()) throw ParseError("unexpected end of line", lineno_, last_col());
    return toks_[pos_];
  }
  Token next() {
    const Token& t = peek();
    ++pos_;
    return t;
  }
  void expect(const std::string& s) {
    if (done() || toks_[pos_].text != s)
      throw ParseError("expected '" + s + "'", lineno_, done() ? last_col() : toks_[pos_].col);
    ++pos_;
  }
  bool accept(const std::string& s) {
    if (!done() && toks_[pos_].text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  int last_col() const { return toks_.empty() ? 1 : toks_.back().col + 1; }
  int lineno() const { return lineno_; }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  int lineno_;
};

bool is_keyword(const std::string& s) {
  return s == "start" || s == "vars" || s == "terminals" || s == "indices" || s == "eps";
}

}  // namespace

Grammar parse_grammar(const std::string& text) {
  Grammar g;
  g.index_names.push_back("$");
  std::string start_name;
  int start_line = 0;

  std::unordered_map<std::string, char> kind;  // 'v' variable, 't' terminal, 'i' index

  auto declare = [&](const std::string& name, char k, int lineno, int col) {
    if (name == "$") throw ParseError("$ is implicit and never declared", lineno, col);
    auto it = kind.find(name);
    if (it != kind.end()) {
      if (it->second != k)
        throw ParseError("'" + name + "' already declared with a different role", lineno, col);
      return;  // repeated declaration, same role
    }
    kind[name] = k;
    if (k == 'v') g.variable_names.push_back(name);
    if (k == 't') g.terminal_names.push_back(name);
    if (k == 'i') g.index_names.push_back(name);
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::pair<LineParser, int>> production_lines;

  while (std::getline(in, line)) {
    ++lineno;
    std::vector<Token> toks = lex_line(line, lineno);
    if (toks.empty()) continue;
    const std::string& head = toks[0].text;
    if (head == "start") {
      if (toks.size() != 2)
        throw ParseError("start line expects exactly one variable", lineno, toks[0].col);
      if (!start_name.empty()) throw ParseError("duplicate start line", lineno, toks[0].col);
      start_name = toks[1].text;
      start_line = lineno;
    } else if (head == "vars" || head == "terminals" || head == "indices") {
      char k = head[0] == 'v' ? 'v' : head[0] == 't' ? 't' : 'i';
      if (toks.size() < 2) throw ParseError("empty declaration line", lineno, toks[0].col);
      for (size_t i = 1; i < toks.size(); ++i) {
        if (toks[i].text == "|" || toks[i].text == "->" || toks[i].text == "[" || toks[i].text == "]")
          throw ParseError("'" + toks[i].text + "' is not a symbol name", lineno, toks[i].col);
        declare(toks[i].text, k, lineno, toks[i].col);
      }
    } else {
      production_lines.emplace_back(LineParser(std::move(toks), lineno), lineno);
    }
  }

  if (start_name.empty()) throw ParseError("missing start line", lineno ? lineno : 1, 1);
  g.start = g.variable_id(start_name);
  if (g.start < 0)
    throw ParseError("start variable '" + start_name + "' is not declared", start_line, 1);

  auto index_of = [&](const Token& t, int lineno2) {
    if (t.text == "$") return kBottomIndex;
    int id = g.index_id(t.text);
    if (id < 0) throw ParseError("undeclared index symbol '" + t.text + "'", lineno2, t.col);
    return id;
  };

  for (auto& [lp, pl] : production_lines) {
    // LHS
    Token lhs_tok = lp.next();
    int lhs = g.variable_id(lhs_tok.text);
    if (lhs < 0)
      throw ParseError("undeclared variable '" + lhs_tok.text + "' on lhs", pl, lhs_tok.col);
    std::optional<int> pop;
    if (lp.accept("[")) {
      Token x = lp.next();
      pop = index_of(x, pl);
      lp.expect("]");
    }
    lp.expect("->");

    // Alternatives
    bool more = true;
    while (more) {
      Production p;
      p.lhs = lhs;
      p.pop = pop;
      if (lp.accept("eps")) {
        // empty rhs
      } else {
        while (!lp.done() && lp.peek().text != "|") {
          Token t = lp.next();
          if (t.text == "$")
            throw ParseError("$ cannot appear as an rhs symbol outside brackets", pl, t.col);
          if (t.text == "->" || t.text == "[" || t.text == "]")
            throw ParseError("unexpected '" + t.text + "'", pl, t.col);
          if (is_keyword(t.text))
            throw ParseError("'" + t.text + "' is reserved", pl, t.col);
          RhsSymbol item;
          int vid = g.variable_id(t.text);
          int tid = g.terminal_id(t.text);
          if (vid >= 0) {
            item.is_terminal = false;
            item.id = vid;
            if (lp.accept("[")) {
              while (!lp.accept("]")) {
                Token x = lp.next();
                int xi = index_of(x, pl);
                if (!item.push.empty() && item.push.back() == kBottomIndex)
                  throw ParseError("$ must be the bottom-most pushed symbol", pl, x.col);
                item.push.push_back(xi);
              }
              if (item.push.empty())
                throw ParseError("empty push string", pl, t.col);
            }
          } else if (tid >= 0) {
            item.is_terminal = true;
            item.id = tid;
          } else {
            throw ParseError("undeclared symbol '" + t.text + "'", pl, t.col);
          }
          p.rhs.push_back(std::move(item));
        }
        if (p.rhs.empty())
          throw ParseError("empty alternative (use 'eps' for the empty word)", pl, lp.last_col());
      }
      g.productions.push_back(std::move(p));
      more = lp.accept("|");
    }
    if (!lp.done())
      throw ParseError("trailing tokens after production", pl, lp.peek().col);
  }

  g.seal();
  g.validate();
  return g;
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_grammar(const Grammar& g) {
  std::ostringstream out;
  out << "start " << g.variable_names[g.start] << "\n";
  out << "vars";
  for (const auto& v : g.variable_names) out << ' ' << v;
  out << "\n";
  if (!g.terminal_names.empty()) {
    out << "terminals";
    for (const auto& t : g.terminal_names) out << ' ' << t;
    out << "\n";
  }
  if (g.index_names.size() > 1) {
    out << "indices";
    for (size_t i = 1; i < g.index_names.size(); ++i) out << ' ' << g.index_names[i];
    out << "\n";
  }

  // Group alternatives by (lhs, pop) in first-appearance order.
  std::vector<std::pair<int, int>> heads;  // (lhs, pop+1; 0 = none)
  std::map<std::pair<int, int>, std::vector<const Production*>> groups;
  for (const auto& p : g.productions) {
    std::pair<int, int> key{p.lhs, p.pop ? *p.pop + 1 : 0};
    if (!groups.count(key)) heads.push_back(key);
    groups[key].push_back(&p);
  }
  for (const auto& key : heads) {
    out << g.variable_names[key.first];
    if (key.second) out << '[' << g.index_names[key.second - 1] << ']';
    out << " ->";
    bool first = true;
    for (const Production* p : groups[key]) {
      out << (first ? " " : " | ");
      first = false;
      if (p->rhs.empty()) {
        out << "eps";
        continue;
      }
      bool first_item = true;
      for (const auto& item : p->rhs) {
        if (!first_item) out << ' ';
        first_item = false;
        if (item.is_terminal) {
          out << g.terminal_names[item.id];
        } else {
          out << g.variable_names[item.id];
          if (!item.push.empty()) {
            out << '[';
            for (size_t i = 0; i < item.push.size(); ++i)
              out << (i ? " " : "") << g.index_names[item.push[i]];
            out << ']';
          }
        }
      }
    }
    out << "\n";
  }
  return out.str();
}

bool grammar_equal(const Grammar& a, const Grammar& b) {
  if (a.variable_names != b.variable_names) return false;
  if (a.terminal_names != b.terminal_names) return false;
  if (a.index_names != b.index_names) return false;
  if (a.start != b.start) return false;
  auto fingerprint = [](const Grammar& g) {
    std::vector<std::string> fp;
    for (const auto& p : g.productions) {
      std::ostringstream s;
      s << p.lhs << '/' << (p.pop ? *p.pop : -1) << ':';
      for (const auto& item : p.rhs) {
        s << (item.is_terminal ? 't' : 'v') << item.id;
        for (int x : item.push) s << '.' << x;
        s << ' ';
      }
      fp.push_back(s.str());
    }
    std::sort(fp.begin(), fp.end());
    return fp;
  };
  return fingerprint(a) == fingerprint(b);
}

// ---------------------------------------------------------------------------
// Structure report

namespace {

// Bounded BFS over (variable, stack) pairs. Calls sink for every pair seen;
// returns false if a budget was hit.
template <typename Sink>
bool walk_pairs(const Grammar& g, int max_stack, long long max_pairs, Sink&& sink) {
  std::set<std::pair<int, StackString>> seen;
  std::vector<std::pair<int, StackString>> queue;
  queue.push_back({g.start, {}});
  seen.insert(queue[0]);
  bool complete = true;
  for (size_t qi = 0; qi < queue.size(); ++qi) {
    auto [var, stack] = queue[qi];
    sink(var, stack);
    for (int pi : g.productions_of(var)) {
      const Production& p = g.productions[pi];
      StackString rest = stack;
      if (p.pop) {
        if (rest.empty() || rest.front() != *p.pop) continue;
        rest.erase(rest.begin());
      }
      for (const auto& item : p.rhs) {
        if (item.is_terminal) continue;
        if (!item.push.empty() && item.push.back() == kBottomIndex && !rest.empty())
          continue;  // $ would land above existing symbols
        StackString next = item.push;
        next.insert(next.end(), rest.begin(), rest.end());
        if (static_cast<int>(next.size()) > max_stack) {
          complete = false;
          continue;
        }
        std::pair<int, StackString> pr{item.id, std::move(next)};
        if (seen.insert(pr).second) {
          if (static_cast<long long>(seen.size()) > max_pairs) {
            complete = false;
            continue;
          }
          queue.push_back(std::move(pr));
        }
      }
    }
  }
  return complete;
}

// Bounded search for any terminal word derivable from a single (var, stack)
// item. Depth-first over leftmost expansions.
bool derives_word(const Grammar& g, int var, const StackString& stack, const StructureOptions& opt,
                  long long& budget) {
  struct Item {
    int var;
    StackString stack;
  };
  std::vector<std::vector<Item>> work;  // forms; terminals dropped eagerly
  work.push_back({{var, stack}});
  while (!work.empty()) {
    if (--budget < 0) return false;
    std::vector<Item> form = std::move(work.back());
    work.pop_back();
    if (form.empty()) return true;
    Item head = form.front();
    for (int pi : g.productions_of(head.var)) {
      const Production& p = g.productions[pi];
      StackString rest = head.stack;
      if (p.pop) {
        if (rest.empty() || rest.front() != *p.pop) continue;
        rest.erase(rest.begin());
      }
      std::vector<Item> next;
      bool ok = true;
      for (const auto& item : p.rhs) {
        if (item.is_terminal) continue;
        if (!item.push.empty() && item.push.back() == kBottomIndex && !rest.empty()) {
          ok = false;
          break;
        }
        StackString ns = item.push;
        ns.insert(ns.end(), rest.begin(), rest.end());
        if (static_cast<int>(ns.size()) > opt.max_stack) {
          ok = false;
          break;
        }
        next.push_back({item.id, std::move(ns)});
      }
      if (!ok) continue;
      next.insert(next.end(), form.begin() + 1, form.end());
      if (static_cast<int>(next.size()) > opt.max_items) continue;
      work.push_back(std::move(next));
    }
  }
  return false;
}

}  // namespace

StructureReport check_structure(const Grammar& g, const StructureOptions& opt) {
  StructureReport r;

  r.epsilon_free = true;
  for (const auto& p : g.productions)
    if (p.rhs.empty() && p.lhs != g.start) r.epsilon_free = false;

  r.strict_reduced = true;
  for (const auto& p : g.productions) {
    int moved = p.pop ? 1 : 0;
    for (const auto& item : p.rhs)
      if (!item.is_terminal) moved += static_cast<int>(item.push.size());
    if (moved > 1) r.strict_reduced = false;
  }

  std::set<int> reached;
  std::map<int, std::vector<StackString>> stacks_of;
  bool complete = walk_pairs(g, opt.max_stack, opt.max_forms, [&](int var, const StackString& st) {
    reached.insert(var);
    auto& v = stacks_of[var];
    if (v.size() < 8) v.push_back(st);  // a few sample stacks per variable
  });

  for (size_t v = 0; v < g.variable_names.size(); ++v)
    if (!reached.count(static_cast<int>(v))) r.unreachable_vars.insert(g.variable_names[v]);

  for (size_t v = 0; v < g.variable_names.size(); ++v) {
    bool productive = false;
    long long budget = opt.max_forms;
    std::vector<StackString>& probes = stacks_of[static_cast<int>(v)];
    if (probes.empty()) {
      // Unreached variable: probe the empty stack and plain $.
      probes.push_back({});
      probes.push_back({kBottomIndex});
    }
    for (const auto& st : probes) {
      if (derives_word(g, static_cast<int>(v), st, opt, budget)) {
        productive = true;
        break;
      }
    }
    if (!productive) r.unproductive_vars.insert(g.variable_names[v]);
  }

  std::ostringstream note;
  note << "reachability/productivity bounded: stacks <= " << opt.max_stack << ", forms <= "
       << opt.max_items << " items" << (complete ? "" : " (search budget hit)");
  r.notes.push_back(note.str());
  return r;
}

// ---------------------------------------------------------------------------
// Loading classification

const char* to_string(LoadingKind k) {
  switch (k) {
    case LoadingKind::index_free: return "index_free";
    case LoadingKind::single_index: return "single_index";
    case LoadingKind::serial: return "serial";
    case LoadingKind::general: return "general";
  }
  return "?";
}

LoadingClass classify_loading(const Grammar& g) {
  LoadingClass lc;
  int n_idx = static_cast<int>(g.index_names.size()) - 1;  // excluding $

  if (n_idx == 0) {
    lc.kind = LoadingKind::index_free;
    lc.evidence = "no index symbols declared; classical context-free grammar";
    return lc;
  }

  // A pop immediately re-pushed (V[x] -> ... U[x] ...) leaves the stack
  // unchanged; such items do not count as pushes here.
  auto identity_push = [](const Production& p, const RhsSymbol& item) {
    return p.pop && item.push.size() == 1 && item.push[0] == *p.pop;
  };

  // self_push[v] = set of symbols x with a production v -> ... v[..x..] ...
  std::vector<std::set<int>> self_push(g.variable_names.size());
  for (const auto& p : g.productions)
    for (const auto& item : p.rhs)
      if (!item.is_terminal && item.id == p.lhs && !identity_push(p, item))
        for (int x : item.push)
          if (x != kBottomIndex) self_push[p.lhs].insert(x);

  if (n_idx == 1) {
    int loader = -1;
    int count = 0;
    for (size_t v = 0; v < self_push.size(); ++v)
      if (!self_push[v].empty()) {
        loader = static_cast<int>(v);
        ++count;
      }
    if (count == 1) {
      lc.kind = LoadingKind::single_index;
      lc.loaders = {{loader, 1}};
      lc.evidence = "single index symbol '" + g.index_names[1] + "' self-pushed only by '" +
                    g.variable_names[loader] + "'";
      return lc;
    }
    lc.kind = LoadingKind::general;
    lc.evidence = count == 0 ? "no variable self-pushes the index symbol"
                             : "several variables self-push the index symbol";
    return lc;
  }

  // Serial candidate: every index symbol is self-pushed by exactly one
  // variable, and every variable self-pushes at most one symbol.
  std::vector<int> loader_of(g.index_names.size(), -1);
  bool candidate = true;
  for (size_t v = 0; v < self_push.size() && candidate; ++v) {
    if (self_push[v].size() > 1) candidate = false;
    for (int x : self_push[v]) {
      if (loader_of[x] != -1) candidate = false;
      loader_of[x] = static_cast<int>(v);
    }
  }
  for (int x = 1; x <= n_idx && candidate; ++x)
    if (loader_of[x] == -1) candidate = false;

  if (candidate) {
    // Every push occurrence must be a loader self-push, a hand-off to
    // another loader's own symbol, or an entry push of the form f^* $ onto a
    // loader using that loader's symbol f.
    std::vector<int> sym_of(g.variable_names.size(), -1);
    for (int x = 1; x <= n_idx; ++x) sym_of[loader_of[x]] = x;

    std::map<int, std::set<int>> handoff;  // loader variable -> next loader variables
    std::set<int> entry;                   // loaders receiving a $-terminated entry push
    bool ok = true;
    for (const auto& p : g.productions) {
      for (const auto& item : p.rhs) {
        if (item.is_terminal || item.push.empty() || identity_push(p, item)) continue;
        int target_sym = sym_of[item.id];
        if (target_sym == -1) {
          ok = false;  // push onto a non-loader
          break;
        }
        bool ends_bottom = item.push.back() == kBottomIndex;
        bool uniform = true;
        size_t n_sym = item.push.size() - (ends_bottom ? 1 : 0);
        for (size_t i = 0; i < n_sym; ++i)
          if (item.push[i] != target_sym) uniform = false;
        if (!uniform) {
          ok = false;
          break;
        }
        if (ends_bottom) {
          entry.insert(item.id);
        } else if (n_sym == 1 && item.id == p.lhs) {
          // self-push, already recorded
        } else if (n_sym == 1 && sym_of[p.lhs] != -1) {
          handoff[p.lhs].insert(item.id);
        } else {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }

    if (ok) {
      // The hand-offs must form a single chain over all loaders, starting at
      // an entry loader.
      std::vector<int> loaders;
      for (int x = 1; x <= n_idx; ++x) loaders.push_back(loader_of[x]);
      std::map<int, int> indeg;
      for (int v : loaders) indeg[v] = 0;
      bool linear = true;
      for (auto& [from, tos] : handoff) {
        if (tos.size() > 1) linear = false;
        for (int t : tos) ++indeg[t];
      }
      int first = -1;
      for (int v : loaders)
        if (indeg[v] == 0) {
          if (first != -1) linear = false;
          first = v;
        }
      if (linear && first != -1 && (entry.empty() || (entry.size() == 1 && *entry.begin() == first))) {
        std::vector<int> chain;
        std::set<int> seen;
        int cur = first;
        while (cur != -1 && !seen.count(cur)) {
          chain.push_back(cur);
          seen.insert(cur);
          auto it = handoff.find(cur);
          cur = (it == handoff.end() || it->second.empty()) ? -1 : *it->second.begin();
        }
        if (chain.size() == loaders.size()) {
          lc.kind = LoadingKind::serial;
          std::ostringstream ev;
          ev << "serial chain";
          for (int v : chain) {
            lc.loaders.push_back({v, sym_of[v]});
            ev << " " << g.variable_names[v] << "(" << g.index_names[sym_of[v]] << ")";
          }
          ev << "; reachable stacks have the form";
          for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            ev << " " << g.index_names[sym_of[*it]] << "^*";
          ev << " $";
          lc.evidence = ev.str();
          return lc;
        }
      }
    }
  }

  lc.kind = LoadingKind::general;
  lc.evidence = "index pushes do not form a single serial loading chain";
  return lc;
}

}  // namespace igrowth
