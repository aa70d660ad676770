#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "igrowth/corpus.hpp"
#include "igrowth/grammar.hpp"

using namespace igrowth;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse the sqr grammar") {
  Grammar g = parse_grammar(corpus::find_entry("sqr")->grammar_text);
  CHECK(g.variable_names.size() == 3);
  CHECK(g.terminal_names.size() == 1);
  CHECK(g.index_names.size() == 2);  // $ plus f
  CHECK(g.productions.size() == 5);
  CHECK(g.variable_names[g.start] == "S");

  // D[f] -> D D carries a pop, S -> T[$] pushes the bottom marker
  int d = g.variable_id("D");
  REQUIRE(d >= 0);
  int pops = 0;
  for (int pi : g.productions_of(d))
    if (g.productions[pi].pop) ++pops;
  CHECK(pops == 2);
  const Production& sp = g.productions[g.productions_of(g.start)[0]];
  REQUIRE(sp.rhs.size() == 1);
  CHECK(sp.rhs[0].push == StackString{kBottomIndex});
}

TEST_CASE("parse epsilon production") {
  Grammar g = parse_grammar("start S\nvars S\nS -> eps\n");
  REQUIRE(g.productions.size() == 1);
  CHECK(g.productions[0].rhs.empty());
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_grammar("vars S\nS -> a\n"), ParseError);  // missing start
  CHECK_THROWS_AS(parse_grammar("start S\nvars S\nterminals a\nS -> Q\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("start S\nvars S T\nindices f\nS -> T[$ f]\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("start S\nvars S\nindices $\nS -> eps\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("start S\nvars S\nS -> $\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("start S\nvars S T\nS -> T[]\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("start S\nvars S\nterminals S\nS -> S\n"), ParseError);
  try {
    parse_grammar("start S\nvars S\nterminals a\nS -> a ?\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
    CHECK(e.col == 8);
  }
}

TEST_CASE("render canonical spellings") {
  Grammar g = parse_grammar(corpus::find_entry("double_ww")->grammar_text);
  std::string text = render_grammar(g);
  CHECK(text.find("R[a_idx] -> a R") != std::string::npos);

  Grammar e = parse_grammar("start S\nvars S\nS -> eps\n");
  CHECK(render_grammar(e).find("S -> eps") != std::string::npos);
}

TEST_CASE("round trip over the whole corpus") {
  for (const auto& entry : corpus::entries()) {
    CAPTURE(entry.name);
    Grammar g = parse_grammar(entry.grammar_text);
    Grammar g2 = parse_grammar(render_grammar(g));
    CHECK(grammar_equal(g, g2));
    // render o parse o render is the identity on canonical text
    CHECK(render_grammar(g2) == render_grammar(g));
  }
}

TEST_CASE("shipped corpus files match the embedded texts") {
  for (const auto& entry : corpus::entries()) {
    CAPTURE(entry.name);
    std::string path = std::string(CORPUS_DIR) + "/" + entry.name + ".ig";
    Grammar from_file = parse_grammar(read_file(path));
    Grammar embedded = parse_grammar(entry.grammar_text);
    CHECK(grammar_equal(from_file, embedded));
  }
}

TEST_CASE("grammar_equal ignores production order") {
  Grammar a = parse_grammar("start S\nvars S T\nterminals x y\nS -> x T\nT -> y\nS -> y\n");
  Grammar b = parse_grammar("start S\nvars S T\nterminals x y\nS -> x T | y\nT -> y\n");
  CHECK(grammar_equal(a, b));
  Grammar c = parse_grammar("start S\nvars S T\nterminals x y\nS -> x T\nT -> y\n");
  CHECK(!grammar_equal(a, c));
}

TEST_CASE("structure report") {
  StructureReport sqr = check_structure(parse_grammar(corpus::find_entry("sqr")->grammar_text));
  CHECK(sqr.epsilon_free);
  CHECK(sqr.strict_reduced);
  CHECK(sqr.unreachable_vars.empty());
  CHECK(sqr.unproductive_vars.empty());

  StructureReport inter =
      check_structure(parse_grammar(corpus::find_entry("intermediate")->grammar_text));
  CHECK(!inter.epsilon_free);  // C -> b C | eps with C != S

  StructureReport amb =
      check_structure(parse_grammar(corpus::find_entry("amb_quad")->grammar_text));
  CHECK(!amb.strict_reduced);  // S -> T[g $] pushes two symbols

  StructureReport divs =
      check_structure(parse_grammar(corpus::find_entry("divisors")->grammar_text));
  CHECK(!divs.strict_reduced);  // T -> A[f] R[f] pushes twice

  // start epsilon is allowed by the classical convention
  StructureReport eps = check_structure(parse_grammar("start S\nvars S\nterminals a\nS -> eps | a\n"));
  CHECK(eps.epsilon_free);
}

TEST_CASE("useless variables are reported within bounds") {
  Grammar g = parse_grammar(
      "start S\nvars S U V\nterminals a\nindices f\nS -> a\nU -> a\nV -> a V\n");
  StructureReport rep = check_structure(g);
  CHECK(rep.unreachable_vars == std::set<std::string>{"U", "V"});
  CHECK(rep.unproductive_vars == std::set<std::string>{"V"});
}

TEST_CASE("loading classification") {
  auto classify = [](const char* name) {
    return classify_loading(parse_grammar(corpus::find_entry(name)->grammar_text));
  };

  LoadingClass sqr = classify("sqr");
  CHECK(sqr.kind == LoadingKind::single_index);
  REQUIRE(sqr.loaders.size() == 1);
  CHECK(sqr.loaders[0].first == parse_grammar(corpus::find_entry("sqr")->grammar_text).variable_id("T"));

  Grammar serial_g = parse_grammar(corpus::find_entry("serial")->grammar_text);
  LoadingClass serial = classify_loading(serial_g);
  CHECK(serial.kind == LoadingKind::serial);
  REQUIRE(serial.loaders.size() == 2);
  CHECK(serial.loaders[0] ==
        std::pair<int, int>{serial_g.variable_id("T"), serial_g.index_id("g")});
  CHECK(serial.loaders[1] ==
        std::pair<int, int>{serial_g.variable_id("U"), serial_g.index_id("f")});

  CHECK(classify("ordering").kind == LoadingKind::general);
  CHECK(classify("double_ww").kind == LoadingKind::general);
  CHECK(classify("bg_simplified").kind == LoadingKind::general);
  CHECK(classify("anbncn").kind == LoadingKind::single_index);
  CHECK(classify("composites").kind == LoadingKind::single_index);
  CHECK(classify("amb_quad").kind == LoadingKind::serial);
  CHECK(classify("cs_exercise").kind == LoadingKind::general);

  LoadingClass cfg = classify_loading(
      parse_grammar("start S\nvars S\nterminals a b c\nS -> a S b c | a b c\n"));
  CHECK(cfg.kind == LoadingKind::index_free);
}

TEST_CASE("single_index never fires with two index symbols") {
  for (const char* name : {"serial", "ordering", "double_ww", "amb_quad", "bg_simplified"}) {
    CAPTURE(name);
    Grammar g = parse_grammar(corpus::find_entry(name)->grammar_text);
    CHECK(g.index_names.size() > 2);
    CHECK(classify_loading(g).kind != LoadingKind::single_index);
  }
}

TEST_CASE("strict_reduced is false whenever a push string has length 2") {
  for (const auto& entry : corpus::entries()) {
    Grammar g = parse_grammar(entry.grammar_text);
    bool long_push = false;
    for (const auto& p : g.productions)
      for (const auto& item : p.rhs)
        if (!item.is_terminal && item.push.size() >= 2) long_push = true;
    if (long_push) {
      CAPTURE(entry.name);
      CHECK(!check_structure(g).strict_reduced);
    }
  }
}
