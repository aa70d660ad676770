#pragma once

#include <string>
#include <vector>

#include "igrowth/dsv.hpp"
#include "igrowth/grammar.hpp"
#include "igrowth/oracle.hpp"
#include "igrowth/series.hpp"

namespace igrowth::corpus {

enum class ExpectedKind {
  reference,   // named reference sequence
  rational,    // truncated expansion of P/Q
  derived,     // coefficient function frozen from an independent derivation
  oracle_only  // solver-vs-enumeration agreement is the whole contract
};

struct CorpusEntry;

using DerivedFn = std::vector<BigInt> (*)(int order);
using CustomCheck = bool (*)(const Grammar&, const CorpusEntry&, const oracle::WordCounts&,
                             std::string& detail);

// An embedded grammar with verified caps and a checkable expected result.
struct CorpusEntry {
  std::string name;
  std::string grammar_text;
  std::string provenance;

  int order = 20;
  oracle::DerivationConfig caps;  // verified: results are complete at these caps

  bool run_solver = true;
  dsv::KeyMode key_mode = dsv::KeyMode::exact_stack;
  int depth_cap = -1;

  ExpectedKind kind = ExpectedKind::oracle_only;
  series::CountMode expected_mode = series::CountMode::distinct_words;
  std::string reference;  // ExpectedKind::reference
  std::string rational;   // ExpectedKind::rational, "P/Q"
  DerivedFn derived = nullptr;

  bool expect_ambiguous = false;
  std::string first_ambiguous_word;
  CustomCheck custom = nullptr;
};

const std::vector<CorpusEntry>& entries();
const CorpusEntry* find_entry(const std::string& name);

struct EntryResult {
  std::string name;
  bool pass = false;
  std::string detail;  // first failure, or a short summary
  double ms = 0;
};

EntryResult run_entry(const CorpusEntry& entry);

}  // namespace igrowth::corpus
