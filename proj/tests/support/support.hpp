#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ucca/passage.hpp"
#include "ucca/scorer.hpp"

namespace ucca::testing {

struct Fixture {
  std::string name;  // file stem
  std::string text;
};

std::string fixture_dir();
std::string read_text(const std::string& path);
// All tests/fixtures/corpus/*.txt, sorted by name.
std::vector<Fixture> corpus();
const Fixture& fixture(const std::string& name);

struct GenOptions {
  std::size_t max_tokens = 10;
  std::size_t max_depth = 4;
  bool punctuation = true;
  bool discontiguous = true;
  bool implicit = true;
  std::size_t max_remotes = 2;
  bool secondary = true;
  // When non-empty, used as the token sequence instead of drawing one.
  std::vector<Token> tokens;
};

// Random well-formed passage with full coverage. Words are unique, so every
// unit's yield text is distinct and the passage survives render/parse.
Passage random_passage(std::mt19937_64& rng, const GenOptions& options = {});

// Same tokens as `gold`, with some edges relabeled and, sometimes, a fresh
// random structure.
Passage perturb(std::mt19937_64& rng, const Passage& gold);

struct Mutant {
  std::string rule;      // the single rule it must trigger
  std::string base;      // conforming fixture it was derived from
  std::string mutation;  // what was changed
  Passage passage;
};

// One minimal mutant per registered rule, in registry order.
std::vector<Mutant> mutants();

// Maximum matching found by exhaustive search over all assignments.
std::size_t brute_force_matches(const std::vector<EdgeSignature>& gold, const std::vector<EdgeSignature>& pred,
                                ScoreMode mode);

// The randomized properties: root yield equals the non-punctuation tokens,
// the primary edges form a tree, self-comparison scores exactly 1.0, labeled
// matches never exceed unlabeled ones, and stats add up across any split of
// a collection. Returns one message per violated case.
struct PropertyReport {
  std::size_t cases = 0;
  std::vector<std::string> failures;
};
PropertyReport check_core_properties(std::uint64_t seed, std::size_t cases);

// Twenty small gold/predicted pairs written out in bracket notation.
std::vector<std::pair<std::string, std::string>> scorer_pairs();

}  // namespace ucca::testing
