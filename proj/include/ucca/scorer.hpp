#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ucca/passage.hpp"

namespace ucca {

// An edge as seen by the scorer: the child's primary yield, the edge's
// categories and whether it is remote. Edges into implicit or token-less
// units are not scored.
struct EdgeSignature {
  std::vector<TokenPos> yield;
  CategorySet categories;
  bool remote = false;

  friend bool operator==(const EdgeSignature&, const EdgeSignature&) = default;
  friend auto operator<=>(const EdgeSignature&, const EdgeSignature&) = default;
};

// Sorted, so equal multisets compare equal.
std::vector<EdgeSignature> signatures(const Passage& passage);

enum class ScoreMode { Labeled, Unlabeled };

struct Prf {
  std::size_t matched = 0;
  std::size_t gold = 0;
  std::size_t predicted = 0;

  // 1.0 when both sides are empty; 0.0 when only one side is.
  double precision() const;
  double recall() const;
  double f1() const;

  Prf& operator+=(const Prf& other);
  friend bool operator==(const Prf&, const Prf&) = default;
};

struct EdgeClassScores {
  Prf primary;
  Prf remote;
};

struct ScoreReport {
  ScoreMode mode = ScoreMode::Labeled;
  EdgeClassScores labeled;
  EdgeClassScores unlabeled;
  // Per label, signatures carrying it on each side and how many of those
  // match a counterpart carrying it at the same yield.
  std::array<Prf, kCategoryCount> per_category{};

  // Scores for `mode`.
  const EdgeClassScores& selected() const { return mode == ScoreMode::Labeled ? labeled : unlabeled; }

  // Pools counts, e.g. across the passages of a corpus.
  ScoreReport& operator+=(const ScoreReport& other);
};

// Size of a maximum matching between the multisets where signatures match
// on (yield, remote), plus equal categories when labeled. Matching on
// equality makes greedy pairing optimal.
std::size_t count_matches(const std::vector<EdgeSignature>& gold, const std::vector<EdgeSignature>& pred,
                          ScoreMode mode);

// Throws Error(TokenMismatch) unless both passages have the same token texts
// and punctuation flags.
ScoreReport score(const Passage& gold, const Passage& pred, ScoreMode mode = ScoreMode::Labeled);

// Canonical JSON (same conventions as the interchange format).
std::string report_to_json(const ScoreReport& report);
// Aligned plain-text table.
std::string report_to_table(const ScoreReport& report);

}  // namespace ucca
