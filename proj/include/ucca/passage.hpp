#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucca/category.hpp"

namespace ucca {

using UnitId = std::uint32_t;
using TokenPos = std::uint32_t;

inline constexpr UnitId kNoUnit = static_cast<UnitId>(-1);

struct Token {
  std::string text;
  TokenPos position = 0;
  bool is_punct = false;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class UnitKind : std::uint8_t { Terminal, Internal, Implicit };

std::string_view to_string(UnitKind kind);
std::optional<UnitKind> unit_kind_from_string(std::string_view text);

struct Edge {
  UnitId parent = kNoUnit;
  UnitId child = kNoUnit;
  CategorySet categories;
  bool remote = false;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Unit {
  UnitId id = kNoUnit;
  UnitKind kind = UnitKind::Internal;
  std::vector<TokenPos> tokens;  // terminal only, sorted
  std::vector<Edge> outgoing;    // internal only: primary children first, then remotes

  friend bool operator==(const Unit&, const Unit&) = default;
};

// Caller-facing description of a passage. Unit ids are arbitrary strings;
// build_passage replaces them with dense pre-order ids.
struct UnitSpec {
  std::string id;
  UnitKind kind = UnitKind::Internal;
  std::vector<TokenPos> tokens;
};

struct EdgeSpec {
  std::string parent;
  std::string child;
  CategorySet categories;
  bool remote = false;
};

struct PassageSpec {
  std::string id;
  std::vector<Token> tokens;
  std::vector<UnitSpec> units;
  std::vector<EdgeSpec> edges;
};

struct BuildOptions {
  // When false, non-punctuation tokens may be left without a terminal. Such
  // gaps are then reported by the validator (R10) instead of rejected here.
  // Tokens claimed twice and claimed punctuation are rejected either way.
  bool require_full_coverage = true;
};

// Immutable passage DAG: a primary tree rooted at unit 0 plus remote edges.
// Unit ids are dense and assigned in pre-order over the primary tree, with
// siblings ordered by the first token of their yield, so two isomorphic
// passages have identical unit tables.
class Passage {
 public:
  const std::string& id() const { return id_; }
  std::span<const Token> tokens() const { return tokens_; }
  std::span<const Unit> units() const { return units_; }
  UnitId root() const { return 0; }

  // Throws Error(UnknownUnit).
  const Unit& unit(UnitId id) const;
  bool contains(UnitId id) const { return id < units_.size(); }

  // kNoUnit for the root.
  UnitId primary_parent(UnitId id) const;
  // The non-remote edge into `id`; nullptr for the root.
  const Edge* primary_incoming(UnitId id) const;
  std::span<const Edge> remote_incoming(UnitId id) const;

  // Sorted token positions reachable through primary edges.
  std::span<const TokenPos> primary_yield(UnitId id) const;

  std::size_t edge_count() const { return edge_count_; }
  std::size_t remote_edge_count() const { return remote_edge_count_; }

  // Non-punctuation token positions not claimed by any terminal.
  const std::vector<TokenPos>& uncovered_tokens() const { return uncovered_; }

 private:
  friend Passage build_passage(PassageSpec spec, const BuildOptions& options);

  std::string id_;
  std::vector<Token> tokens_;
  std::vector<Unit> units_;
  std::vector<UnitId> primary_parent_;
  std::vector<std::vector<Edge>> remote_in_;
  std::vector<std::vector<TokenPos>> yields_;
  std::vector<TokenPos> uncovered_;
  std::size_t edge_count_ = 0;
  std::size_t remote_edge_count_ = 0;
};

// Throws Error with DuplicateId, DanglingEdge, PrimaryCycle,
// MultiplePrimaryParents, TokenCoverageGap, InvalidToken, InvalidUnit,
// InvalidEdge, MissingRoot, InvalidRemote or RemoteCycle.
Passage build_passage(PassageSpec spec, const BuildOptions& options = {});

// Inverse of build_passage; unit ids become their decimal strings.
PassageSpec describe(const Passage& passage);

// Same tokens and same canonical structure. Passage ids are ignored.
bool isomorphic(const Passage& a, const Passage& b);

// Throws Error(UnknownUnit).
std::vector<TokenPos> yield_of(const Passage& passage, UnitId unit, bool include_remote);

// True iff some outgoing edge (primary or remote) carries P or S.
// Throws Error(UnknownUnit) or Error(NotInternal).
bool is_scene_unit(const Passage& passage, UnitId unit);

// Token texts of the unit's primary yield joined by single spaces.
std::string yield_text(const Passage& passage, UnitId unit);

struct CategoryCounts {
  std::size_t passages = 0;
  std::size_t tokens = 0;
  std::size_t units = 0;
  std::size_t edges = 0;
  std::size_t remote_edges = 0;
  std::size_t scenes = 0;
  std::size_t implicit_units = 0;
  std::size_t unanalyzable_units = 0;
  // Edges carrying each label; an edge with S+A counts once for S and once for A.
  std::array<std::size_t, kCategoryCount> per_category{};

  std::size_t& operator[](Category c) { return per_category[static_cast<std::size_t>(c)]; }
  std::size_t operator[](Category c) const { return per_category[static_cast<std::size_t>(c)]; }

  CategoryCounts& operator+=(const CategoryCounts& other);
  friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

CategoryCounts stats(const Passage& passage);

}  // namespace ucca
