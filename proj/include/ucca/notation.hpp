#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucca/category.hpp"
#include "ucca/passage.hpp"

namespace ucca {

// Plain-text bracket notation.
//
//   [H [A John] [P- took] [Mary A] [up on -P] [[her A] [promise P] A]]
//
// A bracket's label sits next to its left or right bracket. "X-" opens a
// non-contiguous unit, "-X-" continues it and "-X" closes it; a numeric
// index ("A1-" ... "-A1") separates interleaved units with the same label.
// Round-bracket groups at the end of a unit add a remote edge to the unit
// whose yield matches the words, or an implicit unit when the content is
// IMP. A trailing word UNA marks the unit unanalyzable. Lines starting with
// '#' are comments; "# id: NAME" sets the passage id.

struct NotationToken {
  enum class Kind { LBracket, RBracket, LParen, RParen, Label, Word };

  Kind kind;
  std::string text;
  std::size_t begin = 0;  // byte offsets into the source
  std::size_t end = 0;

  friend bool operator==(const NotationToken&, const NotationToken&) = default;
};

std::string_view to_string(NotationToken::Kind kind);

// Never fails: anything that is not a bracket and does not match the label
// pattern is a Word.
std::vector<NotationToken> lex(std::string_view source);

// A decoded label token such as "-S+A1-".
struct Label {
  CategorySet categories;
  unsigned index = 0;  // 0 = none
  bool leading_dash = false;
  bool trailing_dash = false;
};

std::optional<Label> parse_label(std::string_view text);

struct ParseOptions {
  // Resolve ambiguous remote references to the nearest preceding candidate
  // and report a warning instead of failing with AmbiguousRemote.
  bool lenient_remotes = false;
  // Used when the source carries no "# id:" comment.
  std::string passage_id;
};

struct ParseWarning {
  std::size_t position = 0;
  std::string message;
};

// Parses exactly one passage. Throws ParseError, or Error for structural
// failures detected while building the passage. Non-punctuation words that
// no bracket assigns to a terminal are left uncovered (see BuildOptions).
Passage parse_passage(std::string_view source, const ParseOptions& options = {},
                      std::vector<ParseWarning>* warnings = nullptr);

// Splits on blank lines and parses each block. Error positions are offsets
// into `source`. Passage ids default to "<passage_id>-<n>" when there is more
// than one block.
std::vector<Passage> parse_document(std::string_view source, const ParseOptions& options = {},
                                    std::vector<ParseWarning>* warnings = nullptr);

enum class LabelSide { Left, Right };

// Deterministic single-line rendering, preceded by "# id: ..." when the
// passage has an id. Remote and implicit groups are written "(words X)" and
// "(IMP X)" at the end of the unit's last fragment.
std::string render(const Passage& passage, LabelSide side = LabelSide::Left);

}  // namespace ucca
