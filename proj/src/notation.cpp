#include "ucca/notation.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <utility>

#include "ucca/error.hpp"
#include "unicode.hpp"

namespace ucca {

std::string_view to_string(NotationToken::Kind kind) {
  switch (kind) {
    case NotationToken::Kind::LBracket: return "LBracket";
    case NotationToken::Kind::RBracket: return "RBracket";
    case NotationToken::Kind::LParen: return "LParen";
    case NotationToken::Kind::RParen: return "RParen";
    case NotationToken::Kind::Label: return "Label";
    case NotationToken::Kind::Word: return "Word";
  }
  return "Word";
}

namespace {

// Splits "-S+A12-" into dashes, the category part and the index digits.
struct LabelParts {
  bool leading = false;
  bool trailing = false;
  std::string_view body;
  std::string_view digits;
};

std::optional<LabelParts> split_label(std::string_view text) {
  LabelParts parts;
  if (!text.empty() && text.front() == '-') {
    parts.leading = true;
    text.remove_prefix(1);
  }
  if (!text.empty() && text.back() == '-') {
    parts.trailing = true;
    text.remove_suffix(1);
  }
  std::size_t digits = 0;
  while (digits < text.size() && std::isdigit(static_cast<unsigned char>(text[text.size() - 1 - digits]))) ++digits;
  parts.body = text.substr(0, text.size() - digits);
  parts.digits = text.substr(text.size() - digits);
  if (parts.body.empty()) return std::nullopt;
  return parts;
}

// Looks like a label ("X", "Foo+B1-") but may name an unknown category.
bool label_shaped(std::string_view text) {
  auto parts = split_label(text);
  if (!parts) return false;
  bool part_start = true;
  for (char ch : parts->body) {
    if (ch == '+') {
      if (part_start) return false;
      part_start = true;
    } else if (std::isupper(static_cast<unsigned char>(ch))) {
      part_start = false;
    } else {
      return false;
    }
  }
  return !part_start;
}

bool is_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v'; }

bool is_structural(char ch) { return ch == '[' || ch == ']' || ch == '(' || ch == ')'; }

std::vector<NotationToken> lex_range(std::string_view source, std::size_t base) {
  std::vector<NotationToken> out;
  std::size_t i = 0;
  while (i < source.size()) {
    char ch = source[i];
    if (is_space(ch)) {
      ++i;
      continue;
    }
    if (is_structural(ch)) {
      NotationToken::Kind kind = ch == '['   ? NotationToken::Kind::LBracket
                                 : ch == ']' ? NotationToken::Kind::RBracket
                                 : ch == '(' ? NotationToken::Kind::LParen
                                             : NotationToken::Kind::RParen;
      out.push_back({kind, std::string(1, ch), base + i, base + i + 1});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < source.size() && !is_space(source[j]) && !is_structural(source[j])) ++j;
    std::string text(source.substr(i, j - i));
    auto kind = parse_label(text) ? NotationToken::Kind::Label : NotationToken::Kind::Word;
    out.push_back({kind, std::move(text), base + i, base + j});
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Syntax tree

struct Group;

struct Item {
  enum class Kind { Word, Bracket, Round };
  Kind kind;
  std::size_t token = 0;  // Word: index into the token vector
  std::unique_ptr<Group> group;
};

struct Group {
  bool round = false;
  std::size_t open = 0;  // byte offset of '[' or '('
  std::vector<Item> items;
};

class SyntaxParser {
 public:
  explicit SyntaxParser(const std::vector<NotationToken>& tokens) : tokens_(tokens) {}

  std::vector<Item> parse_top() {
    std::vector<Item> items;
    while (pos_ < tokens_.size()) {
      const auto& t = tokens_[pos_];
      switch (t.kind) {
        case NotationToken::Kind::RBracket:
        case NotationToken::Kind::RParen:
          throw ParseError(ErrorCode::UnbalancedBrackets, t.begin, "an opening bracket before '" + t.text + "'",
                           "'" + t.text + "'");
        default: items.push_back(parse_item()); break;
      }
    }
    return items;
  }

 private:
  Item parse_item() {
    const auto& t = tokens_[pos_];
    if (t.kind == NotationToken::Kind::LBracket) return {Item::Kind::Bracket, 0, parse_bracket()};
    if (t.kind == NotationToken::Kind::LParen) return {Item::Kind::Round, 0, parse_round()};
    return {Item::Kind::Word, pos_++, nullptr};
  }

  std::unique_ptr<Group> parse_bracket() {
    auto g = std::make_unique<Group>();
    g->open = tokens_[pos_++].begin;
    while (true) {
      if (pos_ >= tokens_.size()) {
        throw ParseError(ErrorCode::UnbalancedBrackets, g->open, "']' closing the '[' at byte " + std::to_string(g->open),
                         "end of input");
      }
      const auto& t = tokens_[pos_];
      if (t.kind == NotationToken::Kind::RBracket) {
        ++pos_;
        return g;
      }
      if (t.kind == NotationToken::Kind::RParen) {
        throw ParseError(ErrorCode::UnbalancedBrackets, t.begin, "']'", "')'");
      }
      g->items.push_back(parse_item());
    }
  }

  std::unique_ptr<Group> parse_round() {
    auto g = std::make_unique<Group>();
    g->round = true;
    g->open = tokens_[pos_++].begin;
    while (true) {
      if (pos_ >= tokens_.size()) {
        throw ParseError(ErrorCode::UnbalancedBrackets, g->open, "')' closing the '(' at byte " + std::to_string(g->open),
                         "end of input");
      }
      const auto& t = tokens_[pos_];
      switch (t.kind) {
        case NotationToken::Kind::RParen: ++pos_; return g;
        case NotationToken::Kind::RBracket:
          throw ParseError(ErrorCode::UnbalancedBrackets, t.begin, "')'", "']'");
        case NotationToken::Kind::LBracket:
        case NotationToken::Kind::LParen:
          throw ParseError(ErrorCode::NestedRemote, t.begin, "a flat word sequence inside a remote or implicit group",
                           "'" + t.text + "'");
        default: g->items.push_back({Item::Kind::Word, pos_++, nullptr}); break;
      }
    }
  }

  const std::vector<NotationToken>& tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Semantic pass

struct LabelInfo {
  Label label;
  std::size_t position;  // byte offset of the label token
  std::size_t content_begin;
  std::size_t content_end;
};

struct PendingRemote {
  std::size_t owner;
  CategorySet categories;
  std::vector<std::string> words;
  std::size_t anchor;    // number of passage tokens preceding the group
  std::size_t position;  // byte offset of '('
};

struct PUnit {
  UnitKind kind = UnitKind::Internal;
  std::size_t parent = 0;
  CategorySet categories;
  std::vector<TokenPos> words;
  std::vector<std::size_t> children;
  bool structured = false;
  std::size_t position = 0;
};

using ContinuationKey = std::pair<std::uint16_t, unsigned>;

struct OpenContinuation {
  std::size_t unit;
  std::size_t position;
};

class PassageBuilder {
 public:
  PassageBuilder(const std::vector<NotationToken>& tokens, const ParseOptions& options,
                 std::vector<ParseWarning>* warnings)
      : lexed_(tokens), options_(options), warnings_(warnings) {
    units_.push_back({});
  }

  Passage build(const std::vector<Item>& top, std::string id) {
    process(top, 0, 0, top.size());
    if (!open_.empty()) {
      auto first = std::min_element(open_.begin(), open_.end(), [](const auto& a, const auto& b) {
        return a.second.position < b.second.position;
      });
      throw ParseError(ErrorCode::DanglingContinuation, first->second.position,
                       "a closing '-" + lexed_text_at(first->second.position) + "' fragment",
                       "no continuation before end of passage");
    }
    for (std::size_t i = 1; i < units_.size(); ++i) {
      auto& u = units_[i];
      if (u.kind == UnitKind::Implicit) continue;
      if (u.structured) {
        u.kind = UnitKind::Internal;
        u.words.clear();
      } else if (!u.words.empty()) {
        u.kind = UnitKind::Terminal;
      } else {
        throw ParseError(ErrorCode::EmptyUnit, u.position, "at least one word or group", "an empty unit");
      }
    }
    units_[0].words.clear();
    compute_yields();
    for (const auto& r : remotes_) resolve(r);

    PassageSpec spec;
    spec.id = std::move(id);
    spec.tokens = std::move(tokens_);
    for (std::size_t i = 0; i < units_.size(); ++i) {
      const auto& u = units_[i];
      spec.units.push_back({std::to_string(i), u.kind, u.kind == UnitKind::Terminal ? u.words : std::vector<TokenPos>{}});
      for (std::size_t c : u.children) {
        spec.edges.push_back({std::to_string(i), std::to_string(c), units_[c].categories, false});
      }
    }
    for (const auto& [owner, target, categories] : resolved_) {
      spec.edges.push_back({std::to_string(owner), std::to_string(target), categories, true});
    }
    return build_passage(std::move(spec), BuildOptions{.require_full_coverage = false});
  }

 private:
  std::string lexed_text_at(std::size_t position) const {
    for (const auto& t : lexed_) {
      if (t.begin == position) {
        auto parts = split_label(t.text);
        return parts ? std::string(parts->body) + std::string(parts->digits) : t.text;
      }
    }
    return "";
  }

  const NotationToken& word(const Item& item) const { return lexed_[item.token]; }

  bool is_word(const Item& item) const { return item.kind == Item::Kind::Word; }

  bool is_punct_word(const Item& item) const {
    return is_word(item) && detail::is_punctuation_token(word(item).text);
  }

  LabelInfo find_label(const Group& g) const {
    const auto& items = g.items;
    if (items.empty()) {
      throw ParseError(ErrorCode::EmptyUnit, g.open, "a category label and content", "an empty group");
    }
    std::optional<std::size_t> at;
    if (is_word(items.front()) && word(items.front()).kind == NotationToken::Kind::Label) {
      at = 0;
    } else if (is_word(items.back()) && word(items.back()).kind == NotationToken::Kind::Label) {
      at = items.size() - 1;
    }
    if (!at) {
      for (const Item* candidate : {&items.front(), &items.back()}) {
        if (is_word(*candidate) && label_shaped(word(*candidate).text)) {
          throw ParseError(ErrorCode::UnknownCategoryLabel, word(*candidate).begin, "a category label",
                           "'" + word(*candidate).text + "'");
        }
      }
      throw ParseError(ErrorCode::MissingLabel, g.open, "a category label next to the opening or closing bracket",
                       is_word(items.front()) ? "'" + word(items.front()).text + "'" : "a nested group");
    }
    if (items.size() == 1) {
      throw ParseError(ErrorCode::EmptyUnit, word(items.front()).begin,
                       "content after the label (write '[X " + word(items.front()).text +
                           "]' with an explicit label X to annotate the word itself)",
                       "only '" + word(items.front()).text + "'");
    }
    LabelInfo info{*parse_label(word(items[*at]).text), word(items[*at]).begin, 0, items.size()};
    if (*at == 0) {
      info.content_begin = 1;
    } else {
      info.content_end = items.size() - 1;
    }
    return info;
  }

  // Appends the group's content to `unit`; [begin, end) indexes g.items.
  void process(const std::vector<Item>& items, std::size_t unit, std::size_t begin, std::size_t end) {
    std::optional<std::size_t> round_seen;
    for (std::size_t i = begin; i < end; ++i) {
      const Item& item = items[i];
      if (round_seen && item.kind != Item::Kind::Round && !is_punct_word(item)) {
        throw ParseError(ErrorCode::MisplacedRemote, *round_seen, "remote and implicit groups at the end of their unit",
                         "content after the group");
      }
      switch (item.kind) {
        case Item::Kind::Word: {
          const auto& t = word(item);
          auto pos = static_cast<TokenPos>(tokens_.size());
          bool punct = detail::is_punctuation_token(t.text);
          tokens_.push_back({t.text, pos, punct});
          if (!punct) units_[unit].words.push_back(pos);
          break;
        }
        case Item::Kind::Bracket: bracket(*item.group, unit); break;
        case Item::Kind::Round:
          round(*item.group, unit);
          round_seen = item.group->open;
          break;
      }
    }
  }

  void bracket(const Group& g, std::size_t parent) {
    LabelInfo info = find_label(g);
    CategorySet categories = info.label.categories;
    ContinuationKey key{categories.bits(), info.label.index};
    if (info.content_end - info.content_begin >= 2) {
      const Item& last = g.items[info.content_end - 1];
      if (is_word(last) && word(last).text == "UNA") {
        categories.insert(Category::UNA);
        --info.content_end;
      }
    }

    std::size_t unit;
    if (info.label.leading_dash) {
      auto it = open_.find(key);
      if (it == open_.end()) {
        throw ParseError(ErrorCode::OrphanContinuation, info.position,
                         "an earlier '" + categories_label(info.label) + "-' fragment", "'" + label_text(info) + "'");
      }
      unit = it->second.unit;
      if (categories.contains(Category::UNA)) units_[unit].categories.insert(Category::UNA);
      if (!info.label.trailing_dash) open_.erase(it);
    } else {
      unit = units_.size();
      PUnit u;
      u.parent = parent;
      u.categories = categories;
      u.position = g.open;
      units_.push_back(std::move(u));
      units_[parent].children.push_back(unit);
      units_[parent].structured = true;
      if (info.label.trailing_dash) {
        if (open_.count(key)) {
          throw ParseError(ErrorCode::AmbiguousContinuation, info.position,
                           "an index to tell apart nested '" + categories_label(info.label) + "-' fragments",
                           "'" + label_text(info) + "' while another is open");
        }
        open_[key] = {unit, info.position};
      }
    }
    process(g.items, unit, info.content_begin, info.content_end);
  }

  void round(const Group& g, std::size_t owner) {
    LabelInfo info = find_label(g);
    if (info.label.leading_dash || info.label.trailing_dash) {
      throw ParseError(ErrorCode::MisplacedRemote, info.position, "a plain category label on a remote or implicit group",
                       "'" + label_text(info) + "'");
    }
    std::vector<std::string> words;
    for (std::size_t i = info.content_begin; i < info.content_end; ++i) {
      const auto& t = word(g.items[i]);
      if (!detail::is_punctuation_token(t.text)) words.push_back(t.text);
    }
    units_[owner].structured = true;
    if (words.size() == 1 && words.front() == "IMP") {
      PUnit u;
      u.kind = UnitKind::Implicit;
      u.parent = owner;
      u.categories = info.label.categories;
      u.position = g.open;
      units_.push_back(std::move(u));
      units_[owner].children.push_back(units_.size() - 1);
      return;
    }
    if (words.empty()) {
      throw ParseError(ErrorCode::UnresolvedRemote, g.open, "words naming the remote unit", "no words");
    }
    remotes_.push_back({owner, info.label.categories, std::move(words), tokens_.size(), g.open});
  }

  static std::string categories_label(const Label& l) {
    return l.categories.to_string() + (l.index ? std::to_string(l.index) : "");
  }

  std::string label_text(const LabelInfo& info) const { return lexed_text(info.position); }

  std::string lexed_text(std::size_t position) const {
    for (const auto& t : lexed_) {
      if (t.begin == position) return t.text;
    }
    return "";
  }

  void compute_yields() {
    // Children always have larger indices than their parents.
    yields_.assign(units_.size(), {});
    for (std::size_t i = units_.size(); i-- > 0;) {
      auto& y = yields_[i];
      if (units_[i].kind == UnitKind::Terminal) y.insert(y.end(), units_[i].words.begin(), units_[i].words.end());
      for (std::size_t c : units_[i].children) y.insert(y.end(), yields_[c].begin(), yields_[c].end());
      std::sort(y.begin(), y.end());
    }
  }

  bool is_ancestor(std::size_t maybe_ancestor, std::size_t unit) const {
    while (unit != 0) {
      if (unit == maybe_ancestor) return true;
      unit = units_[unit].parent;
    }
    return maybe_ancestor == 0;
  }

  void resolve(const PendingRemote& r) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i < units_.size(); ++i) {
      if (units_[i].kind == UnitKind::Implicit || yields_[i].size() != r.words.size()) continue;
      if (is_ancestor(i, r.owner) || units_[i].parent == r.owner) continue;
      bool same = true;
      for (std::size_t k = 0; k < r.words.size() && same; ++k) same = tokens_[yields_[i][k]].text == r.words[k];
      if (same) candidates.push_back(i);
    }
    // Keep minimal units: drop any candidate that has a descendant candidate
    // (a descendant with the same text necessarily has the same yield).
    std::vector<std::size_t> minimal;
    for (std::size_t c : candidates) {
      bool has_inner = std::any_of(candidates.begin(), candidates.end(),
                                   [&](std::size_t d) { return d != c && is_ancestor(c, d); });
      if (!has_inner) minimal.push_back(c);
    }
    std::string text;
    for (const auto& w : r.words) text += (text.empty() ? "" : " ") + w;
    if (minimal.empty()) {
      throw ParseError(ErrorCode::UnresolvedRemote, r.position, "a unit whose text is '" + text + "'", "no such unit");
    }
    std::size_t target = minimal.front();
    if (minimal.size() > 1) {
      if (!options_.lenient_remotes) {
        throw ParseError(ErrorCode::AmbiguousRemote, r.position, "a single unit whose text is '" + text + "'",
                         std::to_string(minimal.size()) + " candidates");
      }
      std::optional<std::size_t> before;
      std::optional<std::size_t> after;
      for (std::size_t c : minimal) {
        if (yields_[c].back() < r.anchor) {
          if (!before || yields_[c].back() > yields_[*before].back()) before = c;
        } else if (!after || yields_[c].front() < yields_[*after].front()) {
          after = c;
        }
      }
      target = before ? *before : *after;
      if (warnings_) {
        warnings_->push_back({r.position, "ambiguous remote '" + text + "' (" + std::to_string(minimal.size()) +
                                              " candidates); using the one starting at token " +
                                              std::to_string(yields_[target].front())});
      }
    }
    resolved_.push_back({r.owner, target, r.categories});
  }

  struct Resolved {
    std::size_t owner;
    std::size_t target;
    CategorySet categories;
  };

  const std::vector<NotationToken>& lexed_;
  const ParseOptions& options_;
  std::vector<ParseWarning>* warnings_;
  std::vector<Token> tokens_;
  std::vector<PUnit> units_;
  std::map<ContinuationKey, OpenContinuation> open_;
  std::vector<PendingRemote> remotes_;
  std::vector<Resolved> resolved_;
  std::vector<std::vector<TokenPos>> yields_;
};

// Blanks comment lines in place so byte offsets stay valid; returns the id
// from the last "# id:" comment, if any.
std::optional<std::string> strip_comments(std::string& text) {
  std::optional<std::string> id;
  std::size_t line = 0;
  while (line < text.size()) {
    std::size_t eol = text.find('\n', line);
    if (eol == std::string::npos) eol = text.size();
    std::size_t first = line;
    while (first < eol && is_space(text[first])) ++first;
    if (first < eol && text[first] == '#') {
      std::string_view body(text.data() + first + 1, eol - first - 1);
      while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
      while (!body.empty() && is_space(body.back())) body.remove_suffix(1);
      if (body.substr(0, 3) == "id:") {
        body.remove_prefix(3);
        while (!body.empty() && is_space(body.front())) body.remove_prefix(1);
        id = std::string(body);
      }
      std::fill(text.begin() + static_cast<std::ptrdiff_t>(first), text.begin() + static_cast<std::ptrdiff_t>(eol), ' ');
    }
    line = eol + 1;
  }
  return id;
}

Passage parse_block(std::string_view block, std::size_t base, const ParseOptions& options,
                    std::vector<ParseWarning>* warnings, std::string default_id) {
  std::string text(block);
  auto id = strip_comments(text);
  auto tokens = lex_range(text, base);
  SyntaxParser syntax(tokens);
  auto top = syntax.parse_top();
  PassageBuilder builder(tokens, options, warnings);
  return builder.build(top, id ? *id : std::move(default_id));
}

}  // namespace

std::optional<Label> parse_label(std::string_view text) {
  auto parts = split_label(text);
  if (!parts) return std::nullopt;
  auto categories = CategorySet::parse(parts->body);
  if (!categories) return std::nullopt;
  Label label;
  label.categories = *categories;
  label.leading_dash = parts->leading;
  label.trailing_dash = parts->trailing;
  if (!parts->digits.empty()) {
    if (parts->digits.size() > 6 || parts->digits.front() == '0') return std::nullopt;
    label.index = static_cast<unsigned>(std::stoul(std::string(parts->digits)));
  }
  return label;
}

std::vector<NotationToken> lex(std::string_view source) { return lex_range(source, 0); }

Passage parse_passage(std::string_view source, const ParseOptions& options, std::vector<ParseWarning>* warnings) {
  return parse_block(source, 0, options, warnings, options.passage_id);
}

std::vector<Passage> parse_document(std::string_view source, const ParseOptions& options,
                                    std::vector<ParseWarning>* warnings) {
  // Blocks are separated by lines holding only whitespace.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::size_t block_start = std::string_view::npos;
  std::size_t line = 0;
  while (line <= source.size()) {
    std::size_t eol = source.find('\n', line);
    if (eol == std::string_view::npos) eol = source.size();
    bool blank = std::all_of(source.begin() + static_cast<std::ptrdiff_t>(line),
                             source.begin() + static_cast<std::ptrdiff_t>(eol), is_space);
    if (blank) {
      if (block_start != std::string_view::npos) blocks.emplace_back(block_start, line);
      block_start = std::string_view::npos;
    } else if (block_start == std::string_view::npos) {
      block_start = line;
    }
    line = eol + 1;
  }
  if (block_start != std::string_view::npos) blocks.emplace_back(block_start, source.size());

  // Comment-only blocks carry no passage.
  std::vector<std::pair<std::size_t, std::size_t>> content;
  for (auto [b, e] : blocks) {
    std::string text(source.substr(b, e - b));
    strip_comments(text);
    if (!std::all_of(text.begin(), text.end(), is_space)) content.emplace_back(b, e);
  }

  std::vector<Passage> out;
  for (std::size_t i = 0; i < content.size(); ++i) {
    auto [b, e] = content[i];
    std::string id = options.passage_id;
    if (content.size() > 1) id += (id.empty() ? "" : "-") + std::to_string(i + 1);
    out.push_back(parse_block(source.substr(b, e - b), b, options, warnings, std::move(id)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

class Renderer {
 public:
  Renderer(const Passage& p, LabelSide side) : p_(p), side_(side) {}

  std::string run() {
    const std::size_t n = p_.units().size();
    const auto& tokens = p_.tokens();
    owner_.assign(tokens.size(), kNoUnit);
    for (const Unit& u : p_.units()) {
      for (TokenPos t : u.tokens) owner_[t] = u.id;
    }
    std::vector<std::vector<UnitId>> paths(tokens.size());
    std::vector<std::size_t> covered;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (owner_[t] != kNoUnit) {
        paths[t] = path_to(owner_[t]);
        covered.push_back(t);
      }
    }
    // Bare tokens (punctuation, uncovered words) sit in the deepest internal
    // unit shared by their covered neighbours.
    for (std::size_t t = 0, k = 0; t < tokens.size(); ++t) {
      if (owner_[t] != kNoUnit) {
        ++k;
        continue;
      }
      std::vector<UnitId> prev = k > 0 ? paths[covered[k - 1]] : std::vector<UnitId>{p_.root()};
      std::vector<UnitId> next = k < covered.size() ? paths[covered[k]] : std::vector<UnitId>{p_.root()};
      std::size_t common = 0;
      while (common < prev.size() && common < next.size() && prev[common] == next[common]) ++common;
      prev.resize(common);
      while (prev.size() > 1 && p_.units()[prev.back()].kind != UnitKind::Internal) prev.pop_back();
      paths[t] = std::move(prev);
    }

    // First pass: fragment boundaries.
    fragments_.assign(n, 0);
    first_open_.assign(n, 0);
    last_close_.assign(n, 0);
    std::vector<UnitId> stack{p_.root()};
    std::size_t event = 0;
    auto close_to = [&](std::size_t keep) {
      while (stack.size() > keep) {
        last_close_[stack.back()] = event++;
        stack.pop_back();
      }
    };
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const auto& path = paths[t];
      std::size_t common = 0;
      while (common < stack.size() && common < path.size() && stack[common] == path[common]) ++common;
      close_to(common);
      for (std::size_t i = common; i < path.size(); ++i) {
        if (fragments_[path[i]]++ == 0) first_open_[path[i]] = event;
        ++event;
        stack.push_back(path[i]);
      }
    }
    close_to(1);
    assign_indices();

    // Second pass: text.
    std::vector<Frame> frames;
    frames.push_back({p_.root(), {}});
    std::vector<std::size_t> seen(n, 0);
    auto close_frames = [&](std::size_t keep, std::size_t next_token) {
      while (frames.size() > keep) {
        Frame f = std::move(frames.back());
        frames.pop_back();
        auto yield = p_.primary_yield(f.unit);
        bool final = yield.empty() || yield.back() < next_token;
        if (final) append_tail(f.unit, f.pieces);
        frames.back().pieces.push_back(bracket(label_for(f.unit, seen[f.unit] - 1), f.pieces));
      }
    };
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const auto& path = paths[t];
      std::size_t common = 0;
      while (common < frames.size() && common < path.size() && frames[common].unit == path[common]) ++common;
      close_frames(common, t);
      for (std::size_t i = common; i < path.size(); ++i) {
        ++seen[path[i]];
        frames.push_back({path[i], {}});
      }
      frames.back().pieces.push_back(tokens[t].text);
    }
    close_frames(1, tokens.size());
    append_tail(p_.root(), frames.front().pieces);

    std::string out;
    if (!p_.id().empty()) out += "# id: " + p_.id() + "\n";
    out += join(frames.front().pieces);
    return out;
  }

 private:
  struct Frame {
    UnitId unit;
    std::vector<std::string> pieces;
  };

  std::vector<UnitId> path_to(UnitId u) const {
    std::vector<UnitId> path;
    for (UnitId x = u; x != kNoUnit; x = p_.primary_parent(x)) path.push_back(x);
    std::reverse(path.begin(), path.end());
    return path;
  }

  void assign_indices() {
    const std::size_t n = p_.units().size();
    index_.assign(n, 0);
    std::map<std::uint16_t, std::vector<UnitId>> groups;
    for (UnitId u = 1; u < n; ++u) {
      if (fragments_[u] > 1) groups[p_.primary_incoming(u)->categories.bits()].push_back(u);
    }
    for (auto& [bits, members] : groups) {
      std::sort(members.begin(), members.end(), [&](UnitId a, UnitId b) { return first_open_[a] < first_open_[b]; });
      auto overlap = [&](UnitId a, UnitId b) {
        return first_open_[a] < last_close_[b] && first_open_[b] < last_close_[a];
      };
      for (UnitId u : members) {
        std::vector<unsigned> used;
        bool clashes = false;
        for (UnitId v : members) {
          if (v == u || !overlap(u, v)) continue;
          clashes = true;
          if (index_[v]) used.push_back(index_[v]);
        }
        if (!clashes) continue;
        unsigned idx = 1;
        while (std::find(used.begin(), used.end(), idx) != used.end()) ++idx;
        index_[u] = idx;
      }
    }
  }

  std::string label_for(UnitId u, std::size_t fragment) const {
    std::string key = p_.primary_incoming(u)->categories.to_string();
    if (index_[u]) key += std::to_string(index_[u]);
    const std::size_t count = std::max<std::size_t>(fragments_[u], 1);
    if (count == 1) return key;
    if (fragment == 0) return key + "-";
    if (fragment + 1 == count) return "-" + key;
    return "-" + key + "-";
  }

  static std::string join(const std::vector<std::string>& pieces) {
    std::string out;
    for (const auto& piece : pieces) {
      if (!out.empty()) out += ' ';
      out += piece;
    }
    return out;
  }

  // Right-hand labels are only unambiguous when the content does not itself
  // start with something that reads as a label.
  std::string bracket(const std::string& label, const std::vector<std::string>& pieces, char open = '[',
                      char close = ']', bool right = false) const {
    std::string body = join(pieces);
    std::string_view first_word(body);
    first_word = first_word.substr(0, first_word.find(' '));
    bool use_right = (side_ == LabelSide::Right || right) && !parse_label(first_word);
    if (use_right) return std::string(1, open) + body + " " + label + close;
    return std::string(1, open) + label + " " + body + close;
  }

  // Token-less children and remote/implicit groups close a unit's last fragment.
  void append_tail(UnitId u, std::vector<std::string>& pieces) const {
    const Unit& unit = p_.units()[u];
    for (const Edge& e : unit.outgoing) {
      const Unit& child = p_.units()[e.child];
      if (e.remote || child.kind != UnitKind::Internal || !p_.primary_yield(e.child).empty()) continue;
      std::vector<std::string> inner;
      append_tail(e.child, inner);
      pieces.push_back(bracket(e.categories.to_string(), inner));
    }
    for (const Edge& e : unit.outgoing) {
      if (e.remote || p_.units()[e.child].kind != UnitKind::Implicit) continue;
      pieces.push_back(bracket(e.categories.to_string(), {"IMP"}, '(', ')', true));
    }
    for (const Edge& e : unit.outgoing) {
      if (!e.remote) continue;
      std::string text = yield_text(p_, e.child);
      if (text.empty()) {
        throw Error(ErrorCode::InvalidRemote, "remote target " + std::to_string(e.child) + " has no words to refer to it by");
      }
      pieces.push_back(bracket(e.categories.to_string(), {text}, '(', ')', true));
    }
  }

  const Passage& p_;
  LabelSide side_;
  std::vector<UnitId> owner_;
  std::vector<std::size_t> fragments_;
  std::vector<std::size_t> first_open_;
  std::vector<std::size_t> last_close_;
  std::vector<unsigned> index_;
};

}  // namespace

std::string render(const Passage& passage, LabelSide side) { return Renderer(passage, side).run(); }

}  // namespace ucca
