#include "ucca/validator.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace ucca {

std::string_view to_string(Severity severity) { return severity == Severity::Error ? "error" : "warning"; }

namespace {

const std::vector<RuleInfo> kRules = {
    {"R1", Severity::Error, "children of the root carry only H or L",
     "restrictions: kinds of units, superparallel unit at the top level"},
    {"R2", Severity::Error, "every scene has exactly one main relation (P, S or CMR+P/S)",
     "restrictions: scene categories, main relation"},
    {"R3", Severity::Error, "a non-scene unit with two or more children includes a C child unless it is unanalyzable",
     "restrictions: non-scene categories, center"},
    {"R4", Severity::Error, "a linker's parent also has an H child, unless it is the root",
     "restrictions: other categories, linker"},
    {"R5", Severity::Error, "no remote edge carries F, and F units have no remote children",
     "restrictions: remotes, function units"},
    {"R6", Severity::Error, "every unit with children has a non-remote child whose category is not F",
     "restrictions: remotes, non-remote non-function child"},
    {"R7", Severity::Warning, "D appears inside non-scene units only in the coordination exception (C unit with D and C children)",
     "adverbials: D in coordination"},
    {"R8", Severity::Error, "CMR appears only together with P or S; secondary categories never stand alone",
     "restrictions: scene categories, coordinated main relation"},
    {"R9", Severity::Error, "unanalyzable units have no internal structure", "relators: multi-word unanalyzable units"},
    {"R10", Severity::Error, "every non-punctuation token belongs to a terminal", "general principles: token coverage"},
    {"R11", Severity::Error, "a unit with an N child has no E or Q children",
     "restrictions: sub-scene units, connective"},
    {"R12", Severity::Warning, "a remote edge targets the minimal unit (no child with the same yield)",
     "technical notes: minimal remote units"},
    {"R13", Severity::Error, "scene units are categorized only as A, E, C or H",
     "restrictions: types of scene units"},
    {"W1", Severity::Warning, "an H unit does not merely group other H and L units",
     "restrictions: types of scene units, parallel scene"},
    {"W2", Severity::Warning, "remote and implicit units carry a category other than F",
     "remote and implicit units: categories"},
};

std::size_t rule_rank(std::string_view id) {
  for (std::size_t i = 0; i < kRules.size(); ++i) {
    if (kRules[i].id == id) return i;
  }
  return kRules.size();
}

const CategorySet kMain{Category::P, Category::S};
const CategorySet kTopLevel{Category::H, Category::L};
const CategorySet kSceneCategories{Category::A, Category::E, Category::C, Category::H};
const CategorySet kFunctionOnly{Category::F};

std::string truncate_chars(const std::string& text, std::size_t limit) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      if (chars == limit) return text.substr(0, i);
      ++chars;
    }
  }
  return text;
}

// True when the edge has a base category other than F.
bool contentful(CategorySet categories) {
  CategorySet base = categories.base();
  return !base.empty() && base != kFunctionOnly;
}

class Checker {
 public:
  explicit Checker(const Passage& p) : p_(p) {}

  std::vector<Diagnostic> run() {
    const Unit& root = p_.units()[p_.root()];
    for (const Edge& e : root.outgoing) {
      CategorySet base = e.categories.base();
      if (base.empty() || !base.subset_of(kTopLevel)) {
        report("R1", at(e), "top-level unit labeled " + e.categories.to_string() + "; only H and L are allowed");
      }
    }
    for (const Unit& u : p_.units()) {
      check_edges(u);
      if (u.kind == UnitKind::Internal) check_internal(u);
    }
    for (TokenPos t : p_.uncovered_tokens()) {
      report("R10", p_.root(), "token " + std::to_string(t) + " '" + p_.tokens()[t].text + "' is not covered by any unit");
    }
    return std::move(out_);
  }

 private:
  // Primary edges are reported on their child, remote edges on their parent.
  static UnitId at(const Edge& e) { return e.remote ? e.parent : e.child; }

  CategorySet incoming(UnitId u) const {
    const Edge* e = p_.primary_incoming(u);
    return e ? e->categories : CategorySet{};
  }

  void report(const char* rule, UnitId unit, std::string message) {
    out_.push_back({rule, Severity::Error, unit, std::move(message), {}});
  }

  void check_edges(const Unit& u) {
    for (const Edge& e : u.outgoing) {
      if (e.categories.contains(Category::CMR) && !e.categories.contains_any(kMain)) {
        report("R8", at(e), "CMR without P or S on " + e.categories.to_string());
      } else if (e.categories.base().empty()) {
        report("R8", at(e), "only secondary categories on " + e.categories.to_string());
      }
      const bool implicit_child = !e.remote && p_.units()[e.child].kind == UnitKind::Implicit;
      if ((e.remote || implicit_child) && e.categories.base().subset_of(kFunctionOnly)) {
        report("W2", at(e), std::string(e.remote ? "remote" : "implicit") + " unit labeled only " + e.categories.to_string());
      }
      if (!e.remote) continue;
      if (e.categories.contains(Category::F)) report("R5", at(e), "remote edge labeled " + e.categories.to_string());
      auto target = p_.primary_yield(e.child);
      for (const Edge& inner : p_.units()[e.child].outgoing) {
        if (inner.remote) continue;
        auto inner_yield = p_.primary_yield(inner.child);
        if (!target.empty() && std::equal(target.begin(), target.end(), inner_yield.begin(), inner_yield.end())) {
          report("R12", at(e), "remote target " + std::to_string(e.child) + " is not minimal; child " +
                                   std::to_string(inner.child) + " has the same yield");
          break;
        }
      }
    }
  }

  void check_internal(const Unit& u) {
    const bool is_root = u.id == p_.root();
    const bool scene = is_scene_unit(p_, u.id);
    const CategorySet in = incoming(u.id);
    auto any_child = [&](Category c, bool primary_only = false) {
      return std::any_of(u.outgoing.begin(), u.outgoing.end(),
                         [&](const Edge& e) { return (!primary_only || !e.remote) && e.categories.contains(c); });
    };

    if (scene) {
      std::size_t main = 0;
      for (const Edge& e : u.outgoing) {
        main += e.categories.contains(Category::P) ? 1 : 0;
        main += e.categories.contains(Category::S) ? 1 : 0;
      }
      if (main != 1) report("R2", u.id, "scene has " + std::to_string(main) + " main relations");
      if (!is_root && !in.base().subset_of(kSceneCategories)) {
        report("R13", u.id, "scene unit labeled " + in.to_string());
      }
    }

    const bool superparallel = any_child(Category::H) || any_child(Category::L);
    if (!is_root && !scene && u.outgoing.size() >= 2 && !superparallel && !in.contains(Category::UNA) &&
        !any_child(Category::C)) {
      report("R3", u.id, "non-scene unit with " + std::to_string(u.outgoing.size()) + " children and no C");
    }

    if (!is_root && !any_child(Category::H, true)) {
      for (const Edge& e : u.outgoing) {
        if (!e.remote && e.categories.contains(Category::L)) report("R4", at(e), "linker without a sibling H");
      }
    }

    if (!is_root && !scene) {
      const bool coordination = in.contains(Category::C) && any_child(Category::C);
      for (const Edge& e : u.outgoing) {
        if (e.categories.contains(Category::D) && !coordination) {
          report("R7", at(e), "D inside a non-scene unit");
        }
      }
    }

    if (!is_root) {
      auto remote_in = p_.remote_incoming(u.id);
      bool all_function = in.contains(Category::F) &&
                          std::all_of(remote_in.begin(), remote_in.end(),
                                      [](const Edge& e) { return e.categories.contains(Category::F); });
      bool has_remote_child = std::any_of(u.outgoing.begin(), u.outgoing.end(), [](const Edge& e) { return e.remote; });
      if (all_function && has_remote_child) report("R5", u.id, "F unit has remote children");
    }

    if (!u.outgoing.empty() &&
        std::none_of(u.outgoing.begin(), u.outgoing.end(),
                     [](const Edge& e) { return !e.remote && contentful(e.categories); })) {
      report("R6", u.id, "no non-remote child with a category other than F");
    }

    if (!u.outgoing.empty()) {
      bool una = in.contains(Category::UNA);
      for (const Edge& e : p_.remote_incoming(u.id)) una = una || e.categories.contains(Category::UNA);
      if (una) report("R9", u.id, "unanalyzable unit has " + std::to_string(u.outgoing.size()) + " children");
    }

    if (any_child(Category::N) && (any_child(Category::E) || any_child(Category::Q))) {
      report("R11", u.id, "unit with an N child also has E or Q children");
    }

    if (!is_root && in.contains(Category::H) && any_child(Category::H) &&
        std::all_of(u.outgoing.begin(), u.outgoing.end(), [](const Edge& e) {
          CategorySet base = e.categories.base();
          return !base.empty() && base.subset_of(kTopLevel);
        })) {
      report("W1", u.id, "H unit whose children are only H and L units");
    }
  }

  const Passage& p_;
  std::vector<Diagnostic> out_;
};

}  // namespace

const std::vector<RuleInfo>& list_rules() { return kRules; }

const RuleInfo* find_rule(std::string_view id) {
  std::size_t rank = rule_rank(id);
  return rank < kRules.size() ? &kRules[rank] : nullptr;
}

ValidatorConfig parse_validator_config(std::string_view text) {
  ValidatorConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto trim = [](std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected RULE = error|warning|off");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!find_rule(key)) throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown rule '" + std::string(key) + "'");
    std::optional<Severity> severity;
    if (value == "error") {
      severity = Severity::Error;
    } else if (value == "warning") {
      severity = Severity::Warning;
    } else if (value != "off") {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown severity '" + std::string(value) + "'");
    }
    config.overrides[std::string(key)] = severity;
  }
  return config;
}

std::vector<Diagnostic> validate(const Passage& passage, const ValidatorConfig& config) {
  std::vector<Diagnostic> found = Checker(passage).run();
  std::vector<Diagnostic> out;
  out.reserve(found.size());
  for (auto& d : found) {
    const RuleInfo* rule = find_rule(d.rule);
    d.severity = rule->severity;
    if (auto it = config.overrides.find(d.rule); it != config.overrides.end()) {
      if (!it->second) continue;
      d.severity = *it->second;
    }
    d.yield = truncate_chars(yield_text(passage, d.unit), 40);
    out.push_back(std::move(d));
  }
  std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
    if (a.unit != b.unit) return a.unit < b.unit;
    return rule_rank(a.rule) < rule_rank(b.rule);
  });
  return out;
}

}  // namespace ucca
