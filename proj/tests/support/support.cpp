#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "ucca/error.hpp"
#include "ucca/notation.hpp"

namespace ucca::testing {

namespace fs = std::filesystem;

std::string fixture_dir() { return UCCA_FIXTURE_DIR; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<Fixture> corpus() {
  std::vector<Fixture> out;
  for (const auto& entry : fs::directory_iterator(fixture_dir() + "/corpus")) {
    if (entry.path().extension() != ".txt") continue;
    out.push_back({entry.path().stem().string(), read_text(entry.path().string())});
  }
  std::sort(out.begin(), out.end(), [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  return out;
}

const Fixture& fixture(const std::string& name) {
  static const std::vector<Fixture> all = corpus();
  for (const auto& f : all) {
    if (f.name == name) return f;
  }
  throw std::runtime_error("no fixture " + name);
}

// ---------------------------------------------------------------------------
// Random passages

namespace {

const Category kBase[] = {Category::A, Category::C, Category::D, Category::E, Category::F, Category::G, Category::H,
                          Category::L, Category::N, Category::P, Category::Q, Category::R, Category::S, Category::T};

template <class T>
T pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

CategorySet random_categories(std::mt19937_64& rng, bool secondary) {
  std::uniform_int_distribution<std::size_t> base(0, std::size(kBase) - 1);
  CategorySet set{kBase[base(rng)]};
  if (chance(rng, 0.15)) set.insert(kBase[base(rng)]);
  if (secondary && chance(rng, 0.05)) set.insert(Category::CMR);
  if (secondary && chance(rng, 0.05)) set.insert(Category::UNA);
  return set;
}

class Generator {
 public:
  Generator(std::mt19937_64& rng, const GenOptions& options) : rng_(rng), options_(options) {}

  PassageSpec run() {
    std::vector<TokenPos> words;
    if (!options_.tokens.empty()) {
      spec_.tokens = options_.tokens;
    } else {
      std::size_t n = std::uniform_int_distribution<std::size_t>(1, options_.max_tokens)(rng_);
      for (std::size_t i = 0; i < n; ++i) {
        if (options_.punctuation && chance(rng_, 0.15)) {
          spec_.tokens.push_back({pick<std::string>(rng_, {",", ".", "!", ";", "?"}), static_cast<TokenPos>(i), true});
        } else {
          spec_.tokens.push_back({"w" + std::to_string(i), static_cast<TokenPos>(i), false});
        }
      }
      if (std::all_of(spec_.tokens.begin(), spec_.tokens.end(), [](const Token& t) { return t.is_punct; })) {
        spec_.tokens[0] = {"w0", 0, false};
      }
    }
    for (const Token& t : spec_.tokens) {
      if (!t.is_punct) words.push_back(t.position);
    }
    spec_.id = "gen";
    std::string root = add_unit(UnitKind::Internal, {});
    ancestors_.push_back({});
    children(root, words, 0, true);
    add_remotes();
    return std::move(spec_);
  }

 private:
  std::string add_unit(UnitKind kind, std::vector<TokenPos> tokens) {
    std::string id = "u" + std::to_string(spec_.units.size());
    spec_.units.push_back({id, kind, std::move(tokens)});
    return id;
  }

  // Splits `words` among the children of `parent`. Non-root internal units get
  // at least two children so no two units share a yield.
  void children(const std::string& parent, const std::vector<TokenPos>& words, std::size_t depth, bool is_root) {
    std::size_t lo = is_root ? 1 : 2;
    std::size_t k = std::uniform_int_distribution<std::size_t>(lo, std::min<std::size_t>(3, words.size()))(rng_);
    std::vector<std::vector<TokenPos>> groups(k);
    if (options_.discontiguous && chance(rng_, 0.5)) {
      std::vector<TokenPos> shuffled = words;
      std::shuffle(shuffled.begin(), shuffled.end(), rng_);
      for (std::size_t i = 0; i < shuffled.size(); ++i) {
        std::size_t g = i < k ? i : std::uniform_int_distribution<std::size_t>(0, k - 1)(rng_);
        groups[g].push_back(shuffled[i]);
      }
      for (auto& g : groups) std::sort(g.begin(), g.end());
    } else {
      std::vector<std::size_t> cuts;
      for (std::size_t i = 1; i < words.size(); ++i) cuts.push_back(i);
      std::shuffle(cuts.begin(), cuts.end(), rng_);
      cuts.resize(k - 1);
      std::sort(cuts.begin(), cuts.end());
      std::size_t start = 0;
      for (std::size_t g = 0; g < k; ++g) {
        std::size_t end = g + 1 < k ? cuts[g] : words.size();
        groups[g].assign(words.begin() + static_cast<std::ptrdiff_t>(start), words.begin() + static_cast<std::ptrdiff_t>(end));
        start = end;
      }
    }
    const std::size_t parent_index = index_of(parent);
    for (auto& g : groups) {
      bool leaf = g.size() == 1 || depth + 1 >= options_.max_depth || chance(rng_, 0.3);
      std::string child = add_unit(leaf ? UnitKind::Terminal : UnitKind::Internal, leaf ? g : std::vector<TokenPos>{});
      spec_.edges.push_back({parent, child, random_categories(rng_, options_.secondary), false});
      auto anc = ancestors_[parent_index];
      anc.push_back(parent_index);
      ancestors_.push_back(std::move(anc));
      if (!leaf) children(child, g, depth + 1, false);
    }
    if (!is_root && options_.implicit && chance(rng_, 0.15)) {
      std::string imp = add_unit(UnitKind::Implicit, {});
      spec_.edges.push_back({parent, imp, random_categories(rng_, false), false});
      ancestors_.push_back(ancestors_[parent_index]);
      ancestors_.back().push_back(parent_index);
    }
  }

  std::size_t index_of(const std::string& id) const { return std::stoul(id.substr(1)); }

  bool is_ancestor(std::size_t a, std::size_t of) const {
    const auto& anc = ancestors_[of];
    return std::find(anc.begin(), anc.end(), a) != anc.end();
  }

  void add_remotes() {
    std::size_t count = std::uniform_int_distribution<std::size_t>(0, options_.max_remotes)(rng_);
    std::vector<std::size_t> sources;
    std::vector<std::size_t> targets;
    for (std::size_t i = 1; i < spec_.units.size(); ++i) {
      if (spec_.units[i].kind == UnitKind::Internal) sources.push_back(i);
      if (spec_.units[i].kind != UnitKind::Implicit) targets.push_back(i);
    }
    if (sources.empty() || targets.empty()) return;
    for (std::size_t r = 0; r < count; ++r) {
      std::size_t s = pick(rng_, sources);
      std::size_t t = pick(rng_, targets);
      // The primary parent of t is the last entry of its ancestor list.
      if (s == t || is_ancestor(t, s) || ancestors_[t].back() == s) continue;
      bool duplicate = std::any_of(spec_.edges.begin(), spec_.edges.end(), [&](const EdgeSpec& e) {
        return e.remote && e.parent == spec_.units[s].id && e.child == spec_.units[t].id;
      });
      if (duplicate) continue;
      CategorySet cats = random_categories(rng_, false);
      spec_.edges.push_back({spec_.units[s].id, spec_.units[t].id, cats, true});
    }
  }

  std::mt19937_64& rng_;
  const GenOptions& options_;
  PassageSpec spec_;
  std::vector<std::vector<std::size_t>> ancestors_;
};

}  // namespace

Passage random_passage(std::mt19937_64& rng, const GenOptions& options) {
  for (;;) {
    try {
      return build_passage(Generator(rng, options).run());
    } catch (const Error& e) {
      // Remote edges occasionally close a cycle; draw again.
      if (e.code() != ErrorCode::RemoteCycle) throw;
    }
  }
}

Passage perturb(std::mt19937_64& rng, const Passage& gold) {
  if (chance(rng, 0.3) && gold.uncovered_tokens().empty()) {
    // A different analysis of the same tokens.
    GenOptions options;
    options.tokens.assign(gold.tokens().begin(), gold.tokens().end());
    return random_passage(rng, options);
  }
  PassageSpec spec = describe(gold);
  for (auto& e : spec.edges) {
    if (chance(rng, 0.25)) e.categories = random_categories(rng, true);
  }
  return build_passage(spec);
}

// ---------------------------------------------------------------------------
// Mutants

namespace {

Passage parse_text(const std::string& text) { return parse_passage(text); }

// Retargets the first remote edge to the primary parent of its child.
Passage widen_remote(const Passage& p) {
  PassageSpec spec = describe(p);
  for (auto& e : spec.edges) {
    if (!e.remote) continue;
    e.child = std::to_string(p.primary_parent(static_cast<UnitId>(std::stoul(e.child))));
    break;
  }
  return build_passage(spec);
}

}  // namespace

std::vector<Mutant> mutants() {
  std::vector<Mutant> out;
  auto add = [&](std::string rule, std::string base, std::string mutation, Passage p) {
    out.push_back({std::move(rule), std::move(base), std::move(mutation), std::move(p)});
  };
  add("R1", "kicked_ball", "top-level H relabeled A",
      parse_text("[A [A John] [P kicked] [A [F the] [C ball]]]"));
  add("R2", "kicked_ball", "participant 'the ball' relabeled S",
      parse_text("[H [A John] [P kicked] [S [F the] [C ball]]]"));
  add("R3", "kicked_ball", "center 'ball' relabeled E",
      parse_text("[H [A John] [P kicked] [A [F the] [E ball]]]"));
  add("R4", "came_and_ate", "linker moved inside the first scene",
      parse_text("[H [A John] [P came] [L and] [A home]]"));
  add("R5", "took_shower", "remote 'John' relabeled A+F",
      parse_text("[H [A John] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]] (John A+F)]"));
  add("R6", "kicked_ball", "'the ball' collapsed into a single F terminal",
      parse_text("[H [A John] [P kicked] [A [F the ball]]]"));
  add("R7", "kicked_ball", "function word 'the' relabeled D",
      parse_text("[H [A John] [P kicked] [A [D the] [C ball]]]"));
  add("R8", "kicked_ball", "CMR added to participant 'John'",
      parse_text("[H [A+CMR John] [P kicked] [A [F the] [C ball]]]"));
  add("R9", "kicked_ball", "UNA added to 'the ball', which has children",
      parse_text("[H [A John] [P kicked] [A+UNA [F the] [C ball]]]"));
  add("R10", "kicked_ball", "brackets around 'the' removed, leaving it uncovered",
      parse_text("[H [A John] [P kicked] [A the [C ball]]]"));
  add("R11", "apples_and_pears", "center 'apples' relabeled E next to a connector",
      parse_text("[H [A I] [P ate] [A [E apples] [N and] [C pears]]]"));
  add("R12", "took_shower", "'John' wrapped in an A unit that the remote now targets",
      widen_remote(parse_text("[H [A [C John]] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]] (John A)]")));
  add("R13", "told_him_go", "embedded scene relabeled T",
      parse_text("[H [A I] [P told] [A him] [A [T [P to go] (him A)]]]"));
  add("W1", "came_and_ate", "both scenes and the linker wrapped in one H",
      parse_text("[H [H [A John] [P came]] [L and] [H [P ate] (John A)]]"));
  add("W2", "come_here", "implicit participant relabeled F",
      parse_text("[H [P come] [A here] (IMP F)] !"));
  return out;
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

bool compatible(const EdgeSignature& a, const EdgeSignature& b, ScoreMode mode) {
  if (a.yield != b.yield || a.remote != b.remote) return false;
  return mode == ScoreMode::Unlabeled || a.categories == b.categories;
}

}  // namespace

std::size_t brute_force_matches(const std::vector<EdgeSignature>& gold, const std::vector<EdgeSignature>& pred,
                                ScoreMode mode) {
  std::vector<bool> used(pred.size(), false);
  std::function<std::size_t(std::size_t)> best = [&](std::size_t i) -> std::size_t {
    if (i == gold.size()) return 0;
    std::size_t result = best(i + 1);  // leave gold[i] unmatched
    for (std::size_t j = 0; j < pred.size(); ++j) {
      if (used[j] || !compatible(gold[i], pred[j], mode)) continue;
      used[j] = true;
      result = std::max(result, 1 + best(i + 1));
      used[j] = false;
    }
    return result;
  };
  return best(0);
}

PropertyReport check_core_properties(std::uint64_t seed, std::size_t cases) {
  PropertyReport report;
  std::mt19937_64 rng(seed);
  std::vector<Passage> batch;
  auto fail = [&](std::size_t i, const std::string& what) {
    report.failures.push_back("case " + std::to_string(i) + ": " + what);
  };
  for (std::size_t i = 0; i < cases; ++i, ++report.cases) {
    Passage p = random_passage(rng);

    std::vector<TokenPos> words;
    for (const Token& t : p.tokens()) {
      if (!t.is_punct) words.push_back(t.position);
    }
    if (yield_of(p, p.root(), false) != words) fail(i, "root yield differs from the non-punctuation tokens");

    // Walk the primary edges from the root; a tree reaches every unit once.
    std::vector<int> seen(p.units().size(), 0);
    std::vector<UnitId> stack{p.root()};
    while (!stack.empty()) {
      UnitId u = stack.back();
      stack.pop_back();
      if (seen[u]++ > 0) break;
      for (const Edge& e : p.units()[u].outgoing) {
        if (!e.remote) stack.push_back(e.child);
      }
    }
    if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) fail(i, "primary edges do not form a tree");
    for (UnitId u = 1; u < p.units().size(); ++u) {
      const Edge* in = p.primary_incoming(u);
      if (!in || in->parent != p.primary_parent(u)) fail(i, "unit without a unique primary parent");
    }

    for (ScoreMode mode : {ScoreMode::Labeled, ScoreMode::Unlabeled}) {
      ScoreReport self = score(p, p, mode);
      for (const Prf* prf : {&self.labeled.primary, &self.labeled.remote, &self.unlabeled.primary, &self.unlabeled.remote}) {
        if (prf->f1() != 1.0) fail(i, "self-comparison f1 is not exactly 1.0");
      }
    }

    Passage q = perturb(rng, p);
    auto gs = signatures(p);
    auto ps = signatures(q);
    if (count_matches(gs, ps, ScoreMode::Labeled) > count_matches(gs, ps, ScoreMode::Unlabeled)) {
      fail(i, "labeled matches exceed unlabeled matches");
    }
    ScoreReport pair = score(p, q);
    if (pair.labeled.primary.matched > pair.unlabeled.primary.matched ||
        pair.labeled.remote.matched > pair.unlabeled.remote.matched) {
      fail(i, "labeled report exceeds unlabeled report");
    }

    batch.push_back(std::move(p));
    if (batch.size() == 10) {
      CategoryCounts whole;
      for (const auto& b : batch) whole += stats(b);
      std::size_t cut = std::uniform_int_distribution<std::size_t>(0, batch.size())(rng);
      CategoryCounts left;
      CategoryCounts right;
      for (std::size_t k = 0; k < batch.size(); ++k) (k < cut ? left : right) += stats(batch[k]);
      left += right;
      if (!(left == whole)) fail(i, "stats are not additive across a split");
      batch.clear();
    }
  }
  return report;
}

std::vector<std::pair<std::string, std::string>> scorer_pairs() {
  return {
      {"[H [A John] [P kicked] [A [F the] [C ball]]]", "[H [A John] [P kicked] [A [F the] [C ball]]]"},
      {"[H [A John] [P kicked] [A [F the] [C ball]]]", "[H [A John] [S kicked] [A [F the] [C ball]]]"},
      {"[H [A John] [P kicked] [A [F the] [C ball]]]", "[H [A John] [P kicked] [A [E the] [C ball]]]"},
      {"[H [A John] [P kicked] [A [F the] [C ball]]]", "[H [A John] [P kicked the] [A ball]]"},
      {"[H [A John] [P kicked] [A [F the] [C ball]]]", "[H [A John kicked the ball]]"},
      {"[H [A [E This] [C book]] [F is] [S+A mine]]", "[H [A [E This] [C book]] [F is] [S mine]]"},
      {"[H [A [E This] [C book]] [F is] [S+A mine]]", "[H [A [E This] [C book]] [S is] [A mine]]"},
      {"[H [A John] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]] (John A)]",
       "[H [A John] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]] (John D)]"},
      {"[H [A John] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]] (John A)]",
       "[H [A John] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]]]"},
      {"[H [A John] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]] (John A)]",
       "[H [A John] [P got] [A home]] [L and] [H [P took] [A [F a] [C shower]] (home A)]"},
      {"[H [John A] [P- took] [Mary A] [up on -P] [[her A] [promise P] A]]",
       "[H [John A] [P took] [Mary A] [D up on] [[her A] [promise P] A]]"},
      {"[H [John A] [P- took] [Mary A] [up on -P] [[her A] [promise P] A]]",
       "[H [John A] [P- took] [Mary A] [up on -P] [[her E] [promise C] A]]"},
      {"[H [D Not] [P going] [A there] [D any more] (IMP A)]", "[H [D Not] [P going] [A there] [T any more]]"},
      {"[H [P thank you UNA] [A [R for] [E your] [C hospitality]] , (IMP A)]",
       "[H [P thank you] [A [R for] [E your] [C hospitality]] ,]"},
      {"[H [A John] [CMR+P [C wrote] [N and] [C recorded]] [A [F a] [C song]]]",
       "[H [A John] [P [C wrote] [N and] [C recorded]] [A [F a] [C song]]]"},
      {"[H [A [Q three] [C horses]] [P ran]]", "[H [A [E three] [C horses]] [P ran]]"},
      {"[H [A [C John] [R 's]] [P left]]", "[H [A [C [C John] [R 's]]] [P left]]"},
      {"[H [A I] [P ate] [A [C apples] [N and] [C pears]]]", "[H [A I] [P ate] [A apples] [L and] [A pears]]"},
      {"[H [A John] [P came]] [L and] [H [P ate] (John A)]", "[H [A John] [P came] [L and] [P ate]]"},
      {"[H [A John] [P came]] [L and] [H [P ate] (John A)]", "[H [A John] [P came]] [L and] [H [P ate] (came A)]"},
  };
}

}  // namespace ucca::testing
