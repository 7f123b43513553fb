#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"
#include "ucca/notation.hpp"
#include "ucca/validator.hpp"

using namespace ucca;

namespace {

std::vector<std::string> rules_of(const std::vector<Diagnostic>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(d.rule);
  return out;
}

std::vector<std::string> check(const std::string& text) { return rules_of(validate(parse_passage(text))); }

bool has(const std::vector<std::string>& rules, const std::string& rule) {
  return std::find(rules.begin(), rules.end(), rule) != rules.end();
}

}  // namespace

TEST_CASE("registry") {
  const auto& rules = list_rules();
  std::vector<std::string> ids;
  for (const auto& r : rules) {
    ids.push_back(r.id);
    CHECK_FALSE(r.guideline_anchor.empty());
    CHECK_FALSE(r.description.empty());
  }
  CHECK(ids == std::vector<std::string>{"R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R11", "R12",
                                        "R13", "W1", "W2"});
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ids.size());
  for (const char* w : {"R7", "R12", "W1", "W2"}) CHECK(find_rule(w)->severity == Severity::Warning);
  CHECK(find_rule("R1")->severity == Severity::Error);
  CHECK(find_rule("R99") == nullptr);
}

TEST_CASE("conforming A-P-A scene") { CHECK(check("[H [A John] [P kicked] [A [F the] [C ball]]]").empty()); }

TEST_CASE("spec examples") {
  CHECK(check("[A [A John] [P kicked] [A [F the] [C ball]]]") == std::vector<std::string>{"R1"});
  CHECK(check("[H [A John] [P kicked] [S [F the] [C ball]]]") == std::vector<std::string>{"R2"});
  auto cmr = check("[H [A John] [CMR [C wrote] [N and] [C recorded]] [A [F a] [C song]]]");
  CHECK(has(cmr, "R8"));
  auto earrings = check("[H [A earrings] [S are] [A [R on] [E [D the]] [C table]]]");
  CHECK(earrings == std::vector<std::string>{"R7"});
  auto ds = validate(parse_passage("[H [A earrings] [S are] [A [R on] [E [D the]] [C table]]]"));
  CHECK(ds[0].severity == Severity::Warning);
}

TEST_CASE("individual rules") {
  SUBCASE("R1 accepts H and L at the top level only") {
    CHECK(check("[H [A John] [P came]] [L and] [H [P ate] (John A)]").empty());
    CHECK(check("[H [A John] [P came]] [D then]") == std::vector<std::string>{"R1"});
  }
  SUBCASE("R2 counts P and S on one edge twice, CMR+P once") {
    CHECK(has(check("[H [A John] [P+S kicked] [A ball]]"), "R2"));
    CHECK(check("[H [A John] [CMR+P [C wrote] [N and] [C recorded]] [A [F a] [C song]]]").empty());
  }
  SUBCASE("R3 exempts scenes, superparallel units and UNA units") {
    CHECK(check("[H [A [E big] [E red] [C dogs]] [P bark]]").empty());
    CHECK(check("[H [A [E big] [E red]] [P bark]]") == std::vector<std::string>{"R3"});
  }
  SUBCASE("R4 is satisfied by an H sibling or the root") {
    CHECK(check("[H [A I] [P said] [A [L that] [H [A he] [P left]]]]").empty());
  }
  SUBCASE("R6 needs a non-remote non-F child") {
    CHECK(has(check("[H [A John] [P kicked] [A [F the] [F ball]]]"), "R6"));
  }
  SUBCASE("R7 coordination exception") {
    CHECK(check("[H [A I] [P saw] [A [C [D only] [C John]]]]").empty());
  }
  SUBCASE("R8 secondary-only sets") {
    CHECK(has(check("[H [A John] [P kicked] [UNA ball]]"), "R8"));
  }
  SUBCASE("R10 reports each uncovered word at the root") {
    auto ds = validate(parse_passage("[H [A John] [P kicked] [A the [C ball]]] ."));
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].rule == "R10");
    CHECK(ds[0].unit == 0);
    CHECK(ds[0].message.find("'the'") != std::string::npos);
  }
  SUBCASE("R11") {
    CHECK(check("[H [A I] [P ate] [A [C apples] [N and] [C pears]]]").empty());
    CHECK(check("[H [A I] [P ate] [A [C apples] [N and] [C pears] [Q all]]]") == std::vector<std::string>{"R11"});
  }
  SUBCASE("R13 allows A, E, C and H scenes") {
    CHECK(check("[H [A I] [P told] [A him] [A [H [P to go] (him A)]]]").empty());
    CHECK(check("[H [A I] [P told] [A him] [A [T [P to go] (him A)]]]") == std::vector<std::string>{"R13"});
    CHECK(has(check("[H [A I] [P told] [A him] [A [D [P to go] (him A)]]]"), "R13"));
  }
  SUBCASE("W2 on remotes") {
    CHECK(check("[H [A John] [P came]] [L and] [H [P ate] (came F)]") == std::vector<std::string>{"R5", "W2"});
  }
}

TEST_CASE("mutants trigger exactly their rule") {
  auto all = ucca::testing::mutants();
  REQUIRE(all.size() == list_rules().size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& m = all[i];
    CAPTURE(m.rule);
    CHECK(m.rule == list_rules()[i].id);
    CHECK(validate(parse_passage(ucca::testing::fixture(m.base).text)).empty());
    auto ds = validate(m.passage);
    REQUIRE_FALSE(ds.empty());
    for (const auto& d : ds) {
      CHECK(d.rule == m.rule);
      CHECK(d.severity == find_rule(m.rule)->severity);
    }
  }
}

TEST_CASE("corpus conforms") {
  for (const auto& f : ucca::testing::corpus()) {
    CAPTURE(f.name);
    CHECK(validate(parse_passage(f.text)).empty());
  }
}

TEST_CASE("diagnostics are sorted and carry yields") {
  Passage p = parse_passage("[A [A John] [P kicked] [A [D the] [E ball]]]");
  auto ds = validate(p);
  CHECK(rules_of(ds) == std::vector<std::string>{"R1", "R3", "R7"});
  CHECK(std::is_sorted(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) { return a.unit < b.unit; }));
  CHECK(ds[0].yield == "John kicked the ball");
  CHECK(ds[1].yield == "the ball");

  std::string long_text = "[H [A";
  for (int i = 0; i < 30; ++i) long_text += " word" + std::to_string(i);
  long_text += "] [P x] [P y]]";
  auto long_ds = validate(parse_passage(long_text));
  REQUIRE_FALSE(long_ds.empty());
  CHECK(long_ds[0].yield.size() == 40);
}

TEST_CASE("config overrides change severity only") {
  Passage p = parse_passage("[A [A John] [P kicked] [A [D the] [E ball]]]");
  auto base = validate(p);
  auto config = parse_validator_config("# comment\nR1 = warning\nR7=error  # trailing\n\nR3 = off\n");
  auto ds = validate(p, config);
  REQUIRE(ds.size() == 2);
  CHECK(ds[0].rule == "R1");
  CHECK(ds[0].severity == Severity::Warning);
  CHECK(ds[1].rule == "R7");
  CHECK(ds[1].severity == Severity::Error);

  auto no_off = parse_validator_config("R1 = warning\nR7 = error\n");
  auto remapped = validate(p, no_off);
  REQUIRE(remapped.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(remapped[i].rule == base[i].rule);
    CHECK(remapped[i].unit == base[i].unit);
  }

  CHECK_THROWS_AS(parse_validator_config("R99 = error"), std::invalid_argument);
  CHECK_THROWS_AS(parse_validator_config("R1 = fatal"), std::invalid_argument);
  CHECK_THROWS_AS(parse_validator_config("R1 error"), std::invalid_argument);
}

TEST_CASE("validation ignores unit numbering and child order") {
  std::mt19937_64 rng(7);
  for (const auto& m : ucca::testing::mutants()) {
    PassageSpec spec = describe(m.passage);
    std::vector<std::size_t> perm(spec.units.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto& u : spec.units) u.id = "n" + std::to_string(perm[std::stoul(u.id)]);
    for (auto& e : spec.edges) {
      e.parent = "n" + std::to_string(perm[std::stoul(e.parent)]);
      e.child = "n" + std::to_string(perm[std::stoul(e.child)]);
    }
    std::shuffle(spec.units.begin(), spec.units.end(), rng);
    std::shuffle(spec.edges.begin(), spec.edges.end(), rng);
    Passage q = build_passage(spec, {.require_full_coverage = false});
    auto a = validate(m.passage);
    auto b = validate(q);
    std::multiset<std::pair<std::string, std::string>> sa;
    std::multiset<std::pair<std::string, std::string>> sb;
    for (const auto& d : a) sa.insert({d.rule, d.yield});
    for (const auto& d : b) sb.insert({d.rule, d.yield});
    CHECK(sa == sb);
  }
}
