#include "ucca/scorer.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include <json.hpp>

#include "ucca/error.hpp"

namespace ucca {

std::vector<EdgeSignature> signatures(const Passage& passage) {
  std::vector<EdgeSignature> out;
  for (const Unit& u : passage.units()) {
    for (const Edge& e : u.outgoing) {
      const Unit& child = passage.units()[e.child];
      auto yield = passage.primary_yield(e.child);
      if (child.kind == UnitKind::Implicit || yield.empty()) continue;
      out.push_back({{yield.begin(), yield.end()}, e.categories, e.remote});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double Prf::precision() const {
  if (predicted == 0) return gold == 0 ? 1.0 : 0.0;
  return static_cast<double>(matched) / static_cast<double>(predicted);
}

double Prf::recall() const {
  if (gold == 0) return predicted == 0 ? 1.0 : 0.0;
  return static_cast<double>(matched) / static_cast<double>(gold);
}

double Prf::f1() const {
  double p = precision();
  double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

Prf& Prf::operator+=(const Prf& other) {
  matched += other.matched;
  gold += other.gold;
  predicted += other.predicted;
  return *this;
}

ScoreReport& ScoreReport::operator+=(const ScoreReport& other) {
  labeled.primary += other.labeled.primary;
  labeled.remote += other.labeled.remote;
  unlabeled.primary += other.unlabeled.primary;
  unlabeled.remote += other.unlabeled.remote;
  for (std::size_t i = 0; i < kCategoryCount; ++i) per_category[i] += other.per_category[i];
  return *this;
}

namespace {

bool key_less(const EdgeSignature& a, const EdgeSignature& b, ScoreMode mode) {
  if (mode == ScoreMode::Labeled) {
    return std::tie(a.yield, a.remote, a.categories) < std::tie(b.yield, b.remote, b.categories);
  }
  return std::tie(a.yield, a.remote) < std::tie(b.yield, b.remote);
}

std::vector<EdgeSignature> only(const std::vector<EdgeSignature>& sigs, bool remote) {
  std::vector<EdgeSignature> out;
  std::copy_if(sigs.begin(), sigs.end(), std::back_inserter(out),
               [&](const EdgeSignature& s) { return s.remote == remote; });
  return out;
}

Prf compare(const std::vector<EdgeSignature>& gold, const std::vector<EdgeSignature>& pred, ScoreMode mode) {
  return {count_matches(gold, pred, mode), gold.size(), pred.size()};
}

}  // namespace

std::size_t count_matches(const std::vector<EdgeSignature>& gold, const std::vector<EdgeSignature>& pred,
                          ScoreMode mode) {
  auto less = [mode](const EdgeSignature& a, const EdgeSignature& b) { return key_less(a, b, mode); };
  std::vector<EdgeSignature> g = gold;
  std::vector<EdgeSignature> p = pred;
  std::sort(g.begin(), g.end(), less);
  std::sort(p.begin(), p.end(), less);
  std::size_t matched = 0;
  auto gi = g.begin();
  auto pi = p.begin();
  while (gi != g.end() && pi != p.end()) {
    if (less(*gi, *pi)) {
      ++gi;
    } else if (less(*pi, *gi)) {
      ++pi;
    } else {
      ++matched;
      ++gi;
      ++pi;
    }
  }
  return matched;
}

ScoreReport score(const Passage& gold, const Passage& pred, ScoreMode mode) {
  auto gt = gold.tokens();
  auto pt = pred.tokens();
  if (!std::equal(gt.begin(), gt.end(), pt.begin(), pt.end(),
                  [](const Token& a, const Token& b) { return a.text == b.text && a.is_punct == b.is_punct; })) {
    throw Error(ErrorCode::TokenMismatch, "gold '" + gold.id() + "' and predicted '" + pred.id() +
                                              "' do not share a token sequence");
  }
  const auto gs = signatures(gold);
  const auto ps = signatures(pred);
  const auto g_primary = only(gs, false);
  const auto g_remote = only(gs, true);
  const auto p_primary = only(ps, false);
  const auto p_remote = only(ps, true);

  ScoreReport report;
  report.mode = mode;
  report.labeled = {compare(g_primary, p_primary, ScoreMode::Labeled), compare(g_remote, p_remote, ScoreMode::Labeled)};
  report.unlabeled = {compare(g_primary, p_primary, ScoreMode::Unlabeled),
                      compare(g_remote, p_remote, ScoreMode::Unlabeled)};
  for (Category c : kAllCategories) {
    auto carrying = [c](const std::vector<EdgeSignature>& sigs) {
      std::vector<EdgeSignature> out;
      std::copy_if(sigs.begin(), sigs.end(), std::back_inserter(out),
                   [c](const EdgeSignature& s) { return s.categories.contains(c); });
      return out;
    };
    report.per_category[static_cast<std::size_t>(c)] = compare(carrying(gs), carrying(ps), ScoreMode::Unlabeled);
  }
  return report;
}

namespace {

nlohmann::json prf_json(const Prf& prf) {
  return {{"matched", prf.matched},   {"gold", prf.gold},     {"predicted", prf.predicted},
          {"precision", prf.precision()}, {"recall", prf.recall()}, {"f1", prf.f1()}};
}

std::string fixed(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

}  // namespace

std::string report_to_json(const ScoreReport& report) {
  nlohmann::json per_category = nlohmann::json::object();
  for (Category c : kAllCategories) {
    const Prf& prf = report.per_category[static_cast<std::size_t>(c)];
    if (prf.gold == 0 && prf.predicted == 0) continue;
    per_category[std::string(abbreviation(c))] = {{"matched", prf.matched}, {"gold", prf.gold}, {"predicted", prf.predicted}};
  }
  nlohmann::json doc = {
      {"mode", report.mode == ScoreMode::Labeled ? "labeled" : "unlabeled"},
      {"labeled", {{"primary", prf_json(report.labeled.primary)}, {"remote", prf_json(report.labeled.remote)}}},
      {"unlabeled", {{"primary", prf_json(report.unlabeled.primary)}, {"remote", prf_json(report.unlabeled.remote)}}},
      {"per_category", std::move(per_category)},
  };
  return doc.dump(2) + "\n";
}

std::string report_to_table(const ScoreReport& report) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-20s %8s %8s %8s %8s %8s %8s\n", "", "matched", "gold", "pred", "P", "R", "F1");
  out += line;
  auto row = [&](const char* name, const Prf& prf) {
    std::snprintf(line, sizeof line, "%-20s %8zu %8zu %8zu %8s %8s %8s\n", name, prf.matched, prf.gold, prf.predicted,
                  fixed(prf.precision()).c_str(), fixed(prf.recall()).c_str(), fixed(prf.f1()).c_str());
    out += line;
  };
  row("labeled primary", report.labeled.primary);
  row("labeled remote", report.labeled.remote);
  row("unlabeled primary", report.unlabeled.primary);
  row("unlabeled remote", report.unlabeled.remote);
  out += "\n";
  std::snprintf(line, sizeof line, "%-20s %8s %8s %8s\n", "category", "matched", "gold", "pred");
  out += line;
  for (Category c : kAllCategories) {
    const Prf& prf = report.per_category[static_cast<std::size_t>(c)];
    if (prf.gold == 0 && prf.predicted == 0) continue;
    std::snprintf(line, sizeof line, "%-20s %8zu %8zu %8zu\n", std::string(abbreviation(c)).c_str(), prf.matched,
                  prf.gold, prf.predicted);
    out += line;
  }
  const auto& sel = report.selected();
  std::snprintf(line, sizeof line, "\n%s f1 (primary): %s\n", report.mode == ScoreMode::Labeled ? "labeled" : "unlabeled",
                fixed(sel.primary.f1()).c_str());
  out += line;
  return out;
}

}  // namespace ucca
