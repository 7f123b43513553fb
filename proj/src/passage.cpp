#include "ucca/passage.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <utility>

#include "ucca/error.hpp"

namespace ucca {

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::Terminal: return "terminal";
    case UnitKind::Internal: return "internal";
    case UnitKind::Implicit: return "implicit";
  }
  return "internal";
}

std::optional<UnitKind> unit_kind_from_string(std::string_view text) {
  if (text == "terminal") return UnitKind::Terminal;
  if (text == "internal") return UnitKind::Internal;
  if (text == "implicit") return UnitKind::Implicit;
  return std::nullopt;
}

const Unit& Passage::unit(UnitId id) const {
  if (!contains(id)) throw Error(ErrorCode::UnknownUnit, "no unit with id " + std::to_string(id));
  return units_[id];
}

UnitId Passage::primary_parent(UnitId id) const {
  unit(id);
  return primary_parent_[id];
}

const Edge* Passage::primary_incoming(UnitId id) const {
  UnitId parent = primary_parent(id);
  if (parent == kNoUnit) return nullptr;
  for (const Edge& e : units_[parent].outgoing) {
    if (!e.remote && e.child == id) return &e;
  }
  return nullptr;
}

std::span<const Edge> Passage::remote_incoming(UnitId id) const {
  unit(id);
  return remote_in_[id];
}

std::span<const TokenPos> Passage::primary_yield(UnitId id) const {
  unit(id);
  return yields_[id];
}

namespace {

// Working copy of the caller's description with ids resolved to indices.
struct RawEdge {
  std::size_t parent;
  std::size_t child;
  CategorySet categories;
  bool remote;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

void check_tokens(const std::vector<Token>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].position != i) {
      fail(ErrorCode::InvalidToken, "token '" + tokens[i].text + "' has position " +
                                        std::to_string(tokens[i].position) + ", expected " +
                                        std::to_string(i));
    }
    if (tokens[i].text.empty()) fail(ErrorCode::InvalidToken, "empty token at " + std::to_string(i));
  }
}

}  // namespace

Passage build_passage(PassageSpec spec, const BuildOptions& options) {
  check_tokens(spec.tokens);
  const std::size_t n = spec.units.size();
  if (n == 0) fail(ErrorCode::MissingRoot, "passage has no units");

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    auto& u = spec.units[i];
    if (!index.emplace(u.id, i).second) fail(ErrorCode::DuplicateId, "unit id '" + u.id + "'");
    std::sort(u.tokens.begin(), u.tokens.end());
    if (std::adjacent_find(u.tokens.begin(), u.tokens.end()) != u.tokens.end()) {
      fail(ErrorCode::InvalidUnit, "unit '" + u.id + "' lists a token twice");
    }
    if (!u.tokens.empty() && u.tokens.back() >= spec.tokens.size()) {
      fail(ErrorCode::InvalidUnit, "unit '" + u.id + "' refers to a token out of range");
    }
    if (u.kind == UnitKind::Terminal && u.tokens.empty()) {
      fail(ErrorCode::InvalidUnit, "terminal unit '" + u.id + "' has no tokens");
    }
    if (u.kind != UnitKind::Terminal && !u.tokens.empty()) {
      fail(ErrorCode::InvalidUnit, "non-terminal unit '" + u.id + "' has tokens");
    }
  }

  std::vector<RawEdge> edges;
  edges.reserve(spec.edges.size());
  for (const auto& e : spec.edges) {
    auto p = index.find(e.parent);
    auto c = index.find(e.child);
    if (p == index.end() || c == index.end()) {
      fail(ErrorCode::DanglingEdge, "edge '" + e.parent + "' -> '" + e.child + "'");
    }
    if (e.categories.empty()) {
      fail(ErrorCode::InvalidEdge, "edge '" + e.parent + "' -> '" + e.child + "' has no category");
    }
    if (spec.units[p->second].kind != UnitKind::Internal) {
      fail(ErrorCode::InvalidUnit, std::string(to_string(spec.units[p->second].kind)) + " unit '" +
                                       e.parent + "' has outgoing edges");
    }
    edges.push_back({p->second, c->second, e.categories, e.remote});
  }

  // Primary tree.
  std::vector<std::size_t> parent(n, n);
  std::vector<std::vector<std::size_t>> primary_children(n);
  std::vector<std::size_t> out_degree(n, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    ++out_degree[e.parent];
    if (e.remote) continue;
    if (e.parent == e.child) fail(ErrorCode::PrimaryCycle, "unit '" + spec.units[e.parent].id + "' is its own parent");
    if (parent[e.child] != n) {
      fail(ErrorCode::MultiplePrimaryParents, "unit '" + spec.units[e.child].id + "'");
    }
    parent[e.child] = e.parent;
    primary_children[e.parent].push_back(i);
  }

  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (parent[i] == n) roots.push_back(i);
  }
  {
    std::vector<bool> reached(n, false);
    std::vector<std::size_t> stack(roots.begin(), roots.end());
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      reached[u] = true;
      for (std::size_t ei : primary_children[u]) stack.push_back(edges[ei].child);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!reached[i]) fail(ErrorCode::PrimaryCycle, "unit '" + spec.units[i].id + "' lies on a primary cycle");
    }
  }
  if (roots.size() != 1) {
    fail(ErrorCode::MissingRoot, std::to_string(roots.size()) + " units have no primary parent");
  }
  const std::size_t root = roots.front();
  if (spec.units[root].kind != UnitKind::Internal) fail(ErrorCode::InvalidUnit, "root unit must be internal");
  for (std::size_t i = 0; i < n; ++i) {
    if (i != root && spec.units[i].kind == UnitKind::Internal && out_degree[i] == 0) {
      fail(ErrorCode::InvalidUnit, "internal unit '" + spec.units[i].id + "' has no children");
    }
  }

  // Remote edges.
  {
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges) {
      if (!e.remote) continue;
      const std::string where = "remote edge '" + spec.units[e.parent].id + "' -> '" + spec.units[e.child].id + "'";
      if (e.child == root) fail(ErrorCode::InvalidRemote, where + " targets the root");
      if (parent[e.child] == e.parent) fail(ErrorCode::InvalidRemote, where + " duplicates a primary edge");
      seen.emplace_back(e.parent, e.child);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      fail(ErrorCode::InvalidRemote, "duplicate remote edge");
    }
  }
  {
    // Full DAG check over primary and remote edges.
    std::vector<std::vector<std::size_t>> all_children(n);
    for (const auto& e : edges) all_children[e.parent].push_back(e.child);
    enum class Mark : std::uint8_t { White, Grey, Black };
    std::vector<Mark> mark(n, Mark::White);
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t s = 0; s < n; ++s) {
      if (mark[s] != Mark::White) continue;
      stack.emplace_back(s, 0);
      mark[s] = Mark::Grey;
      while (!stack.empty()) {
        auto& [u, next] = stack.back();
        if (next < all_children[u].size()) {
          std::size_t v = all_children[u][next++];
          if (mark[v] == Mark::Grey) {
            fail(ErrorCode::RemoteCycle, "cycle through unit '" + spec.units[v].id + "'");
          }
          if (mark[v] == Mark::White) {
            mark[v] = Mark::Grey;
            stack.emplace_back(v, 0);
          }
        } else {
          mark[u] = Mark::Black;
          stack.pop_back();
        }
      }
    }
  }

  // Token coverage.
  std::vector<TokenPos> uncovered;
  {
    std::vector<int> claims(spec.tokens.size(), 0);
    for (const auto& u : spec.units) {
      for (TokenPos t : u.tokens) ++claims[t];
    }
    for (std::size_t t = 0; t < claims.size(); ++t) {
      const auto& tok = spec.tokens[t];
      if (tok.is_punct && claims[t] > 0) {
        fail(ErrorCode::TokenCoverageGap, "punctuation token " + std::to_string(t) + " '" + tok.text + "' is claimed by a terminal");
      }
      if (claims[t] > 1) {
        fail(ErrorCode::TokenCoverageGap, "token " + std::to_string(t) + " '" + tok.text + "' is claimed by " +
                                              std::to_string(claims[t]) + " terminals");
      }
      if (!tok.is_punct && claims[t] == 0) {
        if (options.require_full_coverage) {
          fail(ErrorCode::TokenCoverageGap, "token " + std::to_string(t) + " '" + tok.text + "' is not covered");
        }
        uncovered.push_back(static_cast<TokenPos>(t));
      }
    }
  }

  // Primary yields over the original indices.
  std::vector<std::vector<TokenPos>> yields(n);
  {
    std::function<void(std::size_t)> collect = [&](std::size_t u) {
      auto& y = yields[u];
      y = spec.units[u].tokens;
      for (std::size_t ei : primary_children[u]) {
        std::size_t c = edges[ei].child;
        collect(c);
        y.insert(y.end(), yields[c].begin(), yields[c].end());
      }
      std::sort(y.begin(), y.end());
    };
    collect(root);
  }

  // Canonical sibling order: units with tokens by their first token, then
  // token-less units by a structural encoding of their subtree.
  std::vector<std::string> encoding(n);
  std::vector<bool> encoded(n, false);
  std::function<const std::string&(std::size_t)> encode = [&](std::size_t u) -> const std::string& {
    if (encoded[u]) return encoding[u];
    std::string out(to_string(spec.units[u].kind));
    std::vector<std::string> parts;
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const auto& e = edges[ei];
      if (e.parent != u) continue;
      std::string part = (e.remote ? "~" : "") + e.categories.to_string() + ":";
      if (e.remote || !yields[e.child].empty()) {
        for (TokenPos t : yields[e.child]) part += std::to_string(t) + ",";
        if (e.remote && yields[e.child].empty()) part += encode(e.child);
      } else {
        part += encode(e.child);
      }
      parts.push_back(std::move(part));
    }
    std::sort(parts.begin(), parts.end());
    out += "(";
    for (const auto& p : parts) out += p + ";";
    out += ")";
    encoding[u] = std::move(out);
    encoded[u] = true;
    return encoding[u];
  };
  auto child_less = [&](std::size_t ea, std::size_t eb) {
    const auto& a = edges[ea];
    const auto& b = edges[eb];
    const bool a_empty = yields[a.child].empty();
    const bool b_empty = yields[b.child].empty();
    if (a_empty != b_empty) return !a_empty;
    if (!a_empty) return yields[a.child].front() < yields[b.child].front();
    auto ka = a.categories.to_string() + ":" + encode(a.child);
    auto kb = b.categories.to_string() + ":" + encode(b.child);
    return ka < kb;
  };

  std::vector<UnitId> new_id(n, kNoUnit);
  std::vector<std::size_t> order;
  order.reserve(n);
  {
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      new_id[u] = static_cast<UnitId>(order.size());
      order.push_back(u);
      auto& kids = primary_children[u];
      std::stable_sort(kids.begin(), kids.end(), child_less);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(edges[*it].child);
    }
  }

  Passage p;
  p.id_ = std::move(spec.id);
  p.tokens_ = std::move(spec.tokens);
  p.units_.resize(n);
  p.primary_parent_.assign(n, kNoUnit);
  p.remote_in_.resize(n);
  p.yields_.resize(n);
  p.uncovered_ = std::move(uncovered);
  for (std::size_t old = 0; old < n; ++old) {
    UnitId id = new_id[old];
    Unit& unit = p.units_[id];
    unit.id = id;
    unit.kind = spec.units[old].kind;
    unit.tokens = std::move(spec.units[old].tokens);
    p.yields_[id] = std::move(yields[old]);
    if (parent[old] != n) p.primary_parent_[id] = new_id[parent[old]];
    for (std::size_t ei : primary_children[old]) {
      const auto& e = edges[ei];
      unit.outgoing.push_back({id, new_id[e.child], e.categories, false});
    }
  }
  for (const auto& e : edges) {
    if (!e.remote) continue;
    Edge edge{new_id[e.parent], new_id[e.child], e.categories, true};
    p.units_[edge.parent].outgoing.push_back(edge);
  }
  for (Unit& unit : p.units_) {
    auto first_remote = std::find_if(unit.outgoing.begin(), unit.outgoing.end(), [](const Edge& e) { return e.remote; });
    std::sort(first_remote, unit.outgoing.end(), [](const Edge& a, const Edge& b) { return a.child < b.child; });
    for (auto it = first_remote; it != unit.outgoing.end(); ++it) p.remote_in_[it->child].push_back(*it);
    p.edge_count_ += unit.outgoing.size();
    p.remote_edge_count_ += static_cast<std::size_t>(unit.outgoing.end() - first_remote);
  }
  for (auto& in : p.remote_in_) {
    std::sort(in.begin(), in.end(), [](const Edge& a, const Edge& b) { return a.parent < b.parent; });
  }
  return p;
}

PassageSpec describe(const Passage& passage) {
  PassageSpec spec;
  spec.id = passage.id();
  spec.tokens.assign(passage.tokens().begin(), passage.tokens().end());
  for (const Unit& u : passage.units()) {
    spec.units.push_back({std::to_string(u.id), u.kind, u.tokens});
    for (const Edge& e : u.outgoing) {
      spec.edges.push_back({std::to_string(e.parent), std::to_string(e.child), e.categories, e.remote});
    }
  }
  return spec;
}

bool isomorphic(const Passage& a, const Passage& b) {
  if (a.tokens().size() != b.tokens().size() || a.units().size() != b.units().size()) return false;
  if (!std::equal(a.tokens().begin(), a.tokens().end(), b.tokens().begin())) return false;
  return std::equal(a.units().begin(), a.units().end(), b.units().begin());
}

std::vector<TokenPos> yield_of(const Passage& passage, UnitId unit, bool include_remote) {
  auto primary = passage.primary_yield(unit);
  if (!include_remote) return {primary.begin(), primary.end()};
  std::vector<TokenPos> out;
  std::vector<bool> visited(passage.units().size(), false);
  std::vector<UnitId> stack{unit};
  while (!stack.empty()) {
    UnitId u = stack.back();
    stack.pop_back();
    if (visited[u]) continue;
    visited[u] = true;
    const Unit& x = passage.units()[u];
    out.insert(out.end(), x.tokens.begin(), x.tokens.end());
    for (const Edge& e : x.outgoing) stack.push_back(e.child);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_scene_unit(const Passage& passage, UnitId unit) {
  const Unit& u = passage.unit(unit);
  if (u.kind != UnitKind::Internal) {
    throw Error(ErrorCode::NotInternal, "unit " + std::to_string(unit) + " is " + std::string(to_string(u.kind)));
  }
  const CategorySet main{Category::P, Category::S};
  return std::any_of(u.outgoing.begin(), u.outgoing.end(),
                     [&](const Edge& e) { return e.categories.contains_any(main); });
}

std::string yield_text(const Passage& passage, UnitId unit) {
  std::string out;
  for (TokenPos t : passage.primary_yield(unit)) {
    if (!out.empty()) out += ' ';
    out += passage.tokens()[t].text;
  }
  return out;
}

CategoryCounts& CategoryCounts::operator+=(const CategoryCounts& other) {
  passages += other.passages;
  tokens += other.tokens;
  units += other.units;
  edges += other.edges;
  remote_edges += other.remote_edges;
  scenes += other.scenes;
  implicit_units += other.implicit_units;
  unanalyzable_units += other.unanalyzable_units;
  for (std::size_t i = 0; i < kCategoryCount; ++i) per_category[i] += other.per_category[i];
  return *this;
}

CategoryCounts stats(const Passage& passage) {
  CategoryCounts counts;
  counts.passages = 1;
  counts.tokens = passage.tokens().size();
  counts.units = passage.units().size();
  counts.edges = passage.edge_count();
  counts.remote_edges = passage.remote_edge_count();
  for (const Unit& u : passage.units()) {
    if (u.kind == UnitKind::Implicit) ++counts.implicit_units;
    if (u.kind == UnitKind::Internal && is_scene_unit(passage, u.id)) ++counts.scenes;
    if (const Edge* in = passage.primary_incoming(u.id); in && in->categories.contains(Category::UNA)) {
      ++counts.unanalyzable_units;
    }
    for (const Edge& e : u.outgoing) {
      for (Category c : e.categories.labels()) ++counts[c];
    }
  }
  return counts;
}

}  // namespace ucca
