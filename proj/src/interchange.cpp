#include "ucca/interchange.hpp"

#include <algorithm>
#include <tuple>

#include <json.hpp>

#include "ucca/error.hpp"

namespace ucca {

using nlohmann::json;

std::string to_interchange(const Passage& passage) {
  json tokens = json::array();
  for (const Token& t : passage.tokens()) {
    tokens.push_back({{"text", t.text}, {"position", t.position}, {"is_punct", t.is_punct}});
  }
  json units = json::array();
  std::vector<const Edge*> edges;
  for (const Unit& u : passage.units()) {
    json unit = {{"id", std::to_string(u.id)}, {"kind", to_string(u.kind)}};
    if (u.kind == UnitKind::Terminal) unit["tokens"] = u.tokens;
    units.push_back(std::move(unit));
    for (const Edge& e : u.outgoing) edges.push_back(&e);
  }
  std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) {
    return std::tie(a->parent, a->child, a->remote) < std::tie(b->parent, b->child, b->remote);
  });
  json edge_array = json::array();
  for (const Edge* e : edges) {
    json categories = json::array();
    for (Category c : e->categories.labels()) categories.push_back(abbreviation(c));
    edge_array.push_back({{"parent", std::to_string(e->parent)},
                          {"child", std::to_string(e->child)},
                          {"categories", std::move(categories)},
                          {"remote", e->remote}});
  }
  json doc = {{"format_version", kInterchangeVersion},
              {"passage_id", passage.id()},
              {"tokens", std::move(tokens)},
              {"units", std::move(units)},
              {"edges", std::move(edge_array)}};
  return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedDocument, what); }

const json& field(const json& object, const char* key, json::value_t type, const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) malformed(where + ": missing '" + key + "'");
  bool ok = it->type() == type ||
            (type == json::value_t::number_unsigned && it->type() == json::value_t::number_integer && it->get<long long>() >= 0);
  if (!ok) malformed(where + ": '" + key + "' has the wrong type");
  return *it;
}

}  // namespace

Passage from_interchange(std::string_view bytes, const BuildOptions& options) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  if (!doc.is_object()) malformed("document is not an object");
  const auto& version = field(doc, "format_version", json::value_t::string, "document");
  if (version.get<std::string>() != kInterchangeVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "format_version '" + version.get<std::string>() + "'");
  }

  PassageSpec spec;
  spec.id = field(doc, "passage_id", json::value_t::string, "document").get<std::string>();
  for (const auto& t : field(doc, "tokens", json::value_t::array, "document")) {
    if (!t.is_object()) malformed("token is not an object");
    spec.tokens.push_back({field(t, "text", json::value_t::string, "token").get<std::string>(),
                           field(t, "position", json::value_t::number_unsigned, "token").get<TokenPos>(),
                           field(t, "is_punct", json::value_t::boolean, "token").get<bool>()});
  }
  for (const auto& u : field(doc, "units", json::value_t::array, "document")) {
    if (!u.is_object()) malformed("unit is not an object");
    UnitSpec unit;
    unit.id = field(u, "id", json::value_t::string, "unit").get<std::string>();
    auto kind = unit_kind_from_string(field(u, "kind", json::value_t::string, "unit").get<std::string>());
    if (!kind) malformed("unit '" + unit.id + "': unknown kind");
    unit.kind = *kind;
    if (u.contains("tokens")) {
      for (const auto& pos : field(u, "tokens", json::value_t::array, "unit")) {
        if (!pos.is_number_integer() || pos.get<long long>() < 0) malformed("unit '" + unit.id + "': bad token position");
        unit.tokens.push_back(pos.get<TokenPos>());
      }
    }
    spec.units.push_back(std::move(unit));
  }
  for (const auto& e : field(doc, "edges", json::value_t::array, "document")) {
    if (!e.is_object()) malformed("edge is not an object");
    EdgeSpec edge;
    edge.parent = field(e, "parent", json::value_t::string, "edge").get<std::string>();
    edge.child = field(e, "child", json::value_t::string, "edge").get<std::string>();
    edge.remote = field(e, "remote", json::value_t::boolean, "edge").get<bool>();
    for (const auto& c : field(e, "categories", json::value_t::array, "edge")) {
      if (!c.is_string()) malformed("edge category is not a string");
      auto cat = category_from_abbreviation(c.get<std::string>());
      if (!cat) malformed("unknown category '" + c.get<std::string>() + "'");
      edge.categories.insert(*cat);
    }
    spec.edges.push_back(std::move(edge));
  }
  return build_passage(std::move(spec), options);
}

}  // namespace ucca
