#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ucca/error.hpp"
#include "ucca/interchange.hpp"
#include "ucca/notation.hpp"
#include "ucca/scorer.hpp"
#include "ucca/validator.hpp"

namespace py = pybind11;
using namespace ucca;

namespace {

py::dict prf_dict(const Prf& prf) {
  py::dict d;
  d["matched"] = prf.matched;
  d["gold"] = prf.gold;
  d["predicted"] = prf.predicted;
  d["precision"] = prf.precision();
  d["recall"] = prf.recall();
  d["f1"] = prf.f1();
  return d;
}

py::dict classes_dict(const EdgeClassScores& s) {
  py::dict d;
  d["primary"] = prf_dict(s.primary);
  d["remote"] = prf_dict(s.remote);
  return d;
}

LabelSide side_from(const std::string& side) {
  if (side == "left") return LabelSide::Left;
  if (side == "right") return LabelSide::Right;
  throw py::value_error("label_side must be 'left' or 'right'");
}

ScoreMode mode_from(const std::string& mode) {
  if (mode == "labeled") return ScoreMode::Labeled;
  if (mode == "unlabeled") return ScoreMode::Unlabeled;
  throw py::value_error("mode must be 'labeled' or 'unlabeled'");
}

}  // namespace

PYBIND11_MODULE(uccafl, m) {
  m.doc() = "Foundational-layer UCCA passages: parse, validate, convert, score.";

  static py::exception<Error> error_type(m, "UccaError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      if (auto* pe = dynamic_cast<const ParseError*>(&e)) exc.attr("position") = pe->position();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<Passage>(m, "Passage")
      .def_property_readonly("id", &Passage::id)
      .def_property_readonly("tokens",
                             [](const Passage& p) {
                               std::vector<std::string> out;
                               for (const auto& t : p.tokens()) out.push_back(t.text);
                               return out;
                             })
      .def_property_readonly("unit_count", [](const Passage& p) { return p.units().size(); })
      .def_property_readonly("edge_count", &Passage::edge_count)
      .def_property_readonly("remote_edge_count", &Passage::remote_edge_count)
      .def_property_readonly("uncovered_tokens", &Passage::uncovered_tokens)
      .def("yield_of", [](const Passage& p, UnitId u, bool include_remote) { return yield_of(p, u, include_remote); },
           py::arg("unit"), py::arg("include_remote") = false)
      .def("is_scene_unit", [](const Passage& p, UnitId u) { return is_scene_unit(p, u); }, py::arg("unit"))
      .def("yield_text", [](const Passage& p, UnitId u) { return yield_text(p, u); }, py::arg("unit"))
      .def("__repr__", [](const Passage& p) {
        return "<Passage '" + p.id() + "' " + std::to_string(p.tokens().size()) + " tokens, " +
               std::to_string(p.units().size()) + " units>";
      });

  m.def(
      "parse",
      [](const std::string& text, bool lenient_remotes, const std::string& passage_id) {
        return parse_passage(text, {.lenient_remotes = lenient_remotes, .passage_id = passage_id});
      },
      py::arg("text"), py::arg("lenient_remotes") = false, py::arg("passage_id") = "",
      "Parse one passage in bracket notation.");
  m.def(
      "parse_document",
      [](const std::string& text, bool lenient_remotes, const std::string& passage_id) {
        return parse_document(text, {.lenient_remotes = lenient_remotes, .passage_id = passage_id});
      },
      py::arg("text"), py::arg("lenient_remotes") = false, py::arg("passage_id") = "",
      "Parse blank-line separated passages.");
  m.def(
      "render", [](const Passage& p, const std::string& side) { return render(p, side_from(side)); }, py::arg("passage"),
      py::arg("label_side") = "left");
  m.def("to_json", &to_interchange, py::arg("passage"), "Canonical interchange document.");
  m.def(
      "from_json",
      [](const std::string& bytes, bool require_full_coverage) {
        return from_interchange(bytes, {.require_full_coverage = require_full_coverage});
      },
      py::arg("data"), py::arg("require_full_coverage") = true);
  m.def("isomorphic", &isomorphic, py::arg("a"), py::arg("b"));

  m.def("list_rules", [] {
    py::list out;
    for (const auto& r : list_rules()) {
      py::dict d;
      d["id"] = r.id;
      d["severity"] = std::string(to_string(r.severity));
      d["description"] = r.description;
      d["guideline_anchor"] = r.guideline_anchor;
      out.append(d);
    }
    return out;
  });
  m.def(
      "validate",
      [](const Passage& p, const std::string& config) {
        py::list out;
        for (const auto& d : validate(p, parse_validator_config(config))) {
          py::dict item;
          item["rule"] = d.rule;
          item["severity"] = std::string(to_string(d.severity));
          item["unit"] = d.unit;
          item["message"] = d.message;
          item["yield"] = d.yield;
          out.append(item);
        }
        return out;
      },
      py::arg("passage"), py::arg("config") = "", "Diagnostics; `config` uses the RULE = error|warning|off format.");

  m.def(
      "score",
      [](const Passage& gold, const Passage& pred, const std::string& mode) {
        ScoreReport r = score(gold, pred, mode_from(mode));
        py::dict d;
        d["mode"] = mode;
        d["labeled"] = classes_dict(r.labeled);
        d["unlabeled"] = classes_dict(r.unlabeled);
        py::dict per;
        for (Category c : kAllCategories) {
          const Prf& prf = r.per_category[static_cast<std::size_t>(c)];
          if (prf.gold || prf.predicted) per[py::str(std::string(abbreviation(c)))] = prf_dict(prf);
        }
        d["per_category"] = per;
        return d;
      },
      py::arg("gold"), py::arg("pred"), py::arg("mode") = "labeled");

  m.def("stats", [](const Passage& p) {
    CategoryCounts c = stats(p);
    py::dict d;
    d["passages"] = c.passages;
    d["tokens"] = c.tokens;
    d["units"] = c.units;
    d["edges"] = c.edges;
    d["remote_edges"] = c.remote_edges;
    d["scenes"] = c.scenes;
    d["implicit_units"] = c.implicit_units;
    d["unanalyzable_units"] = c.unanalyzable_units;
    py::dict per;
    for (Category cat : kAllCategories) per[py::str(std::string(abbreviation(cat)))] = c[cat];
    d["per_category"] = per;
    return d;
  });
}
