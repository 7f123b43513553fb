#pragma once

#include <string>
#include <string_view>

#include "ucca/passage.hpp"

namespace ucca {

inline constexpr std::string_view kInterchangeVersion = "1";
inline constexpr std::string_view kInterchangeExtension = ".ucca.json";

// Canonical JSON: keys sorted, two-space indentation, '\n' line endings and a
// trailing newline. Tokens are ordered by position, units by id, edges by
// (parent, child, remote); unit ids are written as strings.
//
//   {
//     "edges": [{"categories": ["A"], "child": "1", "parent": "0", "remote": false}, ...],
//     "format_version": "1",
//     "passage_id": "...",
//     "tokens": [{"is_punct": false, "position": 0, "text": "John"}, ...],
//     "units": [{"id": "0", "kind": "internal"}, {"id": "1", "kind": "terminal", "tokens": [0]}, ...]
//   }
std::string to_interchange(const Passage& passage);

// Throws Error(MalformedDocument) for anything that is not a well-typed
// document, Error(UnsupportedVersion), or any build_passage error.
Passage from_interchange(std::string_view bytes, const BuildOptions& options = {});

}  // namespace ucca
