#pragma once

#include <string>
#include <string_view>

namespace ucca::detail {

bool is_punctuation(char32_t cp);

// Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);

// True iff the token is non-empty and every code point is Unicode punctuation.
bool is_punctuation_token(std::string_view text);

}  // namespace ucca::detail
