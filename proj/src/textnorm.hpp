#pragma once

#include <string>
#include <string_view>

namespace headgate {

// Canonical answer form used by the exact and containment judges:
// Unicode NFC, full casefold, every whitespace run collapsed to one U+0020,
// leading/trailing whitespace stripped, then one trailing '.' stripped.
std::string normalize_answer(std::string_view utf8);

// Valid UTF-8 passes through unchanged; malformed sequences become U+FFFD.
// Byte-level generation can emit anything, and responses must survive JSON.
std::string sanitize_utf8(std::string_view bytes);

// True iff `needle` occurs in `haystack` starting and ending at a token
// boundary (string edge or a space). Both arguments must already be
// normalized, so the only whitespace byte is ' '.
bool contains_token_bounded(std::string_view haystack, std::string_view needle);

}  // namespace headgate
