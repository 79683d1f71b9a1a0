#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace patimt::text {

/// Decode UTF-8 into code points. Malformed bytes decode to U+FFFD one byte
/// at a time, so arbitrary input is accepted.
std::vector<char32_t> decode_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);

bool is_space(char32_t cp) noexcept;

/// Han ideographs, kana, CJK symbols and fullwidth forms.
bool is_cjk(char32_t cp) noexcept;

/// ASCII punctuation plus the general, CJK and fullwidth punctuation blocks.
bool is_punct(char32_t cp) noexcept;

std::string trim(std::string_view s);

/// Whitespace-delimited tokens; each CJK code point is its own word and each
/// maximal non-CJK run inside a token counts once.
std::size_t count_words(std::string_view s);

} // namespace patimt::text
