#include "patimt/text.hpp"

namespace patimt::text {

std::vector<char32_t> decode_utf8(std::string_view s)
{
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        int len = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            len = 1;
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        }
        bool ok = len > 0 && i + len <= s.size();
        for (int k = 1; ok && k < len; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80)
                ok = false;
            else
                cp = (cp << 6) | (cc & 0x3F);
        }
        if (ok && len > 1) {
            // overlong encodings and surrogates
            static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
            if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
                ok = false;
        }
        if (!ok) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(const std::vector<char32_t>& cps)
{
    std::string out;
    for (char32_t cp : cps)
        append_utf8(out, cp);
    return out;
}

bool is_space(char32_t cp) noexcept
{
    switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_cjk(char32_t cp) noexcept
{
    return (cp >= 0x4E00 && cp <= 0x9FFF)     // unified ideographs
        || (cp >= 0x3400 && cp <= 0x4DBF)     // extension A
        || (cp >= 0x20000 && cp <= 0x2FA1F)   // extensions B.. and compatibility supplement
        || (cp >= 0xF900 && cp <= 0xFAFF)     // compatibility ideographs
        || (cp >= 0x3001 && cp <= 0x303F)     // CJK symbols and punctuation
        || (cp >= 0x3040 && cp <= 0x30FF)     // hiragana, katakana
        || (cp >= 0xFF01 && cp <= 0xFF60)     // fullwidth forms
        || (cp >= 0xFE30 && cp <= 0xFE4F);    // compatibility forms
}

bool is_punct(char32_t cp) noexcept
{
    if (cp < 0x80)
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
               (cp >= 0x7B && cp <= 0x7E);
    return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) || (cp >= 0x3001 && cp <= 0x3003) ||
           (cp >= 0x3008 && cp <= 0x3011) || (cp >= 0x3014 && cp <= 0x301F) || (cp >= 0xFF01 && cp <= 0xFF0F) ||
           (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65) ||
           cp == 0xA1 || cp == 0xBF || cp == 0xAB || cp == 0xBB || cp == 0xB7;
}

std::string trim(std::string_view s)
{
    const auto cps = decode_utf8(s);
    std::size_t b = 0, e = cps.size();
    while (b < e && is_space(cps[b]))
        ++b;
    while (e > b && is_space(cps[e - 1]))
        --e;
    if (b == 0 && e == cps.size()) {
        // keep the original bytes untouched (malformed input stays as-is)
        return std::string(s);
    }
    return encode_utf8(std::vector<char32_t>(cps.begin() + b, cps.begin() + e));
}

std::size_t count_words(std::string_view s)
{
    std::size_t n = 0;
    bool in_run = false;
    for (char32_t cp : decode_utf8(s)) {
        if (is_space(cp)) {
            in_run = false;
        } else if (is_cjk(cp)) {
            ++n;
            in_run = false;
        } else if (!in_run) {
            ++n;
            in_run = true;
        }
    }
    return n;
}

} // namespace patimt::text
