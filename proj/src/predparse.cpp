#include "patimt/predparse.hpp"

#include "patimt/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace patimt {

using nlohmann::json;

std::string_view to_string(ParseStrictness s) noexcept { return s == ParseStrictness::Strict ? "strict" : "salvage"; }

std::optional<ParseStrictness> parse_strictness(std::string_view s) noexcept
{
    if (s == "strict")
        return ParseStrictness::Strict;
    if (s == "salvage")
        return ParseStrictness::Salvage;
    return std::nullopt;
}

namespace {

constexpr std::string_view kSeparator = "<|translation|>";

std::string_view trim_ascii(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }
bool ends_with(std::string_view s, std::string_view p)
{
    return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

// "[a, b, c, d]" or "[[a, b, c, d]]" -> four numbers
std::optional<std::array<double, 4>> parse_coord_list(std::string_view s)
{
    s = trim_ascii(s);
    int depth = 0;
    while (starts_with(s, "[") && ends_with(s, "]") && s.size() >= 2) {
        s = trim_ascii(s.substr(1, s.size() - 2));
        ++depth;
    }
    if (depth == 0 || depth > 2)
        return std::nullopt;
    std::array<double, 4> v{};
    std::size_t n = 0;
    std::size_t pos = 0;
    while (true) {
        auto comma = s.find(',', pos);
        auto item = trim_ascii(s.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (item.empty() || n >= 4)
            return std::nullopt;
        const std::string buf(item);
        char* end = nullptr;
        const double d = std::strtod(buf.c_str(), &end);
        if (end != buf.c_str() + buf.size() || !std::isfinite(d))
            return std::nullopt;
        v[n++] = d;
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    if (n != 4)
        return std::nullopt;
    return v;
}

std::optional<BBox> make_absolute(const std::array<double, 4>& v, CoordSpace space, ImageDims dims)
{
    try {
        return convert(BBox(v[0], v[1], v[2], v[3], space), CoordSpace::Absolute, dims);
    } catch (const Error&) {
        return std::nullopt;
    }
}

struct TrailingBox {
    std::optional<BBox> box;
    std::string_view rest; // text before the box
};

// Find a box at the very end of `s`.
TrailingBox split_trailing_box(std::string_view s, BoxDialect dialect, ImageDims dims)
{
    s = trim_ascii(s);
    auto try_from = [&](std::size_t start) -> TrailingBox {
        if (start == std::string_view::npos)
            return {std::nullopt, s};
        if (auto b = parse_box_text(s.substr(start), dialect, dims))
            return {b, trim_ascii(s.substr(0, start))};
        return {std::nullopt, s};
    };
    if (ends_with(s, ")"))
        return try_from(s.rfind("Box("));
    if (ends_with(s, "</box>"))
        return try_from(s.rfind("<box>"));
    if (ends_with(s, "<|/det|>"))
        return try_from(s.rfind("<|det|>"));
    if (ends_with(s, "]")) {
        auto p = s.rfind('[');
        if (p != std::string_view::npos && p > 0 && s[p - 1] == '[')
            --p;
        return try_from(p);
    }
    return {std::nullopt, s};
}

} // namespace

std::optional<BBox> parse_box_text(std::string_view s, BoxDialect dialect, ImageDims dims)
{
    s = trim_ascii(s);
    if (starts_with(s, "Box(") && ends_with(s, ")"))
        s = trim_ascii(s.substr(4, s.size() - 5));
    CoordSpace space = dialect_space(dialect);
    if (starts_with(s, "<box>") && ends_with(s, "</box>")) {
        s = s.substr(5, s.size() - 11);
        space = CoordSpace::Norm1000;
    } else if (starts_with(s, "<|det|>") && ends_with(s, "<|/det|>")) {
        s = s.substr(7, s.size() - 15);
        space = CoordSpace::Norm999;
    }
    auto v = parse_coord_list(s);
    if (!v)
        return std::nullopt;
    return make_absolute(*v, space, dims);
}

ParseOutcome parse_plain(std::string_view output, BoxDialect dialect, ImageDims dims, ParseStrictness strictness)
{
    ParseOutcome out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= output.size()) {
        auto nl = output.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = output.size();
        const auto line = trim_ascii(output.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty())
            continue;
        const auto sep = line.find(kSeparator);
        if (sep == std::string_view::npos) {
            out.diagnostics.push_back("line " + std::to_string(line_no) + ": no <|translation|> separator, skipped");
            continue;
        }
        PredictionRecord r;
        const auto src = text::trim(line.substr(0, sep));
        if (!src.empty())
            r.text = src;
        auto tail = split_trailing_box(line.substr(sep + kSeparator.size()), dialect, dims);
        r.bbox = tail.box;
        r.translation = text::trim(tail.rest);
        if (r.translation.empty()) {
            out.diagnostics.push_back("line " + std::to_string(line_no) + ": empty translation, skipped");
            continue;
        }
        out.records.push_back(std::move(r));
    }
    if (out.records.empty() && strictness == ParseStrictness::Strict)
        throw PredictionParseError("no parseable line in output");
    return out;
}

namespace {

std::string_view strip_wrappers(std::string_view s)
{
    if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF && static_cast<unsigned char>(s[1]) == 0xBB &&
        static_cast<unsigned char>(s[2]) == 0xBF)
        s.remove_prefix(3);
    s = trim_ascii(s);
    if (auto fence = s.find("```"); fence != std::string_view::npos) {
        std::size_t start = fence + 3;
        while (start < s.size() && (std::isalnum(static_cast<unsigned char>(s[start])) || s[start] == '_' ||
                                    s[start] == '-'))
            ++start;
        auto close = s.find("```", start);
        s = s.substr(start, close == std::string_view::npos ? std::string_view::npos : close - start);
        s = trim_ascii(s);
    }
    // bare "json" label in front of the payload
    if (starts_with(s, "json")) {
        auto rest = trim_ascii(s.substr(4));
        if (starts_with(rest, "{") || starts_with(rest, "["))
            s = rest;
    }
    return s;
}

// Drops commas that directly precede '}' or ']' (outside strings).
std::string remove_trailing_commas(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    bool in_str = false, esc = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_str) {
            out += c;
            if (esc)
                esc = false;
            else if (c == '\\')
                esc = true;
            else if (c == '"')
                in_str = false;
            continue;
        }
        if (c == '"') {
            in_str = true;
        } else if (c == ',') {
            auto j = s.find_first_not_of(" \t\r\n", i + 1);
            if (j == std::string_view::npos || s[j] == '}' || s[j] == ']')
                continue;
        }
        out += c;
    }
    return out;
}

struct Scan {
    std::size_t root_end = std::string_view::npos;      // one past the root value's closing bracket
    std::size_t last_element_end = std::string_view::npos; // one past the last complete top-level element
};

Scan scan_structure(std::string_view s)
{
    Scan sc;
    std::vector<char> stack;
    bool in_str = false, esc = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_str) {
            if (esc)
                esc = false;
            else if (c == '\\')
                esc = true;
            else if (c == '"')
                in_str = false;
            continue;
        }
        if (c == '"') {
            in_str = true;
        } else if (c == '{' || c == '[') {
            stack.push_back(c);
        } else if (c == '}' || c == ']') {
            if (stack.empty())
                break;
            stack.pop_back();
            if (stack.empty()) {
                sc.root_end = i + 1;
                break;
            }
            if (stack.size() == 1)
                sc.last_element_end = i + 1;
        }
    }
    return sc;
}

std::optional<json> try_parse(const std::string& s)
{
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded())
        return std::nullopt;
    return j;
}

// Returns nullopt (with a message in `why`) when the element is not usable.
std::optional<PredictionRecord> read_element(const json& e, BoxDialect dialect, ImageDims dims, std::string& why,
                                             bool& bbox_missing)
{
    bbox_missing = false;
    if (!e.is_object()) {
        why = "element is not an object";
        return std::nullopt;
    }
    PredictionRecord r;
    auto tr = e.find("translation");
    if (tr == e.end() || !tr->is_string() || text::trim(tr->get<std::string>()).empty()) {
        why = "missing or empty translation";
        return std::nullopt;
    }
    r.translation = text::trim(tr->get<std::string>());
    if (auto tc = e.find("text_content"); tc != e.end() && !tc->is_null()) {
        if (!tc->is_string()) {
            why = "text_content is not a string";
            return std::nullopt;
        }
        auto t = text::trim(tc->get<std::string>());
        if (!t.empty())
            r.text = std::move(t);
    }
    auto bb = e.find("bbox_2d");
    if (bb == e.end() || bb->is_null()) {
        bbox_missing = true;
        return r;
    }
    if (bb->is_string()) {
        r.bbox = parse_box_text(bb->get<std::string>(), dialect, dims);
    } else if (bb->is_array()) {
        const json* arr = &*bb;
        if (arr->size() == 1 && (*arr)[0].is_array())
            arr = &(*arr)[0];
        if (arr->size() == 4 && std::all_of(arr->begin(), arr->end(), [](const json& x) { return x.is_number(); })) {
            std::array<double, 4> v{};
            for (int k = 0; k < 4; ++k)
                v[k] = (*arr)[k].get<double>();
            r.bbox = make_absolute(v, dialect_space(dialect), dims);
        }
    }
    if (!r.bbox) {
        why = "unreadable bbox_2d";
        return std::nullopt;
    }
    return r;
}

std::vector<const json*> elements_of(const json& root)
{
    std::vector<const json*> els;
    if (root.is_array())
        for (const auto& e : root)
            els.push_back(&e);
    else
        els.push_back(&root);
    return els;
}

ParseOutcome parse_structured_strict(std::string_view output, BoxDialect dialect, ImageDims dims)
{
    const std::string payload(strip_wrappers(output));
    auto root = try_parse(payload);
    if (!root || !(root->is_object() || root->is_array()))
        throw PredictionParseError("output is not a JSON object or array");
    ParseOutcome out;
    std::size_t idx = 0;
    for (const json* e : elements_of(*root)) {
        std::string why;
        bool bbox_missing = false;
        auto r = read_element(*e, dialect, dims, why, bbox_missing);
        if (!r)
            throw PredictionParseError("element " + std::to_string(idx) + ": " + why);
        if (bbox_missing)
            throw PredictionParseError("element " + std::to_string(idx) + ": missing bbox_2d");
        out.records.push_back(std::move(*r));
        ++idx;
    }
    return out;
}

ParseOutcome parse_structured_salvage(std::string_view output, BoxDialect dialect, ImageDims dims)
{
    ParseOutcome out;
    std::string_view payload = strip_wrappers(output);
    const auto start = payload.find_first_of("{[");
    if (start == std::string_view::npos) {
        out.diagnostics.push_back("no JSON payload found; nothing recoverable");
        return out;
    }
    if (start > 0)
        out.diagnostics.push_back("skipped " + std::to_string(start) + " leading bytes");
    payload = payload.substr(start);

    std::optional<json> root = try_parse(std::string(payload));
    const Scan sc = scan_structure(payload);
    if (!root && sc.root_end != std::string_view::npos && sc.root_end < payload.size()) {
        root = try_parse(std::string(payload.substr(0, sc.root_end)));
        if (root)
            out.diagnostics.push_back("ignored trailing text after JSON payload");
    }
    if (!root) {
        const auto end = sc.root_end == std::string_view::npos ? payload.size() : sc.root_end;
        root = try_parse(remove_trailing_commas(payload.substr(0, end)));
        if (root)
            out.diagnostics.push_back("repaired trailing commas");
    }
    if (!root && payload[0] == '[' && sc.root_end == std::string_view::npos &&
        sc.last_element_end != std::string_view::npos) {
        root = try_parse(remove_trailing_commas(payload.substr(0, sc.last_element_end)) + "]");
        if (root)
            out.diagnostics.push_back("dropped truncated tail");
    }
    if (!root || !(root->is_object() || root->is_array())) {
        out.diagnostics.push_back("malformed JSON; nothing recoverable");
        return out;
    }
    std::size_t idx = 0;
    for (const json* e : elements_of(*root)) {
        std::string why;
        bool bbox_missing = false;
        if (auto r = read_element(*e, dialect, dims, why, bbox_missing)) {
            if (bbox_missing)
                out.diagnostics.push_back("element " + std::to_string(idx) + ": no bbox_2d");
            out.records.push_back(std::move(*r));
        } else {
            out.diagnostics.push_back("element " + std::to_string(idx) + ": " + why + ", skipped");
        }
        ++idx;
    }
    return out;
}

} // namespace

ParseOutcome parse_structured(std::string_view output, BoxDialect dialect, ImageDims dims, ParseStrictness strictness)
{
    if (strictness == ParseStrictness::Strict)
        return parse_structured_strict(output, dialect, dims);
    try {
        return parse_structured_salvage(output, dialect, dims);
    } catch (const std::exception& e) {
        ParseOutcome out;
        out.diagnostics.push_back(std::string("salvage failed: ") + e.what());
        return out;
    }
}

ParseOutcome parse_prediction(std::string_view output, InstanceFormat format, BoxDialect dialect, ImageDims dims,
                              ParseStrictness strictness)
{
    if (format == InstanceFormat::Structured)
        return parse_structured(output, dialect, dims, strictness);
    return parse_plain(output, dialect, dims, strictness);
}

} // namespace patimt
