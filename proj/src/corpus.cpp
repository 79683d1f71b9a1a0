#include "patimt/corpus.hpp"

#include "patimt/text.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace patimt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(BlockKind k) noexcept
{
    switch (k) {
    case BlockKind::Text: return "text";
    case BlockKind::Image: return "image";
    case BlockKind::Table: return "table";
    case BlockKind::Other: return "other";
    }
    return "other";
}

std::string_view to_string(LangPair p) noexcept { return p == LangPair::EnZh ? "EN-ZH" : "ZH-EN"; }

std::optional<LangPair> parse_lang_pair(std::string_view s) noexcept
{
    if (s == "EN-ZH" || s == "en-zh")
        return LangPair::EnZh;
    if (s == "ZH-EN" || s == "zh-en")
        return LangPair::ZhEn;
    return std::nullopt;
}

std::string_view target_language(LangPair p) noexcept { return p == LangPair::EnZh ? "Chinese" : "English"; }

bool target_is_cjk(LangPair p) noexcept { return p == LangPair::EnZh; }

CorpusStats& CorpusStats::operator+=(const CorpusStats& o) noexcept
{
    images += o.images;
    ocr_boxes += o.ocr_boxes;
    boxes += o.boxes;
    src_words += o.src_words;
    tgt_words += o.tgt_words;
    return *this;
}

namespace {

// Splits on '\n', skipping whitespace-only lines.
std::vector<std::string_view> split_records(std::string_view bytes)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos <= bytes.size()) {
        auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = bytes.size();
        auto line = bytes.substr(pos, nl - pos);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos)
            out.push_back(line);
        pos = nl + 1;
    }
    return out;
}

json parse_record(std::string_view line, std::size_t index)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(index, "<record>", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ParseError(index, "<record>", "record is not an object");
    return j;
}

const json& require(const json& obj, const char* key, std::size_t index)
{
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(index, key, "missing");
    return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t index)
{
    const auto& v = require(obj, key, index);
    if (!v.is_string())
        throw ParseError(index, key, "expected a string");
    return v.get<std::string>();
}

int require_dimension(const json& obj, const char* key, std::size_t index)
{
    const auto& v = require(obj, key, index);
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1'000'000'000)
        throw ParseError(index, key, "expected a positive integer");
    return static_cast<int>(v.get<long long>());
}

BBox read_bbox(const json& obj, std::size_t index)
{
    const auto& v = require(obj, "bbox", index);
    if (!v.is_array() || v.size() != 4)
        throw ParseError(index, "bbox", "expected [x1, y1, x2, y2]");
    double c[4];
    for (int i = 0; i < 4; ++i) {
        if (!v[i].is_number())
            throw ParseError(index, "bbox", "non-numeric coordinate");
        c[i] = v[i].get<double>();
    }
    try {
        return BBox(c[0], c[1], c[2], c[3], CoordSpace::Absolute);
    } catch (const Error& e) {
        throw ParseError(index, "bbox", e.what());
    }
}

struct Header {
    std::string image_id;
    ImageDims dims;
    std::optional<ScenarioLabel> scenario;
    std::optional<LangPair> lang_pair;
};

Header read_header(const json& j, std::size_t index, std::unordered_set<std::string>& seen)
{
    Header h;
    h.image_id = require_string(j, "image_id", index);
    if (!seen.insert(h.image_id).second)
        throw ParseError(index, "image_id", "duplicate image id '" + h.image_id + "'");
    h.dims.width = require_dimension(j, "width", index);
    h.dims.height = require_dimension(j, "height", index);
    if (auto it = j.find("scenario"); it != j.end() && !it->is_null()) {
        if (!it->is_string() || !parse_scenario(it->get<std::string>()))
            throw ParseError(index, "scenario", "unknown scenario label");
        h.scenario = parse_scenario(it->get<std::string>());
    }
    if (auto it = j.find("lang_pair"); it != j.end() && !it->is_null()) {
        if (!it->is_string() || !parse_lang_pair(it->get<std::string>()))
            throw ParseError(index, "lang_pair", "expected EN-ZH or ZH-EN");
        h.lang_pair = parse_lang_pair(it->get<std::string>());
    }
    return h;
}

ordered_json number(double v)
{
    if (std::floor(v) == v && std::fabs(v) < 1e15)
        return static_cast<long long>(v);
    return v;
}

ordered_json bbox_json(const BBox& b)
{
    return ordered_json::array({number(b.x1()), number(b.y1()), number(b.x2()), number(b.y2())});
}

ordered_json header_json(const std::string& id, ImageDims dims, const std::optional<ScenarioLabel>& scenario,
                         const std::optional<LangPair>& lang_pair)
{
    ordered_json j;
    j["image_id"] = id;
    j["width"] = dims.width;
    j["height"] = dims.height;
    if (scenario)
        j["scenario"] = std::string(to_string(*scenario));
    if (lang_pair)
        j["lang_pair"] = std::string(to_string(*lang_pair));
    return j;
}

std::string dump(const ordered_json& j)
{
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

} // namespace

std::vector<LinesRecord> parse_lines_file(std::string_view bytes)
{
    std::vector<LinesRecord> out;
    std::unordered_set<std::string> seen;
    std::size_t index = 0;
    for (auto line : split_records(bytes)) {
        const json j = parse_record(line, index);
        Header h = read_header(j, index, seen);
        LinesRecord r{std::move(h.image_id), h.dims, h.scenario, h.lang_pair, {}};
        const auto& lines = require(j, "lines", index);
        if (!lines.is_array())
            throw ParseError(index, "lines", "expected an array");
        for (const auto& l : lines) {
            if (!l.is_object())
                throw ParseError(index, "lines", "line entry is not an object");
            OcrLine ol;
            ol.text = require_string(l, "text", index);
            if (text::trim(ol.text).empty())
                throw ParseError(index, "text", "empty line text");
            ol.bbox = read_bbox(l, index);
            if (auto it = l.find("confidence"); it != l.end() && !it->is_null()) {
                if (!it->is_number() || it->get<double>() < 0 || it->get<double>() > 1)
                    throw ParseError(index, "confidence", "expected a number in [0,1]");
                ol.confidence = it->get<double>();
            }
            r.lines.push_back(std::move(ol));
        }
        out.push_back(std::move(r));
        ++index;
    }
    return out;
}

std::vector<BlocksRecord> parse_blocks_file(std::string_view bytes, Diagnostics* diag)
{
    std::vector<BlocksRecord> out;
    std::unordered_set<std::string> seen;
    std::size_t index = 0;
    for (auto line : split_records(bytes)) {
        const json j = parse_record(line, index);
        Header h = read_header(j, index, seen);
        BlocksRecord r{std::move(h.image_id), h.dims, h.scenario, h.lang_pair, {}};
        const auto& blocks = require(j, "blocks", index);
        if (!blocks.is_array())
            throw ParseError(index, "blocks", "expected an array");
        for (const auto& b : blocks) {
            if (!b.is_object())
                throw ParseError(index, "blocks", "block entry is not an object");
            LayoutBlock lb;
            const std::string kind = require_string(b, "kind", index);
            if (kind == "text")
                lb.kind = BlockKind::Text;
            else if (kind == "image")
                lb.kind = BlockKind::Image;
            else if (kind == "table")
                lb.kind = BlockKind::Table;
            else {
                lb.kind = BlockKind::Other;
                if (kind != "other" && diag)
                    diag->warn("record " + std::to_string(index) + ": unknown block kind '" + kind + "' mapped to other");
            }
            lb.bbox = read_bbox(b, index);
            if (auto it = b.find("text"); it != b.end() && !it->is_null()) {
                if (!it->is_string())
                    throw ParseError(index, "text", "expected a string");
                lb.text = it->get<std::string>();
            }
            if (auto it = b.find("translation"); it != b.end() && !it->is_null()) {
                if (!it->is_string())
                    throw ParseError(index, "translation", "expected a string");
                lb.translation = it->get<std::string>();
            }
            if (lb.kind == BlockKind::Text && !lb.text)
                throw ParseError(index, "text", "text block without text");
            r.blocks.push_back(std::move(lb));
        }
        out.push_back(std::move(r));
        ++index;
    }
    return out;
}

std::string serialize_lines_record(const LinesRecord& r)
{
    ordered_json j = header_json(r.image_id, r.dims, r.scenario, r.lang_pair);
    ordered_json lines = ordered_json::array();
    for (const auto& l : r.lines) {
        ordered_json o;
        o["text"] = l.text;
        o["bbox"] = bbox_json(l.bbox);
        if (l.confidence)
            o["confidence"] = *l.confidence;
        lines.push_back(std::move(o));
    }
    j["lines"] = std::move(lines);
    return dump(j);
}

std::string serialize_blocks_record(const BlocksRecord& r)
{
    ordered_json j = header_json(r.image_id, r.dims, r.scenario, r.lang_pair);
    ordered_json blocks = ordered_json::array();
    for (const auto& b : r.blocks) {
        ordered_json o;
        o["kind"] = std::string(to_string(b.kind));
        o["bbox"] = bbox_json(b.bbox);
        if (b.text)
            o["text"] = *b.text;
        if (b.translation)
            o["translation"] = *b.translation;
        blocks.push_back(std::move(o));
    }
    j["blocks"] = std::move(blocks);
    return dump(j);
}

std::string serialize_lines_file(const std::vector<LinesRecord>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += serialize_lines_record(r);
        out += '\n';
    }
    return out;
}

std::string serialize_blocks_file(const std::vector<BlocksRecord>& records)
{
    std::string out;
    for (const auto& r : records) {
        out += serialize_blocks_record(r);
        out += '\n';
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<ImageAnnotation>& corpus, Diagnostics* diag)
{
    CorpusStats s;
    for (const auto& a : corpus) {
        ++s.images;
        s.ocr_boxes += a.lines.size();
        for (const auto& b : a.blocks) {
            if (b.kind != BlockKind::Text)
                continue;
            ++s.boxes;
            if (b.text)
                s.src_words += text::count_words(*b.text);
            if (b.translation)
                s.tgt_words += text::count_words(*b.translation);
            else if (diag)
                diag->warn("image '" + a.image_id + "': text block without translation");
        }
    }
    return s;
}

std::vector<ImageAnnotation> join_annotations(const std::vector<LinesRecord>& lines,
                                              const std::vector<BlocksRecord>& blocks)
{
    std::vector<ImageAnnotation> out;
    std::unordered_map<std::string, std::size_t> pos;
    for (const auto& r : lines) {
        pos[r.image_id] = out.size();
        out.push_back({r.image_id, r.dims, r.scenario, r.lang_pair.value_or(LangPair::EnZh), r.lines, {}});
    }
    for (const auto& r : blocks) {
        auto it = pos.find(r.image_id);
        if (it == pos.end()) {
            pos[r.image_id] = out.size();
            out.push_back({r.image_id, r.dims, r.scenario, r.lang_pair.value_or(LangPair::EnZh), {}, r.blocks});
            continue;
        }
        auto& a = out[it->second];
        a.blocks = r.blocks;
        if (!a.scenario)
            a.scenario = r.scenario;
        if (r.lang_pair)
            a.lang_pair = *r.lang_pair;
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("write to '" + path + "' failed");
}

} // namespace patimt
