#include "patimt/instruct.hpp"

#include "patimt/text.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <random>

namespace patimt {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(BoxDialect d) noexcept
{
    switch (d) {
    case BoxDialect::PlainUnit: return "plain-unit";
    case BoxDialect::Boxed1000: return "boxed-1000";
    case BoxDialect::Det999: return "det-999";
    case BoxDialect::Absolute: return "absolute";
    }
    return "?";
}

std::string_view to_string(InstanceFormat f) noexcept
{
    return f == InstanceFormat::PlainText ? "plain-text" : "structured";
}

std::string_view to_string(TaskKind t) noexcept { return t == TaskKind::Region ? "region" : "full-image"; }

std::optional<BoxDialect> parse_box_dialect(std::string_view s) noexcept
{
    for (auto d : {BoxDialect::PlainUnit, BoxDialect::Boxed1000, BoxDialect::Det999, BoxDialect::Absolute})
        if (to_string(d) == s)
            return d;
    return std::nullopt;
}

std::optional<InstanceFormat> parse_instance_format(std::string_view s) noexcept
{
    if (s == "plain-text")
        return InstanceFormat::PlainText;
    if (s == "structured")
        return InstanceFormat::Structured;
    return std::nullopt;
}

std::optional<TaskKind> parse_task_kind(std::string_view s) noexcept
{
    if (s == "region")
        return TaskKind::Region;
    if (s == "full-image")
        return TaskKind::FullImage;
    return std::nullopt;
}

CoordSpace dialect_space(BoxDialect d) noexcept
{
    switch (d) {
    case BoxDialect::PlainUnit: return CoordSpace::Unit;
    case BoxDialect::Boxed1000: return CoordSpace::Norm1000;
    case BoxDialect::Det999: return CoordSpace::Norm999;
    case BoxDialect::Absolute: return CoordSpace::Absolute;
    }
    return CoordSpace::Absolute;
}

bool dialect_is_bare(BoxDialect d) noexcept { return d == BoxDialect::PlainUnit || d == BoxDialect::Absolute; }

namespace {

std::string coord_list(const BBox& b, BoxDialect dialect)
{
    const double v[4] = {b.x1(), b.y1(), b.x2(), b.y2()};
    std::string out = "[";
    char buf[64];
    for (int i = 0; i < 4; ++i) {
        if (dialect == BoxDialect::PlainUnit) {
            // std::round rounds half away from zero
            double r = std::round(v[i] * 100.0) / 100.0;
            if (r == 0)
                r = 0; // no "-0.00"
            std::snprintf(buf, sizeof buf, "%.2f", r);
        } else {
            std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(v[i])));
        }
        if (i > 0)
            out += ", ";
        out += buf;
    }
    out += "]";
    return out;
}

std::string box_placeholder(BoxDialect d, bool structured)
{
    switch (d) {
    case BoxDialect::Boxed1000: return "<box>[[x1, y1, x2, y2]]</box>";
    case BoxDialect::Det999: return "<|det|>[x1, y1, x2, y2]<|/det|>";
    default: return structured ? "[x1, y1, x2, y2]" : "Box([x1, y1, x2, y2])";
    }
}

std::string format_instruction(TaskKind task, InstanceFormat fmt, BoxDialect d)
{
    if (fmt == InstanceFormat::PlainText) {
        if (task == TaskKind::Region)
            return "Output only the recognized text content and translation result in format: text <|translation|> "
                   "translation.";
        return "Return the recognized text content, translation result and boxes in format: text <|translation|> "
               "translation " +
               box_placeholder(d, false) + ".";
    }
    const std::string obj =
        "{\"bbox_2d\": " + box_placeholder(d, true) + ", \"text_content\": xxx, \"translation\": xxx}";
    if (task == TaskKind::Region)
        return "Output result in the following JSON format (note xxx is placeholder for text, x1,y1,x2,y2 are "
               "placeholders for coordinate)." +
               obj;
    return "Output result in the following JSON format (note xxx is placeholder for text, x1,y1,x2,y2 are "
           "placeholders for coordinate, ... means there may be more contents in the image).[" +
           obj + ",...].";
}

void replace_all(std::string& s, std::string_view from, std::string_view to)
{
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
}

std::string single_line(std::string s)
{
    for (char& c : s)
        if (c == '\n' || c == '\r')
            c = ' ';
    return text::trim(s);
}

std::string json_string(const std::string& s)
{
    return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string structured_object(const GoldRegion& g, BoxDialect d, ImageDims dims)
{
    const std::string box = dialect_is_bare(d) ? render_box(g.bbox, d, dims) : json_string(render_box(g.bbox, d, dims));
    return "{\"bbox_2d\": " + box + ", \"text_content\": " + json_string(g.text) +
           ", \"translation\": " + json_string(g.translation) + "}";
}

std::string plain_line(const GoldRegion& g)
{
    return g.text + " <|translation|> " + g.translation;
}

std::vector<GoldRegion> translated_regions(const ImageAnnotation& ann, Diagnostics* diag)
{
    std::vector<GoldRegion> out;
    for (std::size_t i = 0; i < ann.blocks.size(); ++i) {
        const auto& b = ann.blocks[i];
        if (b.kind != BlockKind::Text)
            continue;
        const std::string t = b.text ? single_line(*b.text) : std::string();
        const std::string tr = b.translation ? single_line(*b.translation) : std::string();
        if (t.empty() || tr.empty()) {
            if (diag)
                diag->warn("image '" + ann.image_id + "' block " + std::to_string(i) +
                           ": missing text or translation, skipped");
            continue;
        }
        out.push_back({convert(b.bbox, CoordSpace::Absolute, ann.dims), t, tr});
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string pick(const std::vector<std::string>& pool, std::mt19937_64& rng)
{
    return pool[rng() % pool.size()];
}

std::string fill_question(std::string tmpl, const std::string& box, LangPair lp)
{
    replace_all(tmpl, "{box}", box);
    replace_all(tmpl, "{lang}", target_language(lp));
    return tmpl;
}

InstructionInstance make_instance(const ImageAnnotation& ann, TaskKind task, InstanceFormat fmt, BoxDialect d)
{
    InstructionInstance inst;
    inst.image_id = ann.image_id;
    inst.task = task;
    inst.dims = ann.dims;
    inst.scenario = ann.scenario;
    inst.lang_pair = ann.lang_pair;
    inst.dialect = d;
    inst.format = fmt;
    return inst;
}

} // namespace

std::string render_box(const BBox& b, BoxDialect dialect, ImageDims dims)
{
    const BBox c = convert(b, dialect_space(dialect), dims);
    const std::string list = coord_list(c, dialect);
    switch (dialect) {
    case BoxDialect::Boxed1000: return "<box>[" + list + "]</box>";
    case BoxDialect::Det999: return "<|det|>" + list + "<|/det|>";
    default: return list;
    }
}

std::string box_token(const BBox& b, BoxDialect dialect, ImageDims dims)
{
    if (dialect_is_bare(dialect))
        return "Box(" + render_box(b, dialect, dims) + ")";
    return render_box(b, dialect, dims);
}

void QuestionPool::validate() const
{
    if (region_questions.empty() || fullimage_questions.empty())
        throw InvalidArgument("question pool must have region and full-image questions");
    for (const auto& q : region_questions)
        if (q.find("{box}") == std::string::npos)
            throw InvalidArgument("region question without {box} placeholder: " + q);
}

const QuestionPool& default_question_pool()
{
    static const QuestionPool pool{
        {
            "First pinpoint the words in {box}, then express them in {lang}.",
            "First read the snippet at {box}, then provide its {lang} version.",
            "Read the text inside {box} and translate it into {lang}.",
            "What does the text located at {box} say? Give its {lang} translation.",
            "Translate the content of the region {box} into {lang}.",
            "Recognize the words within {box} and render them in {lang}.",
        },
        {
            "Extract all visible text and offer its {lang} meaning.",
            "Can you do text detection and translation into {lang}?",
            "Find every piece of text in the image, locate it, and translate it into {lang}.",
            "Detect all text regions and translate each of them into {lang}.",
        },
    };
    return pool;
}

QuestionPool parse_question_pool(std::string_view bytes)
{
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(0, "<document>", e.what());
    }
    QuestionPool pool;
    for (const char* key : {"region_questions", "fullimage_questions"}) {
        if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array())
            throw ParseError(0, key, "missing or not an array");
        auto& dst = std::string_view(key) == "region_questions" ? pool.region_questions : pool.fullimage_questions;
        for (const auto& q : doc[key]) {
            if (!q.is_string())
                throw ParseError(0, key, "question is not a string");
            dst.push_back(q.get<std::string>());
        }
    }
    pool.validate();
    return pool;
}

std::uint64_t image_seed(std::uint64_t run_seed, std::string_view image_id) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : image_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(run_seed ^ splitmix64(h));
}

std::vector<InstructionInstance> build_region_instances(const ImageAnnotation& ann, const QuestionPool& pool,
                                                        InstanceFormat fmt, BoxDialect dialect,
                                                        std::uint64_t rng_seed, Diagnostics* diag)
{
    pool.validate();
    std::mt19937_64 rng(image_seed(rng_seed, ann.image_id));
    std::vector<InstructionInstance> out;
    for (auto& g : translated_regions(ann, diag)) {
        auto inst = make_instance(ann, TaskKind::Region, fmt, dialect);
        inst.id = ann.image_id + "#r" + std::to_string(out.size());
        inst.question = fill_question(pick(pool.region_questions, rng), box_token(g.bbox, dialect, ann.dims),
                                      ann.lang_pair) +
                        " " + format_instruction(TaskKind::Region, fmt, dialect);
        inst.answer = fmt == InstanceFormat::PlainText ? plain_line(g) : structured_object(g, dialect, ann.dims);
        inst.gold.push_back(std::move(g));
        out.push_back(std::move(inst));
    }
    return out;
}

InstructionInstance build_fullimage_instance(const ImageAnnotation& ann, const QuestionPool& pool,
                                             InstanceFormat fmt, BoxDialect dialect, std::uint64_t rng_seed)
{
    pool.validate();
    auto regions = translated_regions(ann, nullptr);
    if (regions.empty())
        throw InvalidArgument("image '" + ann.image_id + "' has no translated text blocks");
    // separate stream from the region questions
    std::mt19937_64 rng(splitmix64(image_seed(rng_seed, ann.image_id) + 1));
    auto inst = make_instance(ann, TaskKind::FullImage, fmt, dialect);
    inst.id = ann.image_id + "#full";
    inst.question = fill_question(pick(pool.fullimage_questions, rng), "", ann.lang_pair) + " " +
                    format_instruction(TaskKind::FullImage, fmt, dialect);
    std::string answer;
    if (fmt == InstanceFormat::PlainText) {
        for (std::size_t i = 0; i < regions.size(); ++i) {
            if (i > 0)
                answer += '\n';
            answer += plain_line(regions[i]) + " " + box_token(regions[i].bbox, dialect, ann.dims);
        }
    } else {
        answer = "[";
        for (std::size_t i = 0; i < regions.size(); ++i) {
            if (i > 0)
                answer += ", ";
            answer += structured_object(regions[i], dialect, ann.dims);
        }
        answer += "]";
    }
    inst.answer = std::move(answer);
    inst.gold = std::move(regions);
    return inst;
}

std::vector<InstructionInstance> build_instances(const ImageAnnotation& ann, const QuestionPool& pool,
                                                 InstanceFormat fmt, BoxDialect dialect, std::uint64_t rng_seed,
                                                 Diagnostics* diag)
{
    auto out = build_region_instances(ann, pool, fmt, dialect, rng_seed, diag);
    if (!out.empty())
        out.push_back(build_fullimage_instance(ann, pool, fmt, dialect, rng_seed));
    return out;
}

namespace {

ordered_json coord_json(double v)
{
    if (std::floor(v) == v && std::fabs(v) < 1e15)
        return static_cast<long long>(v);
    return v;
}

} // namespace

std::string serialize_instance(const InstructionInstance& inst)
{
    ordered_json j;
    j["image_id"] = inst.image_id;
    j["task"] = std::string(to_string(inst.task));
    j["question"] = inst.question;
    j["answer"] = inst.answer;
    ordered_json gold = ordered_json::array();
    for (const auto& g : inst.gold) {
        ordered_json o;
        o["bbox"] = ordered_json::array(
            {coord_json(g.bbox.x1()), coord_json(g.bbox.y1()), coord_json(g.bbox.x2()), coord_json(g.bbox.y2())});
        o["text"] = g.text;
        o["translation"] = g.translation;
        gold.push_back(std::move(o));
    }
    j["gold"] = std::move(gold);
    j["id"] = inst.id;
    j["width"] = inst.dims.width;
    j["height"] = inst.dims.height;
    if (inst.scenario)
        j["scenario"] = std::string(to_string(*inst.scenario));
    j["lang_pair"] = std::string(to_string(inst.lang_pair));
    j["dialect"] = std::string(to_string(inst.dialect));
    j["format"] = std::string(to_string(inst.format));
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::vector<InstructionInstance> parse_instances_file(std::string_view bytes)
{
    std::vector<InstructionInstance> out;
    std::size_t index = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        auto nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos)
            nl = bytes.size();
        const auto line = bytes.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(index, "<record>", std::string("malformed JSON: ") + e.what());
        }
        auto str = [&](const char* key) -> std::string {
            if (!j.is_object() || !j.contains(key) || !j[key].is_string())
                throw ParseError(index, key, "missing or not a string");
            return j[key].get<std::string>();
        };
        auto integer = [&](const char* key) -> int {
            if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long long>() < 1)
                throw ParseError(index, key, "missing or not a positive integer");
            return static_cast<int>(j[key].get<long long>());
        };
        InstructionInstance inst;
        inst.image_id = str("image_id");
        auto task = parse_task_kind(str("task"));
        if (!task)
            throw ParseError(index, "task", "expected region or full-image");
        inst.task = *task;
        inst.question = str("question");
        inst.answer = str("answer");
        inst.id = j.contains("id") ? str("id") : inst.image_id + "#" + std::to_string(index);
        inst.dims = {integer("width"), integer("height")};
        if (j.contains("scenario")) {
            inst.scenario = parse_scenario(str("scenario"));
            if (!inst.scenario)
                throw ParseError(index, "scenario", "unknown scenario label");
        }
        if (j.contains("lang_pair")) {
            auto lp = parse_lang_pair(str("lang_pair"));
            if (!lp)
                throw ParseError(index, "lang_pair", "expected EN-ZH or ZH-EN");
            inst.lang_pair = *lp;
        }
        if (j.contains("dialect")) {
            auto d = parse_box_dialect(str("dialect"));
            if (!d)
                throw ParseError(index, "dialect", "unknown box dialect");
            inst.dialect = *d;
        }
        if (j.contains("format")) {
            auto f = parse_instance_format(str("format"));
            if (!f)
                throw ParseError(index, "format", "unknown instance format");
            inst.format = *f;
        }
        if (!j.contains("gold") || !j["gold"].is_array())
            throw ParseError(index, "gold", "missing or not an array");
        for (const auto& g : j["gold"]) {
            if (!g.is_object() || !g.contains("bbox") || !g["bbox"].is_array() || g["bbox"].size() != 4)
                throw ParseError(index, "gold.bbox", "expected [x1, y1, x2, y2]");
            double c[4];
            for (int k = 0; k < 4; ++k) {
                if (!g["bbox"][k].is_number())
                    throw ParseError(index, "gold.bbox", "non-numeric coordinate");
                c[k] = g["bbox"][k].get<double>();
            }
            if (!g.contains("text") || !g["text"].is_string() || !g.contains("translation") ||
                !g["translation"].is_string())
                throw ParseError(index, "gold", "text and translation must be strings");
            inst.gold.push_back({BBox(c[0], c[1], c[2], c[3]), g["text"].get<std::string>(),
                                 g["translation"].get<std::string>()});
        }
        if (inst.task == TaskKind::Region && inst.gold.size() != 1)
            throw ParseError(index, "gold", "region instance must have exactly one gold region");
        out.push_back(std::move(inst));
        ++index;
    }
    return out;
}

} // namespace patimt
