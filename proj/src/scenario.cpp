#include "patimt/scenario.hpp"

#include "patimt/error.hpp"

#include <json.hpp>

#include <cmath>

namespace patimt {

using nlohmann::json;

std::string_view to_string(ScenarioLabel s) noexcept
{
    switch (s) {
    case ScenarioLabel::Ads: return "ads";
    case ScenarioLabel::Book: return "book";
    case ScenarioLabel::Poster: return "poster";
    case ScenarioLabel::Natural: return "natural";
    case ScenarioLabel::Street: return "street";
    case ScenarioLabel::HandWritten: return "hand-written";
    case ScenarioLabel::Infographic: return "infographic";
    case ScenarioLabel::Document: return "document";
    case ScenarioLabel::Chart: return "chart";
    case ScenarioLabel::Table: return "table";
    }
    return "?";
}

std::string_view to_string(EvalCategory c) noexcept
{
    switch (c) {
    case EvalCategory::AdsBookPoster: return "ads&book&poster";
    case EvalCategory::ChartTable: return "chart&table";
    case EvalCategory::Document: return "document";
    case EvalCategory::HandWritten: return "hand-written";
    case EvalCategory::Infographic: return "infographic";
    case EvalCategory::NaturalStreet: return "natural&street";
    }
    return "?";
}

std::string_view to_string(Difficulty d) noexcept { return d == Difficulty::Hard ? "hard" : "easy"; }

std::optional<ScenarioLabel> parse_scenario(std::string_view name) noexcept
{
    for (auto s : kAllScenarios)
        if (to_string(s) == name)
            return s;
    return std::nullopt;
}

std::optional<EvalCategory> parse_eval_category(std::string_view name) noexcept
{
    for (auto c : kAllEvalCategories)
        if (to_string(c) == name)
            return c;
    return std::nullopt;
}

Difficulty difficulty(ScenarioLabel s) noexcept
{
    switch (s) {
    case ScenarioLabel::Document:
    case ScenarioLabel::Infographic:
        return Difficulty::Hard;
    default:
        return Difficulty::Easy;
    }
}

EvalCategory eval_category(ScenarioLabel s) noexcept
{
    switch (s) {
    case ScenarioLabel::Ads:
    case ScenarioLabel::Book:
    case ScenarioLabel::Poster:
        return EvalCategory::AdsBookPoster;
    case ScenarioLabel::Chart:
    case ScenarioLabel::Table:
        return EvalCategory::ChartTable;
    case ScenarioLabel::Natural:
    case ScenarioLabel::Street:
        return EvalCategory::NaturalStreet;
    case ScenarioLabel::Document:
        return EvalCategory::Document;
    case ScenarioLabel::HandWritten:
        return EvalCategory::HandWritten;
    case ScenarioLabel::Infographic:
        return EvalCategory::Infographic;
    }
    return EvalCategory::Document;
}

namespace {

double norm(const Embedding& v)
{
    double s = 0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace

std::vector<EnsembledLabel> ensemble(const LabelBank& bank)
{
    if (bank.entries.empty())
        throw InvalidArgument("empty label bank");
    std::size_t dim = 0;
    std::vector<EnsembledLabel> out;
    out.reserve(bank.entries.size());
    for (const auto& e : bank.entries) {
        if (e.embeddings.empty())
            throw InvalidArgument("label '" + e.label_text + "' has no template embeddings");
        Embedding mean(e.embeddings.front().size(), 0.0);
        if (dim == 0)
            dim = mean.size();
        for (const auto& v : e.embeddings) {
            if (v.size() != dim || dim == 0)
                throw InvalidArgument("label '" + e.label_text + "': inconsistent embedding dimension");
            for (std::size_t i = 0; i < dim; ++i)
                mean[i] += v[i];
        }
        for (double& x : mean)
            x /= static_cast<double>(e.embeddings.size());
        const double n = norm(mean);
        if (!(n > 1e-12))
            throw InvalidArgument("label '" + e.label_text + "': degenerate (zero) mean embedding");
        for (double& x : mean)
            x /= n;
        out.push_back({e.label_text, e.superclass, std::move(mean)});
    }
    return out;
}

ScenarioLabel classify(const Embedding& image_vec, const std::vector<EnsembledLabel>& labels)
{
    if (labels.empty())
        throw InvalidArgument("no labels to classify against");
    const double n = norm(image_vec);
    if (!(n > 0))
        throw InvalidArgument("zero image embedding");
    std::size_t best = 0;
    double best_sim = -2.0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const auto& v = labels[k].vector;
        if (v.size() != image_vec.size())
            throw InvalidArgument("embedding dimension mismatch");
        double dot = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
            dot += v[i] * image_vec[i];
        // label vectors are unit norm
        const double sim = dot / n;
        if (sim > best_sim) {
            best_sim = sim;
            best = k;
        }
    }
    return labels[best].superclass;
}

const LabelConfig& default_label_config()
{
    static const LabelConfig cfg = [] {
        LabelConfig c;
        c.groups = {
            {ScenarioLabel::Ads, {"advertisement"}},
            {ScenarioLabel::Book, {"book cover", "magazine cover", "comic book cover"}},
            {ScenarioLabel::Poster,
             {"movie poster", "podcast poster", "TV show poster", "event poster", "poster", "concert poster",
              "conference poster", "travel poster", "art poster"}},
            {ScenarioLabel::Natural,
             {"natural scene", "landscape", "nature background", "wildlife scene", "Trail sign", "Park map",
              "Info board", "Gate sign", "Stone plaque", "Wood post", "Kiosk sign", "Exhibit panel"}},
            {ScenarioLabel::Street,
             {"street view", "urban scene", "city street", "suburban neighborhood", "rural road", "traffic scene",
              "billboard", "shop front"}},
            {ScenarioLabel::HandWritten, {"hand-written", "handwriting letter"}},
            {ScenarioLabel::Infographic, {"infographic", "diagram", "mind map", "statistical graph"}},
            {ScenarioLabel::Document, {"document", "contract"}},
            {ScenarioLabel::Chart,
             {"chart", "bar chart", "pie chart", "scatter plot", "line chart", "Histogram", "area chart",
              "bubble chart"}},
            {ScenarioLabel::Table, {"table", "spreadsheet", "matrix", "grid"}},
        };
        c.templates = {
            "a photo of a {}.",
            "a blurry photo of a {}.",
            "a black and white photo of a {}.",
            "a low contrast photo of a {}.",
            "a high contrast photo of a {}.",
            "a bad photo of a {}.",
            "a good photo of a {}.",
            "a photo of a small {}.",
            "a photo of a big {}.",
        };
        return c;
    }();
    return cfg;
}

std::string apply_template(std::string_view tmpl, std::string_view label)
{
    std::string out(tmpl);
    const auto pos = out.find("{}");
    if (pos != std::string::npos)
        out.replace(pos, 2, label);
    return out;
}

namespace {

Embedding read_vector(const json& j, std::size_t dim, std::size_t index, const std::string& field)
{
    if (!j.is_array())
        throw ParseError(index, field, "expected an array of numbers");
    Embedding v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number())
            throw ParseError(index, field, "non-numeric component");
        v.push_back(x.get<double>());
    }
    if (v.size() != dim)
        throw ParseError(index, field, "length " + std::to_string(v.size()) + " != dim " + std::to_string(dim));
    return v;
}

} // namespace

EmbeddingFile parse_embedding_file(std::string_view bytes)
{
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(0, "<document>", e.what());
    }
    if (!doc.is_object())
        throw ParseError(0, "<document>", "expected an object");
    if (!doc.contains("dim") || !doc["dim"].is_number_unsigned() || doc["dim"].get<std::size_t>() == 0)
        throw ParseError(0, "dim", "missing or not a positive integer");
    EmbeddingFile f;
    f.dim = doc["dim"].get<std::size_t>();

    if (!doc.contains("labels") || !doc["labels"].is_array())
        throw ParseError(0, "labels", "missing or not an array");
    std::size_t i = 0;
    for (const auto& l : doc["labels"]) {
        if (!l.is_object())
            throw ParseError(i, "labels", "entry is not an object");
        if (!l.contains("text") || !l["text"].is_string())
            throw ParseError(i, "labels.text", "missing or not a string");
        if (!l.contains("superclass") || !l["superclass"].is_string())
            throw ParseError(i, "labels.superclass", "missing or not a string");
        auto sc = parse_scenario(l["superclass"].get<std::string>());
        if (!sc)
            throw ParseError(i, "labels.superclass", "unknown scenario '" + l["superclass"].get<std::string>() + "'");
        if (!l.contains("vectors") || !l["vectors"].is_array() || l["vectors"].empty())
            throw ParseError(i, "labels.vectors", "missing or empty");
        LabelEntry e{l["text"].get<std::string>(), *sc, {}};
        for (const auto& v : l["vectors"])
            e.embeddings.push_back(read_vector(v, f.dim, i, "labels.vectors"));
        f.bank.entries.push_back(std::move(e));
        ++i;
    }

    i = 0;
    if (doc.contains("images")) {
        if (!doc["images"].is_array())
            throw ParseError(0, "images", "not an array");
        for (const auto& im : doc["images"]) {
            if (!im.is_object() || !im.contains("image_id") || !im["image_id"].is_string())
                throw ParseError(i, "images.image_id", "missing or not a string");
            if (!im.contains("vector"))
                throw ParseError(i, "images.vector", "missing");
            f.images.push_back({im["image_id"].get<std::string>(), read_vector(im["vector"], f.dim, i, "images.vector")});
            ++i;
        }
    }
    return f;
}

LabelConfig parse_label_config(std::string_view bytes)
{
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw ParseError(0, "<document>", e.what());
    }
    LabelConfig c;
    if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_array())
        throw ParseError(0, "templates", "missing or not an array");
    for (const auto& t : doc["templates"]) {
        if (!t.is_string() || t.get<std::string>().find("{}") == std::string::npos)
            throw ParseError(0, "templates", "template must be a string containing {}");
        c.templates.push_back(t.get<std::string>());
    }
    if (!doc.contains("classes") || !doc["classes"].is_array())
        throw ParseError(0, "classes", "missing or not an array");
    std::size_t i = 0;
    for (const auto& g : doc["classes"]) {
        if (!g.is_object() || !g.contains("superclass") || !g["superclass"].is_string())
            throw ParseError(i, "classes.superclass", "missing or not a string");
        auto sc = parse_scenario(g["superclass"].get<std::string>());
        if (!sc)
            throw ParseError(i, "classes.superclass", "unknown scenario");
        if (!g.contains("labels") || !g["labels"].is_array() || g["labels"].empty())
            throw ParseError(i, "classes.labels", "missing or empty");
        LabelConfig::Group grp{*sc, {}};
        for (const auto& l : g["labels"]) {
            if (!l.is_string())
                throw ParseError(i, "classes.labels", "label is not a string");
            grp.labels.push_back(l.get<std::string>());
        }
        c.groups.push_back(std::move(grp));
        ++i;
    }
    return c;
}

} // namespace patimt
