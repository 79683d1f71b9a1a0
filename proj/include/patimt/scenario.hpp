#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patimt {

/// The ten image scenarios produced by categorization.
enum class ScenarioLabel {
    Ads,
    Book,
    Poster,
    Natural,
    Street,
    HandWritten,
    Infographic,
    Document,
    Chart,
    Table,
};

inline constexpr std::array<ScenarioLabel, 10> kAllScenarios = {
    ScenarioLabel::Ads,     ScenarioLabel::Book,        ScenarioLabel::Poster,   ScenarioLabel::Natural,
    ScenarioLabel::Street,  ScenarioLabel::HandWritten, ScenarioLabel::Infographic, ScenarioLabel::Document,
    ScenarioLabel::Chart,   ScenarioLabel::Table,
};

/// The six categories used when reporting evaluation results.
enum class EvalCategory {
    AdsBookPoster,
    ChartTable,
    Document,
    HandWritten,
    Infographic,
    NaturalStreet,
};

inline constexpr std::array<EvalCategory, 6> kAllEvalCategories = {
    EvalCategory::AdsBookPoster, EvalCategory::ChartTable,  EvalCategory::Document,
    EvalCategory::HandWritten,   EvalCategory::Infographic, EvalCategory::NaturalStreet,
};

enum class Difficulty { Easy, Hard };

std::string_view to_string(ScenarioLabel s) noexcept;
std::string_view to_string(EvalCategory c) noexcept;
std::string_view to_string(Difficulty d) noexcept;
std::optional<ScenarioLabel> parse_scenario(std::string_view name) noexcept;
std::optional<EvalCategory> parse_eval_category(std::string_view name) noexcept;

Difficulty difficulty(ScenarioLabel s) noexcept;
EvalCategory eval_category(ScenarioLabel s) noexcept;

using Embedding = std::vector<double>;

struct LabelEntry {
    std::string label_text;
    ScenarioLabel superclass;
    std::vector<Embedding> embeddings; // one per prompt template
};

struct LabelBank {
    std::vector<LabelEntry> entries;
};

struct EnsembledLabel {
    std::string label_text;
    ScenarioLabel superclass;
    Embedding vector; // unit norm
};

/// Mean of each label's template embeddings, renormalized to unit length.
/// Throws InvalidArgument on an empty bank, inconsistent dimensions or a
/// label whose mean vector is zero.
std::vector<EnsembledLabel> ensemble(const LabelBank& bank);

/// Superclass of the label with the highest cosine similarity. Ties go to the
/// earlier label.
ScenarioLabel classify(const Embedding& image_vec, const std::vector<EnsembledLabel>& labels);

/// Label texts per superclass and the prompt templates used to embed them.
struct LabelConfig {
    struct Group {
        ScenarioLabel superclass;
        std::vector<std::string> labels;
    };
    std::vector<Group> groups;
    std::vector<std::string> templates; // each contains "{}"
};

const LabelConfig& default_label_config();

/// Expand a template, replacing "{}" with the label text.
std::string apply_template(std::string_view tmpl, std::string_view label);

/// Parsed embedding interchange document.
struct EmbeddingFile {
    std::size_t dim = 0;
    LabelBank bank;
    struct Image {
        std::string image_id;
        Embedding vector;
    };
    std::vector<Image> images;
};

EmbeddingFile parse_embedding_file(std::string_view bytes);
LabelConfig parse_label_config(std::string_view bytes);

} // namespace patimt
