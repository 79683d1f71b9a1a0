#pragma once

#include "patimt/corpus.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patimt {

/// Surface syntax and coordinate space a model family uses for boxes.
enum class BoxDialect {
    PlainUnit, // [0.13, 0.09, 0.28, 0.15], unit square, two decimals
    Boxed1000, // <box>[[130, 90, 280, 150]]</box>, integers in [0,1000]
    Det999,    // <|det|>[130, 90, 280, 150]<|/det|>, integers in [0,999]
    Absolute,  // [40, 553, 730, 596], integer pixels
};

enum class InstanceFormat { PlainText, Structured };

enum class TaskKind { Region, FullImage };

std::string_view to_string(BoxDialect d) noexcept;
std::string_view to_string(InstanceFormat f) noexcept;
std::string_view to_string(TaskKind t) noexcept;
std::optional<BoxDialect> parse_box_dialect(std::string_view s) noexcept;
std::optional<InstanceFormat> parse_instance_format(std::string_view s) noexcept;
std::optional<TaskKind> parse_task_kind(std::string_view s) noexcept;

CoordSpace dialect_space(BoxDialect d) noexcept;

/// True for dialects whose native form is a bare coordinate list.
bool dialect_is_bare(BoxDialect d) noexcept;

/// Convert `b` into the dialect's space and print its native surface form.
/// Integer dialects round half away from zero; plain-unit prints exactly two
/// decimals.
std::string render_box(const BBox& b, BoxDialect dialect, ImageDims dims);

/// Box as it appears inside plain-text prompts and answers: bare-list
/// dialects are wrapped as "Box([..])", tagged dialects use their own tags.
std::string box_token(const BBox& b, BoxDialect dialect, ImageDims dims);

struct GoldRegion {
    BBox bbox; // absolute pixels
    std::string text;
    std::string translation;

    friend bool operator==(const GoldRegion&, const GoldRegion&) = default;
};

struct InstructionInstance {
    std::string id;
    std::string image_id;
    TaskKind task = TaskKind::Region;
    std::string question;
    std::string answer;
    std::vector<GoldRegion> gold;

    // context needed to parse and score predictions for this instance
    ImageDims dims;
    std::optional<ScenarioLabel> scenario;
    LangPair lang_pair = LangPair::EnZh;
    BoxDialect dialect = BoxDialect::PlainUnit;
    InstanceFormat format = InstanceFormat::PlainText;

    friend bool operator==(const InstructionInstance&, const InstructionInstance&) = default;
};

/// Question templates. Region templates must contain "{box}"; any template
/// may contain "{lang}" for the target language name.
struct QuestionPool {
    std::vector<std::string> region_questions;
    std::vector<std::string> fullimage_questions;

    void validate() const;
};

const QuestionPool& default_question_pool();
QuestionPool parse_question_pool(std::string_view bytes);

/// Deterministic per-image seed derived from the run seed and the image id.
std::uint64_t image_seed(std::uint64_t run_seed, std::string_view image_id) noexcept;

/// One region instance per translated text block. Blocks without text or
/// translation are skipped and reported through `diag`.
std::vector<InstructionInstance> build_region_instances(const ImageAnnotation& ann, const QuestionPool& pool,
                                                        InstanceFormat fmt, BoxDialect dialect,
                                                        std::uint64_t rng_seed, Diagnostics* diag = nullptr);

/// The single full-image instance. Throws InvalidArgument when the image has
/// no translated text block.
InstructionInstance build_fullimage_instance(const ImageAnnotation& ann, const QuestionPool& pool,
                                             InstanceFormat fmt, BoxDialect dialect, std::uint64_t rng_seed);

/// Region instances followed by the full-image instance (when possible).
std::vector<InstructionInstance> build_instances(const ImageAnnotation& ann, const QuestionPool& pool,
                                                 InstanceFormat fmt, BoxDialect dialect, std::uint64_t rng_seed,
                                                 Diagnostics* diag = nullptr);

std::string serialize_instance(const InstructionInstance& inst);
std::vector<InstructionInstance> parse_instances_file(std::string_view bytes);

} // namespace patimt
