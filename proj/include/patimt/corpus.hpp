#pragma once

#include "patimt/error.hpp"
#include "patimt/geometry.hpp"
#include "patimt/scenario.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patimt {

/// One line-level OCR detection.
struct OcrLine {
    std::string text;
    BBox bbox;
    std::optional<double> confidence;

    friend bool operator==(const OcrLine&, const OcrLine&) = default;
};

enum class BlockKind { Text, Image, Table, Other };

std::string_view to_string(BlockKind k) noexcept;

/// A semantically coherent region of the page.
struct LayoutBlock {
    BlockKind kind = BlockKind::Text;
    BBox bbox;
    std::optional<std::string> text; // present for text blocks
    std::optional<std::string> translation;

    friend bool operator==(const LayoutBlock&, const LayoutBlock&) = default;
};

enum class LangPair { EnZh, ZhEn };

std::string_view to_string(LangPair p) noexcept;
std::optional<LangPair> parse_lang_pair(std::string_view s) noexcept;

/// Name of the target language ("Chinese" or "English").
std::string_view target_language(LangPair p) noexcept;
bool target_is_cjk(LangPair p) noexcept;

/// One record of the lines interchange file. `scenario` and `lang_pair` are
/// optional extension fields filled in by `classify` or by hand.
struct LinesRecord {
    std::string image_id;
    ImageDims dims;
    std::optional<ScenarioLabel> scenario;
    std::optional<LangPair> lang_pair;
    std::vector<OcrLine> lines;

    friend bool operator==(const LinesRecord&, const LinesRecord&) = default;
};

/// One record of the blocks interchange file.
struct BlocksRecord {
    std::string image_id;
    ImageDims dims;
    std::optional<ScenarioLabel> scenario;
    std::optional<LangPair> lang_pair;
    std::vector<LayoutBlock> blocks;

    friend bool operator==(const BlocksRecord&, const BlocksRecord&) = default;
};

/// Full record for one image: raw lines plus processed blocks.
struct ImageAnnotation {
    std::string image_id;
    ImageDims dims;
    std::optional<ScenarioLabel> scenario;
    LangPair lang_pair = LangPair::EnZh;
    std::vector<OcrLine> lines;
    std::vector<LayoutBlock> blocks;
};

struct CorpusStats {
    std::size_t images = 0;
    std::size_t ocr_boxes = 0;
    std::size_t boxes = 0;
    std::size_t src_words = 0;
    std::size_t tgt_words = 0;

    CorpusStats& operator+=(const CorpusStats& o) noexcept;
    friend CorpusStats operator+(CorpusStats a, const CorpusStats& b) noexcept { return a += b; }
    friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

/// Parse a lines interchange file (one JSON record per line, blank lines
/// ignored). Throws ParseError naming the record index and field.
std::vector<LinesRecord> parse_lines_file(std::string_view bytes);

/// Parse a blocks interchange file. Unknown block kinds become
/// BlockKind::Other and are reported through `diag`.
std::vector<BlocksRecord> parse_blocks_file(std::string_view bytes, Diagnostics* diag = nullptr);

/// Canonical serialization: fixed key order, integral coordinates printed as
/// integers, one record per line with a trailing newline.
std::string serialize_lines_record(const LinesRecord& r);
std::string serialize_blocks_record(const BlocksRecord& r);
std::string serialize_lines_file(const std::vector<LinesRecord>& records);
std::string serialize_blocks_file(const std::vector<BlocksRecord>& records);

CorpusStats corpus_stats(const std::vector<ImageAnnotation>& corpus, Diagnostics* diag = nullptr);

/// Join lines and blocks records by image id, in the order of `lines`
/// followed by block-only images.
std::vector<ImageAnnotation> join_annotations(const std::vector<LinesRecord>& lines,
                                              const std::vector<BlocksRecord>& blocks);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

} // namespace patimt
