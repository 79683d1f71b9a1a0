#pragma once

#include "patimt/instruct.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace patimt {

/// One parsed unit of model output. Boxes are in absolute pixels.
struct PredictionRecord {
    std::optional<BBox> bbox;
    std::optional<std::string> text;
    std::string translation;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

enum class ParseStrictness { Strict, Salvage };

std::string_view to_string(ParseStrictness s) noexcept;
std::optional<ParseStrictness> parse_strictness(std::string_view s) noexcept;

class PredictionParseError : public Error {
public:
    using Error::Error;
};

struct ParseOutcome {
    std::vector<PredictionRecord> records;
    std::vector<std::string> diagnostics;
};

/// Parse one box in any supported surface form: "Box(...)", "<box>[[..]]</box>",
/// "<|det|>[..]<|/det|>" or a bare "[x1, y1, x2, y2]" list. Tagged forms
/// carry their own space; bare lists are read in `dialect`'s space. Returns
/// the box in absolute pixels, or nullopt when `s` is not a box.
std::optional<BBox> parse_box_text(std::string_view s, BoxDialect dialect, ImageDims dims);

/// Line-oriented "text <|translation|> translation [box]" output. Lines
/// without the separator are skipped with a diagnostic; in strict mode an
/// output with no usable line throws PredictionParseError.
ParseOutcome parse_plain(std::string_view output, BoxDialect dialect, ImageDims dims,
                         ParseStrictness strictness = ParseStrictness::Strict);

/// JSON object or array of objects with bbox_2d / text_content / translation,
/// optionally wrapped in a code fence. Strict mode throws on any
/// malformation. Salvage mode never throws: it repairs trailing commas, drops
/// a truncated tail and skips invalid elements, reporting each step.
ParseOutcome parse_structured(std::string_view output, BoxDialect dialect, ImageDims dims,
                              ParseStrictness strictness = ParseStrictness::Salvage);

ParseOutcome parse_prediction(std::string_view output, InstanceFormat format, BoxDialect dialect, ImageDims dims,
                              ParseStrictness strictness);

} // namespace patimt
