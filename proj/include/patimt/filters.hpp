#pragma once

#include "patimt/corpus.hpp"

#include <string_view>
#include <vector>

namespace patimt {

enum class FilterReason { EmptyOcr, Repetition, LowCoverage };

std::string_view to_string(FilterReason r) noexcept;

struct FilterVerdict {
    bool keep = true;
    std::vector<FilterReason> reasons; // empty iff keep
};

struct FilterParams {
    int repetition_len = 3;
    double coverage_threshold = 0.03;

    void validate() const;
};

/// True iff some non-whitespace character repeats at least `k` times in a row.
bool detect_repetition(std::string_view text, int k);

/// Applies the three exclusion rules: no OCR lines, a repeated-character run
/// in any line, or total line-box area below `coverage_threshold` of the
/// image area.
FilterVerdict check_image(const std::vector<OcrLine>& lines, ImageDims dims, const FilterParams& p);

} // namespace patimt
