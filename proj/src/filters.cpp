#include "patimt/filters.hpp"

#include "patimt/text.hpp"

#include <algorithm>

namespace patimt {

std::string_view to_string(FilterReason r) noexcept
{
    switch (r) {
    case FilterReason::EmptyOcr: return "empty-ocr";
    case FilterReason::Repetition: return "repetition";
    case FilterReason::LowCoverage: return "low-coverage";
    }
    return "?";
}

void FilterParams::validate() const
{
    if (repetition_len < 2)
        throw InvalidArgument("repetition_len must be >= 2");
    if (!(coverage_threshold > 0 && coverage_threshold < 1))
        throw InvalidArgument("coverage_threshold must lie in (0,1)");
}

bool detect_repetition(std::string_view s, int k)
{
    if (k < 2)
        throw InvalidArgument("repetition length must be >= 2");
    char32_t prev = 0;
    int run = 0;
    for (char32_t cp : text::decode_utf8(s)) {
        if (text::is_space(cp)) {
            run = 0;
            continue;
        }
        run = (run > 0 && cp == prev) ? run + 1 : 1;
        prev = cp;
        if (run >= k)
            return true;
    }
    return false;
}

FilterVerdict check_image(const std::vector<OcrLine>& lines, ImageDims dims, const FilterParams& p)
{
    p.validate();
    if (!dims.valid())
        throw InvalidArgument("invalid image dimensions");

    FilterVerdict v;
    if (lines.empty()) {
        v.reasons.push_back(FilterReason::EmptyOcr);
    } else {
        for (const auto& l : lines) {
            if (detect_repetition(l.text, p.repetition_len)) {
                v.reasons.push_back(FilterReason::Repetition);
                break;
            }
        }
        // summed in sorted order so the verdict does not depend on line order
        std::vector<double> areas;
        areas.reserve(lines.size());
        for (const auto& l : lines)
            areas.push_back(area(l.bbox));
        std::sort(areas.begin(), areas.end());
        double covered = 0;
        for (double a : areas)
            covered += a;
        const double image_area = static_cast<double>(dims.width) * dims.height;
        if (covered / image_area < p.coverage_threshold)
            v.reasons.push_back(FilterReason::LowCoverage);
    }
    v.keep = v.reasons.empty();
    return v;
}

} // namespace patimt
