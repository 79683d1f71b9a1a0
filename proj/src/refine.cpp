#include "patimt/refine.hpp"

#include <algorithm>
#include <cmath>

namespace patimt {

void RefineParams::validate() const
{
    if (!(coverage_tau > 0 && coverage_tau <= 1))
        throw InvalidArgument("coverage_tau must lie in (0,1]");
    merge.validate();
}

std::vector<std::size_t> omitted_indices(const std::vector<OcrLine>& lines, const std::vector<LayoutBlock>& blocks,
                                         double tau)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        double best = 0;
        for (const auto& b : blocks)
            best = std::max(best, overlap_ratio(lines[i].bbox, b.bbox));
        if (best < tau)
            out.push_back(i);
    }
    return out;
}

std::vector<OcrLine> find_omitted(const std::vector<OcrLine>& lines, const std::vector<LayoutBlock>& blocks,
                                  double tau)
{
    std::vector<OcrLine> out;
    for (auto i : omitted_indices(lines, blocks, tau))
        out.push_back(lines[i]);
    return out;
}

std::vector<LayoutBlock> refine_blocks(const std::vector<OcrLine>& lines, const std::vector<LayoutBlock>& blocks,
                                       const RefineParams& p)
{
    p.validate();
    std::vector<LayoutBlock> out = blocks;
    const auto recovered = spatial_merge(find_omitted(lines, blocks, p.coverage_tau), p.merge);
    out.insert(out.end(), recovered.begin(), recovered.end());
    std::stable_sort(out.begin(), out.end(), [](const LayoutBlock& a, const LayoutBlock& b) {
        if (a.bbox.y1() != b.bbox.y1())
            return a.bbox.y1() < b.bbox.y1();
        return a.bbox.x1() < b.bbox.x1();
    });
    return out;
}

std::vector<LayoutBlock> adaptive_process(const ImageAnnotation& annotation,
                                          const std::optional<std::vector<LayoutBlock>>& blocks,
                                          const RefineParams& p)
{
    if (!annotation.scenario)
        throw InvalidArgument("image '" + annotation.image_id + "' has no scenario label");
    if (difficulty(*annotation.scenario) == Difficulty::Hard) {
        if (!blocks)
            throw MissingBlocksError("image '" + annotation.image_id + "' is a hard scenario (" +
                                     std::string(to_string(*annotation.scenario)) + ") but no layout blocks were given");
        return refine_blocks(annotation.lines, *blocks, p);
    }
    p.validate();
    return spatial_merge(annotation.lines, p.merge);
}

} // namespace patimt
