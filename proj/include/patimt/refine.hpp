#pragma once

#include "patimt/corpus.hpp"
#include "patimt/spatial_merge.hpp"

#include <optional>
#include <vector>

namespace patimt {

struct RefineParams {
    double coverage_tau = 0.5;
    MergeParams merge;

    void validate() const;
};

/// Indices of lines whose best overlap_ratio against any block (of any kind)
/// is below `tau`.
std::vector<std::size_t> omitted_indices(const std::vector<OcrLine>& lines, const std::vector<LayoutBlock>& blocks,
                                         double tau);

std::vector<OcrLine> find_omitted(const std::vector<OcrLine>& lines, const std::vector<LayoutBlock>& blocks,
                                  double tau);

/// Merge the omitted lines into new text blocks, add them to `blocks` and
/// stable-sort the result by (y_min, x_min). Original blocks are copied
/// unchanged.
std::vector<LayoutBlock> refine_blocks(const std::vector<OcrLine>& lines, const std::vector<LayoutBlock>& blocks,
                                       const RefineParams& p);

class MissingBlocksError : public Error {
public:
    using Error::Error;
};

/// Hard scenarios (document, infographic) refine the supplied layout blocks;
/// every other scenario merges the OCR lines directly.
std::vector<LayoutBlock> adaptive_process(const ImageAnnotation& annotation,
                                          const std::optional<std::vector<LayoutBlock>>& blocks,
                                          const RefineParams& p);

} // namespace patimt
