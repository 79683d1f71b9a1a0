#pragma once

#include "patimt/corpus.hpp"

#include <string>
#include <vector>

namespace patimt {

struct MergeParams {
    double x_ths = 1.0;          // horizontal slack, in mean line heights
    double y_ths = 0.5;          // vertical slack, in mean line heights
    double row_tolerance = 0.5;  // same-row band, in heights of the top box
    std::string joiner = " ";

    void validate() const;
};

/// Per-line working state for the greedy grouping loop.
struct WorkingBox {
    std::string text;
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    double h = 0;        // y_max - y_min
    double y_center = 0; // (y_min + y_max) / 2
    int group = 0;       // 0 = not yet grouped
    CoordSpace space = CoordSpace::Absolute;

    static WorkingBox from_line(const OcrLine& line);
    BBox box() const { return BBox(x_min, y_min, x_max, y_max, space); }
};

struct MergeGroup {
    std::vector<WorkingBox> members; // in reading order
    BBox bbox;
    std::string text;
};

/// Greedy sequential grouping. A group is seeded with the first ungrouped
/// line; its bounding extent is then widened by x_ths * h_mean horizontally
/// and y_ths * h_mean vertically (h_mean over the current members) and the
/// first ungrouped line touching that region joins. When nothing joins, the
/// next group opens. Returns line indices per group, in creation order, each
/// group listing members in assignment order.
std::vector<std::vector<std::size_t>> group_boxes(const std::vector<OcrLine>& lines, const MergeParams& p);

/// Reading-order concatenation of one group: take the topmost remaining box,
/// gather every box whose vertical centre lies within row_tolerance of its
/// height, emit the leftmost of those, repeat.
MergeGroup order_and_merge(std::vector<WorkingBox> group, const MergeParams& p);

/// group_boxes followed by order_and_merge; one text block per group.
std::vector<LayoutBlock> spatial_merge(const std::vector<OcrLine>& lines, const MergeParams& p);

} // namespace patimt
