#include "patimt/spatial_merge.hpp"

#include "patimt/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace patimt {

void MergeParams::validate() const
{
    auto ok = [](double v) { return std::isfinite(v) && v >= 0; };
    if (!ok(x_ths) || !ok(y_ths) || !ok(row_tolerance))
        throw InvalidArgument("merge thresholds must be finite and non-negative");
}

WorkingBox WorkingBox::from_line(const OcrLine& line)
{
    WorkingBox w;
    w.text = line.text;
    w.x_min = line.bbox.x1();
    w.x_max = line.bbox.x2();
    w.y_min = line.bbox.y1();
    w.y_max = line.bbox.y2();
    w.h = w.y_max - w.y_min;
    w.y_center = (w.y_min + w.y_max) / 2;
    w.space = line.bbox.space();
    return w;
}

namespace {

struct GroupExtent {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    double h_sum = 0;
    std::size_t count = 0;

    void add(const WorkingBox& b)
    {
        x_min = std::min(x_min, b.x_min);
        x_max = std::max(x_max, b.x_max);
        y_min = std::min(y_min, b.y_min);
        y_max = std::max(y_max, b.y_max);
        h_sum += b.h;
        ++count;
    }
};

void require_one_space(const std::vector<OcrLine>& lines)
{
    for (const auto& l : lines)
        if (l.bbox.space() != lines.front().bbox.space())
            throw SpaceMismatchError("lines in different coordinate spaces");
}

} // namespace

std::vector<std::vector<std::size_t>> group_boxes(const std::vector<OcrLine>& lines, const MergeParams& p)
{
    p.validate();
    std::vector<std::vector<std::size_t>> groups;
    if (lines.empty())
        return groups;
    require_one_space(lines);

    std::vector<WorkingBox> boxes;
    boxes.reserve(lines.size());
    for (const auto& l : lines)
        boxes.push_back(WorkingBox::from_line(l));

    std::size_t ungrouped = boxes.size();
    std::size_t first_free = 0; // every index below this is grouped
    GroupExtent ext;
    while (ungrouped > 0) {
        while (boxes[first_free].group != 0)
            ++first_free;
        if (ext.count == 0) {
            groups.emplace_back();
            boxes[first_free].group = static_cast<int>(groups.size());
            groups.back().push_back(first_free);
            ext.add(boxes[first_free]);
            --ungrouped;
            continue;
        }
        const double h_mean = ext.h_sum / static_cast<double>(ext.count);
        const double bx1 = ext.x_min - p.x_ths * h_mean;
        const double bx2 = ext.x_max + p.x_ths * h_mean;
        const double by1 = ext.y_min - p.y_ths * h_mean;
        const double by2 = ext.y_max + p.y_ths * h_mean;
        bool assigned = false;
        for (std::size_t i = first_free; i < boxes.size(); ++i) {
            auto& u = boxes[i];
            if (u.group != 0)
                continue;
            if (u.x_min <= bx2 && u.x_max >= bx1 && u.y_min <= by2 && u.y_max >= by1) {
                u.group = static_cast<int>(groups.size());
                groups.back().push_back(i);
                ext.add(u);
                --ungrouped;
                assigned = true;
                break;
            }
        }
        if (!assigned)
            ext = GroupExtent{};
    }
    return groups;
}

MergeGroup order_and_merge(std::vector<WorkingBox> group, const MergeParams& p)
{
    if (group.empty())
        throw InvalidArgument("order_and_merge on an empty group");
    MergeGroup out;
    out.bbox = group.front().box();
    std::string joined;
    bool first = true;
    while (!group.empty()) {
        std::size_t top = 0;
        for (std::size_t i = 1; i < group.size(); ++i)
            if (group[i].y_min < group[top].y_min)
                top = i;
        const double band = p.row_tolerance * group[top].h;
        const double yc = group[top].y_center;
        std::size_t pick = top;
        for (std::size_t i = 0; i < group.size(); ++i) {
            if (std::fabs(group[i].y_center - yc) > band)
                continue;
            if (group[i].x_min < group[pick].x_min || (group[i].x_min == group[pick].x_min && i < pick))
                pick = i;
        }
        if (!first)
            joined += p.joiner;
        joined += group[pick].text;
        first = false;
        out.bbox = union_box(out.bbox, group[pick].box());
        out.members.push_back(std::move(group[pick]));
        group.erase(group.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    out.text = text::trim(joined);
    return out;
}

std::vector<LayoutBlock> spatial_merge(const std::vector<OcrLine>& lines, const MergeParams& p)
{
    std::vector<LayoutBlock> blocks;
    for (const auto& idx : group_boxes(lines, p)) {
        std::vector<WorkingBox> members;
        members.reserve(idx.size());
        for (auto i : idx) {
            members.push_back(WorkingBox::from_line(lines[i]));
            members.back().group = static_cast<int>(blocks.size() + 1);
        }
        MergeGroup g = order_and_merge(std::move(members), p);
        blocks.push_back({BlockKind::Text, g.bbox, std::move(g.text), std::nullopt});
    }
    return blocks;
}

} // namespace patimt
