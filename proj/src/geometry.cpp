#include "patimt/geometry.hpp"

#include "patimt/error.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace patimt {

std::string_view to_string(CoordSpace s) noexcept
{
    switch (s) {
    case CoordSpace::Absolute: return "absolute";
    case CoordSpace::Unit: return "normalized-unit";
    case CoordSpace::Norm1000: return "normalized-1000";
    case CoordSpace::Norm999: return "normalized-999";
    }
    return "?";
}

double space_scale(CoordSpace s) noexcept
{
    switch (s) {
    case CoordSpace::Unit: return 1.0;
    case CoordSpace::Norm1000: return 1000.0;
    case CoordSpace::Norm999: return 999.0;
    case CoordSpace::Absolute: break;
    }
    return 0.0;
}

namespace {

double clamp_normalized(double v, double scale)
{
    const double slack = 0.01 * scale;
    if (v < -slack || v > scale + slack)
        throw InvalidArgument("coordinate " + std::to_string(v) + " outside normalized range [0," +
                              std::to_string(scale) + "]");
    return std::clamp(v, 0.0, scale);
}

void require_same_space(const BBox& a, const BBox& b)
{
    if (a.space() != b.space())
        throw SpaceMismatchError("boxes in different coordinate spaces: " + std::string(to_string(a.space())) +
                                 " vs " + std::string(to_string(b.space())));
}

} // namespace

BBox::BBox(double x1, double y1, double x2, double y2, CoordSpace space) : space_(space)
{
    if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) || !std::isfinite(y2))
        throw InvalidArgument("non-finite box coordinate");
    if (x1 > x2)
        std::swap(x1, x2);
    if (y1 > y2)
        std::swap(y1, y2);
    if (space != CoordSpace::Absolute) {
        const double scale = space_scale(space);
        x1 = clamp_normalized(x1, scale);
        y1 = clamp_normalized(y1, scale);
        x2 = clamp_normalized(x2, scale);
        y2 = clamp_normalized(y2, scale);
    }
    x1_ = x1;
    y1_ = y1;
    x2_ = x2;
    y2_ = y2;
}

double area(const BBox& b) noexcept { return b.width() * b.height(); }

double intersection_area(const BBox& a, const BBox& b)
{
    require_same_space(a, b);
    const double w = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
    const double h = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
    if (w <= 0 || h <= 0)
        return 0.0;
    return w * h;
}

double iou(const BBox& a, const BBox& b)
{
    const double inter = intersection_area(a, b);
    const double uni = area(a) + area(b) - inter;
    if (uni <= 0)
        return 0.0;
    return inter / uni;
}

double overlap_ratio(const BBox& inner, const BBox& outer)
{
    const double inter = intersection_area(inner, outer);
    const double a = area(inner);
    if (a <= 0)
        return 0.0;
    return inter / a;
}

BBox union_box(const BBox& a, const BBox& b)
{
    require_same_space(a, b);
    return BBox(std::min(a.x1(), b.x1()), std::min(a.y1(), b.y1()), std::max(a.x2(), b.x2()),
                std::max(a.y2(), b.y2()), a.space());
}

BBox convert(const BBox& b, CoordSpace target, ImageDims dims)
{
    if (!dims.valid())
        throw InvalidArgument("invalid image dimensions " + std::to_string(dims.width) + "x" +
                              std::to_string(dims.height));
    if (b.space() == target)
        return b;

    // Go through the unit square.
    double ux1, uy1, ux2, uy2;
    if (b.space() == CoordSpace::Absolute) {
        ux1 = b.x1() / dims.width;
        ux2 = b.x2() / dims.width;
        uy1 = b.y1() / dims.height;
        uy2 = b.y2() / dims.height;
    } else {
        const double s = space_scale(b.space());
        ux1 = b.x1() / s;
        ux2 = b.x2() / s;
        uy1 = b.y1() / s;
        uy2 = b.y2() / s;
    }
    ux1 = std::clamp(ux1, 0.0, 1.0);
    ux2 = std::clamp(ux2, 0.0, 1.0);
    uy1 = std::clamp(uy1, 0.0, 1.0);
    uy2 = std::clamp(uy2, 0.0, 1.0);

    if (target == CoordSpace::Absolute)
        return BBox(ux1 * dims.width, uy1 * dims.height, ux2 * dims.width, uy2 * dims.height, target);
    const double s = space_scale(target);
    return BBox(ux1 * s, uy1 * s, ux2 * s, uy2 * s, target);
}

} // namespace patimt
