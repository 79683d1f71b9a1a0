#pragma once

#include <string_view>

namespace patimt {

/// Coordinate system a box is expressed in. The normalized variants need
/// image dimensions to be turned into pixels.
enum class CoordSpace { Absolute, Unit, Norm1000, Norm999 };

std::string_view to_string(CoordSpace s) noexcept;

/// Upper end of the nominal range for a normalized space (1, 1000 or 999).
/// Absolute pixels have no fixed range and return 0.
double space_scale(CoordSpace s) noexcept;

struct ImageDims {
    int width = 0;
    int height = 0;

    bool valid() const noexcept { return width >= 1 && height >= 1; }
    friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

/// Axis-aligned rectangle tagged with its coordinate space.
///
/// Construction swaps reversed corners. For normalized spaces, values up to
/// 1% outside the nominal range are clamped and anything further out throws
/// InvalidArgument. Non-finite coordinates always throw.
class BBox {
public:
    BBox() = default;
    BBox(double x1, double y1, double x2, double y2, CoordSpace space = CoordSpace::Absolute);

    double x1() const noexcept { return x1_; }
    double y1() const noexcept { return y1_; }
    double x2() const noexcept { return x2_; }
    double y2() const noexcept { return y2_; }
    double width() const noexcept { return x2_ - x1_; }
    double height() const noexcept { return y2_ - y1_; }
    CoordSpace space() const noexcept { return space_; }

    friend bool operator==(const BBox&, const BBox&) = default;

private:
    double x1_ = 0, y1_ = 0, x2_ = 0, y2_ = 0;
    CoordSpace space_ = CoordSpace::Absolute;
};

double area(const BBox& b) noexcept;

/// Area of the intersection; throws SpaceMismatchError for different spaces.
double intersection_area(const BBox& a, const BBox& b);

/// Intersection over union, 0 when the union is empty.
double iou(const BBox& a, const BBox& b);

/// Fraction of `inner` covered by `outer`; 0 when `inner` has no area.
double overlap_ratio(const BBox& inner, const BBox& outer);

BBox union_box(const BBox& a, const BBox& b);

/// Rescale `b` into `target`. Results are clamped to the target range
/// (for absolute pixels: [0,width] x [0,height]).
BBox convert(const BBox& b, CoordSpace target, ImageDims dims);

} // namespace patimt
