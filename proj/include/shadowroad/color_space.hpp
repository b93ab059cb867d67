#pragma once

#include "shadowroad/image.hpp"

namespace shadowroad {

/// RGB -> HSV with V = (R+G+B)/3 (mean-intensity model).
/// Conventions: black pixel -> (0, 0, 0); achromatic pixel -> H = 0.
HsvImage rgb_to_hsv(const RgbImage& img);
Hsv rgb_to_hsv(Rgb p);

/// Sector-wise inverse of rgb_to_hsv. Round-trips within 1e-9 per
/// channel on the continuous domain; output clamped to [0, 1].
RgbImage hsv_to_rgb(const HsvImage& img);
Rgb hsv_to_rgb(Hsv p);

}  // namespace shadowroad
