#pragma once

#include <cstddef>

#include "shadowroad/image.hpp"

namespace shadowroad {

/// Post-processing configuration. `se` drives opening/closing/boundary
/// and component connectivity; region filling uses the 4-connectivity
/// cross by default so it cannot leak through diagonal boundary gaps.
struct MorphConfig {
    StructuringElement se = StructuringElement::square(3);
    StructuringElement fill_se = StructuringElement::cross(3);
    bool open_first = true;
    bool fill_holes = true;
    bool keep_largest = true;
};

/// M dilated by B: union of translates of M, clipped to image bounds.
BinaryMask dilate(const BinaryMask& m, const StructuringElement& se);

/// M eroded by B; out-of-bounds pixels count as background.
BinaryMask erode(const BinaryMask& m, const StructuringElement& se);

BinaryMask open(const BinaryMask& m, const StructuringElement& se);
BinaryMask close(const BinaryMask& m, const StructuringElement& se);

/// Boundary extraction: M minus its erosion.
BinaryMask boundary(const BinaryMask& m, const StructuringElement& se);

/// Region filling: grows from the seed through the complement of
/// `boundary_mask` by repeated dilate-and-intersect until the fixed
/// point, then unions the boundary back in. Seeding on the boundary set
/// is an error. A seed in the exterior floods the whole exterior.
/// `iterations_out`, when given, receives the number of dilation steps.
BinaryMask fill_region(const BinaryMask& boundary_mask, int seed_x, int seed_y,
                       const StructuringElement& se, std::size_t* iterations_out = nullptr);

/// Largest connected component under the connectivity induced by `se`;
/// ties go to the component whose seed comes first in row-major order.
BinaryMask keep_largest(const BinaryMask& m, const StructuringElement& se);

/// Full post-processing chain: open (optional), close, largest
/// component (optional), then reconstruction of the mask from its
/// boundary via region filling seeded at the interior pixel nearest the
/// mask centroid (optional).
BinaryMask refine(const BinaryMask& m, const MorphConfig& cfg);

}  // namespace shadowroad
