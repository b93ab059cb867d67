#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shadowroad/image.hpp"
#include "shadowroad/road_color.hpp"

namespace shadowroad {

/// Normalized difference index (S - V)/(S + V) per pixel; 0 where both
/// components vanish. High values mark shadow.
NdiMap compute_ndi(const HsvImage& hsv);

/// Threshold selected by maximizing between-class variance over a
/// 256-bin histogram, plus the histogram it was computed from.
struct ShadowThreshold {
    double t = 0.0;
    std::array<std::uint32_t, 256> histogram{};
    double value_min = 0.0;
    double value_max = 0.0;
    int bin = 0;  // winning bin; class 1 is every bin above it
};

/// Values are linearly binned into 256 levels over [min, max]; the
/// winning bin's upper edge is mapped back to value units. Ties break
/// to the lowest bin. A constant map yields the constant itself.
ShadowThreshold otsu_threshold(const GrayMap& map);

/// mask = map >= t
BinaryMask binarize(const GrayMap& map, double t);

/// Splits the mask into connected components by iterating
/// dilate-then-intersect from row-major seeds until each reaches its
/// fixed point. Components come back in seed order, pairwise disjoint,
/// and union to the input. `max_iterations_out` receives the largest
/// per-component iteration count when given.
std::vector<BinaryMask> connected_components(const BinaryMask& mask, const StructuringElement& se,
                                             std::size_t* max_iterations_out = nullptr);

/// Non-shadow ring around a component: dilation minus the component,
/// minus every pixel of `shadow_all`.
BinaryMask buffer_area(const BinaryMask& component, const BinaryMask& shadow_all,
                       const StructuringElement& se);

/// One shadow region with its buffer ring and both regions' per-channel
/// statistics (std is the 1/N population deviation).
struct ShadowComponent {
    BinaryMask component_mask;
    BinaryMask buffer_mask;
    Vec3 shadow_mean{};
    Vec3 shadow_std{};
    Vec3 buffer_mean{};
    Vec3 buffer_std{};
};

/// Builds the buffer ring and computes both statistics sets from `img`.
ShadowComponent make_shadow_component(const RgbImage& img, const BinaryMask& component,
                                      const BinaryMask& shadow_all, const StructuringElement& se);

constexpr double kSigmaFloor = 1e-6;
constexpr std::size_t kBufferMinPixels = 4;

/// Moment-matching transfer: shadow pixels are remapped so their mean
/// and deviation match the buffer's, channel by channel; a flat shadow
/// channel collapses to the buffer mean. Output clamped to [0, 1].
RgbImage compensate(const RgbImage& img, const ShadowComponent& comp);

struct RemoveShadowsResult {
    RgbImage image;
    BinaryMask shadow_mask;              // union of compensated components
    std::vector<std::string> notes;      // skipped components, guard trips
};

constexpr double kDefaultMinNdiContrast = 0.08;
constexpr int kDefaultMinShadowArea = 20;

/// Full phase-2 chain: NDI, Otsu, binarize, per-component buffer and
/// compensation in decreasing area order. Components below `min_area`
/// are dropped; when the NDI class separation at the Otsu threshold is
/// under `min_ndi_contrast` the frame is declared shadow-free and the
/// image passes through untouched.
RemoveShadowsResult remove_shadows(const RgbImage& img, const StructuringElement& se,
                                   std::size_t min_area = kDefaultMinShadowArea,
                                   double min_ndi_contrast = kDefaultMinNdiContrast);

}  // namespace shadowroad
