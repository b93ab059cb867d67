#pragma once

#include <cstdint>
#include <vector>

#include "shadowroad/image.hpp"

namespace shadowroad {

/// Axis-aligned shadow rectangle, half-open pixel ranges, with a
/// brightness attenuation factor in (0, 1).
struct ShadowBand {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double attenuation = 0.5;
};

/// Scene description: a road trapezoid over a flat background, optional
/// shadow bands, seeded per-pixel noise. Ground truth comes from the
/// geometry, never from the rendered pixels.
struct SyntheticScene {
    int width = 320;
    int height = 240;
    double road_top_y_frac = 0.3;        // trapezoid top edge as fraction of height
    double road_top_width_frac = 0.28;   // width fractions at top and bottom edges
    double road_bottom_width_frac = 0.8;
    Rgb road_color{0.45, 0.44, 0.41};
    Rgb background_color{0.70, 0.74, 0.78};
    std::vector<ShadowBand> bands;
    double noise_amplitude = 0.5 / 255.0;
    std::uint64_t seed = 0;
};

struct SceneRender {
    RgbImage image;
    BinaryMask road_truth;
    BinaryMask shadow_truth;
};

/// Renders road over background, attenuates band pixels, adds seeded
/// uniform noise, clamps, and snaps to the 8-bit grid so in-memory and
/// file round-trip pixels agree bit-exactly.
SceneRender generate_scene(const SyntheticScene& scene);

/// Deterministic scene family used by the synthetic dataset tooling:
/// `scene_index` varies geometry, colors and attenuation (0.40-0.58),
/// `noise_seed` varies only the noise draw.
SyntheticScene make_scene_variant(int scene_index, int noise_seed, bool with_shadow = true);

}  // namespace shadowroad
