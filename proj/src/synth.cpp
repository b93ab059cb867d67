#include "shadowroad/synth.hpp"

#include <algorithm>
#include <cmath>

#include "shadowroad/rng.hpp"

namespace shadowroad {

namespace {

double quantize8(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

}  // namespace

SceneRender generate_scene(const SyntheticScene& scene) {
    const int w = scene.width, h = scene.height;
    if (w < 16 || h < 16) throw Error("degenerate geometry: frame too small");
    if (scene.road_top_y_frac < 0.0 || scene.road_top_y_frac >= 1.0)
        throw Error("degenerate geometry: road top out of range");
    if (scene.road_top_width_frac <= 0.0 || scene.road_bottom_width_frac <= 0.0 ||
        scene.road_top_width_frac > 1.0 || scene.road_bottom_width_frac > 1.0)
        throw Error("degenerate geometry: road width out of range");
    for (const auto& b : scene.bands) {
        if (b.attenuation <= 0.0 || b.attenuation >= 1.0)
            throw Error("degenerate geometry: attenuation must be in (0, 1)");
        if (b.x1 <= b.x0 || b.y1 <= b.y0 || b.x1 <= 0 || b.y1 <= 0 || b.x0 >= w || b.y0 >= h)
            throw Error("degenerate geometry: shadow band misses the frame");
    }

    const double top_y = scene.road_top_y_frac * h;
    const double cx = 0.5 * w;
    const double half_top = 0.5 * scene.road_top_width_frac * w;
    const double half_bottom = 0.5 * scene.road_bottom_width_frac * w;

    SceneRender out{RgbImage(w, h), BinaryMask(w, h), BinaryMask(w, h)};
    Rng rng(scene.seed);

    for (int y = 0; y < h; ++y) {
        const double py = y + 0.5;
        bool row_in_road = py > top_y && py < h;
        double xl = 0.0, xr = 0.0;
        if (row_in_road) {
            const double t = (py - top_y) / (h - top_y);
            const double half = half_top + (half_bottom - half_top) * t;
            xl = cx - half;
            xr = cx + half;
        }
        for (int x = 0; x < w; ++x) {
            const double px = x + 0.5;
            const bool road = row_in_road && px >= xl && px < xr;
            out.road_truth.set(x, y, road);

            Rgb c = road ? scene.road_color : scene.background_color;
            for (const auto& b : scene.bands) {
                if (x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1) {
                    c.r *= b.attenuation;
                    c.g *= b.attenuation;
                    c.b *= b.attenuation;
                    out.shadow_truth.set(x, y, true);
                    break;
                }
            }
            if (scene.noise_amplitude > 0.0) {
                c.r += rng.uniform(-scene.noise_amplitude, scene.noise_amplitude);
                c.g += rng.uniform(-scene.noise_amplitude, scene.noise_amplitude);
                c.b += rng.uniform(-scene.noise_amplitude, scene.noise_amplitude);
            }
            out.image.set(x, y, Rgb{quantize8(c.r), quantize8(c.g), quantize8(c.b)});
        }
    }
    return out;
}

SyntheticScene make_scene_variant(int scene_index, int noise_seed, bool with_shadow) {
    SyntheticScene s;
    const int k = scene_index % 10;
    s.road_top_width_frac = 0.26 + 0.010 * k;
    s.road_bottom_width_frac = 0.76 + 0.004 * k;

    // Road and background share one saturation-to-value ratio, so their
    // NDI agrees exactly ((rho-1)/(rho+1)) and a shadow band is the only
    // NDI anomaly in the frame, at (rho-a)/(rho+a) for attenuation a.
    const double rho = 0.24 + 0.005 * (k % 4);
    const double v_road = 0.42 + 0.006 * (k % 4);
    const double v_bg = 0.70 + 0.008 * (k % 3);
    const double s_road = rho * v_road;
    const double s_bg = rho * v_bg;
    s.road_color = Rgb{v_road * (1.0 + s_road), v_road, v_road * (1.0 - s_road)};  // warm
    s.background_color = Rgb{v_bg * (1.0 - s_bg), v_bg, v_bg * (1.0 + s_bg)};      // cool

    s.seed = 0x9d2c5680ULL + 1000003ULL * static_cast<std::uint64_t>(scene_index) +
             static_cast<std::uint64_t>(noise_seed);
    if (with_shadow) {
        const double attenuation = 0.40 + 0.02 * k;
        ShadowBand band1{0, 92 + 3 * k, s.width, 92 + 3 * k + 26, attenuation};
        s.bands.push_back(band1);
        if (k % 2 == 1) {
            ShadowBand band2{0, 146 + 2 * k, s.width, 146 + 2 * k + 18, attenuation};
            s.bands.push_back(band2);
        }
    }
    return s;
}

}  // namespace shadowroad
