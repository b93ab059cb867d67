#include "shadowroad/color_space.hpp"

#include <algorithm>
#include <cmath>

namespace shadowroad {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg_cos(double deg) { return std::cos(deg * kPi / 180.0); }

}  // namespace

Hsv rgb_to_hsv(Rgb p) {
    const double sum = p.r + p.g + p.b;
    if (sum <= 0.0) return {0.0, 0.0, 0.0};  // black: every quantity degenerates

    const double v = sum / 3.0;
    const double mn = std::min({p.r, p.g, p.b});
    double s = 1.0 - 3.0 * mn / sum;
    s = std::clamp(s, 0.0, 1.0);

    const double rg = p.r - p.g;
    const double rb = p.r - p.b;
    const double gb = p.g - p.b;
    const double denom = std::sqrt(rg * rg + rb * gb);
    double h = 0.0;  // achromatic: hue undefined, 0 by convention
    if (denom > 0.0) {
        double c = 0.5 * (rg + rb) / denom;
        c = std::clamp(c, -1.0, 1.0);
        const double theta = std::acos(c) * 180.0 / kPi;
        h = (p.b <= p.g) ? theta : 360.0 - theta;
        if (h >= 360.0) h -= 360.0;
        if (h < 0.0) h = 0.0;
    }
    return {h, s, v};
}

Rgb hsv_to_rgb(Hsv p) {
    const double v = p.v;
    const double s = p.s;
    double h = p.h;
    if (h < 0.0) h = 0.0;
    if (h >= 360.0) h -= 360.0 * std::floor(h / 360.0);

    double r, g, b;
    if (h < 120.0) {
        b = v * (1.0 - s);
        r = v * (1.0 + s * deg_cos(h) / deg_cos(60.0 - h));
        g = 3.0 * v - (r + b);
    } else if (h < 240.0) {
        const double hh = h - 120.0;
        r = v * (1.0 - s);
        g = v * (1.0 + s * deg_cos(hh) / deg_cos(60.0 - hh));
        b = 3.0 * v - (r + g);
    } else {
        const double hh = h - 240.0;
        g = v * (1.0 - s);
        b = v * (1.0 + s * deg_cos(hh) / deg_cos(60.0 - hh));
        r = 3.0 * v - (g + b);
    }
    return {std::clamp(r, 0.0, 1.0), std::clamp(g, 0.0, 1.0), std::clamp(b, 0.0, 1.0)};
}

HsvImage rgb_to_hsv(const RgbImage& img) {
    HsvImage out(img.width(), img.height());
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const Hsv h = rgb_to_hsv(Rgb{img.channel(i, 0), img.channel(i, 1), img.channel(i, 2)});
        out.data()[3 * i + 0] = h.h;
        out.data()[3 * i + 1] = h.s;
        out.data()[3 * i + 2] = h.v;
    }
    return out;
}

RgbImage hsv_to_rgb(const HsvImage& img) {
    RgbImage out(img.width(), img.height());
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const Rgb c = hsv_to_rgb(img.at_index(i));
        out.data()[3 * i + 0] = c.r;
        out.data()[3 * i + 1] = c.g;
        out.data()[3 * i + 2] = c.b;
    }
    return out;
}

}  // namespace shadowroad
