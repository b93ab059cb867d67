#include "shadowroad/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "shadowroad/color_space.hpp"

namespace shadowroad {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

struct ChannelStats {
    Vec3 mean{};
    Vec3 std{};
};

ChannelStats stats_over(const RgbImage& img, const BinaryMask& mask) {
    ChannelStats s;
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask.get(i)) continue;
        ++n;
        for (int c = 0; c < 3; ++c) s.mean[c] += img.channel(i, c);
    }
    if (n == 0) return s;
    for (int c = 0; c < 3; ++c) s.mean[c] /= static_cast<double>(n);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask.get(i)) continue;
        for (int c = 0; c < 3; ++c) {
            const double d = img.channel(i, c) - s.mean[c];
            s.std[c] += d * d;
        }
    }
    for (int c = 0; c < 3; ++c) s.std[c] = std::sqrt(s.std[c] / static_cast<double>(n));
    return s;
}

}  // namespace

NdiMap compute_ndi(const HsvImage& hsv) {
    NdiMap out(hsv.width(), hsv.height());
    const std::size_t n = hsv.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const Hsv p = hsv.at_index(i);
        const double sum = p.s + p.v;
        out[i] = sum > 0.0 ? (p.s - p.v) / sum : 0.0;
    }
    return out;
}

ShadowThreshold otsu_threshold(const GrayMap& map) {
    if (map.size() == 0) throw Error("otsu: empty map");
    ShadowThreshold st;
    double lo = map[0], hi = map[0];
    for (std::size_t i = 1; i < map.size(); ++i) {
        lo = std::min(lo, map[i]);
        hi = std::max(hi, map[i]);
    }
    st.value_min = lo;
    st.value_max = hi;

    if (hi <= lo) {  // constant map: threshold at the constant, all pixels class 1 under >=
        st.histogram[0] = static_cast<std::uint32_t>(map.size());
        st.t = lo;
        return st;
    }

    const double width = (hi - lo) / 256.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        int b = static_cast<int>((map[i] - lo) / width);
        b = std::clamp(b, 0, 255);
        ++st.histogram[b];
    }

    // Between-class variance w0*w1*(mu0-mu1)^2 equals
    // (s0*n1 - s1*n0)^2 / (N^2 * n0 * n1); the N^2 factor is common to
    // every split, so candidates compare as exact integer rationals.
    std::uint64_t total = 0, total_sum = 0;
    for (int j = 0; j < 256; ++j) {
        total += st.histogram[j];
        total_sum += static_cast<std::uint64_t>(j) * st.histogram[j];
    }
    int best_t = -1;
    __int128 best_num = 0, best_den = 1;
    std::uint64_t n0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += st.histogram[t];
        s0 += static_cast<std::uint64_t>(t) * st.histogram[t];
        const std::uint64_t n1 = total - n0, s1 = total_sum - s0;
        __int128 num = 0, den = 1;
        if (n0 > 0 && n1 > 0) {
            const __int128 d = static_cast<__int128>(s0) * n1 - static_cast<__int128>(s1) * n0;
            num = d * d;
            den = static_cast<__int128>(n0) * n1;
        }
        if (best_t < 0 || num * best_den > best_num * den) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }
    st.t = lo + (best_t + 1) * width;
    st.bin = best_t;
    return st;
}

BinaryMask binarize(const GrayMap& map, double t) {
    BinaryMask out(map.width(), map.height());
    for (std::size_t i = 0; i < map.size(); ++i) out.put(i, map[i] >= t);
    return out;
}

std::vector<BinaryMask> connected_components(const BinaryMask& mask, const StructuringElement& se,
                                             std::size_t* max_iterations_out) {
    const int w = mask.width(), h = mask.height();
    std::vector<BinaryMask> components;
    BinaryMask assigned(w, h);
    std::size_t worst_iterations = 0;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            if (!mask.at(sx, sy) || assigned.at(sx, sy)) continue;

            // Dilate-and-intersect to the fixed point. Because the set
            // only grows, each round's dilation is computed from the
            // pixels added in the previous round.
            BinaryMask comp(w, h);
            comp.set(sx, sy, true);
            std::vector<std::pair<int, int>> frontier{{sx, sy}}, next;
            std::size_t iterations = 0;
            while (!frontier.empty()) {
                ++iterations;
                next.clear();
                for (auto [x, y] : frontier) {
                    for (auto [dy, dx] : se.offsets()) {
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        if (!mask.at(nx, ny) || comp.at(nx, ny)) continue;
                        comp.set(nx, ny, true);
                        next.emplace_back(nx, ny);
                    }
                }
                frontier.swap(next);
            }

            worst_iterations = std::max(worst_iterations, iterations);
            for (std::size_t i = 0; i < comp.size(); ++i)
                if (comp.get(i)) assigned.put(i, true);
            components.push_back(std::move(comp));
        }
    }
    if (max_iterations_out) *max_iterations_out = worst_iterations;
    return components;
}

BinaryMask buffer_area(const BinaryMask& component, const BinaryMask& shadow_all,
                       const StructuringElement& se) {
    if (!component.same_shape(shadow_all)) throw Error("dimension mismatch: component vs shadow mask");
    const int w = component.width(), h = component.height();
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!component.at(x, y)) continue;
            for (auto [dy, dx] : se.offsets()) {
                const int ny = y + dy, nx = x + dx;
                if (nx >= 0 && nx < w && ny >= 0 && ny < h && !component.at(nx, ny) && !shadow_all.at(nx, ny))
                    out.set(nx, ny, true);
            }
        }
    }
    return out;
}

ShadowComponent make_shadow_component(const RgbImage& img, const BinaryMask& component,
                                      const BinaryMask& shadow_all, const StructuringElement& se) {
    ShadowComponent comp;
    comp.component_mask = component;
    comp.buffer_mask = buffer_area(component, shadow_all, se);
    const ChannelStats cs = stats_over(img, comp.component_mask);
    const ChannelStats bs = stats_over(img, comp.buffer_mask);
    comp.shadow_mean = cs.mean;
    comp.shadow_std = cs.std;
    comp.buffer_mean = bs.mean;
    comp.buffer_std = bs.std;
    return comp;
}

RgbImage compensate(const RgbImage& img, const ShadowComponent& comp) {
    RgbImage out = img;
    for (std::size_t i = 0; i < comp.component_mask.size(); ++i) {
        if (!comp.component_mask.get(i)) continue;
        for (int c = 0; c < 3; ++c) {
            double v;
            if (comp.shadow_std[c] < kSigmaFloor) {
                v = comp.buffer_mean[c];
            } else {
                v = comp.buffer_mean[c] +
                    (img.channel(i, c) - comp.shadow_mean[c]) * (comp.buffer_std[c] / comp.shadow_std[c]);
            }
            out.set_channel(i, c, std::clamp(v, 0.0, 1.0));
        }
    }
    return out;
}

RemoveShadowsResult remove_shadows(const RgbImage& img, const StructuringElement& se,
                                   std::size_t min_area, double min_ndi_contrast) {
    RemoveShadowsResult res{img, BinaryMask(img.width(), img.height()), {}};

    const HsvImage hsv = rgb_to_hsv(img);
    const NdiMap ndi = compute_ndi(hsv);
    const ShadowThreshold thr = otsu_threshold(ndi);

    // class separation at the chosen threshold, in NDI units
    double contrast = 0.0;
    if (thr.value_max > thr.value_min) {
        const double width = (thr.value_max - thr.value_min) / 256.0;
        double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
        for (int j = 0; j < 256; ++j) {
            const double c = static_cast<double>(thr.histogram[j]);
            if (j <= thr.bin) {
                w0 += c;
                s0 += j * c;
            } else {
                w1 += c;
                s1 += j * c;
            }
        }
        if (w0 > 0 && w1 > 0) contrast = (s1 / w1 - s0 / w0) * width;
    }
    if (contrast < min_ndi_contrast) {
        res.notes.push_back(fmt("no shadow detected: ndi class contrast %.4f below %.4f", contrast,
                                min_ndi_contrast));
        return res;
    }

    const BinaryMask shadow_all = binarize(ndi, thr.t);
    std::vector<BinaryMask> comps = connected_components(shadow_all, se);

    // largest first; drop speckle
    std::vector<std::pair<std::size_t, std::size_t>> order;  // (area, index)
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::size_t area = comps[i].count();
        if (area >= min_area) order.emplace_back(area, i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    for (const auto& [area, idx] : order) {
        const ShadowComponent comp = make_shadow_component(res.image, comps[idx], shadow_all, se);
        if (comp.buffer_mask.count() < kBufferMinPixels) {
            res.notes.push_back(fmt("component of %.0f px skipped: buffer has %.0f px",
                                    static_cast<double>(area),
                                    static_cast<double>(comp.buffer_mask.count())));
            continue;
        }
        res.image = compensate(res.image, comp);
        for (std::size_t i = 0; i < comps[idx].size(); ++i)
            if (comps[idx].get(i)) res.shadow_mask.put(i, true);
    }
    return res;
}

}  // namespace shadowroad
