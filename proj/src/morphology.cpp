#include "shadowroad/morphology.hpp"

#include <algorithm>
#include <limits>

#include "shadowroad/shadow.hpp"

namespace shadowroad {

BinaryMask dilate(const BinaryMask& m, const StructuringElement& se) {
    BinaryMask out(m.width(), m.height());
    const int w = m.width(), h = m.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!m.at(x, y)) continue;
            for (auto [dy, dx] : se.offsets()) {
                const int ny = y + dy, nx = x + dx;
                if (nx >= 0 && nx < w && ny >= 0 && ny < h) out.set(nx, ny, true);
            }
        }
    }
    return out;
}

BinaryMask erode(const BinaryMask& m, const StructuringElement& se) {
    BinaryMask out(m.width(), m.height());
    const int w = m.width(), h = m.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool all = true;
            for (auto [dy, dx] : se.offsets()) {
                const int ny = y + dy, nx = x + dx;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h || !m.at(nx, ny)) {
                    all = false;
                    break;
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

BinaryMask open(const BinaryMask& m, const StructuringElement& se) { return dilate(erode(m, se), se); }

BinaryMask close(const BinaryMask& m, const StructuringElement& se) { return erode(dilate(m, se), se); }

BinaryMask boundary(const BinaryMask& m, const StructuringElement& se) {
    const BinaryMask er = erode(m, se);
    BinaryMask out(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) out.put(i, m.get(i) && !er.get(i));
    return out;
}

BinaryMask fill_region(const BinaryMask& boundary_mask, int seed_x, int seed_y,
                       const StructuringElement& se, std::size_t* iterations_out) {
    const int w = boundary_mask.width(), h = boundary_mask.height();
    if (seed_x < 0 || seed_x >= w || seed_y < 0 || seed_y >= h)
        throw Error("invalid seed: outside the image");
    if (boundary_mask.at(seed_x, seed_y)) throw Error("invalid seed: on the boundary set");

    // Dilate through the complement of the boundary set until nothing
    // changes; the set only grows, so each round dilates just the
    // pixels the previous round added.
    BinaryMask region(w, h);
    region.set(seed_x, seed_y, true);
    std::vector<std::pair<int, int>> frontier{{seed_x, seed_y}}, next;
    std::size_t iterations = 0;
    while (!frontier.empty()) {
        ++iterations;
        next.clear();
        for (auto [x, y] : frontier) {
            for (auto [dy, dx] : se.offsets()) {
                const int nx = x + dx, ny = y + dy;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                if (boundary_mask.at(nx, ny) || region.at(nx, ny)) continue;
                region.set(nx, ny, true);
                next.emplace_back(nx, ny);
            }
        }
        frontier.swap(next);
    }
    if (iterations_out) *iterations_out = iterations;

    for (std::size_t i = 0; i < region.size(); ++i)
        region.put(i, region.get(i) || boundary_mask.get(i));
    return region;
}

BinaryMask keep_largest(const BinaryMask& m, const StructuringElement& se) {
    const auto components = connected_components(m, se);
    if (components.empty()) return BinaryMask(m.width(), m.height());
    std::size_t best = 0, best_count = components[0].count();
    for (std::size_t i = 1; i < components.size(); ++i) {
        const std::size_t c = components[i].count();
        if (c > best_count) {  // ties keep the earlier (row-major first) seed
            best = i;
            best_count = c;
        }
    }
    return components[best];
}

BinaryMask refine(const BinaryMask& m, const MorphConfig& cfg) {
    BinaryMask out = m;
    if (cfg.open_first) out = open(out, cfg.se);
    out = close(out, cfg.se);
    if (cfg.keep_largest) out = keep_largest(out, cfg.se);
    if (cfg.fill_holes && !out.empty_mask()) {
        const BinaryMask edge = boundary(out, cfg.se);
        // centroid of the current mask
        double cx = 0.0, cy = 0.0;
        std::size_t n = 0;
        for (int y = 0; y < out.height(); ++y)
            for (int x = 0; x < out.width(); ++x)
                if (out.at(x, y)) {
                    cx += x;
                    cy += y;
                    ++n;
                }
        cx /= static_cast<double>(n);
        cy /= static_cast<double>(n);
        // interior pixel nearest the centroid
        int sx = -1, sy = -1;
        double best = std::numeric_limits<double>::max();
        for (int y = 0; y < out.height(); ++y) {
            for (int x = 0; x < out.width(); ++x) {
                if (!out.at(x, y) || edge.at(x, y)) continue;
                const double d = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                if (d < best) {
                    best = d;
                    sx = x;
                    sy = y;
                }
            }
        }
        if (sx >= 0) out = fill_region(edge, sx, sy, cfg.fill_se);
    }
    return out;
}

}  // namespace shadowroad
