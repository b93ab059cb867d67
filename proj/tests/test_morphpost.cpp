#include <doctest.h>

#include "oracles.hpp"
#include "shadowroad/morphology.hpp"
#include "shadowroad/rng.hpp"
#include "shadowroad/shadow.hpp"

using namespace shadowroad;

namespace {

BinaryMask complement(const BinaryMask& m) {
    BinaryMask out(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) out.put(i, !m.get(i));
    return out;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.get(i) && !b.get(i)) return false;
    return true;
}

// the frame border clips the operators, so laws that hold on the
// infinite plane are checked on a frame padded by the element radius
BinaryMask pad(const BinaryMask& m, int r) {
    BinaryMask out(m.width() + 2 * r, m.height() + 2 * r);
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) out.set(x + r, y + r, m.at(x, y));
    return out;
}

BinaryMask crop(const BinaryMask& m, int r, int w, int h) {
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.set(x, y, m.at(x + r, y + r));
    return out;
}

}  // namespace

TEST_CASE("dilate basics") {
    SUBCASE("single pixel becomes a block") {
        BinaryMask m(5, 5);
        m.set(2, 2, true);
        const BinaryMask d = dilate(m, StructuringElement::square(3));
        CHECK(d.count() == 9);
        for (int y = 1; y <= 3; ++y)
            for (int x = 1; x <= 3; ++x) CHECK(d.at(x, y));
    }
    SUBCASE("empty stays empty") {
        const BinaryMask d = dilate(BinaryMask(4, 4), StructuringElement::square(3));
        CHECK(d.empty_mask());
    }
}

TEST_CASE("erode basics") {
    SUBCASE("3x3 block erodes to its center") {
        BinaryMask m(5, 5);
        for (int y = 1; y <= 3; ++y)
            for (int x = 1; x <= 3; ++x) m.set(x, y, true);
        const BinaryMask e = erode(m, StructuringElement::square(3));
        CHECK(e.count() == 1);
        CHECK(e.at(2, 2));
    }
    SUBCASE("full mask loses its border ring") {
        const BinaryMask e = erode(BinaryMask(5, 4, true), StructuringElement::square(3));
        CHECK(e.count() == 3 * 2);
        for (int y = 1; y <= 2; ++y)
            for (int x = 1; x <= 3; ++x) CHECK(e.at(x, y));
    }
}

TEST_CASE("morphology matches the set-definition oracle on random masks") {
    Rng rng(31);
    const StructuringElement ses[2] = {StructuringElement::square(3), StructuringElement::cross(3)};
    for (int trial = 0; trial < 100; ++trial) {
        const BinaryMask m = oracles::random_mask(rng, 16, 16, 0.4);
        for (const auto& se : ses) {
            CHECK(dilate(m, se) == oracles::brute_dilate(m, se));
            CHECK(erode(m, se) == oracles::brute_erode(m, se));
            CHECK(open(m, se) == oracles::brute_dilate(oracles::brute_erode(m, se), se));
            CHECK(close(m, se) == oracles::brute_erode(oracles::brute_dilate(m, se), se));
        }
    }
}

TEST_CASE("duality, idempotence and monotonicity") {
    Rng rng(32);
    const auto se = StructuringElement::square(3);
    for (int trial = 0; trial < 60; ++trial) {
        const BinaryMask m = oracles::random_mask(rng, 16, 16, 0.45);

        // erosion is complement-dilation with the reflected element,
        // with the border convention applied symmetrically (padded frame)
        const BinaryMask padded = pad(m, 1);
        CHECK(erode(m, se) ==
              crop(complement(dilate(complement(padded), se.reflected())), 1, 16, 16));

        const BinaryMask o = open(m, se), c = close(m, se);
        CHECK(open(o, se) == o);
        CHECK(close(c, se) == c);
        CHECK(subset(o, m));  // anti-extensive everywhere
        // closing is extensive away from the clipped border
        for (int y = 1; y < 15; ++y)
            for (int x = 1; x < 15; ++x)
                if (m.at(x, y)) CHECK(c.at(x, y));
        // on the padded frame it is extensive outright
        CHECK(subset(m, crop(close(padded, se), 1, 16, 16)));

        // increasing: union with extra pixels cannot shrink any result
        BinaryMask bigger = m;
        for (int k = 0; k < 10; ++k)
            bigger.put(rng.next_below(bigger.size()), true);
        CHECK(subset(dilate(m, se), dilate(bigger, se)));
        CHECK(subset(erode(m, se), erode(bigger, se)));
        CHECK(subset(open(m, se), open(bigger, se)));
        CHECK(subset(close(m, se), close(bigger, se)));
    }
}

TEST_CASE("boundary extraction") {
    SUBCASE("3x3 block boundary is its ring") {
        BinaryMask m(5, 5);
        for (int y = 1; y <= 3; ++y)
            for (int x = 1; x <= 3; ++x) m.set(x, y, true);
        const BinaryMask b = boundary(m, StructuringElement::square(3));
        CHECK(b.count() == 8);
        CHECK_FALSE(b.at(2, 2));
    }
    SUBCASE("isolated pixel is its own boundary") {
        BinaryMask m(3, 3);
        m.set(1, 1, true);
        CHECK(boundary(m, StructuringElement::square(3)) == m);
    }
    SUBCASE("boundary is always a subset") {
        Rng rng(33);
        for (int trial = 0; trial < 40; ++trial) {
            const BinaryMask m = oracles::random_mask(rng, 12, 12);
            CHECK(subset(boundary(m, StructuringElement::cross(3)), m));
        }
    }
}

TEST_CASE("fill_region") {
    const auto cross = StructuringElement::cross(3);
    SUBCASE("hollow square fills solid") {
        BinaryMask ring(7, 7);
        for (int k = 1; k <= 5; ++k) {
            ring.set(k, 1, true);
            ring.set(k, 5, true);
            ring.set(1, k, true);
            ring.set(5, k, true);
        }
        const BinaryMask filled = fill_region(ring, 3, 3, cross);
        CHECK(filled.count() == 25);
        for (int y = 1; y <= 5; ++y)
            for (int x = 1; x <= 5; ++x) CHECK(filled.at(x, y));
    }
    SUBCASE("exterior seed floods the outside") {
        BinaryMask ring(7, 7);
        for (int k = 2; k <= 4; ++k) {
            ring.set(k, 2, true);
            ring.set(k, 4, true);
            ring.set(2, k, true);
            ring.set(4, k, true);
        }
        const BinaryMask filled = fill_region(ring, 0, 0, cross);
        CHECK(filled == oracles::bfs_fill(ring, 0, 0, cross));
        CHECK_FALSE(filled.at(3, 3));  // the enclosed cell stays empty
    }
    SUBCASE("1x1 image reaches its fixed point immediately") {
        std::size_t iterations = 99;
        const BinaryMask filled = fill_region(BinaryMask(1, 1), 0, 0, cross, &iterations);
        CHECK(filled.count() == 1);
        CHECK(iterations <= 1);
    }
    SUBCASE("seed on the boundary is rejected") {
        BinaryMask ring(3, 3);
        ring.set(1, 1, true);
        CHECK_THROWS_WITH_AS(fill_region(ring, 1, 1, cross), doctest::Contains("invalid seed"), Error);
    }
    SUBCASE("matches the flood-fill oracle on random masks") {
        Rng rng(34);
        for (int trial = 0; trial < 100; ++trial) {
            const BinaryMask m = oracles::random_mask(rng, 16, 16, 0.35);
            int sx, sy;
            do {
                sx = static_cast<int>(rng.next_below(16));
                sy = static_cast<int>(rng.next_below(16));
            } while (m.at(sx, sy));
            std::size_t iterations = 0;
            const BinaryMask filled = fill_region(m, sx, sy, cross, &iterations);
            CHECK(filled == oracles::bfs_fill(m, sx, sy, cross));
            CHECK(iterations <= 16 * 16);
        }
    }
}

TEST_CASE("keep_largest") {
    const auto se = StructuringElement::square(3);
    SUBCASE("bigger component wins") {
        BinaryMask m(10, 3);
        for (int x = 0; x < 5; ++x) m.set(x, 0, true);
        for (int x = 7; x < 10; ++x) m.set(x, 2, true);
        const BinaryMask out = keep_largest(m, se);
        CHECK(out.count() == 5);
        CHECK(out.at(0, 0));
    }
    SUBCASE("tie goes to the earlier row-major component") {
        BinaryMask m(7, 1);
        m.set(0, 0, true);
        m.set(1, 0, true);
        m.set(5, 0, true);
        m.set(6, 0, true);
        const BinaryMask out = keep_largest(m, se);
        CHECK(out.at(0, 0));
        CHECK_FALSE(out.at(5, 0));
    }
    SUBCASE("empty input gives empty output") {
        CHECK(keep_largest(BinaryMask(4, 4), se).empty_mask());
    }
    SUBCASE("agrees with the BFS oracle's largest") {
        Rng rng(35);
        for (int trial = 0; trial < 60; ++trial) {
            const BinaryMask m = oracles::random_mask(rng, 16, 16, 0.3);
            const BinaryMask got = keep_largest(m, se);
            std::size_t best = 0;
            BinaryMask want(16, 16);
            for (const auto& comp : oracles::bfs_components(m, se)) {
                if (comp.count() > best) {
                    best = comp.count();
                    want = comp;
                }
            }
            CHECK(got == want);
        }
    }
}

TEST_CASE("refine") {
    MorphConfig cfg;
    SUBCASE("clean solid mask is a fixed point") {
        BinaryMask m(20, 20);
        for (int y = 4; y < 16; ++y)
            for (int x = 4; x < 16; ++x) m.set(x, y, true);
        CHECK(refine(m, cfg) == m);
    }
    SUBCASE("speckle around a solid road disappears") {
        BinaryMask road(40, 30);
        for (int y = 10; y < 28; ++y)
            for (int x = 6; x < 34; ++x) road.set(x, y, true);
        BinaryMask noisy = road;
        Rng rng(36);
        int placed = 0;
        while (placed < 30) {
            const int x = static_cast<int>(rng.next_below(40));
            const int y = static_cast<int>(rng.next_below(30));
            // isolated pixels only, away from the road block
            if (y >= 8 && y <= 29 && x >= 4) continue;
            bool clear = true;
            for (int dy = -1; dy <= 1 && clear; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if (nx >= 0 && nx < 40 && ny >= 0 && ny < 30 && noisy.at(nx, ny)) {
                        clear = false;
                        break;
                    }
                }
            if (!clear) continue;
            noisy.set(x, y, true);
            ++placed;
        }
        CHECK(refine(noisy, cfg) == road);
    }
    SUBCASE("small interior holes get sealed") {
        BinaryMask m(20, 20);
        for (int y = 4; y < 16; ++y)
            for (int x = 4; x < 16; ++x) m.set(x, y, true);
        BinaryMask holey = m;
        holey.set(8, 8, false);
        holey.set(12, 10, false);
        CHECK(refine(holey, cfg) == m);
    }
    SUBCASE("keep_largest leaves a single component") {
        Rng rng(37);
        for (int trial = 0; trial < 20; ++trial) {
            const BinaryMask m = oracles::random_mask(rng, 24, 24, 0.45);
            const BinaryMask out = refine(m, cfg);
            if (!out.empty_mask())
                CHECK(oracles::bfs_components(out, cfg.se).size() == 1);
        }
    }
}
