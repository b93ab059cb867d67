#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shadowroad/color_space.hpp"
#include "shadowroad/image_io.hpp"
#include "shadowroad/rng.hpp"

using namespace shadowroad;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("shadowroad_test_" + name)).string();
}

}  // namespace

TEST_CASE("rgb_to_hsv known pixels") {
    SUBCASE("achromatic white") {
        const Hsv h = rgb_to_hsv(Rgb{1, 1, 1});
        CHECK(h.h == doctest::Approx(0.0));
        CHECK(h.s == doctest::Approx(0.0));
        CHECK(h.v == doctest::Approx(1.0));
    }
    SUBCASE("pure red") {
        const Hsv h = rgb_to_hsv(Rgb{1, 0, 0});
        CHECK(h.h == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(h.s == doctest::Approx(1.0));
        CHECK(h.v == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("pure blue lands at 240 via the B > G branch") {
        const Hsv h = rgb_to_hsv(Rgb{0, 0, 1});
        CHECK(h.h == doctest::Approx(240.0).epsilon(1e-12));
        CHECK(h.s == doctest::Approx(1.0));
        CHECK(h.v == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("black pixel uses the all-zero convention") {
        const Hsv h = rgb_to_hsv(Rgb{0, 0, 0});
        CHECK(h.h == 0.0);
        CHECK(h.s == 0.0);
        CHECK(h.v == 0.0);
    }
}

TEST_CASE("hsv_to_rgb known pixels") {
    SUBCASE("zero saturation forces gray") {
        const Rgb c = hsv_to_rgb(Hsv{0, 0, 0.5});
        CHECK(c.r == doctest::Approx(0.5));
        CHECK(c.g == doctest::Approx(0.5));
        CHECK(c.b == doctest::Approx(0.5));
    }
    SUBCASE("inverse of the pure-blue conversion") {
        const Rgb c = hsv_to_rgb(Hsv{240.0, 1.0, 1.0 / 3.0});
        CHECK(c.r == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(c.g == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(c.b == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("round trip on a generic pixel") {
        const Rgb p{0.2, 0.5, 0.7};
        const Rgb q = hsv_to_rgb(rgb_to_hsv(p));
        CHECK(std::fabs(q.r - p.r) <= 1e-9);
        CHECK(std::fabs(q.g - p.g) <= 1e-9);
        CHECK(std::fabs(q.b - p.b) <= 1e-9);
    }
}

TEST_CASE("hsv ranges and round trip over random pixels") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const Rgb p{rng.next_double(), rng.next_double(), rng.next_double()};
        const Hsv h = rgb_to_hsv(p);
        CHECK(h.s >= 0.0);
        CHECK(h.s <= 1.0);
        CHECK(h.v >= 0.0);
        CHECK(h.v <= 1.0);
        CHECK(h.h >= 0.0);
        CHECK(h.h < 360.0);
        if (h.s > 1e-9 && p.r + p.g + p.b > 1e-9) {
            const Rgb q = hsv_to_rgb(h);
            CHECK(std::fabs(q.r - p.r) <= 1e-9);
            CHECK(std::fabs(q.g - p.g) <= 1e-9);
            CHECK(std::fabs(q.b - p.b) <= 1e-9);
        }
    }
}

TEST_CASE("hue is invariant under uniform channel scaling") {
    Rng rng(12);
    for (int i = 0; i < 500; ++i) {
        const Rgb p{0.05 + 0.9 * rng.next_double(), 0.05 + 0.9 * rng.next_double(),
                    0.05 + 0.9 * rng.next_double()};
        const double k = 0.1 + rng.next_double();
        const Hsv a = rgb_to_hsv(p);
        const Hsv b = rgb_to_hsv(Rgb{k * p.r, k * p.g, k * p.b});
        CHECK(std::fabs(a.h - b.h) < 1e-6);
    }
}

TEST_CASE("8-bit round trip stays within one level") {
    Rng rng(13);
    for (int i = 0; i < 5000; ++i) {
        const int r = static_cast<int>(rng.next_below(256));
        const int g = static_cast<int>(rng.next_below(256));
        const int b = static_cast<int>(rng.next_below(256));
        const Rgb p{r / 255.0, g / 255.0, b / 255.0};
        const Rgb q = hsv_to_rgb(rgb_to_hsv(p));
        CHECK(std::abs(static_cast<int>(std::lround(q.r * 255)) - r) <= 1);
        CHECK(std::abs(static_cast<int>(std::lround(q.g * 255)) - g) <= 1);
        CHECK(std::abs(static_cast<int>(std::lround(q.b * 255)) - b) <= 1);
    }
}

TEST_CASE("image file round trips") {
    RgbImage img(2, 2);
    img.set(0, 0, Rgb{1 / 255.0, 2 / 255.0, 3 / 255.0});
    img.set(1, 0, Rgb{250 / 255.0, 128 / 255.0, 0.0});
    img.set(0, 1, Rgb{0.0, 1.0, 17 / 255.0});
    img.set(1, 1, Rgb{77 / 255.0, 78 / 255.0, 79 / 255.0});

    for (const char* ext : {".png", ".ppm"}) {
        const std::string path = temp_path(std::string("roundtrip") + ext);
        save_image(img, path);
        const RgbImage back = load_image(path);
        REQUIRE(back.width() == 2);
        REQUIRE(back.height() == 2);
        for (std::size_t i = 0; i < img.pixel_count() * 3; ++i)
            CHECK(back.data()[i] == doctest::Approx(img.data()[i]).epsilon(1e-12));
        std::filesystem::remove(path);
    }
}

TEST_CASE("mask files hold exactly 0 and 255") {
    BinaryMask m(3, 3, true);
    const std::string path = temp_path("mask.pgm");
    save_mask(m, path);

    std::ifstream f(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const std::string body = content.substr(content.size() - 9);
    for (char c : body) CHECK(static_cast<unsigned char>(c) == 255);

    const BinaryMask back = load_mask(path);
    CHECK(back == m);
    std::filesystem::remove(path);
}

TEST_CASE("io error cases") {
    SUBCASE("empty file is an unsupported format") {
        const std::string path = temp_path("empty.bin");
        std::ofstream(path).close();
        CHECK_THROWS_WITH_AS(load_image(path), doctest::Contains("unsupported format"), Error);
        std::filesystem::remove(path);
    }
    SUBCASE("missing file is unreadable") {
        CHECK_THROWS_WITH_AS(load_image(temp_path("does_not_exist.png")),
                             doctest::Contains("unreadable file"), Error);
    }
    SUBCASE("truncated ppm") {
        const std::string path = temp_path("trunc.ppm");
        std::ofstream f(path, std::ios::binary);
        f << "P6\n4 4\n255\nxx";
        f.close();
        CHECK_THROWS_WITH_AS(load_image(path), doctest::Contains("unsupported format"), Error);
        std::filesystem::remove(path);
    }
}

TEST_CASE("structuring element construction") {
    const auto sq = StructuringElement::square(3);
    CHECK(sq.offsets().size() == 9);
    const auto cr = StructuringElement::cross(3);
    CHECK(cr.offsets().size() == 5);
    CHECK(StructuringElement::parse("square:5").offsets().size() == 25);
    CHECK_THROWS_AS(StructuringElement::parse("disk:3"), Error);
    CHECK_THROWS_AS(StructuringElement::square(2), Error);
    CHECK_THROWS_AS(StructuringElement({{1, 1}}), Error);  // origin missing
}
