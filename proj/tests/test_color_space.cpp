#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_helpers.hpp"
#include "uwsynth/color_space.hpp"

using namespace uwsynth;

TEST_CASE("black maps to the Lab origin") {
    const auto lab = srgb_to_lab(ImageRgb8::filled(2, 2, {0, 0, 0}));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(lab.L[i] == 0.0);
        CHECK(lab.a[i] == 0.0);
        CHECK(lab.b[i] == 0.0);
    }
}

TEST_CASE("white maps to neutral L = 100") {
    const auto lab = srgb_to_lab(ImageRgb8::filled(1, 1, {255, 255, 255}));
    CHECK(std::fabs(lab.L[0] - 100.0) < 1e-3);
    CHECK(std::fabs(lab.a[0]) < 1e-2);
    CHECK(std::fabs(lab.b[0]) < 1e-2);
    CHECK(lab.L[0] <= 100.0 + 1e-6); // stays inside the nominal range
}

TEST_CASE("pure red matches the scalar reference chain") {
    double L, a, b;
    srgb_to_lab_pixel(255, 0, 0, L, a, b);
    // Frozen from the reference formulas evaluated independently.
    CHECK(std::fabs(L - 53.2371) < 5e-4);
    CHECK(std::fabs(a - 80.0901) < 5e-4);
    CHECK(std::fabs(b - 67.2033) < 5e-4);
    CHECK(std::fabs(L - 53.24) < 0.05);
    CHECK(std::fabs(a - 80.09) < 0.05);
    CHECK(std::fabs(b - 67.20) < 0.05);
}

TEST_CASE("image path agrees with the independent scalar oracle") {
    const auto img = oracle::random_image(16, 16, 101);
    const auto lab = srgb_to_lab(img);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const std::uint8_t* p = img.pixels.data() + 3 * i;
        double L, a, b;
        oracle::srgb_to_lab(p[0], p[1], p[2], L, a, b);
        CHECK(std::fabs(lab.L[i] - L) < 1e-7);
        CHECK(std::fabs(lab.a[i] - a) < 1e-7);
        CHECK(std::fabs(lab.b[i] - b) < 1e-7);
    }
}

TEST_CASE("gray pixels are achromatic in HSV") {
    for (int v : {0, 1, 77, 128, 254, 255}) {
        double h, s, val;
        srgb_to_hsv_pixel(static_cast<std::uint8_t>(v),
                          static_cast<std::uint8_t>(v),
                          static_cast<std::uint8_t>(v), h, s, val);
        CHECK(s == 0.0);
        CHECK(val == doctest::Approx(v / 255.0));
    }
}

TEST_CASE("hexcone values for known pixels") {
    double h, s, v;
    srgb_to_hsv_pixel(255, 0, 0, h, s, v);
    CHECK(h == 0.0);
    CHECK(s == 1.0);
    CHECK(v == 1.0);

    srgb_to_hsv_pixel(128, 64, 32, h, s, v);
    CHECK(s == doctest::Approx(0.75).epsilon(1e-12)); // (128-32)/128
    CHECK(v == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    CHECK(h == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("S is zero wherever V is zero") {
    const auto img = oracle::random_image(8, 8, 7);
    auto dark = img;
    for (std::size_t i = 0; i < 16; ++i)
        dark.pixels[3 * i] = dark.pixels[3 * i + 1] = dark.pixels[3 * i + 2] = 0;
    const auto hsv = srgb_to_hsv(dark);
    for (std::size_t i = 0; i < dark.pixel_count(); ++i) {
        CHECK(hsv.s[i] >= 0.0);
        CHECK(hsv.s[i] <= 1.0);
        CHECK(hsv.v[i] >= 0.0);
        CHECK(hsv.v[i] <= 1.0);
        if (hsv.v[i] == 0.0)
            CHECK(hsv.s[i] == 0.0);
    }
}

TEST_CASE("conversions are pixel-local: shuffling pixels permutes planes") {
    const auto img = oracle::random_image(12, 12, 33);
    std::vector<std::size_t> perm(img.pixel_count());
    for (std::size_t i = 0; i < perm.size(); ++i)
        perm[i] = i;
    std::mt19937_64 rng(5);
    std::shuffle(perm.begin(), perm.end(), rng);

    ImageRgb8 shuffled(img.height, img.width);
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (int c = 0; c < 3; ++c)
            shuffled.pixels[3 * i + c] = img.pixels[3 * perm[i] + c];

    const auto lab = srgb_to_lab(img);
    const auto lab_sh = srgb_to_lab(shuffled);
    const auto hsv = srgb_to_hsv(img);
    const auto hsv_sh = srgb_to_hsv(shuffled);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        CHECK(lab_sh.L[i] == lab.L[perm[i]]);
        CHECK(lab_sh.a[i] == lab.a[perm[i]]);
        CHECK(lab_sh.b[i] == lab.b[perm[i]]);
        CHECK(hsv_sh.s[i] == hsv.s[perm[i]]);
        CHECK(hsv_sh.v[i] == hsv.v[perm[i]]);
    }
}

TEST_CASE("HSV round-trips through the inverse hexcone exactly") {
    const auto img = oracle::random_image(32, 32, 99);
    const auto hsv = srgb_to_hsv(img);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        std::uint8_t r, g, b;
        oracle::hsv_to_rgb(hsv.h[i], hsv.s[i], hsv.v[i], r, g, b);
        CHECK(r == img.pixels[3 * i]);
        CHECK(g == img.pixels[3 * i + 1]);
        CHECK(b == img.pixels[3 * i + 2]);
    }
}

TEST_CASE("L is strictly monotone along the gray axis") {
    double prev = -1.0;
    for (int v = 0; v < 256; ++v) {
        double L, a, b;
        srgb_to_lab_pixel(static_cast<std::uint8_t>(v),
                          static_cast<std::uint8_t>(v),
                          static_cast<std::uint8_t>(v), L, a, b);
        CHECK(L > prev);
        CHECK(L >= 0.0);
        CHECK(L <= 100.0 + 1e-6);
        prev = L;
    }
}

TEST_CASE("random byte triples map to finite Lab values") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 100000; ++i) {
        const std::uint64_t r = rng();
        double L, a, b;
        srgb_to_lab_pixel(static_cast<std::uint8_t>(r & 0xff),
                          static_cast<std::uint8_t>((r >> 8) & 0xff),
                          static_cast<std::uint8_t>((r >> 16) & 0xff), L, a, b);
        REQUIRE(std::isfinite(L));
        REQUIRE(std::isfinite(a));
        REQUIRE(std::isfinite(b));
        REQUIRE(L >= 0.0);
        REQUIRE(L <= 100.0 + 1e-6);
    }
}
