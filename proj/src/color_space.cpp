#include "uwsynth/color_space.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>

namespace uwsynth {

namespace {

// sRGB -> XYZ under D65 / 2 degree observer, derived from the IEC 61966-2-1
// primaries at full precision. The reference white is the row sums, so
// (255,255,255) maps to exactly (100, 0, 0).
constexpr double kRgbToXyz[3][3] = {
    {0.41239079926595934, 0.35758433938387796, 0.18048078840183429},
    {0.21263900587151027, 0.71516867876775600, 0.07219231536073371},
    {0.01933081871559182, 0.11919477979462598, 0.95053215224966070},
};
constexpr double kWhiteX =
    kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2];
constexpr double kWhiteY =
    kRgbToXyz[1][0] + kRgbToXyz[1][1] + kRgbToXyz[1][2];
constexpr double kWhiteZ =
    kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2];

constexpr double kWhiteXInv = 1.0 / kWhiteX;
constexpr double kWhiteYInv = 1.0 / kWhiteY;
constexpr double kWhiteZInv = 1.0 / kWhiteZ;

constexpr double kLabEpsilon = 216.0 / 24389.0; // (6/29)^3
constexpr double kLabKappa = 24389.0 / 27.0;    // (29/3)^3

double srgb_inverse_gamma(double u) {
    return u <= 0.04045 ? u / 12.92 : std::pow((u + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    return t > kLabEpsilon ? std::cbrt(t) : (kLabKappa * t + 16.0) / 116.0;
}

// Cube root tuned for the plane path: bit-pattern seed, then four
// division-free Newton steps on the reciprocal root. Agrees with std::cbrt
// (the scalar reference path) to ~1 ulp on the lab_f domain (0.0088, 1.06]
// at roughly a third of its cost.
double cbrt_newton(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    bits = 0x2A9F7893782DA1CEull + bits / 3;
    double seed;
    std::memcpy(&seed, &bits, sizeof seed);
    double r = 1.0 / seed; // reciprocal cube root estimate
    for (int i = 0; i < 4; ++i)
        r = r * (4.0 - x * (r * r * r)) * (1.0 / 3.0);
    return x * r * r;
}

double lab_f_fast(double t) {
    return t > kLabEpsilon ? cbrt_newton(t) : (kLabKappa * t + 16.0) / 116.0;
}

// The input domain is exactly the 256 byte values, so caching the linearized
// channel is equality, not approximation.
const std::array<double, 256>& linear_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i)
            t[i] = srgb_inverse_gamma(i / 255.0);
        return t;
    }();
    return table;
}

template <double (*LabF)(double)>
void lab_from_linear(double rl, double gl, double bl, double& L, double& a,
                     double& b) {
    const double x = kRgbToXyz[0][0] * rl + kRgbToXyz[0][1] * gl +
                     kRgbToXyz[0][2] * bl;
    const double y = kRgbToXyz[1][0] * rl + kRgbToXyz[1][1] * gl +
                     kRgbToXyz[1][2] * bl;
    const double z = kRgbToXyz[2][0] * rl + kRgbToXyz[2][1] * gl +
                     kRgbToXyz[2][2] * bl;
    const double fx = LabF(x * kWhiteXInv);
    const double fy = LabF(y * kWhiteYInv);
    const double fz = LabF(z * kWhiteZInv);
    L = 116.0 * fy - 16.0;
    a = 500.0 * (fx - fy);
    b = 200.0 * (fy - fz);
}

} // namespace

void srgb_to_lab_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                       double& L_out, double& a_out, double& b_out) {
    lab_from_linear<lab_f>(srgb_inverse_gamma(r / 255.0),
                           srgb_inverse_gamma(g / 255.0),
                           srgb_inverse_gamma(b / 255.0), L_out, a_out,
                           b_out);
}

LabPlanes srgb_to_lab(const ImageRgb8& image) {
    require_valid(image);
    const auto& lin = linear_table();
    const std::size_t n = image.pixel_count();
    LabPlanes out;
    out.height = image.height;
    out.width = image.width;
    out.L.resize(n);
    out.a.resize(n);
    out.b.resize(n);
    const std::uint8_t* p = image.pixels.data();
    for (std::size_t i = 0; i < n; ++i, p += 3)
        lab_from_linear<lab_f_fast>(lin[p[0]], lin[p[1]], lin[p[2]], out.L[i],
                                    out.a[i], out.b[i]);
    return out;
}

void srgb_to_hsv_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                       double& h_out, double& s_out, double& v_out) {
    const std::uint8_t mx = std::max({r, g, b});
    const std::uint8_t mn = std::min({r, g, b});
    v_out = mx / 255.0;
    if (mx == 0 || mx == mn) { // black or gray: achromatic
        s_out = 0.0;
        h_out = 0.0;
        return;
    }
    const double delta = mx - mn;
    s_out = delta / mx;
    double h;
    if (mx == r)
        h = 60.0 * ((g - b) / delta);
    else if (mx == g)
        h = 60.0 * ((b - r) / delta) + 120.0;
    else
        h = 60.0 * ((r - g) / delta) + 240.0;
    if (h < 0.0)
        h += 360.0;
    h_out = h;
}

HsvPlanes srgb_to_hsv(const ImageRgb8& image) {
    require_valid(image);
    const std::size_t n = image.pixel_count();
    HsvPlanes out;
    out.height = image.height;
    out.width = image.width;
    out.h.resize(n);
    out.s.resize(n);
    out.v.resize(n);
    const std::uint8_t* p = image.pixels.data();
    for (std::size_t i = 0; i < n; ++i, p += 3)
        srgb_to_hsv_pixel(p[0], p[1], p[2], out.h[i], out.s[i], out.v[i]);
    return out;
}

} // namespace uwsynth
