#pragma once

#include <vector>

#include "uwsynth/image.hpp"

namespace uwsynth {

/// CIELab planes in native CIE units: L in [0, 100], a/b unbounded opponent
/// axes (no clamping anywhere in the chain).
struct LabPlanes {
    int height = 0;
    int width = 0;
    std::vector<double> L, a, b;
};

/// Hexcone HSV planes: H in degrees [0, 360), S and V in [0, 1].
/// S == 0 wherever V == 0 (achromatic convention).
struct HsvPlanes {
    int height = 0;
    int width = 0;
    std::vector<double> h, s, v;
};

/// sRGB -> inverse gamma -> XYZ (D65, 2 degree observer) -> CIELab, double
/// precision throughout. The white point is the matrix row sums, so the gray
/// axis lands exactly on (L, 0, 0) and white on L == 100.
LabPlanes srgb_to_lab(const ImageRgb8& image);

/// Scalar form of the same chain, one pixel at a time.
void srgb_to_lab_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                       double& L_out, double& a_out, double& b_out);

/// Standard hexcone HSV: V = max/255, S = (max-min)/max with S = 0 when
/// max = 0, H in degrees from the dominant-channel sector.
HsvPlanes srgb_to_hsv(const ImageRgb8& image);

void srgb_to_hsv_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                       double& h_out, double& s_out, double& v_out);

} // namespace uwsynth
