#pragma once

#include <span>
#include <vector>

#include "uwsynth/color_space.hpp"
#include "uwsynth/image.hpp"

namespace uwsynth {

// UCIQE component weights.
inline constexpr double kUciqeChromaWeight = 0.4680;
inline constexpr double kUciqeContrastWeight = 0.2745;
inline constexpr double kUciqeSaturationWeight = 0.2576;

// PSNR reported for a zero-MSE pair. Finite so reports stay sortable.
inline constexpr double kPsnrCapDb = 99.0;

/// UCIQE decomposition. total is always the weighted sum of the three
/// components as stored, bit-exactly.
struct UciqeScore {
    double sigma_c = 0.0; // normalized chroma standard deviation
    double conl = 0.0;    // normalized luminance contrast, in [0, 1]
    double mu_s = 0.0;    // mean saturation, in [0, 1]
    double total = 0.0;

    static double combine(double sigma_c, double conl, double mu_s) {
        return kUciqeChromaWeight * sigma_c + kUciqeContrastWeight * conl +
               kUciqeSaturationWeight * mu_s;
    }
    static UciqeScore from_components(double sigma_c, double conl, double mu_s) {
        return {sigma_c, conl, mu_s, combine(sigma_c, conl, mu_s)};
    }
};

struct FullRefScore {
    double psnr_db = 0.0;
    double ssim = 0.0;
};

/// Per-pixel chroma C = sqrt(a^2 + b^2), then the population (1/N) standard
/// deviation of C, divided by 100 to land in the reported score range.
/// Reductions use order-free multiset sums (fixed-point integer
/// accumulation), so the result depends only on the pixel multiset: spatial
/// rearrangements and scheduling cannot change a single bit. Degenerate
/// inputs (<= 1 pixel) return 0.
double chroma_std(const LabPlanes& lab);

/// (P99(L) - P1(L)) / 100 with percentiles linearly interpolated between
/// closest ranks. Always in [0, 1]; 0 for constant or single-pixel planes.
double luminance_contrast(const LabPlanes& lab);

/// Arithmetic mean of the S plane via the same order-free multiset sum as
/// chroma_std.
double mean_saturation(const HsvPlanes& hsv);

/// Full UCIQE: Lab and HSV conversions, the three components, and the
/// weighted sum.
UciqeScore uciqe(const ImageRgb8& image);

/// Linear-interpolation percentile of `values`, p in [0, 100]. Reorders the
/// buffer (selection, not full sort); the value returned is identical to
/// indexing a fully sorted copy.
double percentile_linear(std::vector<double>& values, double p);

/// 10 * log10(255^2 / MSE) with MSE over all three channels.
/// Identical images return kPsnrCapDb. Throws ValidationError on shape
/// mismatch.
double psnr(const ImageRgb8& reference, const ImageRgb8& test);

/// Mean local SSIM on the luma plane (0.299 R + 0.587 G + 0.114 B) with an
/// 8x8 sliding window at stride 1, stabilizers C1 = (0.01*255)^2 and
/// C2 = (0.03*255)^2, population window statistics. Symmetric in its
/// arguments. Requires identical shapes and both sides >= 8x8.
double ssim(const ImageRgb8& reference, const ImageRgb8& test);

FullRefScore full_reference(const ImageRgb8& reference, const ImageRgb8& test);

} // namespace uwsynth
