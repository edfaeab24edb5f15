#include "uwsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "uwsynth/errors.hpp"

namespace uwsynth {

namespace {

// Rec.601 luma, kept continuous (no rounding) for SSIM.
double luma(const std::uint8_t* px) {
    return 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
}

// Order-free reduction for the distribution statistics. Each value is scaled
// by an exact power of two, rounded once to an integer, and accumulated in a
// 128-bit counter: integer addition has no rounding, so the sum depends on
// the value multiset alone and pixel permutations cannot change a bit. The
// quantization error is bounded by 2^-frac_bits per element, far below the
// metric tolerances. Returns false (caller falls back to a sorted-order sum)
// when a value falls outside [0, limit), where limit = 2^(62 - frac_bits).
bool fixed_point_sum(const std::vector<double>& values, int frac_bits,
                     double& sum_out) {
    const double scale = std::ldexp(1.0, frac_bits);
    const double limit = std::ldexp(1.0, 62 - frac_bits);
    unsigned __int128 acc = 0;
    for (double v : values) {
        if (!(v >= 0.0) || v >= limit)
            return false;
        acc += static_cast<unsigned long long>(std::llrint(v * scale));
    }
    const double lo = static_cast<double>(static_cast<std::uint64_t>(acc));
    const double hi = static_cast<double>(static_cast<std::uint64_t>(acc >> 64));
    sum_out = (hi * 0x1p64 + lo) * std::ldexp(1.0, -frac_bits);
    return true;
}

// Sorted-order fallback: ascending accumulation is also a pure function of
// the multiset, just slower.
double sorted_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    return sum;
}

double multiset_sum(const std::vector<double>& values, int frac_bits) {
    double sum;
    if (fixed_point_sum(values, frac_bits, sum))
        return sum;
    return sorted_sum(values);
}

} // namespace

double chroma_std(const LabPlanes& lab) {
    const std::size_t n = lab.a.size();
    if (n <= 1)
        return 0.0;
    std::vector<double> chroma(n);
    bool all_equal = true;
    for (std::size_t i = 0; i < n; ++i) {
        chroma[i] = std::sqrt(lab.a[i] * lab.a[i] + lab.b[i] * lab.b[i]);
        all_equal = all_equal && chroma[i] == chroma[0];
    }
    if (all_equal)
        return 0.0; // zero variance, no rounding residue

    // Two-pass population std over multiset sums. Chroma from 8-bit images
    // stays under 2^9, so frac_bits = 52 keeps the first moment within the
    // fixed-point range; squared deviations stay under 2^18, hence 43.
    const double mean = multiset_sum(chroma, 52) / static_cast<double>(n);
    for (double& c : chroma) {
        const double d = c - mean;
        c = d * d;
    }
    const double ss = multiset_sum(chroma, 43);
    return std::sqrt(ss / static_cast<double>(n)) / 100.0;
}

double percentile_linear(std::vector<double>& values, double p) {
    if (values.empty())
        throw ValidationError("percentile of an empty sample");
    const std::size_t n = values.size();
    if (n == 1)
        return values[0];
    const double h = p / 100.0 * static_cast<double>(n - 1);
    const std::size_t k = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(k);
    auto kth = values.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(values.begin(), kth, values.end());
    const double lo = *kth;
    if (frac == 0.0 || k + 1 >= n)
        return lo;
    // The (k+1)-th order statistic is the minimum of the upper partition.
    const double hi = *std::min_element(kth + 1, values.end());
    return lo + frac * (hi - lo);
}

double luminance_contrast(const LabPlanes& lab) {
    if (lab.L.empty())
        return 0.0;
    std::vector<double> values = lab.L;
    const double p1 = percentile_linear(values, 1.0);
    const double p99 = percentile_linear(values, 99.0);
    return (p99 - p1) / 100.0;
}

double mean_saturation(const HsvPlanes& hsv) {
    if (hsv.s.empty())
        return 0.0;
    // S sits in [0, 1]; frac_bits = 61 gives 2^-61 granularity.
    return multiset_sum(hsv.s, 61) / static_cast<double>(hsv.s.size());
}

UciqeScore uciqe(const ImageRgb8& image) {
    const LabPlanes lab = srgb_to_lab(image);
    const HsvPlanes hsv = srgb_to_hsv(image);
    return UciqeScore::from_components(chroma_std(lab), luminance_contrast(lab),
                                       mean_saturation(hsv));
}

double psnr(const ImageRgb8& reference, const ImageRgb8& test) {
    require_same_shape(reference, test, "psnr");
    double se = 0.0;
    for (std::size_t i = 0; i < reference.pixels.size(); ++i) {
        const double d = static_cast<double>(reference.pixels[i]) -
                         static_cast<double>(test.pixels[i]);
        se += d * d;
    }
    const double mse = se / static_cast<double>(reference.pixels.size());
    if (mse == 0.0)
        return kPsnrCapDb;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const ImageRgb8& reference, const ImageRgb8& test) {
    require_same_shape(reference, test, "ssim");
    constexpr int kWin = 8;
    const int h = reference.height;
    const int w = reference.width;
    if (h < kWin || w < kWin)
        throw ValidationError("ssim requires images of at least 8x8, got " +
                              std::to_string(h) + "x" + std::to_string(w));

    constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

    // Integral images over luma, luma^2 and the cross product. The cross
    // terms are commutative, so the result is bitwise symmetric in
    // (reference, test).
    const std::size_t stride = static_cast<std::size_t>(w) + 1;
    std::vector<double> s1(stride * (h + 1), 0.0), s2(s1), s11(s1), s22(s1),
        s12(s1);
    for (int y = 0; y < h; ++y) {
        double r1 = 0.0, r2 = 0.0, r11 = 0.0, r22 = 0.0, r12 = 0.0;
        const std::size_t row = (static_cast<std::size_t>(y) + 1) * stride;
        const std::size_t prev = static_cast<std::size_t>(y) * stride;
        for (int x = 0; x < w; ++x) {
            const double a = luma(reference.px(y, x));
            const double b = luma(test.px(y, x));
            r1 += a;
            r2 += b;
            r11 += a * a;
            r22 += b * b;
            r12 += a * b;
            s1[row + x + 1] = s1[prev + x + 1] + r1;
            s2[row + x + 1] = s2[prev + x + 1] + r2;
            s11[row + x + 1] = s11[prev + x + 1] + r11;
            s22[row + x + 1] = s22[prev + x + 1] + r22;
            s12[row + x + 1] = s12[prev + x + 1] + r12;
        }
    }
    auto box = [stride](const std::vector<double>& s, int y, int x) {
        const std::size_t y0 = static_cast<std::size_t>(y);
        const std::size_t x0 = static_cast<std::size_t>(x);
        return s[(y0 + kWin) * stride + x0 + kWin] - s[y0 * stride + x0 + kWin] -
               s[(y0 + kWin) * stride + x0] + s[y0 * stride + x0];
    };

    constexpr double kInvN = 1.0 / (kWin * kWin);
    double acc = 0.0;
    for (int y = 0; y + kWin <= h; ++y) {
        for (int x = 0; x + kWin <= w; ++x) {
            const double mu1 = box(s1, y, x) * kInvN;
            const double mu2 = box(s2, y, x) * kInvN;
            const double var1 = box(s11, y, x) * kInvN - mu1 * mu1;
            const double var2 = box(s22, y, x) * kInvN - mu2 * mu2;
            const double cov = box(s12, y, x) * kInvN - mu1 * mu2;
            const double num = (2.0 * mu1 * mu2 + kC1) * (2.0 * cov + kC2);
            const double den =
                (mu1 * mu1 + mu2 * mu2 + kC1) * (var1 + var2 + kC2);
            acc += num / den;
        }
    }
    const std::size_t windows = static_cast<std::size_t>(h - kWin + 1) *
                                static_cast<std::size_t>(w - kWin + 1);
    return acc / static_cast<double>(windows);
}

FullRefScore full_reference(const ImageRgb8& reference, const ImageRgb8& test) {
    return {psnr(reference, test), ssim(reference, test)};
}

} // namespace uwsynth
