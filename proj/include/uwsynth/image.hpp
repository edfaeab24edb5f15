#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "uwsynth/errors.hpp"

namespace uwsynth {

/// 8-bit three-channel raster, row-major interleaved RGB. The universal
/// currency of the pipeline: decoders produce it, every transform and metric
/// consumes it.
struct ImageRgb8 {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels; // size == 3 * height * width

    ImageRgb8() = default;
    ImageRgb8(int h, int w)
        : height(h), width(w), pixels(static_cast<std::size_t>(3) * h * w, 0) {
        if (h < 1 || w < 1)
            throw ValidationError("image dimensions must be >= 1, got " +
                                  std::to_string(h) + "x" + std::to_string(w));
    }

    static ImageRgb8 filled(int h, int w, std::array<std::uint8_t, 3> rgb) {
        ImageRgb8 img(h, w);
        for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
            img.pixels[i] = rgb[0];
            img.pixels[i + 1] = rgb[1];
            img.pixels[i + 2] = rgb[2];
        }
        return img;
    }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height) * width;
    }

    std::uint8_t* px(int y, int x) {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    const std::uint8_t* px(int y, int x) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }

    bool operator==(const ImageRgb8&) const = default;
};

inline void require_valid(const ImageRgb8& img) {
    if (img.height < 1 || img.width < 1)
        throw ValidationError("image dimensions must be >= 1, got " +
                              std::to_string(img.height) + "x" +
                              std::to_string(img.width));
    if (img.pixels.size() != 3 * img.pixel_count())
        throw ValidationError("pixel buffer size " +
                              std::to_string(img.pixels.size()) +
                              " does not match 3*" +
                              std::to_string(img.pixel_count()));
}

inline void require_same_shape(const ImageRgb8& a, const ImageRgb8& b,
                               const char* what) {
    if (a.height != b.height || a.width != b.width)
        throw ValidationError(std::string(what) + ": shape mismatch, " +
                              std::to_string(a.height) + "x" +
                              std::to_string(a.width) + " vs " +
                              std::to_string(b.height) + "x" +
                              std::to_string(b.width));
}

} // namespace uwsynth
