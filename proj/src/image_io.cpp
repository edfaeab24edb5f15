#include "uwsynth/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <png.h>

#include "uwsynth/errors.hpp"

namespace uwsynth {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    throw IoError(std::string("png: ") + msg);
}
void png_warn_fn(png_structp, png_const_charp) {}

ImageRgb8 read_png_file(const std::filesystem::path& path, std::FILE* f) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             png_error_fn, png_warn_fn);
    if (!png)
        throw IoError("png: failed to allocate read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: failed to allocate info struct");
    }

    ImageRgb8 out;
    try {
        png_init_io(png, f);
        png_read_info(png, info);

        // Normalize every PNG layout to 8-bit RGB.
        png_set_palette_to_rgb(png);
        png_set_expand_gray_1_2_4_to_8(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS))
            png_set_tRNS_to_alpha(png);
        png_set_strip_16(png);
        png_set_strip_alpha(png);
        png_set_gray_to_rgb(png);
        png_read_update_info(png, info);

        const png_uint_32 w = png_get_image_width(png, info);
        const png_uint_32 h = png_get_image_height(png, info);
        if (w == 0 || h == 0 || png_get_channels(png, info) != 3)
            throw IoError(path.string() + ": unsupported png layout");

        out = ImageRgb8(static_cast<int>(h), static_cast<int>(w));
        std::vector<png_bytep> rows(h);
        for (png_uint_32 y = 0; y < h; ++y)
            rows[y] = out.pixels.data() + static_cast<std::size_t>(3) * w * y;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

ImageRgb8 read_ppm_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string() + ": cannot open");
    auto next_token = [&in, &path]() {
        std::string tok;
        char c;
        while (in.get(c)) {
            if (c == '#') { // comment runs to end of line
                while (in.get(c) && c != '\n') {
                }
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!tok.empty())
                    return tok;
                continue;
            }
            tok.push_back(c);
        }
        if (tok.empty())
            throw IoError(path.string() + ": truncated ppm header");
        return tok;
    };
    if (next_token() != "P6")
        throw IoError(path.string() + ": not a P6 ppm");
    const long w = std::stol(next_token());
    const long h = std::stol(next_token());
    const long maxval = std::stol(next_token());
    if (w < 1 || h < 1 || maxval != 255)
        throw IoError(path.string() + ": unsupported ppm header");
    ImageRgb8 out(static_cast<int>(h), static_cast<int>(w));
    in.read(reinterpret_cast<char*>(out.pixels.data()),
            static_cast<std::streamsize>(out.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(out.pixels.size()))
        throw IoError(path.string() + ": truncated ppm payload");
    return out;
}

} // namespace

ImageRgb8 read_image(const std::filesystem::path& path) {
    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f)
        throw IoError(path.string() + ": cannot open");
    unsigned char magic[8] = {};
    const std::size_t got = std::fread(magic, 1, sizeof magic, f.get());
    if (got >= 8 && png_sig_cmp(magic, 0, 8) == 0) {
        std::rewind(f.get());
        return read_png_file(path, f.get());
    }
    if (got >= 2 && magic[0] == 'P' && magic[1] == '6') {
        f.reset();
        return read_ppm_file(path);
    }
    throw IoError(path.string() + ": not a png or ppm file");
}

void write_png(const ImageRgb8& image, const std::filesystem::path& path) {
    require_valid(image);
    FilePtr f(std::fopen(path.string().c_str(), "wb"));
    if (!f)
        throw IoError(path.string() + ": cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              png_error_fn, png_warn_fn);
    if (!png)
        throw IoError("png: failed to allocate write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: failed to allocate info struct");
    }
    try {
        png_init_io(png, f.get());
        png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                     static_cast<png_uint_32>(image.height), 8,
                     PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                     PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        std::vector<png_const_bytep> rows(image.height);
        for (int y = 0; y < image.height; ++y)
            rows[y] = image.pixels.data() +
                      static_cast<std::size_t>(3) * image.width * y;
        png_write_rows(png, const_cast<png_bytepp>(rows.data()),
                       static_cast<png_uint_32>(rows.size()));
        png_write_end(png, info);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

void write_ppm(const ImageRgb8& image, const std::filesystem::path& path) {
    require_valid(image);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(path.string() + ": cannot open for writing");
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out)
        throw IoError(path.string() + ": write failed");
}

bool has_image_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".ppm";
}

ImageRgb8 resize_bilinear(const ImageRgb8& image, int out_height,
                          int out_width) {
    require_valid(image);
    if (out_height < 1 || out_width < 1)
        throw ValidationError("resize target must be >= 1x1");
    if (out_height == image.height && out_width == image.width)
        return image;
    ImageRgb8 out(out_height, out_width);
    const double sy = static_cast<double>(image.height) / out_height;
    const double sx = static_cast<double>(image.width) / out_width;
    for (int y = 0; y < out_height; ++y) {
        // Half-pixel centers, clamped to the source extent.
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(image.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, image.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_width; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(image.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, image.width - 1);
            const double wx = fx - x0;
            const std::uint8_t* p00 = image.px(y0, x0);
            const std::uint8_t* p01 = image.px(y0, x1);
            const std::uint8_t* p10 = image.px(y1, x0);
            const std::uint8_t* p11 = image.px(y1, x1);
            std::uint8_t* dst = out.px(y, x);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] + wx * (p01[c] - p00[c]);
                const double bot = p10[c] + wx * (p11[c] - p10[c]);
                const double v = top + wy * (bot - top);
                dst[c] = static_cast<std::uint8_t>(std::lround(v));
            }
        }
    }
    return out;
}

} // namespace uwsynth
