#pragma once

#include <filesystem>

#include "uwsynth/image.hpp"

namespace uwsynth {

/// Decodes a PNG or binary PPM (P6) file into 8-bit RGB. PNG inputs of any
/// color type are expanded/stripped to RGB8. Throws IoError on missing or
/// undecodable files.
ImageRgb8 read_image(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Output bytes are deterministic for a given image.
void write_png(const ImageRgb8& image, const std::filesystem::path& path);

void write_ppm(const ImageRgb8& image, const std::filesystem::path& path);

/// Files the pipeline will attempt to decode (.png/.ppm, case-insensitive).
bool has_image_extension(const std::filesystem::path& path);

/// Bilinear resize (used for the optional 256x256 ingestion resize).
ImageRgb8 resize_bilinear(const ImageRgb8& image, int out_height, int out_width);

} // namespace uwsynth
