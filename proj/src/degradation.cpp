#include "uwsynth/degradation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "num_format.hpp"
#include "uwsynth/errors.hpp"
#include "uwsynth/image_io.hpp"

namespace uwsynth {

namespace {

constexpr std::array<std::string_view, 6> kSlugs = {
    "blue", "low-light", "deep-blue", "deep-green", "green", "blurry"};
constexpr std::array<std::string_view, 6> kDisplayNames = {
    "Blue", "Low-Light", "Deep Blue", "Deep Green", "Green", "Blurry"};

std::string fold(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        if (c == '-' || c == '_' || c == ' ')
            continue;
        out.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

using detail::fmt_double;

std::string canonical_text(const DegradationSpec& s) {
    std::ostringstream os;
    os << type_slug(s.dtype) << ";beta=" << fmt_double(s.beta[0]) << ','
       << fmt_double(s.beta[1]) << ',' << fmt_double(s.beta[2])
       << ";background=" << int(s.background[0]) << ',' << int(s.background[1])
       << ',' << int(s.background[2]) << ";depth=" << fmt_double(s.depth)
       << ";gamma=" << fmt_double(s.gamma) << ";gain=" << fmt_double(s.gain)
       << ";blur_sigma=" << fmt_double(s.blur_sigma) << ";seed=" << s.seed;
    return os.str();
}

std::uint8_t to_byte(double v) {
    v = std::clamp(v, 0.0, 255.0);
    // Round half to even so cross-implementations agree on .5 boundaries.
    return static_cast<std::uint8_t>(std::nearbyint(v));
}

// Half-sample symmetric reflection: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0)
            i = -i - 1;
        if (i >= n)
            i = 2 * n - 1 - i;
    }
    return i;
}

void gaussian_blur_inplace(std::vector<double>& data, int height, int width,
                           double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    if (radius < 1)
        return;
    std::vector<double> kernel(static_cast<std::size_t>(radius) + 1);
    double norm = 0.0;
    for (int i = 0; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i)] =
            std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        norm += (i == 0 ? 1.0 : 2.0) * kernel[static_cast<std::size_t>(i)];
    }
    for (auto& k : kernel)
        k /= norm;

    std::vector<double> tmp(data.size());
    // Horizontal pass.
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < height; ++y) {
            const std::size_t row =
                (static_cast<std::size_t>(y) * width) * 3 + c;
            for (int x = 0; x < width; ++x) {
                double acc = kernel[0] * data[row + 3 * static_cast<std::size_t>(x)];
                for (int i = 1; i <= radius; ++i) {
                    const int xl = reflect_index(x - i, width);
                    const int xr = reflect_index(x + i, width);
                    acc += kernel[static_cast<std::size_t>(i)] *
                           (data[row + 3 * static_cast<std::size_t>(xl)] +
                            data[row + 3 * static_cast<std::size_t>(xr)]);
                }
                tmp[row + 3 * static_cast<std::size_t>(x)] = acc;
            }
        }
    }
    // Vertical pass.
    const std::size_t rowstride = static_cast<std::size_t>(width) * 3;
    for (int c = 0; c < 3; ++c) {
        for (int x = 0; x < width; ++x) {
            const std::size_t col = 3 * static_cast<std::size_t>(x) + c;
            for (int y = 0; y < height; ++y) {
                double acc = kernel[0] *
                             tmp[static_cast<std::size_t>(y) * rowstride + col];
                for (int i = 1; i <= radius; ++i) {
                    const int yt = reflect_index(y - i, height);
                    const int yb = reflect_index(y + i, height);
                    acc += kernel[static_cast<std::size_t>(i)] *
                           (tmp[static_cast<std::size_t>(yt) * rowstride + col] +
                            tmp[static_cast<std::size_t>(yb) * rowstride + col]);
                }
                data[static_cast<std::size_t>(y) * rowstride + col] = acc;
            }
        }
    }
}

} // namespace

std::string_view type_slug(DegradationType t) {
    return kSlugs[static_cast<std::size_t>(t)];
}

std::string_view type_display_name(DegradationType t) {
    return kDisplayNames[static_cast<std::size_t>(t)];
}

std::optional<DegradationType> parse_degradation_type(std::string_view name) {
    const std::string key = fold(name);
    for (DegradationType t : kAllDegradationTypes)
        if (key == fold(type_slug(t)))
            return t;
    return std::nullopt;
}

void validate(const DegradationSpec& spec) {
    for (double b : spec.beta)
        if (!(b >= 0.0))
            throw ValidationError("degradation spec: beta must be >= 0");
    if (!(spec.depth >= 0.0))
        throw ValidationError("degradation spec: depth must be >= 0");
    if (!(spec.gamma > 0.0))
        throw ValidationError("degradation spec: gamma must be > 0");
    if (!(spec.gain > 0.0) || spec.gain > 1.0)
        throw ValidationError("degradation spec: gain must be in (0, 1]");
    if (!(spec.blur_sigma >= 0.0))
        throw ValidationError("degradation spec: blur_sigma must be >= 0");
}

std::string spec_digest(const DegradationSpec& spec) {
    return hex16(fnv1a64(canonical_text(spec)));
}

DegradationSpec default_spec(DegradationType t) {
    // Curated constants, tuned by eye. 'Deep' variants share the attenuation
    // ordering of their base cast and differ by depth.
    DegradationSpec s;
    s.dtype = t;
    switch (t) {
    case DegradationType::Blue:
        s.beta = {0.90, 0.30, 0.05};
        s.background = {10, 60, 120};
        s.depth = 1.0;
        break;
    case DegradationType::DeepBlue:
        s.beta = {0.90, 0.30, 0.05};
        s.background = {5, 30, 90};
        s.depth = 2.2;
        break;
    case DegradationType::Green:
        s.beta = {0.80, 0.12, 0.45};
        s.background = {15, 110, 70};
        s.depth = 1.0;
        break;
    case DegradationType::DeepGreen:
        s.beta = {0.80, 0.12, 0.45};
        s.background = {8, 70, 45};
        s.depth = 2.2;
        break;
    case DegradationType::LowLight:
        s.beta = {0.35, 0.15, 0.08};
        s.background = {8, 25, 40};
        s.depth = 0.6;
        s.gamma = 1.8;
        s.gain = 0.75;
        break;
    case DegradationType::Blurry:
        s.beta = {0.10, 0.05, 0.03};
        s.background = {20, 70, 100};
        s.depth = 0.8;
        s.blur_sigma = 2.5;
        break;
    }
    return s;
}

ImageRgb8 apply_degradation(const ImageRgb8& image, const DegradationSpec& spec) {
    require_valid(image);
    validate(spec);

    const std::size_t count = image.pixels.size();
    std::vector<double> buf(count);

    // Beer-Lambert veiling mix; T == 1 leaves the channel untouched exactly.
    const std::array<double, 3> transmission = {
        std::exp(-spec.beta[0] * spec.depth),
        std::exp(-spec.beta[1] * spec.depth),
        std::exp(-spec.beta[2] * spec.depth)};
    for (std::size_t i = 0; i < count; ++i) {
        const int c = static_cast<int>(i % 3);
        buf[i] = image.pixels[i] * transmission[static_cast<std::size_t>(c)] +
                 spec.background[static_cast<std::size_t>(c)] *
                     (1.0 - transmission[static_cast<std::size_t>(c)]);
    }

    if (spec.gamma != 1.0 || spec.gain != 1.0) {
        for (auto& v : buf) {
            const double u = std::clamp(v / 255.0, 0.0, 1.0);
            v = spec.gain * 255.0 *
                (spec.gamma == 1.0 ? u : std::pow(u, spec.gamma));
        }
    }

    if (spec.blur_sigma > 0.0)
        gaussian_blur_inplace(buf, image.height, image.width, spec.blur_sigma);

    ImageRgb8 out(image.height, image.width);
    for (std::size_t i = 0; i < count; ++i)
        out.pixels[i] = to_byte(buf[i]);
    return out;
}

PresetTable PresetTable::builtin() {
    PresetTable table;
    for (DegradationType t : kAllDegradationTypes)
        table.spec(t) = default_spec(t);
    return table;
}

PresetTable PresetTable::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw IoError(file.string() + ": cannot open preset file");
    PresetTable table = builtin();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return std::string();
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        line = strip(line);
        if (line.empty())
            continue;
        const auto at = [&](const std::string& what) {
            return file.string() + ":" + std::to_string(lineno) + ": " + what;
        };
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(at("expected 'type.key = value'"));
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        const auto dot = key.find('.');
        if (dot == std::string::npos)
            throw ValidationError(at("expected 'type.key'"));
        const auto dtype = parse_degradation_type(key.substr(0, dot));
        if (!dtype)
            throw ValidationError(at("unknown degradation type '" +
                                     key.substr(0, dot) + "'"));
        DegradationSpec& spec = table.spec(*dtype);
        const std::string field = key.substr(dot + 1);
        std::istringstream vs(value);
        auto need = [&](auto& target) {
            if (!(vs >> target))
                throw ValidationError(at("bad value '" + value + "'"));
        };
        if (field == "beta") {
            need(spec.beta[0]);
            need(spec.beta[1]);
            need(spec.beta[2]);
        } else if (field == "background") {
            int r, g, b;
            need(r);
            need(g);
            need(b);
            if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
                throw ValidationError(at("background bytes must be 0..255"));
            spec.background = {static_cast<std::uint8_t>(r),
                               static_cast<std::uint8_t>(g),
                               static_cast<std::uint8_t>(b)};
        } else if (field == "depth") {
            need(spec.depth);
        } else if (field == "gamma") {
            need(spec.gamma);
        } else if (field == "gain") {
            need(spec.gain);
        } else if (field == "blur_sigma") {
            need(spec.blur_sigma);
        } else if (field == "seed") {
            need(spec.seed);
        } else {
            throw ValidationError(at("unknown key '" + field + "'"));
        }
        std::string extra;
        if (vs >> extra)
            throw ValidationError(at("trailing content '" + extra + "'"));
    }
    for (DegradationType t : kAllDegradationTypes)
        validate(table.spec(t));
    return table;
}

std::string PresetTable::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& spec : specs_)
        h = fnv1a64(canonical_text(spec), h);
    return hex16(h);
}

PresetTable resolve_presets(const std::string& preset_arg) {
    if (preset_arg.empty() || preset_arg == "default")
        return PresetTable::builtin();
    namespace fs = std::filesystem;
    if (fs::exists(preset_arg))
        return PresetTable::load(preset_arg);
    if (const char* env = std::getenv("UWSYNTH_PRESETS")) {
        std::string dirs(env);
        std::size_t start = 0;
        while (start <= dirs.size()) {
            const auto colon = dirs.find(':', start);
            const std::string dir =
                dirs.substr(start, colon == std::string::npos ? std::string::npos
                                                              : colon - start);
            if (!dir.empty()) {
                const fs::path candidate = fs::path(dir) / preset_arg;
                if (fs::exists(candidate))
                    return PresetTable::load(candidate);
            }
            if (colon == std::string::npos)
                break;
            start = colon + 1;
        }
    }
    throw IoError("preset file not found: " + preset_arg +
                  " (searched UWSYNTH_PRESETS)");
}

namespace {

class ParametricBackend final : public DegradationBackend {
public:
    explicit ParametricBackend(PresetTable presets)
        : presets_(std::move(presets)),
          descriptor_("parametric:" + presets_.digest()) {}

    ImageRgb8 apply(const ImageRgb8& image, DegradationType dtype,
                    const std::string&) const override {
        return apply_degradation(image, presets_.spec(dtype));
    }
    std::string descriptor() const override { return descriptor_; }
    std::optional<DegradationSpec> spec_for(DegradationType t) const override {
        return presets_.spec(t);
    }

private:
    PresetTable presets_;
    std::string descriptor_;
};

class DirectoryBackend final : public DegradationBackend {
public:
    explicit DirectoryBackend(std::filesystem::path root)
        : root_(std::move(root)) {
        if (!std::filesystem::is_directory(root_))
            throw IoError(root_.string() + ": not a directory");
    }

    ImageRgb8 apply(const ImageRgb8& image, DegradationType dtype,
                    const std::string& source_name) const override {
        const std::filesystem::path candidate =
            root_ / std::string(type_slug(dtype)) / source_name;
        if (!std::filesystem::exists(candidate))
            throw IoError("directory backend: no degraded image at " +
                          candidate.string());
        ImageRgb8 degraded = read_image(candidate);
        require_same_shape(image, degraded, "directory backend");
        return degraded;
    }
    std::string descriptor() const override {
        return "dir:" + root_.generic_string();
    }

private:
    std::filesystem::path root_;
};

} // namespace

std::unique_ptr<DegradationBackend> parametric_backend(PresetTable presets) {
    return std::make_unique<ParametricBackend>(std::move(presets));
}

std::unique_ptr<DegradationBackend> directory_backend(std::filesystem::path root) {
    return std::make_unique<DirectoryBackend>(std::move(root));
}

} // namespace uwsynth
