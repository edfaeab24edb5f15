#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "uwsynth/image.hpp"

namespace uwsynth {

/// The six underwater degradation styles a backend can produce.
enum class DegradationType : int {
    Blue = 0,
    LowLight = 1,
    DeepBlue = 2,
    DeepGreen = 3,
    Green = 4,
    Blurry = 5,
};

inline constexpr std::array<DegradationType, 6> kAllDegradationTypes = {
    DegradationType::Blue,     DegradationType::LowLight,
    DegradationType::DeepBlue, DegradationType::DeepGreen,
    DegradationType::Green,    DegradationType::Blurry,
};

/// Stable machine name used in manifests, directory layouts and CLI flags.
std::string_view type_slug(DegradationType t);
/// Human-facing name used in help text and reports.
std::string_view type_display_name(DegradationType t);
/// Accepts slugs case-insensitively, with '-', '_' or nothing between words
/// ("deep-blue", "DeepBlue", "deep_blue" all parse).
std::optional<DegradationType> parse_degradation_type(std::string_view name);

/// Parameters of the simplified image-formation model. Curated presets live
/// in default_spec(); every field has an identity value so a spec can disable
/// any stage.
struct DegradationSpec {
    DegradationType dtype = DegradationType::Blue;
    std::array<double, 3> beta = {0.0, 0.0, 0.0};       // attenuation, 1/depth unit
    std::array<std::uint8_t, 3> background = {0, 0, 0}; // veiling color
    double depth = 0.0;
    double gamma = 1.0;      // tone exponent, > 0
    double gain = 1.0;       // tone multiplier, in (0, 1]
    double blur_sigma = 0.0; // Gaussian std in pixels
    std::uint64_t seed = 0;  // reserved for optional noise, off by default

    bool operator==(const DegradationSpec&) const = default;
};

/// Throws ValidationError when a field is out of range.
void validate(const DegradationSpec& spec);

/// 16-hex-digit FNV-1a over the canonical text serialization of the spec.
std::string spec_digest(const DegradationSpec& spec);

/// Curated preset for one type. Values are hand-tuned constants, not derived
/// from any measurement; see presets/default.preset for the same numbers in
/// file form.
DegradationSpec default_spec(DegradationType t);

/// Applies the degradation pipeline: per-channel Beer-Lambert mix toward the
/// veiling color, I' = I*exp(-beta_c*depth) + B_c*(1 - exp(-beta_c*depth)),
/// then the tone curve gain*255*(I'/255)^gamma, then a Gaussian blur of std
/// blur_sigma (truncated at 3 sigma, reflected boundaries). All arithmetic in
/// double, rounded half-to-even into bytes at the end. A spec with identity
/// parameters is a bitwise no-op.
ImageRgb8 apply_degradation(const ImageRgb8& image, const DegradationSpec& spec);

/// One named parameter set per degradation type.
class PresetTable {
public:
    /// Built-in curated table (same values as default_spec).
    static PresetTable builtin();
    /// Parses the plain-text "type.key = value" preset format. Unspecified
    /// keys fall back to the built-in values for that type.
    static PresetTable load(const std::filesystem::path& file);

    const DegradationSpec& spec(DegradationType t) const {
        return specs_[static_cast<int>(t)];
    }
    DegradationSpec& spec(DegradationType t) {
        return specs_[static_cast<int>(t)];
    }
    /// Digest over all six specs; identifies the table in backend descriptors.
    std::string digest() const;

private:
    std::array<DegradationSpec, 6> specs_{};
};

/// Resolves a --preset argument: "default" gives the built-in table, anything
/// else is a file path, searched first as given and then under each directory
/// in the UWSYNTH_PRESETS environment variable (colon-separated).
PresetTable resolve_presets(const std::string& preset_arg);

/// A source of degraded images: either the parametric model or a directory of
/// pre-generated outputs. Implementations must be safe to share across
/// concurrent readers.
class DegradationBackend {
public:
    virtual ~DegradationBackend() = default;

    /// Produces the degraded counterpart of `image` in style `dtype`.
    /// `source_name` is the source file name (used by directory lookup).
    /// Output dimensions always equal input dimensions.
    virtual ImageRgb8 apply(const ImageRgb8& image, DegradationType dtype,
                            const std::string& source_name) const = 0;

    /// Provenance string recorded in manifests.
    virtual std::string descriptor() const = 0;

    /// The parametric spec behind `dtype`, when one exists.
    virtual std::optional<DegradationSpec> spec_for(DegradationType) const {
        return std::nullopt;
    }
};

std::unique_ptr<DegradationBackend> parametric_backend(PresetTable presets);

/// Backend over a directory tree root/<type-slug>/<source_name>; lookups are
/// read-only. A missing file raises IoError naming the expected path.
std::unique_ptr<DegradationBackend> directory_backend(std::filesystem::path root);

} // namespace uwsynth
