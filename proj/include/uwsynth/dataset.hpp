#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "uwsynth/degradation.hpp"
#include "uwsynth/image.hpp"

namespace uwsynth {

inline constexpr int kTileSize = 1024;
inline constexpr int kOutputSize = 256;
inline constexpr double kDefaultEntropyThresholdBits = 4.0;

/// A 256x256 source patch cut from a larger in-air image.
struct SourceTile {
    std::string origin_id; // identifier of the image the tile came from
    int tile_index = 0;    // row-major position in the tile grid
    ImageRgb8 image;       // exactly 256x256
    double entropy_bits = 0.0; // Shannon entropy of the gray histogram, [0, 8]
};

/// Cuts non-overlapping 1024x1024 tiles from the top-left grid (partial edge
/// tiles discarded) and box-downsamples each 4x to 256x256. Throws
/// ValidationError when the image is smaller than one tile.
std::vector<SourceTile> tile_and_downsample(const ImageRgb8& image,
                                            const std::string& origin_id);

/// Shannon entropy (bits) of the 256-bin histogram of the rounded Rec.601
/// luma plane.
double gray_entropy_bits(const ImageRgb8& image);

/// Keep a tile iff its entropy reaches the threshold. Filters out flat sky /
/// wall patches.
inline bool entropy_keep(const SourceTile& tile, double threshold_bits) {
    return tile.entropy_bits >= threshold_bits;
}

/// One (reference, degraded) pair in a manifest.
struct PairRecord {
    std::string source_path;   // as supplied by the caller
    std::string degraded_path; // relative to the dataset root
    DegradationType dtype = DegradationType::Blue;
    std::string backend_descriptor;
    std::string spec_digest; // parametric spec digest, or content hash for
                             // externally generated images

    bool operator==(const PairRecord&) const = default;
};

enum class SamplingMode {
    /// Walk the seeded permutation once; with enough sources each pair gets a
    /// distinct reference, otherwise the walk wraps and sources repeat across
    /// types (never within one type).
    Partition,
    /// Reuse the first n_total/6 permuted sources for every type.
    Shared,
};

std::string_view sampling_mode_name(SamplingMode m);
std::optional<SamplingMode> parse_sampling_mode(std::string_view name);

/// The paired dataset: record list plus the bookkeeping needed to audit it.
struct DatasetManifest {
    std::string name;
    std::uint64_t seed = 0;
    SamplingMode sampling = SamplingMode::Partition;
    bool balanced = false; // declared balanced: all six counts equal
    std::string backend_descriptor;
    std::vector<PairRecord> records; // sorted by (dtype, source_path)
    std::array<std::size_t, 6> per_type_counts{};
    std::size_t total = 0;

    bool operator==(const DatasetManifest&) const = default;
};

/// Fisher-Yates permutation of {0, ..., n-1} driven by std::mt19937_64 with
/// modulo-rejection bounded draws; identical on every platform for a given
/// seed.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct AssembleOptions {
    std::size_t n_total = 0;
    std::uint64_t seed = 0;
    SamplingMode sampling = SamplingMode::Partition;
    std::string name;
    int jobs = 0; // 0 = hardware default
};

/// Builds a balanced mixed-type dataset: N_i = n_total/6 pairs per type drawn
/// through the seeded shuffle, degraded via `backend`, images written under
/// out_dir/degraded/<type-slug>/. Throws ValidationError when n_total is not
/// divisible by 6 or sources are insufficient (< n_total/6).
DatasetManifest assemble_balanced(const std::vector<std::filesystem::path>& sources,
                                  const DegradationBackend& backend,
                                  const std::filesystem::path& out_dir,
                                  const AssembleOptions& options);

/// Single-type (ablation) variant: same selection rule and record ordering as
/// assemble_balanced, every record carrying `dtype`, so equal seeds yield the
/// same reference multiset as the mixed dataset. Requires sources >= n_total.
DatasetManifest assemble_single_type(const std::vector<std::filesystem::path>& sources,
                                     const DegradationBackend& backend,
                                     DegradationType dtype,
                                     const std::filesystem::path& out_dir,
                                     const AssembleOptions& options);

/// Manifest file I/O. The format is JSON lines: a header object carrying
/// name/seed/sampling/balance/counts, then one record object per line.
/// write(read(x)) is byte-identical to write(x).
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& file);
DatasetManifest read_manifest(const std::filesystem::path& file);

struct ManifestViolation {
    std::string kind; // "missing-source" | "missing-degraded" | "count" |
                      // "balance" | "digest" | "pairing"
    std::string message;
};

struct ManifestReport {
    std::vector<ManifestViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Structural audit: path existence (degraded paths resolved against
/// base_dir), count arithmetic, balance when declared, digest consistency per
/// type. With a parametric backend supplied, also re-derives each degraded
/// image from its source and compares bitwise. Violations are report entries,
/// never exceptions.
ManifestReport validate_manifest(const DatasetManifest& manifest,
                                 const std::filesystem::path& base_dir,
                                 const DegradationBackend* backend = nullptr);

std::string render_report(const ManifestReport& report);

} // namespace uwsynth
