#include "uwsynth/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uwsynth/errors.hpp"
#include "uwsynth/image_io.hpp"
#include "uwsynth/parallel.hpp"

namespace uwsynth {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::uint8_t round_even(double v) {
    return static_cast<std::uint8_t>(
        std::nearbyint(std::clamp(v, 0.0, 255.0)));
}

std::uint64_t fnv1a64_bytes(const void* data, std::size_t len,
                            std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
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

std::string image_digest(const ImageRgb8& img) {
    const std::array<std::int64_t, 2> dims = {img.height, img.width};
    std::uint64_t h = fnv1a64_bytes(dims.data(), sizeof dims);
    return hex16(fnv1a64_bytes(img.pixels.data(), img.pixels.size(), h));
}

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection below the largest multiple of n keeps the draw unbiased and
    // identical on every conforming mt19937_64.
    const std::uint64_t rem =
        (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (rem == 0 || r < std::numeric_limits<std::uint64_t>::max() - rem + 1)
            return r % n;
    }
}

} // namespace

std::vector<SourceTile> tile_and_downsample(const ImageRgb8& image,
                                            const std::string& origin_id) {
    require_valid(image);
    if (image.height < kTileSize || image.width < kTileSize)
        throw ValidationError("image " + std::to_string(image.height) + "x" +
                              std::to_string(image.width) +
                              " is smaller than one " +
                              std::to_string(kTileSize) + "x" +
                              std::to_string(kTileSize) + " tile");
    const int tiles_y = image.height / kTileSize;
    const int tiles_x = image.width / kTileSize;
    constexpr int kFactor = kTileSize / kOutputSize; // 4x box downsample

    std::vector<SourceTile> tiles;
    tiles.reserve(static_cast<std::size_t>(tiles_y) * tiles_x);
    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            SourceTile tile;
            tile.origin_id = origin_id;
            tile.tile_index = ty * tiles_x + tx;
            tile.image = ImageRgb8(kOutputSize, kOutputSize);
            for (int oy = 0; oy < kOutputSize; ++oy) {
                for (int ox = 0; ox < kOutputSize; ++ox) {
                    int sum[3] = {0, 0, 0};
                    for (int dy = 0; dy < kFactor; ++dy) {
                        const int sy = ty * kTileSize + oy * kFactor + dy;
                        for (int dx = 0; dx < kFactor; ++dx) {
                            const int sx = tx * kTileSize + ox * kFactor + dx;
                            const std::uint8_t* p = image.px(sy, sx);
                            sum[0] += p[0];
                            sum[1] += p[1];
                            sum[2] += p[2];
                        }
                    }
                    std::uint8_t* dst = tile.image.px(oy, ox);
                    constexpr double kInv = 1.0 / (kFactor * kFactor);
                    dst[0] = round_even(sum[0] * kInv);
                    dst[1] = round_even(sum[1] * kInv);
                    dst[2] = round_even(sum[2] * kInv);
                }
            }
            tile.entropy_bits = gray_entropy_bits(tile.image);
            tiles.push_back(std::move(tile));
        }
    }
    return tiles;
}

double gray_entropy_bits(const ImageRgb8& image) {
    require_valid(image);
    std::array<std::size_t, 256> hist{};
    const std::uint8_t* p = image.pixels.data();
    for (std::size_t i = 0; i < image.pixel_count(); ++i, p += 3) {
        const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        ++hist[round_even(luma)];
    }
    const double n = static_cast<double>(image.pixel_count());
    double entropy = 0.0;
    for (std::size_t count : hist) {
        if (count == 0)
            continue;
        const double prob = static_cast<double>(count) / n;
        entropy -= prob * std::log2(prob);
    }
    return entropy;
}

std::string_view sampling_mode_name(SamplingMode m) {
    return m == SamplingMode::Partition ? "partition" : "shared";
}

std::optional<SamplingMode> parse_sampling_mode(std::string_view name) {
    if (name == "partition")
        return SamplingMode::Partition;
    if (name == "shared")
        return SamplingMode::Shared;
    return std::nullopt;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j =
            static_cast<std::size_t>(bounded_draw(rng, i));
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

namespace {

// Shared assembly core. Record slot m picks source P[m mod window]: the
// window is the whole permutation in Partition mode (distinct references
// until sources run out, then reuse across types) and the first n_total/6
// entries in Shared mode (every type sees the same references). Single-type
// assembly uses the same slots with one fixed dtype, which is what makes the
// mixed and ablation reference multisets identical under equal seeds.
DatasetManifest assemble_impl(const std::vector<fs::path>& sources,
                              const DegradationBackend& backend,
                              const fs::path& out_dir,
                              const AssembleOptions& options,
                              std::optional<DegradationType> single_type) {
    const std::size_t n_total = options.n_total;
    if (n_total == 0)
        throw ValidationError("n_total must be positive");
    if (!single_type) {
        if (n_total % 6 != 0)
            throw ValidationError(
                "n_total must be divisible by 6 for a balanced dataset, got " +
                std::to_string(n_total));
        if (sources.size() < n_total / 6)
            throw ValidationError("need at least " + std::to_string(n_total / 6) +
                                  " sources for n_total=" +
                                  std::to_string(n_total) + ", got " +
                                  std::to_string(sources.size()));
    } else {
        if (sources.size() < n_total)
            throw ValidationError("need at least " + std::to_string(n_total) +
                                  " sources for a single-type dataset, got " +
                                  std::to_string(sources.size()));
    }

    const std::size_t per_type = single_type ? n_total : n_total / 6;
    const std::vector<std::size_t> perm =
        seeded_permutation(sources.size(), options.seed);
    const std::size_t window = options.sampling == SamplingMode::Shared
                                   ? std::max<std::size_t>(1, n_total / 6)
                                   : sources.size();

    DatasetManifest manifest;
    manifest.name = options.name.empty()
                        ? out_dir.filename().generic_string()
                        : options.name;
    manifest.seed = options.seed;
    manifest.sampling = options.sampling;
    manifest.balanced = !single_type;
    manifest.backend_descriptor = backend.descriptor();
    manifest.total = n_total;

    manifest.records.reserve(n_total);
    for (std::size_t m = 0; m < n_total; ++m) {
        const DegradationType dtype =
            single_type ? *single_type
                        : kAllDegradationTypes[m / per_type];
        const fs::path& source = sources[perm[m % window]];
        PairRecord rec;
        rec.source_path = source.generic_string();
        rec.degraded_path = (fs::path("degraded") /
                             std::string(type_slug(dtype)) /
                             (source.stem().string() + ".png"))
                                .generic_string();
        rec.dtype = dtype;
        rec.backend_descriptor = manifest.backend_descriptor;
        manifest.records.push_back(std::move(rec));
        ++manifest.per_type_counts[static_cast<std::size_t>(dtype)];
    }
    std::sort(manifest.records.begin(), manifest.records.end(),
              [](const PairRecord& a, const PairRecord& b) {
                  if (a.dtype != b.dtype)
                      return static_cast<int>(a.dtype) < static_cast<int>(b.dtype);
                  return a.source_path < b.source_path;
              });

    // Distinct sources mapping to one output file would silently overwrite
    // each other; duplicate records of the same source are fine (same bytes).
    std::map<std::string, std::string> path_to_source;
    for (const auto& rec : manifest.records) {
        auto [it, inserted] =
            path_to_source.emplace(rec.degraded_path, rec.source_path);
        if (!inserted && it->second != rec.source_path)
            throw ValidationError("output collision at " + rec.degraded_path +
                                  ": sources " + it->second + " and " +
                                  rec.source_path + " share a file stem");
    }

    // One degrade-and-write task per distinct output file.
    struct Task {
        std::string degraded_path;
        std::string source_path;
        DegradationType dtype;
        std::string digest;
    };
    std::vector<Task> tasks;
    tasks.reserve(path_to_source.size());
    {
        std::set<std::string> seen;
        for (const auto& rec : manifest.records)
            if (seen.insert(rec.degraded_path).second)
                tasks.push_back(
                    {rec.degraded_path, rec.source_path, rec.dtype, {}});
    }

    for (DegradationType t : kAllDegradationTypes)
        if (!single_type || t == *single_type)
            fs::create_directories(out_dir / "degraded" /
                                   std::string(type_slug(t)));

    std::array<std::string, 6> spec_digests;
    for (DegradationType t : kAllDegradationTypes)
        if (auto spec = backend.spec_for(t))
            spec_digests[static_cast<std::size_t>(t)] = spec_digest(*spec);

    parallel_for(tasks.size(), options.jobs, [&](std::size_t i) {
        Task& task = tasks[i];
        ImageRgb8 source_img;
        try {
            source_img = read_image(task.source_path);
        } catch (const std::exception& e) {
            throw IoError("assembling " + std::string(type_slug(task.dtype)) +
                          " from " + task.source_path + ": " + e.what());
        }
        ImageRgb8 degraded;
        try {
            degraded = backend.apply(source_img, task.dtype,
                                     fs::path(task.source_path)
                                         .filename()
                                         .string());
        } catch (const std::exception& e) {
            throw IoError("backend failed for (" +
                          std::string(type_slug(task.dtype)) + ", " +
                          task.source_path + "): " + e.what());
        }
        const std::string& spec_dig =
            spec_digests[static_cast<std::size_t>(task.dtype)];
        task.digest = spec_dig.empty() ? image_digest(degraded) : spec_dig;
        write_png(degraded, out_dir / task.degraded_path);
    });

    std::map<std::string, std::string> digest_by_path;
    for (const auto& task : tasks)
        digest_by_path[task.degraded_path] = task.digest;
    for (auto& rec : manifest.records)
        rec.spec_digest = digest_by_path[rec.degraded_path];

    write_manifest(manifest, out_dir / "manifest.jsonl");
    return manifest;
}

} // namespace

DatasetManifest assemble_balanced(const std::vector<fs::path>& sources,
                                  const DegradationBackend& backend,
                                  const fs::path& out_dir,
                                  const AssembleOptions& options) {
    return assemble_impl(sources, backend, out_dir, options, std::nullopt);
}

DatasetManifest assemble_single_type(const std::vector<fs::path>& sources,
                                     const DegradationBackend& backend,
                                     DegradationType dtype,
                                     const fs::path& out_dir,
                                     const AssembleOptions& options) {
    return assemble_impl(sources, backend, out_dir, options, dtype);
}

void write_manifest(const DatasetManifest& manifest, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError(file.string() + ": cannot open for writing");

    ordered_json header;
    header["format"] = "uwsynth-manifest";
    header["version"] = 1;
    header["name"] = manifest.name;
    header["seed"] = manifest.seed;
    header["sampling"] = std::string(sampling_mode_name(manifest.sampling));
    header["balanced"] = manifest.balanced;
    header["backend_descriptor"] = manifest.backend_descriptor;
    header["total"] = manifest.total;
    ordered_json counts;
    for (DegradationType t : kAllDegradationTypes)
        counts[std::string(type_slug(t))] =
            manifest.per_type_counts[static_cast<std::size_t>(t)];
    header["per_type_counts"] = counts;
    out << header.dump() << '\n';

    for (const auto& rec : manifest.records) {
        ordered_json j;
        j["source_path"] = rec.source_path;
        j["degraded_path"] = rec.degraded_path;
        j["dtype"] = std::string(type_slug(rec.dtype));
        j["backend_descriptor"] = rec.backend_descriptor;
        j["spec_digest"] = rec.spec_digest;
        out << j.dump() << '\n';
    }
    if (!out)
        throw IoError(file.string() + ": write failed");
}

DatasetManifest read_manifest(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError(file.string() + ": cannot open");
    std::string line;
    if (!std::getline(in, line))
        throw IoError(file.string() + ": empty manifest");

    DatasetManifest manifest;
    try {
        const auto header = nlohmann::json::parse(line);
        if (header.at("format") != "uwsynth-manifest")
            throw ValidationError(file.string() + ": not a manifest file");
        manifest.name = header.at("name").get<std::string>();
        manifest.seed = header.at("seed").get<std::uint64_t>();
        const auto mode = parse_sampling_mode(
            header.at("sampling").get<std::string>());
        if (!mode)
            throw ValidationError(file.string() + ": unknown sampling mode");
        manifest.sampling = *mode;
        manifest.balanced = header.at("balanced").get<bool>();
        manifest.backend_descriptor =
            header.at("backend_descriptor").get<std::string>();
        manifest.total = header.at("total").get<std::size_t>();
        for (DegradationType t : kAllDegradationTypes)
            manifest.per_type_counts[static_cast<std::size_t>(t)] =
                header.at("per_type_counts")
                    .at(std::string(type_slug(t)))
                    .get<std::size_t>();

        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty())
                continue;
            const auto j = nlohmann::json::parse(line);
            PairRecord rec;
            rec.source_path = j.at("source_path").get<std::string>();
            rec.degraded_path = j.at("degraded_path").get<std::string>();
            const auto dtype =
                parse_degradation_type(j.at("dtype").get<std::string>());
            if (!dtype)
                throw ValidationError(file.string() + ":" +
                                      std::to_string(lineno) +
                                      ": unknown dtype");
            rec.dtype = *dtype;
            rec.backend_descriptor =
                j.at("backend_descriptor").get<std::string>();
            rec.spec_digest = j.at("spec_digest").get<std::string>();
            manifest.records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(file.string() + ": malformed manifest: " + e.what());
    }
    return manifest;
}

ManifestReport validate_manifest(const DatasetManifest& manifest,
                                 const fs::path& base_dir,
                                 const DegradationBackend* backend) {
    ManifestReport report;
    auto add = [&report](std::string kind, std::string message) {
        report.violations.push_back({std::move(kind), std::move(message)});
    };

    if (manifest.records.size() != manifest.total)
        add("count", "record count " + std::to_string(manifest.records.size()) +
                         " != declared total " + std::to_string(manifest.total));

    std::array<std::size_t, 6> recount{};
    for (const auto& rec : manifest.records)
        ++recount[static_cast<std::size_t>(rec.dtype)];
    std::size_t declared_sum = 0;
    for (DegradationType t : kAllDegradationTypes) {
        const auto i = static_cast<std::size_t>(t);
        declared_sum += manifest.per_type_counts[i];
        if (recount[i] != manifest.per_type_counts[i])
            add("count", std::string(type_slug(t)) + ": declared " +
                             std::to_string(manifest.per_type_counts[i]) +
                             " records but found " +
                             std::to_string(recount[i]));
    }
    if (declared_sum != manifest.total)
        add("count", "per-type counts sum to " + std::to_string(declared_sum) +
                         " != total " + std::to_string(manifest.total));

    if (manifest.balanced) {
        const std::size_t expected = manifest.total / 6;
        for (DegradationType t : kAllDegradationTypes) {
            const auto i = static_cast<std::size_t>(t);
            if (manifest.per_type_counts[i] != expected)
                add("balance",
                    "declared balanced but " + std::string(type_slug(t)) +
                        " holds " +
                        std::to_string(manifest.per_type_counts[i]) +
                        " records, expected " + std::to_string(expected));
        }
    }

    for (const auto& rec : manifest.records) {
        if (!fs::exists(rec.source_path))
            add("missing-source", rec.source_path);
        if (!fs::exists(base_dir / rec.degraded_path))
            add("missing-degraded", rec.degraded_path);
    }

    // Parametric records of one type all came from one spec, so their digests
    // must agree.
    std::array<std::set<std::string>, 6> digests;
    for (const auto& rec : manifest.records)
        if (rec.backend_descriptor.rfind("parametric:", 0) == 0)
            digests[static_cast<std::size_t>(rec.dtype)].insert(rec.spec_digest);
    for (DegradationType t : kAllDegradationTypes) {
        const auto& set = digests[static_cast<std::size_t>(t)];
        if (set.size() > 1)
            add("digest", std::string(type_slug(t)) + ": " +
                              std::to_string(set.size()) +
                              " distinct spec digests in one type");
    }

    if (backend) {
        for (const auto& rec : manifest.records) {
            if (auto spec = backend->spec_for(rec.dtype);
                spec && rec.backend_descriptor == backend->descriptor() &&
                rec.spec_digest != spec_digest(*spec)) {
                add("digest", rec.degraded_path + ": spec digest " +
                                  rec.spec_digest +
                                  " does not match the backend's " +
                                  spec_digest(*spec));
                continue;
            }
            if (!fs::exists(rec.source_path) ||
                !fs::exists(base_dir / rec.degraded_path))
                continue;
            try {
                const ImageRgb8 source = read_image(rec.source_path);
                const ImageRgb8 expected = backend->apply(
                    source, rec.dtype,
                    fs::path(rec.source_path).filename().string());
                const ImageRgb8 stored =
                    read_image(base_dir / rec.degraded_path);
                if (!(expected == stored))
                    add("pairing", rec.degraded_path +
                                       " does not re-derive from " +
                                       rec.source_path);
            } catch (const std::exception& e) {
                add("pairing",
                    rec.degraded_path + ": re-derivation failed: " + e.what());
            }
        }
    }
    return report;
}

std::string render_report(const ManifestReport& report) {
    if (report.ok())
        return "ok\n";
    std::ostringstream os;
    for (const auto& v : report.violations)
        os << v.kind << ": " << v.message << '\n';
    return os.str();
}

} // namespace uwsynth
