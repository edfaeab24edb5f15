// uwsynth command-line front end: prepare source tiles, synthesize
// degradations, assemble paired datasets, score directories, build reports.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uwsynth/dataset.hpp"
#include "uwsynth/degradation.hpp"
#include "uwsynth/errors.hpp"
#include "uwsynth/eval.hpp"
#include "uwsynth/image_io.hpp"
#include "uwsynth/metrics.hpp"
#include "uwsynth/parallel.hpp"

namespace fs = std::filesystem;
using namespace uwsynth;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

// Documented default so equal invocations reproduce equal datasets.
constexpr std::uint64_t kDefaultSeed = 42;

std::string type_name_list() {
    std::string names;
    for (DegradationType t : kAllDegradationTypes) {
        if (!names.empty())
            names += ", ";
        names += type_display_name(t);
    }
    return names;
}

DegradationType require_type(const std::string& name) {
    const auto t = parse_degradation_type(name);
    if (!t)
        throw ValidationError("unknown degradation type '" + name +
                              "'; expected one of: " + type_name_list());
    return *t;
}

std::vector<fs::path> list_sources(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw IoError(dir.string() + ": not a directory");
    std::vector<fs::path> sources;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_image_extension(entry.path()))
            sources.push_back(fs::absolute(entry.path()));
    std::sort(sources.begin(), sources.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
              });
    return sources;
}

std::unique_ptr<DegradationBackend> make_backend(const std::string& arg,
                                                 const std::string& preset_arg) {
    if (arg == "parametric")
        return parametric_backend(resolve_presets(preset_arg));
    if (arg.rfind("dir:", 0) == 0)
        return directory_backend(arg.substr(4));
    throw ValidationError("unknown backend '" + arg +
                          "'; expected parametric or dir:ROOT");
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(path.string() + ": cannot open for writing");
    out << content;
    if (!out)
        throw IoError(path.string() + ": write failed");
}

int run_prep(const fs::path& in_dir, const fs::path& out_dir,
             double threshold_bits) {
    const auto files = list_sources(in_dir);
    if (files.empty())
        throw ValidationError(in_dir.string() + ": no image files");
    fs::create_directories(out_dir);
    std::size_t kept = 0, dropped = 0, skipped = 0;
    for (const auto& file : files) {
        ImageRgb8 image;
        try {
            image = read_image(file);
        } catch (const std::exception& e) {
            std::cerr << "skipping " << file.filename().string() << ": "
                      << e.what() << '\n';
            ++skipped;
            continue;
        }
        if (image.height < kTileSize || image.width < kTileSize) {
            std::cerr << "skipping " << file.filename().string() << ": "
                      << image.height << "x" << image.width
                      << " is smaller than one tile\n";
            ++skipped;
            continue;
        }
        for (const auto& tile : tile_and_downsample(image, file.stem().string())) {
            if (!entropy_keep(tile, threshold_bits)) {
                ++dropped;
                continue;
            }
            write_png(tile.image,
                      out_dir / (tile.origin_id + "_t" +
                                 std::to_string(tile.tile_index) + ".png"));
            ++kept;
        }
    }
    std::cout << "kept " << kept << " tiles, dropped " << dropped
              << " low-entropy tiles, skipped " << skipped << " files\n";
    if (kept == 0)
        throw ValidationError("no tiles survived preparation");
    return 0;
}

int run_degrade(const std::string& type_name, const std::string& preset_arg,
                const fs::path& in_path, const fs::path& out_path) {
    const DegradationType dtype = require_type(type_name);
    const PresetTable presets = resolve_presets(preset_arg);
    const ImageRgb8 image = read_image(in_path);
    write_png(apply_degradation(image, presets.spec(dtype)), out_path);
    return 0;
}

int run_assemble(const std::string& sources_dir, const std::string& backend_arg,
                 const std::string& preset_arg, std::size_t n_total,
                 std::uint64_t seed, const fs::path& out_dir,
                 const std::string& name, const std::string& sampling_name,
                 int jobs, const std::string& single_type_name) {
    const auto sampling = parse_sampling_mode(sampling_name);
    if (!sampling)
        throw ValidationError("unknown sampling mode '" + sampling_name +
                              "'; expected partition or shared");
    const auto backend = make_backend(backend_arg, preset_arg);
    const auto sources = list_sources(sources_dir);
    AssembleOptions options;
    options.n_total = n_total;
    options.seed = seed;
    options.sampling = *sampling;
    options.name = name;
    options.jobs = jobs;
    fs::create_directories(out_dir);
    const DatasetManifest manifest =
        single_type_name.empty()
            ? assemble_balanced(sources, *backend, out_dir, options)
            : assemble_single_type(sources, *backend,
                                   require_type(single_type_name), out_dir,
                                   options);
    std::cout << "wrote " << manifest.total << " pairs to " << out_dir.string()
              << " (manifest.jsonl)\n";
    return 0;
}

int run_score(const fs::path& input_dir, const std::string& reference_dir,
              const fs::path& out_file, bool resize, int jobs,
              const std::string& model_id, const std::string& train_id,
              const std::string& test_id, const std::string& cell_file) {
    EvalOptions options;
    options.jobs = jobs;
    options.resize_256 = resize;
    if (!reference_dir.empty())
        options.reference_dir = fs::path(reference_dir);
    const DirectoryEval eval = evaluate_directory(input_dir, options);
    write_text_file(out_file, render_detail_csv(eval));

    std::cout << "images " << eval.images.size() << ", failures "
              << eval.failures.size() << '\n';
    for (const auto& failure : eval.failures)
        std::cerr << "failed: " << failure << '\n';
    std::cout << "mean sigma_c " << eval.mean.sigma_c << ", conl "
              << eval.mean.conl << ", mu_s " << eval.mean.mu_s << ", UCIQE "
              << eval.mean.total << '\n';
    if (eval.mean_full_ref)
        std::cout << "mean psnr " << eval.mean_full_ref->psnr_db << " dB, ssim "
                  << eval.mean_full_ref->ssim << '\n';

    if (!cell_file.empty()) {
        ComparisonMatrix matrix;
        EvalCell cell;
        cell.model_id = model_id.empty() ? input_dir.filename().string()
                                         : model_id;
        cell.training_set_id = train_id.empty() ? "-" : train_id;
        cell.test_set_id = test_id.empty() ? "-" : test_id;
        cell.n_images = eval.images.size();
        cell.sigma_c = eval.mean.sigma_c;
        cell.conl = eval.mean.conl;
        cell.mu_s = eval.mean.mu_s;
        cell.total = eval.mean.total;
        if (eval.mean_full_ref) {
            cell.psnr = eval.mean_full_ref->psnr_db;
            cell.ssim = eval.mean_full_ref->ssim;
        }
        cell.failures = eval.failures.size();
        matrix.add(std::move(cell));
        write_cells(matrix, cell_file);
    }
    return 0;
}

int run_report(const std::vector<std::string>& cell_files,
               const std::string& format_name, const fs::path& out_file) {
    const auto format = parse_report_format(format_name);
    if (!format)
        throw ValidationError("unknown format '" + format_name +
                              "'; expected csv or table");
    std::vector<fs::path> paths(cell_files.begin(), cell_files.end());
    ComparisonMatrix matrix = read_cells(paths);
    reconstruct_totals(matrix);
    write_text_file(out_file, render_report(matrix, *format));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uwsynth: synthetic underwater degradation datasets and "
                 "UCIQE/PSNR/SSIM evaluation"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // prep
    auto* prep = app.add_subcommand(
        "prep", "Cut 1024x1024 tiles from large images, downsample to "
                "256x256 and drop low-entropy patches");
    std::string prep_in, prep_out;
    double entropy_threshold = kDefaultEntropyThresholdBits;
    prep->add_option("--in", prep_in, "Directory of source images")->required();
    prep->add_option("--out", prep_out, "Directory for kept tiles")->required();
    prep->add_option("--entropy-threshold", entropy_threshold,
                     "Minimum gray-histogram entropy in bits")
        ->capture_default_str();

    // degrade
    auto* degrade = app.add_subcommand(
        "degrade", "Apply one degradation type to one image. Types: " +
                       type_name_list());
    std::string degrade_type, degrade_preset = "default";
    std::string degrade_in, degrade_out;
    degrade->add_option("--type", degrade_type,
                        "Degradation type (" + type_name_list() + ")")
        ->required();
    degrade->add_option("--preset", degrade_preset,
                        "Preset file or 'default'")
        ->capture_default_str();
    degrade->add_option("--in", degrade_in, "Input image")->required();
    degrade->add_option("--out", degrade_out, "Output PNG")->required();

    // assemble / ablate share flags
    std::string asm_sources, asm_backend = "parametric",
                asm_preset = "default", asm_out, asm_name,
                asm_sampling = "partition", ablate_type;
    std::size_t asm_n_total = 0;
    std::uint64_t asm_seed = kDefaultSeed;
    int asm_jobs = 0;
    auto add_assemble_flags = [&](CLI::App* cmd) {
        cmd->add_option("--sources", asm_sources, "Directory of reference images")
            ->required();
        cmd->add_option("--backend", asm_backend,
                        "parametric or dir:ROOT (pre-generated images)")
            ->capture_default_str();
        cmd->add_option("--preset", asm_preset, "Preset file or 'default'")
            ->capture_default_str();
        cmd->add_option("--n-total", asm_n_total, "Total number of pairs")
            ->required();
        cmd->add_option("--seed", asm_seed, "Sampling seed")
            ->capture_default_str();
        cmd->add_option("--out", asm_out, "Dataset output directory")
            ->required();
        cmd->add_option("--name", asm_name,
                        "Manifest name (default: output directory name)");
        cmd->add_option("--sampling", asm_sampling,
                        "partition (each pair gets its own reference) or "
                        "shared (all types reuse the same references)")
            ->capture_default_str();
        cmd->add_option("--jobs", asm_jobs, "Worker threads (0 = all cores)")
            ->capture_default_str();
    };
    auto* assemble = app.add_subcommand(
        "assemble", "Build a balanced mixed-type paired dataset");
    add_assemble_flags(assemble);
    auto* ablate = app.add_subcommand(
        "ablate", "Build a single-type paired dataset sharing references "
                  "with the mixed dataset");
    ablate->add_option("--type", ablate_type,
                       "Degradation type (" + type_name_list() + ")")
        ->required();
    add_assemble_flags(ablate);

    // score
    auto* score = app.add_subcommand(
        "score", "Score every image in a directory with UCIQE (and PSNR/SSIM "
                 "against --reference)");
    std::string score_input, score_reference, score_out, score_cell;
    std::string score_model, score_train, score_test;
    bool score_resize = false;
    int score_jobs = 0;
    score->add_option("--input", score_input, "Directory of images to score")
        ->required();
    score->add_option("--reference", score_reference,
                      "Directory of reference images (matched by filename)");
    score->add_option("--out", score_out, "Per-image detail CSV")->required();
    score->add_option("--cell", score_cell,
                      "Also write the aggregate as a cell file");
    score->add_option("--model", score_model, "Model id for the cell");
    score->add_option("--training-set", score_train,
                      "Training set id for the cell");
    score->add_option("--test-set", score_test, "Test set id for the cell");
    score->add_flag("--resize", score_resize,
                    "Resize inputs to 256x256 before scoring");
    score->add_option("--jobs", score_jobs,
                      "Worker threads (0 = all cores, 1 = serial)")
        ->capture_default_str();

    // report
    auto* report = app.add_subcommand(
        "report", "Merge cell files into totals and component tables");
    std::vector<std::string> report_cells;
    std::string report_format = "csv", report_out;
    report->add_option("--cells", report_cells, "Cell files to merge")
        ->required()
        ->expected(-1);
    report->add_option("--format", report_format, "csv or table")
        ->capture_default_str();
    report->add_option("--out", report_out, "Report output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        if (prep->parsed())
            return run_prep(prep_in, prep_out, entropy_threshold);
        if (degrade->parsed())
            return run_degrade(degrade_type, degrade_preset, degrade_in,
                               degrade_out);
        if (assemble->parsed())
            return run_assemble(asm_sources, asm_backend, asm_preset,
                                asm_n_total, asm_seed, asm_out, asm_name,
                                asm_sampling, asm_jobs, "");
        if (ablate->parsed())
            return run_assemble(asm_sources, asm_backend, asm_preset,
                                asm_n_total, asm_seed, asm_out, asm_name,
                                asm_sampling, asm_jobs, ablate_type);
        if (score->parsed())
            return run_score(score_input, score_reference, score_out,
                             score_resize, score_jobs, score_model,
                             score_train, score_test, score_cell);
        if (report->parsed())
            return run_report(report_cells, report_format, report_out);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
