#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uwsynth/image.hpp"
#include "uwsynth/metrics.hpp"

namespace uwsynth {

/// Scores for one image file.
struct ImageScore {
    std::string filename;
    UciqeScore score;
    std::optional<FullRefScore> full_ref;
};

/// Result of scoring one directory.
struct DirectoryEval {
    std::vector<ImageScore> images;     // ordered by filename
    std::vector<std::string> failures;  // "filename: reason" per undecodable file
    UciqeScore mean;                    // componentwise means, total recombined
    std::optional<FullRefScore> mean_full_ref;
};

struct EvalOptions {
    int jobs = 0;                 // 0 = hardware default, 1 = serial
    bool resize_256 = false;      // resize inputs to 256x256 before scoring
    std::optional<std::filesystem::path> reference_dir;
};

/// Scores every decodable image in `dir` (parallel over images, deterministic
/// reduction in filename order). Undecodable files become failure entries and
/// evaluation continues. With a reference directory, every test filename must
/// exist there (pairwise match by name) and PSNR/SSIM are added. Throws
/// ValidationError when the directory holds no image files or a reference is
/// missing.
DirectoryEval evaluate_directory(const std::filesystem::path& dir,
                                 const EvalOptions& options = {});

/// One (model, training set, test set) aggregate.
struct EvalCell {
    std::string model_id, training_set_id, test_set_id;
    std::size_t n_images = 0;
    double sigma_c = 0.0, conl = 0.0, mu_s = 0.0;
    std::optional<double> total; // absent until measured or reconstructed
    std::optional<double> psnr, ssim;
    std::size_t failures = 0;
};

/// Grid of cells with stable axis orders (first-appearance order unless set
/// explicitly). At most one cell per (model, training set, test set).
struct ComparisonMatrix {
    std::vector<EvalCell> cells;
    std::vector<std::string> models, training_sets, test_sets;

    /// Registers axis ids and appends; throws ValidationError on a duplicate
    /// triple.
    void add(EvalCell cell);
    const EvalCell* find(const std::string& model, const std::string& train,
                         const std::string& test) const;
};

struct GroupWinner {
    std::string model_id, test_set_id;
    std::string training_set_id; // argmax of total over training sets
    bool tie = false;            // flagged when broken lexicographically
};

/// Best training set per (model, test set) group by mean UCIQE total. Ties go
/// to the lexicographically first id and are flagged. Throws ValidationError
/// listing any (model, test set) group with no cell, or a cell without total.
std::vector<GroupWinner> winners_per_group(const ComparisonMatrix& matrix);

/// Fills every absent total from the weighted component sum. Components are
/// mandatory; throws ValidationError naming the cell and component otherwise.
void reconstruct_totals(ComparisonMatrix& matrix);

enum class ReportFormat { Csv, Table };
std::optional<ReportFormat> parse_report_format(std::string_view name);

/// Deterministic rendering: a totals table (rows model x training set,
/// columns test sets, winner per group marked) followed by a component table
/// (sigma_c / conl / mu_s blocks). CSV output is RFC 4180; the two tables are
/// separated by a blank line.
std::string render_report(const ComparisonMatrix& matrix, ReportFormat format);

/// Cell file I/O, same JSON-lines shape as manifests (header then one cell
/// per line).
void write_cells(const ComparisonMatrix& matrix,
                 const std::filesystem::path& file);
ComparisonMatrix read_cells(const std::vector<std::filesystem::path>& files);

/// Per-image detail table: filename, sigma_c, conl, mu_s, total, psnr, ssim
/// (full-reference columns empty without a reference directory).
std::string render_detail_csv(const DirectoryEval& eval);

} // namespace uwsynth
