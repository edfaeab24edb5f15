#include "uwsynth/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "num_format.hpp"
#include "uwsynth/image_io.hpp"
#include "uwsynth/parallel.hpp"

namespace uwsynth {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using detail::fmt_double;

namespace {

std::vector<fs::path> list_image_files(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw IoError(dir.string() + ": not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && has_image_extension(entry.path()))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
              });
    return files;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string opt_str(const std::optional<double>& v) {
    return v ? fmt_double(*v) : std::string();
}

} // namespace

DirectoryEval evaluate_directory(const fs::path& dir,
                                 const EvalOptions& options) {
    const std::vector<fs::path> files = list_image_files(dir);
    if (files.empty())
        throw ValidationError(dir.string() + ": no image files to evaluate");

    if (options.reference_dir) {
        std::vector<std::string> missing;
        for (const auto& f : files)
            if (!fs::exists(*options.reference_dir / f.filename()))
                missing.push_back(f.filename().string());
        if (!missing.empty()) {
            std::string msg = options.reference_dir->string() +
                              ": missing reference files:";
            for (const auto& m : missing)
                msg += " " + m;
            throw ValidationError(msg);
        }
    }

    struct Slot {
        std::optional<ImageScore> score;
        std::string failure;
    };
    std::vector<Slot> slots(files.size());

    parallel_for(files.size(), options.jobs, [&](std::size_t i) {
        const fs::path& file = files[i];
        Slot& slot = slots[i];
        try {
            ImageRgb8 image = read_image(file);
            if (options.resize_256)
                image = resize_bilinear(image, 256, 256);
            ImageScore score;
            score.filename = file.filename().string();
            score.score = uciqe(image);
            if (options.reference_dir) {
                ImageRgb8 reference =
                    read_image(*options.reference_dir / file.filename());
                if (options.resize_256)
                    reference = resize_bilinear(reference, 256, 256);
                score.full_ref = full_reference(reference, image);
            }
            slot.score = std::move(score);
        } catch (const std::exception& e) {
            slot.failure = file.filename().string() + ": " + e.what();
        }
    });

    DirectoryEval result;
    for (auto& slot : slots) { // filename order: files was sorted
        if (slot.score)
            result.images.push_back(std::move(*slot.score));
        else
            result.failures.push_back(std::move(slot.failure));
    }
    if (result.images.empty())
        throw ValidationError(dir.string() + ": no decodable images (" +
                              std::to_string(result.failures.size()) +
                              " failures)");

    // Componentwise means in a fixed filename-order reduction, accumulated as
    // deviations from the minimum: a directory of identical images then sums
    // exact zeros and the mean reproduces the single-image score bitwise. The
    // mean total is recombined from the mean components, so the weighted-sum
    // identity holds exactly.
    auto mean_of = [&](auto&& get) {
        double lo = get(result.images.front());
        for (const auto& img : result.images)
            lo = std::min(lo, get(img));
        double acc = 0.0;
        for (const auto& img : result.images)
            acc += get(img) - lo;
        return lo + acc / static_cast<double>(result.images.size());
    };
    result.mean = UciqeScore::from_components(
        mean_of([](const ImageScore& s) { return s.score.sigma_c; }),
        mean_of([](const ImageScore& s) { return s.score.conl; }),
        mean_of([](const ImageScore& s) { return s.score.mu_s; }));
    if (options.reference_dir)
        result.mean_full_ref = FullRefScore{
            mean_of([](const ImageScore& s) { return s.full_ref->psnr_db; }),
            mean_of([](const ImageScore& s) { return s.full_ref->ssim; })};
    return result;
}

void ComparisonMatrix::add(EvalCell cell) {
    if (find(cell.model_id, cell.training_set_id, cell.test_set_id))
        throw ValidationError("duplicate cell (" + cell.model_id + ", " +
                              cell.training_set_id + ", " + cell.test_set_id +
                              ")");
    auto intern = [](std::vector<std::string>& axis, const std::string& id) {
        if (std::find(axis.begin(), axis.end(), id) == axis.end())
            axis.push_back(id);
    };
    intern(models, cell.model_id);
    intern(training_sets, cell.training_set_id);
    intern(test_sets, cell.test_set_id);
    cells.push_back(std::move(cell));
}

const EvalCell* ComparisonMatrix::find(const std::string& model,
                                       const std::string& train,
                                       const std::string& test) const {
    for (const auto& cell : cells)
        if (cell.model_id == model && cell.training_set_id == train &&
            cell.test_set_id == test)
            return &cell;
    return nullptr;
}

std::vector<GroupWinner> winners_per_group(const ComparisonMatrix& matrix) {
    std::vector<std::string> missing;
    std::vector<GroupWinner> winners;
    for (const auto& model : matrix.models) {
        for (const auto& test : matrix.test_sets) {
            const EvalCell* best = nullptr;
            bool tie = false;
            for (const auto& train : matrix.training_sets) {
                const EvalCell* cell = matrix.find(model, train, test);
                if (!cell)
                    continue;
                if (!cell->total)
                    throw ValidationError("cell (" + model + ", " + train +
                                          ", " + test + ") has no total; run "
                                          "reconstruction first");
                if (!best || *cell->total > *best->total) {
                    best = cell;
                    tie = false;
                } else if (*cell->total == *best->total) {
                    tie = true;
                    if (cell->training_set_id < best->training_set_id)
                        best = cell;
                }
            }
            if (!best) {
                missing.push_back("(" + model + ", " + test + ")");
                continue;
            }
            winners.push_back({model, test, best->training_set_id, tie});
        }
    }
    if (!missing.empty()) {
        std::string msg = "groups without any cell:";
        for (const auto& m : missing)
            msg += " " + m;
        throw ValidationError(msg);
    }
    return winners;
}

void reconstruct_totals(ComparisonMatrix& matrix) {
    for (auto& cell : matrix.cells) {
        if (cell.total)
            continue;
        const auto check = [&](double v, const char* name) {
            if (std::isnan(v))
                throw ValidationError("cell (" + cell.model_id + ", " +
                                      cell.training_set_id + ", " +
                                      cell.test_set_id + ") is missing " +
                                      name);
        };
        check(cell.sigma_c, "sigma_c");
        check(cell.conl, "conl");
        check(cell.mu_s, "mu_s");
        cell.total = UciqeScore::combine(cell.sigma_c, cell.conl, cell.mu_s);
    }
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
    if (name == "csv")
        return ReportFormat::Csv;
    if (name == "table")
        return ReportFormat::Table;
    return std::nullopt;
}

namespace {

// Winner per (model, test set) among the cells present, lexicographic on
// ties. Unlike winners_per_group this tolerates missing groups, so partially
// filled matrices still render.
std::map<std::pair<std::string, std::string>, std::string>
render_winners(const ComparisonMatrix& matrix) {
    std::map<std::pair<std::string, std::string>, std::string> winners;
    for (const auto& model : matrix.models) {
        for (const auto& test : matrix.test_sets) {
            const EvalCell* best = nullptr;
            for (const auto& train : matrix.training_sets) {
                const EvalCell* cell = matrix.find(model, train, test);
                if (!cell || !cell->total)
                    continue;
                if (!best || *cell->total > *best->total ||
                    (*cell->total == *best->total &&
                     cell->training_set_id < best->training_set_id))
                    best = cell;
            }
            if (best)
                winners[{model, test}] = best->training_set_id;
        }
    }
    return winners;
}

std::string render_csv(const ComparisonMatrix& matrix) {
    const auto winners = render_winners(matrix);
    std::ostringstream os;

    os << "model,training_set";
    for (const auto& test : matrix.test_sets)
        os << ',' << csv_escape(test);
    for (const auto& test : matrix.test_sets)
        os << ",best_" << csv_escape(test);
    os << '\n';
    for (const auto& model : matrix.models) {
        for (const auto& train : matrix.training_sets) {
            os << csv_escape(model) << ',' << csv_escape(train);
            std::string flags;
            for (const auto& test : matrix.test_sets) {
                const EvalCell* cell = matrix.find(model, train, test);
                os << ',';
                if (cell && cell->total)
                    os << fmt_double(*cell->total);
                const auto it = winners.find({model, test});
                flags += ',';
                flags += (it != winners.end() && it->second == train) ? "1" : "0";
            }
            os << flags << '\n';
        }
    }

    os << '\n';
    os << "model,training_set";
    for (const char* comp : {"sigma_c", "conl", "mu_s"})
        for (const auto& test : matrix.test_sets)
            os << ',' << comp << '_' << csv_escape(test);
    os << '\n';
    for (const auto& model : matrix.models) {
        for (const auto& train : matrix.training_sets) {
            os << csv_escape(model) << ',' << csv_escape(train);
            for (int comp = 0; comp < 3; ++comp) {
                for (const auto& test : matrix.test_sets) {
                    const EvalCell* cell = matrix.find(model, train, test);
                    os << ',';
                    if (!cell)
                        continue;
                    os << fmt_double(comp == 0   ? cell->sigma_c
                                     : comp == 1 ? cell->conl
                                                 : cell->mu_s);
                }
            }
            os << '\n';
        }
    }
    return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string render_table(const ComparisonMatrix& matrix) {
    const auto winners = render_winners(matrix);
    std::ostringstream os;

    auto emit = [&](const std::string& title,
                    const std::vector<std::string>& value_headers,
                    auto&& value_fn) {
        std::vector<std::vector<std::string>> rows;
        std::vector<std::string> header = {"model", "training_set"};
        header.insert(header.end(), value_headers.begin(), value_headers.end());
        rows.push_back(header);
        for (const auto& model : matrix.models) {
            for (const auto& train : matrix.training_sets) {
                std::vector<std::string> row = {model, train};
                for (std::size_t c = 0; c < value_headers.size(); ++c)
                    row.push_back(value_fn(model, train, c));
                rows.push_back(std::move(row));
            }
        }
        std::vector<std::size_t> widths(rows[0].size(), 0);
        for (const auto& row : rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                widths[c] = std::max(widths[c], row[c].size());
        os << title << '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                os << pad(row[c], widths[c]) << (c + 1 < row.size() ? "  " : "");
            os << '\n';
        }
    };

    emit("UCIQE totals", matrix.test_sets,
         [&](const std::string& model, const std::string& train,
             std::size_t c) -> std::string {
             const EvalCell* cell =
                 matrix.find(model, train, matrix.test_sets[c]);
             if (!cell || !cell->total)
                 return "-";
             std::string v = fmt_double(*cell->total);
             const auto it = winners.find({model, matrix.test_sets[c]});
             if (it != winners.end() && it->second == train)
                 v += '*';
             return v;
         });
    os << '\n';

    std::vector<std::string> comp_headers;
    for (const char* comp : {"sigma_c", "conl", "mu_s"})
        for (const auto& test : matrix.test_sets)
            comp_headers.push_back(std::string(comp) + "_" + test);
    emit("UCIQE components", comp_headers,
         [&](const std::string& model, const std::string& train,
             std::size_t c) -> std::string {
             const auto& test = matrix.test_sets[c % matrix.test_sets.size()];
             const EvalCell* cell = matrix.find(model, train, test);
             if (!cell)
                 return "-";
             const std::size_t comp = c / matrix.test_sets.size();
             return fmt_double(comp == 0   ? cell->sigma_c
                               : comp == 1 ? cell->conl
                                           : cell->mu_s);
         });
    return os.str();
}

} // namespace

std::string render_report(const ComparisonMatrix& matrix, ReportFormat format) {
    if (matrix.cells.empty())
        throw ValidationError("cannot render an empty matrix");
    switch (format) {
    case ReportFormat::Csv:
        return render_csv(matrix);
    case ReportFormat::Table:
        return render_table(matrix);
    }
    throw ValidationError("unknown report format");
}

void write_cells(const ComparisonMatrix& matrix, const fs::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw IoError(file.string() + ": cannot open for writing");
    ordered_json header;
    header["format"] = "uwsynth-cells";
    header["version"] = 1;
    out << header.dump() << '\n';
    for (const auto& cell : matrix.cells) {
        ordered_json j;
        j["model"] = cell.model_id;
        j["training_set"] = cell.training_set_id;
        j["test_set"] = cell.test_set_id;
        j["n_images"] = cell.n_images;
        j["sigma_c"] = cell.sigma_c;
        j["conl"] = cell.conl;
        j["mu_s"] = cell.mu_s;
        j["total"] = cell.total ? ordered_json(*cell.total) : ordered_json();
        j["psnr"] = cell.psnr ? ordered_json(*cell.psnr) : ordered_json();
        j["ssim"] = cell.ssim ? ordered_json(*cell.ssim) : ordered_json();
        j["failures"] = cell.failures;
        out << j.dump() << '\n';
    }
    if (!out)
        throw IoError(file.string() + ": write failed");
}

ComparisonMatrix read_cells(const std::vector<fs::path>& files) {
    ComparisonMatrix matrix;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw IoError(file.string() + ": cannot open");
        std::string line;
        if (!std::getline(in, line))
            throw IoError(file.string() + ": empty cell file");
        try {
            const auto header = nlohmann::json::parse(line);
            if (header.at("format") != "uwsynth-cells")
                throw ValidationError(file.string() + ": not a cell file");
            while (std::getline(in, line)) {
                if (line.empty())
                    continue;
                const auto j = nlohmann::json::parse(line);
                EvalCell cell;
                cell.model_id = j.at("model").get<std::string>();
                cell.training_set_id = j.at("training_set").get<std::string>();
                cell.test_set_id = j.at("test_set").get<std::string>();
                cell.n_images = j.at("n_images").get<std::size_t>();
                auto num_or_nan = [&j](const char* key) {
                    return j.at(key).is_null()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : j.at(key).get<double>();
                };
                cell.sigma_c = num_or_nan("sigma_c");
                cell.conl = num_or_nan("conl");
                cell.mu_s = num_or_nan("mu_s");
                if (!j.at("total").is_null())
                    cell.total = j.at("total").get<double>();
                if (!j.at("psnr").is_null())
                    cell.psnr = j.at("psnr").get<double>();
                if (!j.at("ssim").is_null())
                    cell.ssim = j.at("ssim").get<double>();
                cell.failures = j.at("failures").get<std::size_t>();
                matrix.add(std::move(cell));
            }
        } catch (const nlohmann::json::exception& e) {
            throw IoError(file.string() + ": malformed cell file: " + e.what());
        }
    }
    return matrix;
}

std::string render_detail_csv(const DirectoryEval& eval) {
    std::ostringstream os;
    os << "filename,sigma_c,conl,mu_s,total,psnr,ssim\n";
    for (const auto& img : eval.images) {
        os << csv_escape(img.filename) << ',' << fmt_double(img.score.sigma_c)
           << ',' << fmt_double(img.score.conl) << ','
           << fmt_double(img.score.mu_s) << ',' << fmt_double(img.score.total)
           << ',';
        if (img.full_ref)
            os << fmt_double(img.full_ref->psnr_db) << ','
               << fmt_double(img.full_ref->ssim);
        else
            os << ',';
        os << '\n';
    }
    return os.str();
}

} // namespace uwsynth
