#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "benchmark_fixtures.hpp"
#include "test_helpers.hpp"
#include "uwsynth/errors.hpp"
#include "uwsynth/eval.hpp"
#include "uwsynth/image_io.hpp"

using namespace uwsynth;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("uwsynth_ev_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ComparisonMatrix fixture_matrix(bool with_totals) {
    ComparisonMatrix matrix;
    for (const auto& row : fixtures::kGrid) {
        for (std::size_t t = 0; t < 3; ++t) {
            EvalCell cell;
            cell.model_id = fixtures::kModels[static_cast<std::size_t>(row.model)];
            cell.training_set_id =
                fixtures::kTrainingSets[static_cast<std::size_t>(row.training_set)];
            cell.test_set_id = fixtures::kTestSets[t];
            cell.n_images = 1;
            cell.sigma_c = row.sigma_c[t];
            cell.conl = row.conl[t];
            cell.mu_s = row.mu_s[t];
            if (with_totals)
                cell.total = row.total[t];
            matrix.add(std::move(cell));
        }
    }
    return matrix;
}

bool is_synthetic(const std::string& training_set) {
    return training_set == "UWImgNetSD" || training_set == "UWNature";
}

// Minimal CSV field splitter for checking our own RFC 4180 output.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

TEST_CASE("directory of copies scores exactly like the single image") {
    const fs::path dir = temp_dir("copies");
    const auto img = oracle::colorful_scene(64, 5);
    for (int i = 0; i < 5; ++i)
        write_png(img, dir / ("copy" + std::to_string(i) + ".png"));
    const auto eval = evaluate_directory(dir);
    REQUIRE(eval.images.size() == 5);
    const auto single = uciqe(img);
    CHECK(eval.mean.sigma_c == single.sigma_c);
    CHECK(eval.mean.conl == single.conl);
    CHECK(eval.mean.mu_s == single.mu_s);
    CHECK(eval.mean.total == single.total);
}

TEST_CASE("two-image mean and the weighted-sum identity") {
    const fs::path dir = temp_dir("pair");
    const auto a = oracle::colorful_scene(64, 1);
    const auto b = oracle::colorful_scene(64, 2);
    write_png(a, dir / "a.png");
    write_png(b, dir / "b.png");
    const auto eval = evaluate_directory(dir);
    const double t1 = uciqe(a).total, t2 = uciqe(b).total;
    CHECK(std::fabs(eval.mean.total - (t1 + t2) / 2.0) < 1e-12);
    CHECK(std::fabs(eval.mean.total -
                    UciqeScore::combine(eval.mean.sigma_c, eval.mean.conl,
                                        eval.mean.mu_s)) == 0.0);
}

TEST_CASE("parallel evaluation is bitwise equal to serial") {
    const fs::path dir = temp_dir("sched");
    for (int i = 0; i < 24; ++i)
        write_png(oracle::random_image(48, 48, 100 + i),
                  dir / ("img" + std::to_string(i) + ".png"));
    EvalOptions serial;
    serial.jobs = 1;
    EvalOptions parallel;
    parallel.jobs = 8;
    const auto e1 = evaluate_directory(dir, serial);
    const auto e2 = evaluate_directory(dir, parallel);
    REQUIRE(e1.images.size() == e2.images.size());
    for (std::size_t i = 0; i < e1.images.size(); ++i) {
        CHECK(e1.images[i].filename == e2.images[i].filename);
        CHECK(e1.images[i].score.total == e2.images[i].score.total);
        CHECK(e1.images[i].score.sigma_c == e2.images[i].score.sigma_c);
    }
    CHECK(e1.mean.total == e2.mean.total);
}

TEST_CASE("undecodable files degrade into counted failures") {
    const fs::path dir = temp_dir("corrupt");
    write_png(oracle::random_image(32, 32, 9), dir / "good.png");
    std::ofstream(dir / "bad.png") << "this is not a png";
    const auto eval = evaluate_directory(dir);
    CHECK(eval.images.size() == 1);
    REQUIRE(eval.failures.size() == 1);
    CHECK(eval.failures[0].find("bad.png") != std::string::npos);
}

TEST_CASE("evaluation errors") {
    const fs::path dir = temp_dir("empty");
    CHECK_THROWS_AS(evaluate_directory(dir), ValidationError);
    CHECK_THROWS_AS(evaluate_directory(dir / "missing"), IoError);

    write_png(oracle::random_image(32, 32, 9), dir / "x.png");
    const fs::path refs = temp_dir("refs");
    write_png(oracle::random_image(32, 32, 10), refs / "y.png");
    EvalOptions options;
    options.reference_dir = refs;
    CHECK_THROWS_WITH_AS(evaluate_directory(dir, options),
                         doctest::Contains("x.png"), ValidationError);
}

TEST_CASE("full-reference scoring by matching filenames") {
    const fs::path dir = temp_dir("fr_test");
    const fs::path refs = temp_dir("fr_ref");
    const auto clean = ImageRgb8::filled(64, 64, {100, 110, 120});
    const auto shifted = ImageRgb8::filled(64, 64, {116, 126, 136});
    write_png(shifted, dir / "img.png");
    write_png(clean, refs / "img.png");
    EvalOptions options;
    options.reference_dir = refs;
    const auto eval = evaluate_directory(dir, options);
    REQUIRE(eval.images.size() == 1);
    REQUIRE(eval.images[0].full_ref.has_value());
    CHECK(eval.images[0].full_ref->psnr_db ==
          doctest::Approx(24.0484).epsilon(1e-4));
    REQUIRE(eval.mean_full_ref.has_value());
    CHECK(eval.mean_full_ref->psnr_db == eval.images[0].full_ref->psnr_db);
}

TEST_CASE("matrix rejects duplicate triples") {
    ComparisonMatrix matrix;
    EvalCell cell;
    cell.model_id = "m";
    cell.training_set_id = "tr";
    cell.test_set_id = "te";
    cell.n_images = 1;
    matrix.add(cell);
    CHECK_THROWS_AS(matrix.add(cell), ValidationError);
}

TEST_CASE("winner of the first fixture group") {
    const auto matrix = fixture_matrix(true);
    const auto winners = winners_per_group(matrix);
    for (const auto& w : winners)
        if (w.model_id == "UWCNN" && w.test_set_id == "U45") {
            CHECK(w.training_set_id == "UWImgNetSD");
            CHECK(!w.tie);
        }
}

TEST_CASE("synthetic training sets win 14 of the 18 fixture groups") {
    const auto winners = winners_per_group(fixture_matrix(true));
    REQUIRE(winners.size() == 18);
    int synthetic_wins = 0;
    for (const auto& w : winners)
        if (is_synthetic(w.training_set_id))
            ++synthetic_wins;
    CHECK(synthetic_wins == fixtures::kExpectedSyntheticWins);
}

TEST_CASE("ties break lexicographically and are flagged") {
    ComparisonMatrix matrix;
    for (const char* train : {"zeta", "alpha", "mid"}) {
        EvalCell cell;
        cell.model_id = "m";
        cell.training_set_id = train;
        cell.test_set_id = "t";
        cell.n_images = 1;
        cell.total = 0.5;
        matrix.add(std::move(cell));
    }
    const auto winners = winners_per_group(matrix);
    REQUIRE(winners.size() == 1);
    CHECK(winners[0].training_set_id == "alpha");
    CHECK(winners[0].tie);
}

TEST_CASE("missing groups are reported explicitly") {
    ComparisonMatrix matrix;
    EvalCell cell;
    cell.model_id = "m1";
    cell.training_set_id = "tr";
    cell.test_set_id = "t1";
    cell.n_images = 1;
    cell.total = 0.4;
    matrix.add(cell);
    EvalCell other = cell;
    other.model_id = "m2";
    other.test_set_id = "t2";
    matrix.add(other); // (m1, t2) and (m2, t1) now missing
    CHECK_THROWS_WITH_AS(winners_per_group(matrix),
                         doctest::Contains("(m1, t2)"), ValidationError);
}

TEST_CASE("winners are invariant under positive scaling of a group") {
    auto matrix = fixture_matrix(true);
    const auto before = winners_per_group(matrix);
    for (auto& cell : matrix.cells)
        if (cell.test_set_id == "RUIE")
            cell.total = *cell.total * 3.25;
    const auto after = winners_per_group(matrix);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(before[i].training_set_id == after[i].training_set_id);
}

TEST_CASE("reconstructed totals match the published grid within 5e-4") {
    auto matrix = fixture_matrix(false);
    reconstruct_totals(matrix);
    const auto published = fixture_matrix(true);
    for (const auto& cell : matrix.cells) {
        const EvalCell* expected = published.find(
            cell.model_id, cell.training_set_id, cell.test_set_id);
        REQUIRE(expected);
        REQUIRE(cell.total.has_value());
        CHECK(std::fabs(*cell.total - *expected->total) < 5e-4);
    }
    CHECK(UciqeScore::combine(0.0, 0.0, 0.0) == 0.0);
    CHECK(std::fabs(UciqeScore::combine(0.3400, 0.7952, 0.8374) - 0.5931) <
          5e-4);
}

TEST_CASE("reconstruction names the missing component") {
    ComparisonMatrix matrix;
    EvalCell cell;
    cell.model_id = "m";
    cell.training_set_id = "tr";
    cell.test_set_id = "te";
    cell.n_images = 1;
    cell.conl = std::numeric_limits<double>::quiet_NaN();
    matrix.add(cell);
    CHECK_THROWS_WITH_AS(reconstruct_totals(matrix), doctest::Contains("conl"),
                         ValidationError);
}

TEST_CASE("single-cell report renders one data row") {
    ComparisonMatrix matrix;
    EvalCell cell;
    cell.model_id = "m";
    cell.training_set_id = "tr";
    cell.test_set_id = "te";
    cell.n_images = 3;
    cell.sigma_c = 0.25;
    cell.conl = 0.8;
    cell.mu_s = 0.85;
    cell.total = UciqeScore::combine(0.25, 0.8, 0.85);
    matrix.add(cell);
    const std::string csv = render_report(matrix, ReportFormat::Csv);
    std::istringstream is(csv);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(is, line))
        lines.push_back(line);
    // totals header + row, blank, components header + row
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "model,training_set,te,best_te");
    CHECK(lines[2].empty());
    CHECK(split_csv_line(lines[1])[0] == "m");
    CHECK(split_csv_line(lines[1])[3] == "1"); // sole cell wins its group
}

TEST_CASE("fixture CSV round-trips the published values") {
    const auto matrix = fixture_matrix(true);
    const std::string csv = render_report(matrix, ReportFormat::Csv);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    const auto header = split_csv_line(line);
    REQUIRE(header.size() == 2 + 3 + 3);
    std::size_t row = 0;
    while (std::getline(is, line) && !line.empty()) {
        const auto fields = split_csv_line(line);
        const EvalCell* cell0 = matrix.find(fields[0], fields[1], header[2]);
        REQUIRE(cell0);
        for (std::size_t t = 0; t < 3; ++t) {
            const EvalCell* cell =
                matrix.find(fields[0], fields[1], header[2 + t]);
            REQUIRE(cell);
            CHECK(std::stod(fields[2 + t]) == *cell->total);
        }
        ++row;
    }
    CHECK(row == 30);

    CHECK(render_report(matrix, ReportFormat::Csv) == csv); // deterministic
    const std::string table = render_report(matrix, ReportFormat::Table);
    CHECK(table.find("UCIQE totals") != std::string::npos);
    CHECK(table.find('*') != std::string::npos);
    CHECK(render_report(matrix, ReportFormat::Table) == table);

    ComparisonMatrix empty;
    CHECK_THROWS_AS(render_report(empty, ReportFormat::Csv), ValidationError);
}

TEST_CASE("cell files round trip") {
    const fs::path dir = temp_dir("cells");
    const auto matrix = fixture_matrix(true);
    write_cells(matrix, dir / "cells.jsonl");
    const auto reread = read_cells({dir / "cells.jsonl"});
    REQUIRE(reread.cells.size() == matrix.cells.size());
    for (std::size_t i = 0; i < matrix.cells.size(); ++i) {
        CHECK(reread.cells[i].model_id == matrix.cells[i].model_id);
        CHECK(reread.cells[i].sigma_c == matrix.cells[i].sigma_c);
        CHECK(reread.cells[i].total == matrix.cells[i].total);
        CHECK(!reread.cells[i].psnr.has_value());
    }
    write_cells(reread, dir / "cells2.jsonl");
    std::ifstream a(dir / "cells.jsonl"), b(dir / "cells2.jsonl");
    const std::string sa((std::istreambuf_iterator<char>(a)), {});
    const std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
}

TEST_CASE("detail CSV lists one row per image") {
    const fs::path dir = temp_dir("detail");
    write_png(oracle::colorful_scene(64, 8), dir / "a.png");
    write_png(oracle::colorful_scene(64, 9), dir / "b.png");
    const auto eval = evaluate_directory(dir);
    const std::string csv = render_detail_csv(eval);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "filename,sigma_c,conl,mu_s,total,psnr,ssim");
    std::getline(is, line);
    const auto fields = split_csv_line(line);
    REQUIRE(fields.size() == 7);
    CHECK(fields[0] == "a.png");
    CHECK(std::stod(fields[4]) == eval.images[0].score.total);
    CHECK(fields[5].empty());
}
