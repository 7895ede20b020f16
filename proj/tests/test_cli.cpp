#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "repid/io.hpp"

// End-to-end checks against the built binary.

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string stderr_text;
};

CliResult run_cli(const std::string& args) {
    static const std::string bin = REPID_CLI_PATH;
    const fs::path err = fs::temp_directory_path() / "repid_cli_stderr.txt";
    const std::string cmd = bin + " " + args + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    r.stderr_text.assign((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    return r;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const {
        return (path / f).string();
    }
};

}  // namespace

TEST_CASE("simulate then explain produces the full file set") {
    TempDir dir("repid_cli_explain");
    const std::string data = dir / "sim.csv";
    CHECK(run_cli("simulate --setting sim3_running --n 300 --seed 3 --out " + data)
              .exit_code == 0);
    REQUIRE(fs::exists(data));

    const std::string out = dir / "run1";
    const CliResult r = run_cli(
        "explain --data " + data +
        " --predictor truth:sim3_running --feature x2 --max-depth 2 "
        "--gamma 0.1 --out " + out);
    CHECK(r.exit_code == 0);
    for (const char* f : {"tree.json", "reps.csv", "report.csv", "ice.csv"})
        CHECK(fs::exists(fs::path(out) / f));

    // report ranks x3 above x1
    const repid::Dataset report =
        repid::load_dataset(repid::read_file((fs::path(out) / "report.csv").string()));
    const auto& feature = report.columns[1];
    const auto& score = report.columns[2];
    double s1 = -1, s3 = -1;
    for (std::size_t i = 0; i < report.n(); ++i) {
        const std::string name =
            report.metas[1].levels[static_cast<std::size_t>(feature[i])];
        if (name == "x1") s1 = score[i];
        if (name == "x3") s3 = score[i];
    }
    CHECK(s3 > s1);
    CHECK(s1 > 0.0);

    // byte-identical on a second run
    const std::string out2 = dir / "run2";
    CHECK(run_cli("explain --data " + data +
                  " --predictor truth:sim3_running --feature x2 --max-depth 2 "
                  "--gamma 0.1 --out " + out2)
              .exit_code == 0);
    for (const char* f : {"tree.json", "reps.csv", "report.csv", "ice.csv"})
        CHECK(repid::read_file((fs::path(out) / f).string()) ==
              repid::read_file((fs::path(out2) / f).string()));
}

TEST_CASE("explain on a single-feature dataset reports an empty complement") {
    TempDir dir("repid_cli_single");
    const std::string data = dir / "one.csv";
    repid::write_file(data, "x1\n0.1\n0.5\n0.9\n-0.4\n");
    const CliResult r = run_cli("explain --data " + data +
                                " --predictor truth:sim3_running --feature x1 "
                                "--out " + (dir / "out"));
    CHECK(r.exit_code == 3);
    CHECK(r.stderr_text.find("complement") != std::string::npos);
}

TEST_CASE("CLI maps error categories to exit codes") {
    TempDir dir("repid_cli_errors");
    // usage: unknown subcommand / missing required option
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("explain --data missing.csv").exit_code == 2);
    // data: nonexistent file
    CHECK(run_cli("explain --data " + (dir / "nope.csv") +
                  " --predictor truth:sim3_running --feature x2 --out " +
                  (dir / "o"))
              .exit_code == 3);
    // usage: unknown setting lists the catalog
    const CliResult r = run_cli("experiment --setting bogus --out " + (dir / "o"));
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.find("weak_initial") != std::string::npos);
    // usage: reps = 0
    CHECK(run_cli("experiment --setting weak_initial --reps 0 --out " +
                  (dir / "o"))
              .exit_code == 2);
    // predictor: external command that fails
    const std::string data = dir / "d.csv";
    repid::write_file(data, "x1,x2\n0.1,0.2\n0.5,-0.3\n0.9,0.7\n");
    CHECK(run_cli("indices --data " + data +
                  " --predictor exec:false --feature x1 --methods h_statistic "
                  "--out " + (dir / "o"))
              .exit_code == 4);
}

TEST_CASE("experiment subcommand writes table, summary, and splits") {
    TempDir dir("repid_cli_experiment");
    const std::string out = dir / "exp";
    const CliResult r = run_cli(
        "experiment --setting sim3_running --reps 2 --seed 9 --out " + out);
    CHECK(r.exit_code == 0);
    const repid::Dataset table =
        repid::load_dataset(repid::read_file((fs::path(out) / "table.csv").string()));
    CHECK(table.n() == 2 * 5);  // 2 reps x 5 partner features
    REQUIRE(fs::exists(fs::path(out) / "splits.csv"));
    REQUIRE(fs::exists(fs::path(out) / "table.json"));

    // one agreement row per requested method
    const repid::Dataset summary = repid::load_dataset(
        repid::read_file((fs::path(out) / "summary.csv").string()));
    CHECK(summary.n() == 1);  // sim3_running runs repid only
    CHECK(summary.metas[0].name == "method");

    // restricting methods restricts the table
    const std::string out2 = dir / "exp2";
    CHECK(run_cli("experiment --setting linear7 --reps 1 --methods repid --seed 2 "
                  "--out " + out2)
              .exit_code == 0);
    const std::string table2 =
        repid::read_file((fs::path(out2) / "table.csv").string());
    CHECK(table2.find("repid") != std::string::npos);
    CHECK(table2.find("h_statistic") == std::string::npos);
}

TEST_CASE("plot renders ICE files with a PD overlay and REP files with legends") {
    TempDir dir("repid_cli_plot");
    const std::string data = dir / "sim.csv";
    REQUIRE(run_cli("simulate --setting sim3_running --n 120 --seed 5 --out " +
                    data)
                .exit_code == 0);
    const std::string out = dir / "exp";
    REQUIRE(run_cli("explain --data " + data +
                    " --predictor truth:sim3_running --feature x2 --max-depth 2 "
                    "--gamma 0.1 --out " + out)
                .exit_code == 0);

    const std::string ice_svg = dir / "ice.svg";
    CHECK(run_cli("plot --input " + (fs::path(out) / "ice.csv").string() +
                  " --out " + ice_svg)
              .exit_code == 0);
    const std::string svg = repid::read_file(ice_svg);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        pos += 9;
    }
    CHECK(polylines == 120 + 1);  // one per observation plus the PD overlay

    const std::string reps_svg = dir / "reps.svg";
    CHECK(run_cli("plot --input " + (fs::path(out) / "reps.csv").string() +
                  " --out " + reps_svg)
              .exit_code == 0);
    const std::string rsvg = repid::read_file(reps_svg);
    CHECK(rsvg.find("region-0") != std::string::npos);
    CHECK(rsvg.find("x3=") != std::string::npos);  // legend label from the path

    // empty curves file is an error
    const std::string empty = dir / "empty.csv";
    repid::write_file(empty, "");
    CHECK(run_cli("plot --input " + empty + " --out " + (dir / "e.svg"))
              .exit_code == 3);
}

TEST_CASE("indices subcommand matches the library API run") {
    TempDir dir("repid_cli_indices");
    const std::string data = dir / "sim.csv";
    REQUIRE(run_cli("simulate --setting weak_initial --n 200 --seed 11 --out " +
                    data)
                .exit_code == 0);
    const std::string out = dir / "idx";
    const CliResult r = run_cli("indices --data " + data +
                                " --predictor truth:weak_initial --feature x2 "
                                "--methods greenwell --seed 11 --out " + out);
    CHECK(r.exit_code == 0);

    const repid::Dataset csv =
        repid::load_dataset(repid::read_file((fs::path(out) / "report.csv").string()));
    const repid::Dataset ds = repid::load_dataset(repid::read_file(data));
    repid::IndexConfig cfg;
    cfg.seed = 11;
    const auto lib =
        repid::greenwell_report(repid::Predictor::truth("weak_linear",
                                                        {1, 1, 1, 1, 1, 1, 1, 1}),
                                ds, 1, cfg);
    for (std::size_t i = 0; i < csv.n(); ++i) {
        const std::string name =
            csv.metas[1].levels[static_cast<std::size_t>(csv.columns[1][i])];
        const int f = ds.feature_index(name);
        CHECK(csv.columns[2][i] == lib.scores.at(f));
    }
}
