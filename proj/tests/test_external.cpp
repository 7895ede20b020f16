#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <thread>

#include "helpers.hpp"
#include "repid/external.hpp"
#include "repid/predictor.hpp"

using namespace repid;

namespace {

Matrix small_rows() {
    Matrix rows(5, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        rows(i, 0) = 0.25 * static_cast<double>(i) - 0.6;
        rows(i, 1) = 1.5 - 0.3 * static_cast<double>(i);
    }
    return rows;
}

std::vector<FeatureMeta> xy_metas() {
    return {FeatureMeta{"x1", FeatureKind::numeric, {}},
            FeatureMeta{"x2", FeatureKind::numeric, {}}};
}

}  // namespace

TEST_CASE("exec mode: identity predictor echoes the x1 column") {
    ExternalSpec spec;
    spec.mode = ExternalExecMode{"awk -F, 'NR>1{print $1}'"};
    spec.timeout_seconds = 10.0;
    const Matrix rows = small_rows();
    const auto preds = predict_external(spec, rows, xy_metas());
    REQUIRE(preds.size() == rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        CHECK(preds[i] == doctest::Approx(rows(i, 0)).epsilon(1e-15));
}

TEST_CASE("exec mode matches the in-process linear predictor to 1e-12") {
    ExternalSpec spec;
    spec.mode = ExternalExecMode{
        "awk -F, 'NR>1{printf \"%.17g\\n\", $1 + $2}'"};
    spec.timeout_seconds = 10.0;
    const Matrix rows = small_rows();
    const auto external = predict_external(spec, rows, xy_metas());

    LinearModel lm;
    lm.terms = {linear_term(0), linear_term(1)};
    lm.coefficients = {1.0, 1.0};
    const auto internal = predict(Predictor::linear(lm), rows, xy_metas());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        CHECK(std::fabs(external[i] - internal[i]) <= 1e-12);
}

TEST_CASE("exec mode: short output is a count mismatch") {
    ExternalSpec spec;
    spec.mode = ExternalExecMode{"awk -F, 'NR>2{print $1}'"};
    spec.timeout_seconds = 10.0;
    try {
        predict_external(spec, small_rows(), xy_metas());
        FAIL("expected a protocol error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::predictor);
        CHECK(std::string(e.what()).find("expected 5") != std::string::npos);
    }
}

TEST_CASE("exec mode: unparsable lines and timeouts are reported") {
    ExternalSpec spec;
    spec.mode = ExternalExecMode{"awk -F, 'NR>1{print \"abc\"}'"};
    spec.timeout_seconds = 10.0;
    CHECK_THROWS_AS(predict_external(spec, small_rows(), xy_metas()), Error);

    ExternalSpec slow;
    slow.mode = ExternalExecMode{"sleep 5"};
    slow.timeout_seconds = 0.3;
    try {
        predict_external(slow, small_rows(), xy_metas());
        FAIL("expected a timeout");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("timeout") != std::string::npos);
    }
}

TEST_CASE("file mode round trip with the sentinel line") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "repid_file_mode_test";
    fs::create_directories(dir);
    const std::string points = (dir / "points.csv").string();
    const std::string preds = (dir / "preds.csv").string();
    std::remove(points.c_str());
    std::remove(preds.c_str());

    // Plays the external model: waits for the points file, answers with the
    // first column, writes the sentinel last.
    std::thread model([&] {
        while (!fs::exists(points))
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        std::this_thread::sleep_for(std::chrono::milliseconds(30));
        const Dataset pts = load_dataset(read_file(points));
        std::string out = "prediction\n";
        for (double v : pts.columns[0]) out += detail::format_double(v) + "\n";
        out += "#done\n";
        write_file(preds, out);
    });

    ExternalSpec spec;
    spec.mode = ExternalFileMode{points, preds};
    spec.timeout_seconds = 10.0;
    const Matrix rows = small_rows();
    const auto result = predict_external(spec, rows, xy_metas());
    model.join();
    REQUIRE(result.size() == rows.rows());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        CHECK(result[i] == doctest::Approx(rows(i, 0)).epsilon(1e-15));

    std::remove(points.c_str());
    std::remove(preds.c_str());
}

TEST_CASE("external spec validation") {
    ExternalSpec empty_cmd;
    empty_cmd.mode = ExternalExecMode{""};
    CHECK_THROWS_AS(empty_cmd.validate(), Error);
    ExternalSpec empty_paths;
    empty_paths.mode = ExternalFileMode{"", "x"};
    CHECK_THROWS_AS(empty_paths.validate(), Error);
}
