#include <doctest.h>

#include "helpers.hpp"
#include "repid/dataset.hpp"
#include "repid/dgp.hpp"
#include "repid/grid.hpp"
#include "repid/truth_fns.hpp"

using namespace repid;

TEST_CASE("load_dataset infers column types") {
    const Dataset ds = load_dataset("a,b\n1,x\n2,y\n");
    CHECK(ds.n() == 2);
    CHECK(ds.p() == 2);
    CHECK(ds.metas[0].kind == FeatureKind::numeric);
    CHECK(ds.metas[1].kind == FeatureKind::categorical);
    CHECK(ds.metas[1].levels == std::vector<std::string>{"x", "y"});
    CHECK(ds.columns[0] == std::vector<double>{1.0, 2.0});
    CHECK(ds.columns[1] == std::vector<double>{0.0, 1.0});
}

TEST_CASE("load_dataset reports missing values with row and column") {
    try {
        load_dataset("a,b\n1,NA\n");
        FAIL("expected a load error");
    } catch (const Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 1") != std::string::npos);
        CHECK(msg.find("'b'") != std::string::npos);
    }
    CHECK_THROWS_AS(load_dataset("a,b\n,2\n"), Error);
}

TEST_CASE("load_dataset rejects ragged, empty, and non-finite input") {
    CHECK_THROWS_AS(load_dataset(""), Error);
    CHECK_THROWS_AS(load_dataset("a,b\n"), Error);
    CHECK_THROWS_AS(load_dataset("a,b\n1,2\n3\n"), Error);
    CHECK_THROWS_AS(load_dataset("a\ninf\n"), Error);
    CHECK_THROWS_AS(load_dataset("a\nnan\n"), Error);
}

TEST_CASE("load_dataset handles RFC-4180 quoting") {
    const Dataset ds = load_dataset("name,v\n\"a,b\",1\n\"say \"\"hi\"\"\",2\r\n");
    CHECK(ds.n() == 2);
    CHECK(ds.metas[0].levels[0] == "a,b");
    CHECK(ds.metas[0].levels[1] == "say \"hi\"");
}

TEST_CASE("copula sample survives a CSV round trip exactly") {
    DgpSpec spec;
    spec.marginals = {UniformMarginal{-1, 1}, NormalMarginal{0.5, 2.0},
                      BernoulliMarginal{0.4}, UniformMarginal{2, 5}};
    spec.truth_fn = "weak_linear";
    spec.truth_params = {1, 1, 1, 1, 1, 1, 1, 1};
    auto [ds, y] = sample_dgp(spec, lookup_truth_fn(spec.truth_fn), 1000, 99);
    const Dataset reloaded = load_dataset(save_dataset(ds));
    CHECK(reloaded == ds);
}

TEST_CASE("make_grid equidistant endpoints and spacing") {
    Dataset ds;
    ds.metas = {FeatureMeta{"a", FeatureKind::numeric, {}}};
    ds.columns = {{-1.0, 0.25, 1.0, 0.5}};
    const Grid g = make_grid(ds, 0, GridStrategy::equidistant, 3);
    CHECK(g.values == std::vector<double>{-1.0, 0.0, 1.0});
}

TEST_CASE("make_grid quantile hits the extremes") {
    Dataset ds;
    ds.metas = {FeatureMeta{"a", FeatureKind::numeric, {}}};
    ds.columns = {{1.0, 2.0, 3.0, 4.0}};
    const Grid g = make_grid(ds, 0, GridStrategy::quantile, 2);
    CHECK(g.values == std::vector<double>{1.0, 4.0});
}

TEST_CASE("equidistant spacing is uniform on a random sample") {
    const Dataset ds = testutil::uniform_dataset(500, 1, 4242);
    const Grid g = make_grid(ds, 0, GridStrategy::equidistant, 20);
    const auto [mn, mx] = std::minmax_element(ds.columns[0].begin(),
                                              ds.columns[0].end());
    const double step = (*mx - *mn) / 19.0;
    for (std::size_t k = 1; k < g.values.size(); ++k)
        CHECK(g.values[k] - g.values[k - 1] == doctest::Approx(step).epsilon(1e-12));
}

TEST_CASE("make_grid failure modes") {
    Dataset ds;
    ds.metas = {FeatureMeta{"a", FeatureKind::numeric, {}}};
    ds.columns = {{2.0, 2.0, 2.0}};
    CHECK_THROWS_AS(make_grid(ds, 0, GridStrategy::equidistant, 5), Error);

    ds.columns = {{1.0, 2.0, 2.0}};
    CHECK_THROWS_AS(make_grid(ds, 0, GridStrategy::sample, 3), Error);
    CHECK_THROWS_AS(make_grid(ds, 0, GridStrategy::equidistant, 1), Error);
}

TEST_CASE("grids are sorted, unique, and inside the data range") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Dataset ds = testutil::uniform_dataset(200, 1, seed);
        const auto [mn, mx] = std::minmax_element(ds.columns[0].begin(),
                                                  ds.columns[0].end());
        for (auto strategy : {GridStrategy::equidistant, GridStrategy::quantile,
                              GridStrategy::sample}) {
            const Grid g = make_grid(ds, 0, strategy, 17);
            CHECK(g.values.size() == 17);
            CHECK(g.values.front() >= *mn);
            CHECK(g.values.back() <= *mx);
            for (std::size_t k = 1; k < g.values.size(); ++k)
                CHECK(g.values[k] > g.values[k - 1]);
        }
    }
}

TEST_CASE("categorical grids enumerate the level list") {
    const Dataset ds = load_dataset("c,v\nred,1\nblue,2\nred,3\n");
    const Grid g = make_grid(ds, 0, GridStrategy::equidistant, 20);
    CHECK(g.values == std::vector<double>{0.0, 1.0});
}
