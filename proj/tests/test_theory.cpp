#include <doctest.h>

#include <cmath>

#include "debatekit/errors.hpp"
#include "debatekit/theory.hpp"

using namespace debatekit;

TEST_CASE("concentration bound closed form") {
    CHECK(hoeffding_bound(5, 0.99) == doctest::Approx(0.909373).epsilon(1e-6));
    CHECK(hoeffding_bound(1, 0.5) == doctest::Approx(0.0));
    CHECK(hoeffding_bound(10, 0.9) == doctest::Approx(1.0 - std::exp(-2.0 * 10 * 0.16)));
    CHECK_THROWS_AS(hoeffding_bound(5, 0.4), UsageError);
    CHECK_THROWS_AS(hoeffding_bound(0, 0.9), UsageError);
}

TEST_CASE("bound is monotone in K and p") {
    for (int k = 1; k < 30; ++k) CHECK(hoeffding_bound(k + 1, 0.8) > hoeffding_bound(k, 0.8));
    for (double p = 0.55; p < 0.99; p += 0.05)
        CHECK(hoeffding_bound(7, p + 0.01) > hoeffding_bound(7, p));
}

TEST_CASE("certified committee sizes") {
    CHECK(sample_complexity(0.99, 0.1) == 5);
    CHECK(sample_complexity(0.7, 0.05) == 38);
    CHECK(sample_complexity(0.999, 0.9) == 1);  // floor at one agent
}

TEST_CASE("sample complexity is what the bound certifies") {
    for (double p : {0.6, 0.75, 0.9, 0.99}) {
        for (double delta : {0.3, 0.1, 0.01}) {
            int k = sample_complexity(p, delta);
            CHECK(hoeffding_bound(k, p) >= 1.0 - delta - 1e-12);
            if (k > 1) CHECK(hoeffding_bound(k - 1, p) < 1.0 - delta + 1e-12);
        }
    }
}

TEST_CASE("exact majority accuracy") {
    CHECK(majority_success_exact(5, 0.99) == doctest::Approx(0.9999901).epsilon(1e-6));
    CHECK(majority_success_exact(3, 0.6) == doctest::Approx(0.648).epsilon(1e-12));
    CHECK(majority_success_exact(1, 0.7) == doctest::Approx(0.7));
    // even committees count the exact tie as success
    CHECK(majority_success_exact(2, 0.5) == doctest::Approx(0.75));
}

TEST_CASE("monte carlo agrees with the exact tail") {
    TheoryParams params;
    params.trials = 200000;
    for (int k : {1, 3, 5, 10}) {
        for (double p : {0.6, 0.9}) {
            params.K = k;
            params.p = p;
            double exact = majority_success_exact(k, p);
            double sigma = std::sqrt(exact * (1.0 - exact) / double(params.trials));
            CHECK(std::fabs(simulate_majority(params) - exact) <= 5.0 * sigma + 1e-9);
        }
    }
}

TEST_CASE("monte carlo is reproducible per seed") {
    TheoryParams params;
    params.seed = 42;
    double a = simulate_majority(params);
    double b = simulate_majority(params);
    CHECK(a == b);
}

TEST_CASE("plug-in mutual information") {
    CHECK(plugin_mi({{2, 1}, {1, 2}}) == doctest::Approx(0.081704).epsilon(1e-5));
    // independent table has zero information
    CHECK(plugin_mi({{1, 1}, {1, 1}}) == doctest::Approx(0.0));
    CHECK(plugin_mi({{6, 2}, {3, 1}}) == doctest::Approx(0.0).epsilon(1e-12));
    // perfectly correlated bits carry one full bit
    CHECK(plugin_mi({{5, 0}, {0, 5}}) == doctest::Approx(1.0));
    // symmetric in the two variables
    CHECK(plugin_mi({{3, 1, 2}, {0, 4, 1}}) ==
          doctest::Approx(plugin_mi({{3, 0}, {1, 4}, {2, 1}})));
    CHECK(plugin_mi({{1, 2}, {3, 4}}) >= 0.0);
    CHECK_THROWS_AS(plugin_mi({}), UsageError);
}

TEST_CASE("compression moves the aggregate toward the information bottleneck") {
    BottleneckModel model;  // K=5, p=0.9, gamma=0.1
    BottleneckReport report = enumerate_bottleneck(model, 0.0);

    CHECK(report.artifact_info_per_agent == doctest::Approx(0.500084).epsilon(1e-5));
    CHECK(report.I_bottleneck_estimate == doctest::Approx(0.822895).epsilon(1e-5));
    CHECK(report.I_fY_uncompressed == doctest::Approx(0.059081).epsilon(1e-4));
    CHECK(report.I_fY_compressed == doctest::Approx(0.650969).epsilon(1e-4));
    CHECK(report.I_fV_uncompressed == doctest::Approx(0.284080).epsilon(1e-4));
    CHECK(report.I_fV_compressed == doctest::Approx(0.000595).epsilon(1e-3));
    CHECK(report.D_uncompressed == doctest::Approx(1.047894).epsilon(1e-4));
    CHECK(report.D_compressed == doctest::Approx(0.172521).epsilon(1e-4));
    CHECK(report.distance_decreased);
    CHECK(report.step10_margin_satisfied);
}

TEST_CASE("residual artifact information shrinks with gamma") {
    BottleneckModel model;
    double prev = 1e9;
    for (double gamma : {0.3, 0.2, 0.1, 0.05, 0.0}) {
        model.gamma = gamma;
        double i = enumerate_bottleneck(model, 0.0).I_fV_compressed;
        CHECK(i <= prev + 1e-12);
        prev = i;
    }
    CHECK(prev == doctest::Approx(0.0));  // gamma = 0 removes the artifacts entirely
}

TEST_CASE("lossless compression attains the bottleneck exactly") {
    BottleneckModel model;
    model.p = 1.0;       // signal fully preserved
    model.coupling = 0.0;  // and no artifact route at all
    BottleneckReport report = enumerate_bottleneck(model, 0.0);
    CHECK(report.I_fY_compressed == doctest::Approx(report.I_bottleneck_estimate).epsilon(1e-12));
    CHECK(report.I_fY_compressed == doctest::Approx(0.82289499).epsilon(1e-6));
    CHECK(report.D_compressed == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sampled bottleneck estimates track the enumeration") {
    BottleneckModel model;
    TheoryParams params;
    params.trials = 200000;
    params.seed = 7;
    BottleneckReport exact = enumerate_bottleneck(model, 0.0);
    BottleneckReport sampled = simulate_bottleneck(model, params);
    CHECK(sampled.I_fY_uncompressed == doctest::Approx(exact.I_fY_uncompressed).epsilon(0.05));
    CHECK(sampled.I_fY_compressed == doctest::Approx(exact.I_fY_compressed).epsilon(0.05));
    CHECK(std::fabs(sampled.D_uncompressed - exact.D_uncompressed) < 0.05);
    CHECK(sampled.distance_decreased);
}

TEST_CASE("model validation") {
    BottleneckModel model;
    model.p = 0.5;
    CHECK_THROWS_AS(model.validate(), UsageError);
    model = BottleneckModel{};
    model.gamma = 1.5;
    CHECK_THROWS_AS(model.validate(), UsageError);
    model = BottleneckModel{};
    model.signal_accuracy = 0.5;
    CHECK_THROWS_AS(model.validate(), UsageError);
}

TEST_CASE("bound table rows are internally consistent") {
    auto rows = bound_table({0.75, 0.9}, {1, 5, 9}, 50000, 3);
    REQUIRE(rows.size() == 6);
    for (const auto& row : rows) {
        CHECK(row.bound == doctest::Approx(hoeffding_bound(row.K, row.p)));
        CHECK(row.exact == doctest::Approx(majority_success_exact(row.K, row.p)));
        CHECK(row.bound_holds);
        CHECK(row.complexity_consistent);
        CHECK(row.exact >= row.bound - 1e-12);  // the bound really is a lower bound
    }
}
