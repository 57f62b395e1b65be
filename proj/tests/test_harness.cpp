#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "debatekit/backend.hpp"
#include "debatekit/errors.hpp"
#include "debatekit/harness.hpp"

using namespace debatekit;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string error_of(const std::string& path) {
    try {
        load_dataset(path);
    } catch (const UsageError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("dataset loading") {
    TempFile file("ds_ok.jsonl",
                  R"({"id": "a", "question": "2+2?", "answer": "4"})"
                  "\n\n"
                  R"({"id": "b", "question": "janet's eggs", "answer": "math here\n#### 18"})"
                  "\n"
                  R"({"id": 3, "question": "big", "answer": "1,234"})"
                  "\n");
    Dataset ds = load_dataset(file.path);
    REQUIRE(ds.items.size() == 3);
    CHECK(ds.items[0].id == "a");
    CHECK(ds.items[0].gold_answer == "4");
    CHECK(ds.items[1].gold_answer == "18");  // rationale suffix stripped
    CHECK(ds.items[2].id == "3");            // numeric ids allowed
    CHECK(ds.items[2].gold_answer == "1234");
}

TEST_CASE("dataset errors carry line numbers") {
    TempFile bad_json("ds_badjson.jsonl",
                      R"({"id": "a", "question": "q", "answer": "1"})"
                      "\nnot json\n");
    CHECK(error_of(bad_json.path).find("line 2") != std::string::npos);

    TempFile missing("ds_missing.jsonl", R"({"id": "a", "question": "q"})"
                                         "\n");
    CHECK(error_of(missing.path).find("line 1") != std::string::npos);

    TempFile dup("ds_dup.jsonl",
                 R"({"id": "a", "question": "q", "answer": "1"})"
                 "\n"
                 R"({"id": "a", "question": "r", "answer": "2"})"
                 "\n");
    CHECK(error_of(dup.path).find("duplicate id") != std::string::npos);

    TempFile empty_q("ds_emptyq.jsonl", R"({"id": "a", "question": "", "answer": "1"})"
                                        "\n");
    CHECK(error_of(empty_q.path).find("empty question") != std::string::npos);

    CHECK_THROWS_AS(load_dataset("/nonexistent/nowhere.jsonl"), UsageError);
}

TEST_CASE("cost curves for the canonical 3x5 configuration") {
    CostCurve curve = predict_costs(3, 5, 658.0);
    REQUIRE(curve.full_text_per_round.size() == 5);
    CHECK(curve.full_text_per_round[0] == doctest::Approx(0.0));
    CHECK(curve.full_text_per_round[4] == doctest::Approx(23688.0));
    CHECK(curve.full_text_cumulative[4] == doctest::Approx(59220.0));
    // flat per-round charges for the compressed paradigms
    for (int r = 0; r < 5; ++r) {
        CHECK(curve.summary_per_round[r] == doctest::Approx(3600.0));
        CHECK(curve.visual_per_round[r] == doctest::Approx(768.0));
    }
    CHECK(curve.summary_cumulative[4] == doctest::Approx(18000.0));
    CHECK(curve.visual_cumulative[4] == doctest::Approx(3840.0));
}

TEST_CASE("growth exponents of the cumulative curves") {
    std::vector<double> rounds, full_text, visual;
    for (int r = 2; r <= 12; ++r) {
        CostCurve curve = predict_costs(3, r, 658.0);
        rounds.push_back(double(r));
        full_text.push_back(curve.full_text_cumulative.back());
        visual.push_back(curve.visual_cumulative.back());
    }
    // R(R-1)/2 growth sits between linear and quadratic on this window
    CHECK(fit_growth_exponent(rounds, full_text) == doctest::Approx(2.3011).epsilon(1e-3));
    CHECK(fit_growth_exponent(rounds, visual) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-log fitter recovers pure power laws") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double v : x) y.push_back(7.0 * v * v * v);
    CHECK(fit_growth_exponent(x, y) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_growth_exponent({1.0}, {1.0}), UsageError);
    CHECK_THROWS_AS(fit_growth_exponent({1, -2}, {1, 2}), UsageError);
}

TEST_CASE("answer spread across committee sizes collapses as accuracy converges") {
    std::vector<int> ks{2, 3, 4, 5, 6, 7, 8};
    auto spreads = convergence_spread(ks, 6, 0.6, 0.995, 0.5);
    REQUIRE(spreads.size() == 6);
    CHECK(spreads[0] == doctest::Approx(0.192).epsilon(1e-2));
    for (std::size_t r = 1; r < spreads.size(); ++r) CHECK(spreads[r] < spreads[r - 1]);
    CHECK(spreads.back() < 0.001);
    CHECK_THROWS_AS(convergence_spread(ks, 6, 0.4, 0.995, 0.5), UsageError);
}

TEST_CASE("benchmark over a mock backend") {
    TempFile file("ds_bench.jsonl",
                  R"({"id": "q1", "question": "2+2?", "answer": "4"})"
                  "\n"
                  R"({"id": "q2", "question": "3+3?", "answer": "6"})"
                  "\n");
    Dataset ds = load_dataset(file.path);

    MockScript script;
    script.set_default("I think the answer is \\boxed{4}");
    for (int agent = 1; agent <= 3; ++agent)
        for (int round = 1; round <= 2; ++round)
            script.set("q2", agent, round, "clearly \\boxed{6}");
    MockBackend backend{std::move(script)};

    DebateConfig config;
    config.num_rounds = 2;
    config.answer_mode = AnswerMode::boxed;
    Dataset boxed = ds;
    boxed.answer_mode = AnswerMode::boxed;

    StrategyConfig text;
    BenchmarkReport report = run_benchmark(config, boxed, backend, {text});
    REQUIRE(report.rows.size() == 1);
    const auto& row = report.rows[0];
    CHECK(row.strategy == "text");
    CHECK(row.failures == 0);
    CHECK(row.accuracy_pct == doctest::Approx(100.0));
    CHECK(row.items[0].outcome.consensus == "4");
    CHECK(row.items[1].outcome.consensus == "6");
    CHECK(row.total_input_tokens > 0);
    REQUIRE(row.per_round_context_tokens.size() == 2);
    CHECK(row.per_round_context_tokens[0] == 0);  // empty history in round 1
    CHECK(row.per_round_context_tokens[1] > 0);
}

TEST_CASE("per-item failures do not sink the run") {
    TempFile file("ds_fail.jsonl",
                  R"({"id": "q1", "question": "2+2?", "answer": "4"})"
                  "\n"
                  R"({"id": "q2", "question": "this question is far too long for the tiny window", "answer": "6"})"
                  "\n");
    Dataset ds = load_dataset(file.path);

    MockScript script;
    script.set_default("\\boxed{4}");
    MockBackend backend{std::move(script)};
    // size the window so q1's round-1 prompt fits exactly and q2's longer one
    // does not
    MemoryContext empty_ctx;
    ChatRequest probe = build_prompt(PromptTemplate::text, ds.items[0], empty_ctx, 3);
    backend.set_context_limit(default_tokenizer().count(probe.joined_text()));

    DebateConfig config;
    config.num_rounds = 1;
    config.answer_mode = AnswerMode::boxed;
    ds.answer_mode = AnswerMode::boxed;

    BenchmarkReport report = run_benchmark(config, ds, backend, {StrategyConfig{}});
    const auto& row = report.rows[0];
    CHECK(row.failures == 1);
    CHECK_FALSE(row.items[0].failed);
    CHECK(row.items[1].failed);
    CHECK_FALSE(row.items[1].error.empty());
    CHECK(row.accuracy_pct == doctest::Approx(100.0));  // over the scored item
}

TEST_CASE("parallel and serial runs produce identical reports") {
    std::string lines;
    for (int i = 0; i < 8; ++i)
        lines += R"({"id": "q)" + std::to_string(i) + R"(", "question": "add )" +
                 std::to_string(i) + R"(", "answer": ")" + std::to_string(i) + R"("})" + "\n";
    TempFile file("ds_par.jsonl", lines);
    Dataset ds = load_dataset(file.path);
    ds.answer_mode = AnswerMode::boxed;

    MockScript script;
    script.set_default("\\boxed{0}");
    MockBackend backend{std::move(script)};

    DebateConfig config;
    config.num_rounds = 2;
    config.answer_mode = AnswerMode::boxed;

    BenchmarkReport serial = run_benchmark(config, ds, backend, {StrategyConfig{}}, 1);
    BenchmarkReport parallel = run_benchmark(config, ds, backend, {StrategyConfig{}}, 4);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    CHECK(serial.rows[0].total_input_tokens == parallel.rows[0].total_input_tokens);
    CHECK(serial.rows[0].history_tokens == parallel.rows[0].history_tokens);
    CHECK(serial.rows[0].accuracy_pct == parallel.rows[0].accuracy_pct);
    for (std::size_t i = 0; i < serial.rows[0].items.size(); ++i) {
        CHECK(serial.rows[0].items[i].query_id == parallel.rows[0].items[i].query_id);
        CHECK(serial.rows[0].items[i].outcome.consensus ==
              parallel.rows[0].items[i].outcome.consensus);
    }
}
