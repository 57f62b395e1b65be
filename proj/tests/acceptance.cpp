// Acceptance suite: one criterion per invocation, argv[1] in 1..10.
// Prints a single [PASS]/[FAIL] line and exits accordingly.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "debatekit/adapter.hpp"
#include "debatekit/backend.hpp"
#include "debatekit/debate.hpp"
#include "debatekit/encoder.hpp"
#include "debatekit/errors.hpp"
#include "debatekit/harness.hpp"
#include "debatekit/memory.hpp"
#include "debatekit/render.hpp"
#include "debatekit/rng.hpp"
#include "debatekit/theory.hpp"
#include "debatekit/train.hpp"

using namespace debatekit;

namespace {

std::string data_path(const std::string& name) {
    return std::string(DEBATEKIT_TEST_DATA_DIR) + "/" + name;
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << "  failed: " << what << "\n";
        }
    }
    void note(const std::string& what) { detail << "  " << what << "\n"; }
};

// Reference workload: 3 agents, 5 rounds, every response exactly 658 tokens.
constexpr int kAgents = 3;
constexpr int kRounds = 5;

std::string workload_response() {
    std::string text;
    for (int i = 0; i < 653; ++i) text += "a ";
    text += "\\boxed{4}";
    return text;
}

StrategyResult run_workload(MemoryKind kind) {
    MockScript script;
    script.set_default(workload_response());
    std::string summary;
    for (int i = 0; i < 1200; ++i) summary += "s ";
    for (int r = 2; r <= kRounds; ++r) script.set("__summarize__", 0, r, summary);
    MockBackend backend{std::move(script)};

    Dataset ds;
    ds.answer_mode = AnswerMode::boxed;
    ds.items.push_back({"fig1", "What is 2+2?", std::string("4")});

    DebateConfig config;
    config.num_agents = kAgents;
    config.num_rounds = kRounds;
    config.answer_mode = AnswerMode::boxed;

    StrategyConfig strategy;
    strategy.kind = kind;
    BenchmarkReport report = run_benchmark(config, ds, backend, {strategy});
    return report.rows.front();
}

int criterion_1() {
    Check c;
    double predicted = total_cost(kAgents, kRounds, 658.0);
    c.require(predicted == 59220.0, "closed-form cumulative history cost is exactly 59220");
    c.require(round_cost(kAgents, kRounds, 658.0) == 23688.0, "round-5 history cost is 23688");

    StrategyResult text = run_workload(MemoryKind::full_text);
    c.require(text.failures == 0, "workload run completes");
    double ratio = double(text.history_tokens) / predicted;
    std::ostringstream note;
    note << "measured history tokens " << text.history_tokens << " vs predicted " << predicted
         << " (ratio " << ratio << ", label overhead included)";
    c.note(note.str());
    c.require(std::fabs(ratio - 1.0) <= 0.02, "measured history within 2% of the closed form");
    c.require(text.items[0].outcome.consensus == "4", "consensus extracted from the transcript");

    std::printf("[%s] criterion 1: quadratic token cost matches the closed form\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_2() {
    Check c;
    StrategyResult text = run_workload(MemoryKind::full_text);
    StrategyResult visual = run_workload(MemoryKind::visual);
    c.require(text.failures == 0 && visual.failures == 0, "both runs complete");

    double history_reduction =
        100.0 * (1.0 - double(visual.history_tokens) / double(text.history_tokens));
    double input_reduction =
        100.0 * (1.0 - double(visual.total_input_tokens) / double(text.total_input_tokens));
    std::ostringstream note;
    note << "history tokens " << text.history_tokens << " -> " << visual.history_tokens << " ("
         << history_reduction << "% reduction); full input tokens " << text.total_input_tokens
         << " -> " << visual.total_input_tokens << " (" << input_reduction << "% reduction)";
    c.note(note.str());
    c.require(history_reduction >= 90.0,
              "rendered history cuts context token usage by at least 90%");
    c.require(visual.items[0].outcome.consensus == "4", "visual run reaches the same consensus");

    std::printf("[%s] criterion 2: image context cuts history tokens by >= 90%%\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_3() {
    Check c;
    std::vector<double> rounds, full_text, visual;
    for (int r = 2; r <= 12; ++r) {
        CostCurve curve = predict_costs(3, r, 658.0);
        rounds.push_back(double(r));
        full_text.push_back(curve.full_text_cumulative.back());
        visual.push_back(curve.visual_cumulative.back());
    }
    double ft_slope = fit_growth_exponent(rounds, full_text);
    double v_slope = fit_growth_exponent(rounds, visual);
    std::ostringstream note;
    note << "log-log slope over R=2..12: full text " << ft_slope << " (target 2.00 +/- 0.05), "
         << "visual " << v_slope << " (target 1.00 +/- 0.05)";
    c.note(note.str());
    c.require(std::fabs(v_slope - 1.0) <= 0.05, "visual cumulative cost grows linearly");
    c.require(std::fabs(ft_slope - 2.0) <= 0.05,
              "full-text cumulative cost fits slope 2.00 +/- 0.05");
    if (std::fabs(ft_slope - 2.0) > 0.05) {
        c.note("cumulative cost is K^2 L R(R-1)/2; on the window R=2..12 the R(R-1)/2 factor");
        c.note("fits a log-log slope of ~2.30, not 2.00. The slope only approaches 2.0 as");
        c.note("R grows (fitting R=100..1000 gives ~2.003). The 2.00 +/- 0.05 band is");
        c.note("therefore unattainable for the exact formula on this window. Reported");
        c.note("honestly rather than widening the band or changing the fit window.");
    }
    std::printf("[%s] criterion 3: cumulative cost growth exponents\n%s", c.ok ? "PASS" : "FAIL",
                c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_4() {
    Check c;
    std::vector<double> p_grid;
    for (int i = 0; i < 10; ++i) p_grid.push_back(0.55 + 0.044 * i);  // 0.55 .. 0.946
    std::vector<int> k_grid;
    for (int k = 1; k <= 20; ++k) k_grid.push_back(k);

    auto rows = bound_table(p_grid, k_grid, 100000, 20240817ull);
    int holds = 0;
    for (const auto& row : rows)
        if (row.bound_holds) ++holds;
    std::ostringstream note;
    note << holds << "/" << rows.size() << " grid cells satisfy empirical >= bound - 3 sigma";
    c.note(note.str());
    c.require(holds == static_cast<int>(rows.size()),
              "majority success probability clears the bound on the whole grid");

    double bound = hoeffding_bound(5, 0.99);
    c.require(std::fabs(bound - 0.909373) < 1e-6, "bound(K=5, p=0.99) = 0.909373");
    TheoryParams params;
    params.K = 5;
    params.p = 0.99;
    params.seed = 99;
    double emp = simulate_majority(params);
    double sigma = std::sqrt(bound * (1 - bound) / double(params.trials));
    std::ostringstream cell;
    cell << "K=5, p=0.99: bound " << bound << ", empirical " << emp;
    c.note(cell.str());
    c.require(emp >= bound - 3 * sigma, "the spotlight cell clears its bound");

    std::printf("[%s] criterion 4: concentration bound holds on a 20x10 grid at 1e5 trials\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_5() {
    Check c;
    c.require(sample_complexity(0.99, 0.1) == 5, "K(0.99, 0.1) = 5");
    c.require(sample_complexity(0.7, 0.05) == 38, "K(0.7, 0.05) = 38");
    int checked = 0;
    for (double p = 0.55; p <= 0.991; p += 0.02) {
        for (double delta : {0.2, 0.1, 0.05, 0.01}) {
            int k = sample_complexity(p, delta);
            double gap = p - 0.5;
            int formula = static_cast<int>(std::ceil(std::log(1.0 / delta) / (2.0 * gap * gap) -
                                                     1e-12));
            if (formula < 1) formula = 1;
            c.require(k == formula, "closed form matches at p=" + std::to_string(p));
            c.require(hoeffding_bound(k, p) >= 1.0 - delta - 1e-12,
                      "certified committee really clears 1 - delta");
            if (k > 1)
                c.require(hoeffding_bound(k - 1, p) < 1.0 - delta + 1e-12,
                          "committee size is minimal");
            ++checked;
        }
    }
    std::ostringstream note;
    note << checked << " (p, delta) pairs verified";
    c.note(note.str());
    std::printf("[%s] criterion 5: committee size corollary is exact and minimal\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_6() {
    Check c;
    BottleneckModel model;  // K=5, p=0.9, gamma=0.1
    BottleneckReport report = enumerate_bottleneck(model, 0.0);
    std::ostringstream note;
    note << "distance to the bottleneck: " << report.D_uncompressed << " -> "
         << report.D_compressed << "; per-agent artifact info "
         << report.artifact_info_per_agent << " bits";
    c.note(note.str());
    c.require(report.distance_decreased, "compression moves the aggregate toward the bottleneck");
    c.require(report.step10_margin_satisfied,
              "improvement clears the (1 - gamma K) I_V - epsilon margin");

    double prev = 1e9;
    for (double gamma : {0.3, 0.2, 0.1, 0.05, 0.0}) {
        BottleneckModel swept = model;
        swept.gamma = gamma;
        double i = enumerate_bottleneck(swept, 0.0).I_fV_compressed;
        c.require(i <= prev + 1e-12, "residual artifact info shrinks with gamma");
        prev = i;
    }
    c.require(prev < 1e-12, "gamma = 0 removes artifact information entirely");

    BottleneckModel lossless;
    lossless.p = 1.0;
    lossless.coupling = 0.0;
    BottleneckReport exact = enumerate_bottleneck(lossless, 0.0);
    c.require(std::fabs(exact.I_fY_compressed - exact.I_bottleneck_estimate) < 1e-12,
              "lossless channel attains the bottleneck exactly");

    std::printf("[%s] criterion 6: compression provably tightens the information bottleneck\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_7() {
    Check c;
    ShapeTrace trace = trace_pipeline_shapes(1024);
    c.require(trace.final_shape() == std::vector<int>{256, 1024},
              "1024px input ends at [256, 1024] tokens");
    c.require(trace.stages.size() == 6 && trace.stages[3].second == std::vector<int>{1024, 16, 16},
              "stride-2 neck stages land on [1024, 16, 16]");
    bool rejected = false;
    try {
        trace_pipeline_shapes(224);
    } catch (const ShapeError&) {
        rejected = true;
    }
    c.require(rejected, "224px grid (14x14) is rejected by the stride-2 stages");

    const int resolutions[] = {224, 336, 448, 512, 1024, 1536, 2048};
    const int tokens[] = {16, 36, 49, 64, 256, 576, 1024};
    for (int i = 0; i < 7; ++i)
        c.require(vision_token_count(resolutions[i]) == tokens[i],
                  "token table row " + std::to_string(resolutions[i]));
    c.note("all 7 resolution rows and the full stage chain verified");

    std::printf("[%s] criterion 7: encoder shape chain and vision token table\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_8() {
    Check c;
    double max_err = 0.0;
    for (int seed = 0; seed < 20; ++seed) {
        ToyTrainConfig cfg;
        cfg.seed = std::uint64_t(seed);
        cfg.d_f = 6;
        cfg.d_h = 8;
        cfg.d = 5;
        ToyDataset ds = make_toy_dataset(4, cfg);
        AdapterParams params = AdapterParams::seeded(cfg.d_f, cfg.d_h, cfg.d, cfg.seed + 100);
        max_err = std::max(max_err, grad_check(params, ds.features, ds.head, ds.targets));
    }
    std::ostringstream note;
    note << "max relative gradient error over 20 seeds: " << max_err;
    c.note(note.str());
    c.require(max_err <= 1e-4, "finite differences agree to 1e-4");

    // two fixed configurations held to a tighter tolerance
    for (std::uint64_t seed : {1234ull, 5678ull}) {
        ToyTrainConfig cfg;
        cfg.seed = seed;
        cfg.d_f = 4;
        cfg.d_h = 5;
        cfg.d = 4;
        ToyDataset ds = make_toy_dataset(2, cfg);
        AdapterParams params = AdapterParams::seeded(cfg.d_f, cfg.d_h, cfg.d, seed);
        double err = grad_check(params, ds.features, ds.head, ds.targets);
        c.require(err <= 1e-5, "pinned example gradient error <= 1e-5");
    }
    // hand value: uniform logits cost exactly ln V per sample
    Tensor logits = Tensor::zeros({3, 10});
    c.require(std::fabs(reconstruction_loss(logits, {0, 5, 9}) - 3.0 * std::log(10.0)) < 1e-12,
              "uniform-logit loss equals |T| ln V");

    ToyTrainConfig overfit;
    overfit.seed = 0;
    overfit.steps = 500;
    overfit.learning_rate = 1e-2;
    overfit.optimizer = Optimizer::sgd;
    overfit.batch_size = 1;
    ToyDataset one = make_toy_dataset(1, overfit);
    TrainResult result = train_toy(overfit, one);
    double ratio = result.losses.back() / result.losses.front();
    std::ostringstream tnote;
    tnote << "one-sample overfit: loss " << result.losses.front() << " -> "
          << result.losses.back() << " (ratio " << ratio << ") in 500 steps";
    c.note(tnote.str());
    c.require(ratio < 0.1, "loss falls below 10% of its starting value");

    std::printf("[%s] criterion 8: adapter gradients check out and the toy task overfits\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_9() {
    Check c;
    auto build_manifest = [&](std::string* structural_error) {
        std::string manifest;
        Rng rng(0x747261636bull);
        for (int t = 0; t < 25; ++t) {
            int agents = 2 + t % 5;
            int rounds = 1 + t % 3;
            DebateState state(agents);
            for (int r = 1; r <= rounds; ++r) {
                std::vector<AgentResponse> responses;
                for (int a = 1; a <= agents; ++a) {
                    std::string text = "transcript " + std::to_string(t) + " agent " +
                                       std::to_string(a) + " round " + std::to_string(r) + ": ";
                    int words = 5 + int(rng.next_u64() % 40);
                    for (int w = 0; w < words; ++w)
                        text += "w" + std::to_string(rng.next_u64() % 1000) + " ";
                    text += "\\boxed{" + std::to_string(rng.next_u64() % 100) + "}";
                    responses.push_back({a, r, text, 0, 0.0});
                }
                state = state.advanced(std::move(responses));
            }
            RenderLayout layout;
            auto lines = line_model(state, layout);
            int headers = 0, dividers = 0;
            for (const auto& line : lines) {
                if (line.kind == RenderLine::Kind::header) ++headers;
                if (line.kind == RenderLine::Kind::divider) ++dividers;
            }
            if (headers != agents * rounds && structural_error)
                *structural_error = "header count mismatch on transcript " + std::to_string(t);
            if (dividers != rounds - 1 && structural_error)
                *structural_error = "divider count mismatch on transcript " + std::to_string(t);

            auto pages = render_history(state, layout);
            if (static_cast<int>(pages.size()) != count_pages(state, layout) && structural_error)
                *structural_error = "page count mismatch on transcript " + std::to_string(t);
            for (const auto& page : pages) {
                manifest += "t" + std::to_string(t) + "_p" + std::to_string(page.page_index) +
                            " " + image_digest(page) + "\n";
            }
        }
        return manifest;
    };

    std::string structural;
    std::string first = build_manifest(&structural);
    std::string second = build_manifest(nullptr);
    c.require(structural.empty(), structural.empty() ? "structure" : structural);
    c.require(first == second, "25-transcript digest manifest is identical across runs");
    std::ostringstream note;
    note << first.size() << " manifest bytes, " << 25 << " transcripts rendered twice";
    c.note(note.str());

    std::printf("[%s] criterion 9: rendering is deterministic down to the pixel digest\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

int criterion_10() {
    Check c;
    Dataset ds = load_dataset(data_path("arith20.jsonl"), AnswerMode::boxed);
    c.require(ds.items.size() == 20, "20 benchmark items load");

    DebateConfig config;
    config.num_rounds = 3;
    config.answer_mode = AnswerMode::boxed;
    std::vector<StrategyConfig> strategies(3);
    strategies[0].kind = MemoryKind::full_text;
    strategies[1].kind = MemoryKind::summary;
    strategies[2].kind = MemoryKind::visual;

    auto run_once = [&] {
        MockBackend backend{MockScript::load(data_path("mock_arith20.json"))};
        return run_benchmark(config, ds, backend, strategies, 4);
    };
    BenchmarkReport report = run_once();
    for (const auto& row : report.rows) {
        std::ostringstream note;
        note << row.strategy << ": accuracy " << row.accuracy_pct << "%, history tokens "
             << row.history_tokens << ", failures " << row.failures;
        c.note(note.str());
        c.require(row.failures == 0, row.strategy + " has no failures");
        c.require(row.accuracy_pct == 100.0,
                  row.strategy + " reaches 100% accuracy (2-of-3 agents start correct)");
    }
    BenchmarkReport replay = run_once();
    bool identical = report.rows.size() == replay.rows.size();
    for (std::size_t s = 0; identical && s < report.rows.size(); ++s) {
        identical = report.rows[s].total_input_tokens == replay.rows[s].total_input_tokens &&
                    report.rows[s].history_tokens == replay.rows[s].history_tokens &&
                    report.rows[s].accuracy_pct == replay.rows[s].accuracy_pct;
        for (std::size_t i = 0; identical && i < report.rows[s].items.size(); ++i)
            identical = report.rows[s].items[i].outcome.consensus ==
                        replay.rows[s].items[i].outcome.consensus;
    }
    c.require(identical, "replay produces an identical report");

    std::printf("[%s] criterion 10: end-to-end benchmark, all three strategies at 100%%\n%s",
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    return c.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
        return 2;
    }
    int n = std::atoi(argv[1]);
    try {
        switch (n) {
            case 1: return criterion_1();
            case 2: return criterion_2();
            case 3: return criterion_3();
            case 4: return criterion_4();
            case 5: return criterion_5();
            case 6: return criterion_6();
            case 7: return criterion_7();
            case 8: return criterion_8();
            case 9: return criterion_9();
            case 10: return criterion_10();
        }
    } catch (const std::exception& e) {
        std::printf("[FAIL] criterion %d: unexpected error: %s\n", n, e.what());
        return 1;
    }
    std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
    return 2;
}
