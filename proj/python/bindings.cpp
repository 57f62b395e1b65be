#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "debatekit/adapter.hpp"
#include "debatekit/backend.hpp"
#include "debatekit/debate.hpp"
#include "debatekit/encoder.hpp"
#include "debatekit/errors.hpp"
#include "debatekit/harness.hpp"
#include "debatekit/memory.hpp"
#include "debatekit/render.hpp"
#include "debatekit/theory.hpp"
#include "debatekit/train.hpp"

namespace py = pybind11;
using namespace debatekit;

namespace {

AnswerMode answer_mode_from(const std::string& s) {
    if (s == "boxed") return AnswerMode::boxed;
    if (s == "final_number") return AnswerMode::final_number;
    if (s == "multiple_choice") return AnswerMode::multiple_choice;
    throw UsageError("unknown answer mode: " + s);
}

MemoryKind kind_from(const std::string& s) {
    if (s == "text") return MemoryKind::full_text;
    if (s == "summary") return MemoryKind::summary;
    if (s == "visual") return MemoryKind::visual;
    throw UsageError("unknown strategy: " + s);
}

py::dict benchmark_dict(const BenchmarkReport& report) {
    py::list rows;
    for (const auto& row : report.rows) {
        py::list items;
        for (const auto& item : row.items) {
            py::dict d;
            d["query_id"] = item.query_id;
            d["failed"] = item.failed;
            d["error"] = item.error;
            d["correct"] = item.correct;
            d["consensus"] = item.outcome.consensus;
            d["final_answers"] = item.outcome.final_answers;
            d["input_tokens"] = item.outcome.measured_input_tokens;
            d["history_tokens"] = item.outcome.measured_history_tokens;
            items.append(d);
        }
        py::dict r;
        r["strategy"] = row.strategy;
        r["accuracy_pct"] = row.accuracy_pct;
        r["total_input_tokens"] = row.total_input_tokens;
        r["history_tokens"] = row.history_tokens;
        r["failures"] = row.failures;
        r["per_round_context_tokens"] = row.per_round_context_tokens;
        r["items"] = items;
        rows.append(r);
    }
    py::dict out;
    out["rows"] = rows;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "multi-agent debate engine with pluggable history compression";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<BackendError>(m, "BackendError", PyExc_RuntimeError);

    // answer handling
    m.def("canonicalize_answer", [](const std::string& s) { return canonicalize_answer(s); });
    m.def(
        "extract_answer",
        [](const std::string& text, const std::string& mode) {
            return extract_answer(text, answer_mode_from(mode));
        },
        py::arg("text"), py::arg("mode") = "boxed");
    m.def("majority_vote", &majority_vote);
    m.def("count_tokens",
          [](const std::string& text) { return default_tokenizer().count(text); });

    // cost model
    m.def("round_cost", &round_cost, py::arg("num_agents"), py::arg("round"),
          py::arg("avg_solution_tokens"));
    m.def("total_cost", &total_cost, py::arg("num_agents"), py::arg("num_rounds"),
          py::arg("avg_solution_tokens"));
    m.def(
        "predict_costs",
        [](int agents, int rounds, double avg_tokens, double summary_tokens, int vision_tokens,
           int pages) {
            CostCurve c = predict_costs(agents, rounds, avg_tokens, summary_tokens, vision_tokens,
                                        pages);
            py::dict out;
            out["full_text_per_round"] = c.full_text_per_round;
            out["summary_per_round"] = c.summary_per_round;
            out["visual_per_round"] = c.visual_per_round;
            out["full_text_cumulative"] = c.full_text_cumulative;
            out["summary_cumulative"] = c.summary_cumulative;
            out["visual_cumulative"] = c.visual_cumulative;
            return out;
        },
        py::arg("num_agents"), py::arg("num_rounds"), py::arg("avg_solution_tokens"),
        py::arg("summary_tokens_per_round") = 1200.0, py::arg("vision_tokens") = 256,
        py::arg("pages") = 1);
    m.def("fit_growth_exponent", &fit_growth_exponent);
    m.def("convergence_spread", &convergence_spread, py::arg("k_values"), py::arg("rounds"),
          py::arg("p_start"), py::arg("p_limit"), py::arg("decay"));

    // committee bounds and the bottleneck construction
    m.def("hoeffding_bound", &hoeffding_bound, py::arg("k"), py::arg("p"));
    m.def("sample_complexity", &sample_complexity, py::arg("p"), py::arg("delta"));
    m.def("majority_success_exact", &majority_success_exact, py::arg("k"), py::arg("p"));
    m.def("plugin_mi", &plugin_mi);
    m.def(
        "enumerate_bottleneck",
        [](int k, double p, double gamma, double signal_accuracy, double coupling,
           double epsilon) {
            BottleneckModel model;
            model.K = k;
            model.p = p;
            model.gamma = gamma;
            model.signal_accuracy = signal_accuracy;
            model.coupling = coupling;
            BottleneckReport r = enumerate_bottleneck(model, epsilon);
            py::dict out;
            out["I_fY_compressed"] = r.I_fY_compressed;
            out["I_fY_uncompressed"] = r.I_fY_uncompressed;
            out["I_fV_compressed"] = r.I_fV_compressed;
            out["I_fV_uncompressed"] = r.I_fV_uncompressed;
            out["D_compressed"] = r.D_compressed;
            out["D_uncompressed"] = r.D_uncompressed;
            out["I_bottleneck_estimate"] = r.I_bottleneck_estimate;
            out["artifact_info_per_agent"] = r.artifact_info_per_agent;
            out["distance_decreased"] = r.distance_decreased;
            out["step10_margin_satisfied"] = r.step10_margin_satisfied;
            return out;
        },
        py::arg("k") = 5, py::arg("p") = 0.9, py::arg("gamma") = 0.1,
        py::arg("signal_accuracy") = 0.85, py::arg("coupling") = 0.78, py::arg("epsilon") = 0.0);

    // encoder shapes and rendering
    m.def("vision_token_count", &vision_token_count);
    m.def(
        "trace_pipeline_shapes",
        [](int resolution, int patch) {
            ShapeTrace t = trace_pipeline_shapes(resolution, patch);
            py::list out;
            for (const auto& [name, shape] : t.stages) out.append(py::make_tuple(name, shape));
            return out;
        },
        py::arg("resolution"), py::arg("patch") = 16);
    m.def(
        "render_digests",
        [](const std::vector<std::tuple<int, int, std::string>>& responses, int resolution) {
            int agents = 0, rounds = 0;
            for (const auto& [agent, round, text] : responses) {
                agents = std::max(agents, agent);
                rounds = std::max(rounds, round);
            }
            DebateState state(agents);
            for (int r = 1; r <= rounds; ++r) {
                std::vector<AgentResponse> batch;
                for (const auto& [agent, round, text] : responses)
                    if (round == r) batch.push_back({agent, r, text, 0, 0.0});
                state = state.advanced(std::move(batch));
            }
            RenderLayout layout;
            layout.canvas = resolution;
            std::vector<std::string> digests;
            for (const auto& page : render_history(state, layout))
                digests.push_back(image_digest(page));
            return digests;
        },
        py::arg("responses"), py::arg("resolution") = 1024,
        "Renders (agent, round, text) responses and returns per-page digests.");

    // end-to-end runs over the scripted backend
    m.def(
        "run_mock_benchmark",
        [](const std::string& dataset_path, const std::string& script_path,
           const std::vector<std::string>& strategies, int agents, int rounds,
           const std::string& answer_mode, int parallelism) {
            Dataset ds = load_dataset(dataset_path, answer_mode_from(answer_mode));
            MockBackend backend{MockScript::load(script_path)};
            DebateConfig config;
            config.num_agents = agents;
            config.num_rounds = rounds;
            std::vector<StrategyConfig> configs;
            for (const auto& name : strategies) {
                StrategyConfig sc;
                sc.kind = kind_from(name);
                configs.push_back(sc);
            }
            return benchmark_dict(run_benchmark(config, ds, backend, configs, parallelism));
        },
        py::arg("dataset_path"), py::arg("script_path"),
        py::arg("strategies") = std::vector<std::string>{"text"}, py::arg("agents") = 3,
        py::arg("rounds") = 3, py::arg("answer_mode") = "boxed", py::arg("parallelism") = 1);

    // adapter training on the synthetic task
    m.def(
        "train_toy",
        [](int steps, double lr, const std::string& optimizer, int batch_size, int samples,
           std::uint64_t seed) {
            ToyTrainConfig cfg;
            cfg.steps = steps;
            cfg.learning_rate = lr;
            cfg.optimizer = optimizer == "sgd" ? Optimizer::sgd : Optimizer::adamw;
            cfg.batch_size = batch_size;
            cfg.seed = seed;
            ToyDataset ds = make_toy_dataset(samples, cfg);
            return train_toy(cfg, ds).losses;
        },
        py::arg("steps") = 2000, py::arg("lr") = 1e-3, py::arg("optimizer") = "adamw",
        py::arg("batch_size") = 32, py::arg("samples") = 64, py::arg("seed") = 0);
    m.def(
        "grad_check",
        [](std::uint64_t seed) {
            ToyTrainConfig cfg;
            cfg.seed = seed;
            cfg.d_f = 6;
            cfg.d_h = 8;
            cfg.d = 5;
            ToyDataset ds = make_toy_dataset(4, cfg);
            AdapterParams params = AdapterParams::seeded(cfg.d_f, cfg.d_h, cfg.d, seed + 100);
            return grad_check(params, ds.features, ds.head, ds.targets);
        },
        py::arg("seed") = 0);
}
