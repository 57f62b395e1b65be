#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "debatekit/adapter.hpp"
#include "debatekit/backend.hpp"
#include "debatekit/debate.hpp"
#include "debatekit/errors.hpp"
#include "debatekit/harness.hpp"
#include "debatekit/memory.hpp"
#include "debatekit/render.hpp"
#include "debatekit/theory.hpp"
#include "debatekit/train.hpp"

using namespace debatekit;
using nlohmann::json;

namespace {

// Plain `key = value` config file, '#' starts a comment.
std::map<std::string, std::string> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw UsageError("config line " + std::to_string(line_no) +
                                 ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

template <typename T>
void maybe_set(const std::map<std::string, std::string>& kv, const std::string& key, T& out) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    std::istringstream ss(it->second);
    ss >> out;
    if (ss.fail()) throw UsageError("config key " + key + ": cannot parse '" + it->second + "'");
}

void maybe_set(const std::map<std::string, std::string>& kv, const std::string& key,
               std::string& out) {
    auto it = kv.find(key);
    if (it != kv.end()) out = it->second;
}

AnswerMode parse_answer_mode(const std::string& s) {
    if (s == "boxed") return AnswerMode::boxed;
    if (s == "final_number") return AnswerMode::final_number;
    if (s == "multiple_choice") return AnswerMode::multiple_choice;
    throw UsageError("unknown answer_mode: " + s);
}

MemoryKind parse_strategy(const std::string& s) {
    if (s == "text") return MemoryKind::full_text;
    if (s == "summary") return MemoryKind::summary;
    if (s == "visual") return MemoryKind::visual;
    throw UsageError("unknown strategy: " + s + " (expected text|summary|visual)");
}

int cmd_debate_run(const std::string& config_path, const std::string& dataset_path,
                   const std::string& strategy_name, const std::string& backend_name,
                   const std::string& mock_script_path, const std::string& transcript_path,
                   const std::string& report_path, int parallelism) {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = load_config(config_path);

    DebateConfig config;
    maybe_set(kv, "agents", config.num_agents);
    maybe_set(kv, "rounds", config.num_rounds);
    maybe_set(kv, "max_response_tokens", config.max_response_tokens);
    std::string answer_mode = "final_number";
    maybe_set(kv, "answer_mode", answer_mode);
    config.answer_mode = parse_answer_mode(answer_mode);

    StrategyConfig strategy_config;
    strategy_config.kind = parse_strategy(strategy_name);
    maybe_set(kv, "render_resolution", strategy_config.render_resolution);
    maybe_set(kv, "max_pages", strategy_config.max_pages);
    maybe_set(kv, "summary_max_tokens", strategy_config.summary_max_tokens);
    maybe_set(kv, "summarizer_prompt", strategy_config.summarizer_prompt);
    strategy_config.vision_tokens_per_image =
        vision_token_count(strategy_config.render_resolution);

    Dataset dataset = load_dataset(dataset_path, config.answer_mode);

    std::unique_ptr<ChatBackendIface> backend;
    if (backend_name == "mock") {
        MockScript script;
        if (!mock_script_path.empty()) script = MockScript::load(mock_script_path);
        auto mock = std::make_unique<MockBackend>(std::move(script), default_tokenizer(),
                                                  strategy_config.vision_tokens_per_image);
        int context_limit = 0;
        maybe_set(kv, "context_limit", context_limit);
        if (context_limit > 0) mock->set_context_limit(context_limit);
        backend = std::move(mock);
    } else if (backend_name == "http") {
        EndpointConfig endpoint = EndpointConfig::from_env();
        maybe_set(kv, "endpoint", endpoint.base_url);
        maybe_set(kv, "max_attempts", endpoint.max_attempts);
        maybe_set(kv, "timeout_seconds", endpoint.timeout_seconds);
        if (endpoint.base_url.empty())
            throw UsageError("http backend needs DEBATEKIT_ENDPOINT or endpoint= in the config");
        backend = std::make_unique<HttpBackend>(endpoint);
    } else {
        throw UsageError("unknown backend: " + backend_name + " (expected http|mock)");
    }

    std::ofstream transcript;
    if (!transcript_path.empty()) {
        transcript.open(transcript_path);
        if (!transcript) throw UsageError("cannot open transcript for writing: " + transcript_path);
    }

    BenchmarkReport report =
        run_benchmark(config, dataset, *backend, {strategy_config}, parallelism);
    const StrategyResult& row = report.rows.front();

    if (transcript.is_open()) {
        for (const auto& item : row.items) {
            if (item.failed) continue;
            for (const auto& round : item.outcome.transcript.rounds())
                for (const auto& resp : round) {
                    json rec{{"query_id", item.query_id}, {"round", resp.round},
                             {"agent", resp.agent_index}, {"text", resp.text},
                             {"token_count", resp.token_count}, {"strategy", row.strategy},
                             {"elapsed_ms", resp.elapsed_ms}};
                    transcript << rec.dump() << "\n";
                }
            json summary{{"query_id", item.query_id},
                         {"summary",
                          {{"consensus", item.outcome.consensus},
                           {"final_answers", item.outcome.final_answers},
                           {"measured_input_tokens", item.outcome.measured_input_tokens},
                           {"measured_history_tokens", item.outcome.measured_history_tokens},
                           {"wall_time_seconds", item.outcome.wall_time_seconds},
                           {"truncated", item.outcome.truncated},
                           {"aborted", item.outcome.aborted}}}};
            transcript << summary.dump() << "\n";
        }
    }

    json out{{"strategy", row.strategy},
             {"items", dataset.items.size()},
             {"failures", row.failures},
             {"accuracy_pct", row.accuracy_pct},
             {"total_input_tokens", row.total_input_tokens},
             {"history_tokens", row.history_tokens},
             {"wall_time_seconds", row.wall_time_s},
             {"per_round_context_tokens", row.per_round_context_tokens}};
    if (!report_path.empty()) {
        std::ofstream rf(report_path);
        rf << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << std::endl;
    return row.failures == 0 ? 0 : 1;
}

int cmd_cost_predict(int agents, int rounds, double avg_tokens, double summary_tokens,
                     int vision_tokens, int pages, const std::string& csv_path) {
    CostCurve curve = predict_costs(agents, rounds, avg_tokens, summary_tokens, vision_tokens,
                                    pages);
    std::ostringstream csv;
    csv << "round,full_text,summary,visual,full_text_cum,summary_cum,visual_cum\n";
    for (int r = 0; r < rounds; ++r)
        csv << (r + 1) << "," << curve.full_text_per_round[r] << ","
            << curve.summary_per_round[r] << "," << curve.visual_per_round[r] << ","
            << curve.full_text_cumulative[r] << "," << curve.summary_cumulative[r] << ","
            << curve.visual_cumulative[r] << "\n";
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        f << csv.str();
    }
    std::cout << csv.str();
    std::cout << "total_full_text=" << curve.full_text_cumulative.back() << "\n";
    return 0;
}

int cmd_render(const std::string& transcript_path, const std::string& out_dir, int resolution) {
    std::ifstream in(transcript_path);
    if (!in) throw UsageError("cannot open transcript: " + transcript_path);
    std::filesystem::create_directories(out_dir);

    // group response records per query, in order
    std::map<std::string, std::vector<AgentResponse>> per_query;
    std::vector<std::string> order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec = json::parse(line);
        if (!rec.contains("agent")) continue;  // summary record
        AgentResponse resp;
        resp.agent_index = rec["agent"].get<int>();
        resp.round = rec["round"].get<int>();
        resp.text = rec["text"].get<std::string>();
        resp.token_count = rec.value("token_count", 0);
        std::string id = rec["query_id"].get<std::string>();
        if (per_query.find(id) == per_query.end()) order.push_back(id);
        per_query[id].push_back(resp);
    }

    std::ofstream manifest(out_dir + "/manifest.txt");
    RenderLayout layout;
    layout.canvas = resolution;
    for (const auto& id : order) {
        auto& responses = per_query[id];
        int num_agents = 0, num_rounds = 0;
        for (const auto& r : responses) {
            num_agents = std::max(num_agents, r.agent_index);
            num_rounds = std::max(num_rounds, r.round);
        }
        DebateState state(num_agents);
        for (int round = 1; round <= num_rounds; ++round) {
            std::vector<AgentResponse> round_responses;
            for (const auto& r : responses)
                if (r.round == round) round_responses.push_back(r);
            state = state.advanced(std::move(round_responses));
        }
        auto pages = render_history(state, layout);
        for (const auto& page : pages) {
            std::string name = id + "_r" + std::to_string(num_rounds) + "_p" +
                               std::to_string(page.page_index) + ".png";
            write_png(page, out_dir + "/" + name);
            manifest << name << " " << image_digest(page) << "\n";
        }
    }
    std::cout << "wrote pages and manifest to " << out_dir << std::endl;
    return 0;
}

int cmd_theory_verify(long long trials, std::uint64_t seed, const std::string& csv_path,
                      const std::string& json_path) {
    std::vector<double> p_grid;
    for (double p = 0.55; p < 0.951; p += 0.05) p_grid.push_back(p);
    p_grid.push_back(0.99);
    std::vector<int> k_grid;
    for (int k = 1; k <= 20; ++k) k_grid.push_back(k);

    auto rows = bound_table(p_grid, k_grid, trials, seed);
    std::ostringstream csv;
    csv << "K,p,bound,empirical,exact,bound_holds,complexity_consistent\n";
    bool all_bounds = true, all_complexity = true;
    for (const auto& row : rows) {
        csv << row.K << "," << row.p << "," << row.bound << "," << row.empirical << ","
            << row.exact << "," << row.bound_holds << "," << row.complexity_consistent << "\n";
        all_bounds = all_bounds && row.bound_holds;
        all_complexity = all_complexity && row.complexity_consistent;
    }
    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        f << csv.str();
    }

    BottleneckModel model;
    auto exact = enumerate_bottleneck(model, 0.0);
    bool artifact_decay = true;
    double prev = -1.0;
    for (double g = 0.0; g <= 0.301; g += 0.05) {
        BottleneckModel m = model;
        m.gamma = g;
        double i = enumerate_bottleneck(m, 0.0).I_fV_compressed;
        if (prev >= 0.0 && i < prev - 1e-12) artifact_decay = false;
        prev = i;
    }

    json summary{{"bound_holds_everywhere", all_bounds},
                 {"sample_complexity_consistent", all_complexity},
                 {"hoeffding_5_099", hoeffding_bound(5, 0.99)},
                 {"sample_complexity_099_01", sample_complexity(0.99, 0.1)},
                 {"bottleneck",
                  {{"D_uncompressed", exact.D_uncompressed},
                   {"D_compressed", exact.D_compressed},
                   {"distance_decreased", exact.distance_decreased},
                   {"step10_margin_satisfied", exact.step10_margin_satisfied},
                   {"artifact_info_per_agent", exact.artifact_info_per_agent}}},
                 {"artifact_decay_monotone", artifact_decay}};
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        f << summary.dump(2) << "\n";
    }
    std::cout << summary.dump(2) << std::endl;
    bool ok = all_bounds && all_complexity && exact.distance_decreased &&
              exact.step10_margin_satisfied && artifact_decay;
    return ok ? 0 : 1;
}

int cmd_gradcheck(int seeds, const std::string& json_path) {
    double max_err = 0.0;
    for (int s = 0; s < seeds; ++s) {
        ToyTrainConfig cfg;
        cfg.seed = std::uint64_t(s);
        cfg.d_f = 6;
        cfg.d_h = 8;
        cfg.d = 5;
        ToyDataset ds = make_toy_dataset(4, cfg);
        AdapterParams params = AdapterParams::seeded(cfg.d_f, cfg.d_h, cfg.d, cfg.seed + 100);
        max_err = std::max(max_err, grad_check(params, ds.features, ds.head, ds.targets));
    }
    json out{{"seeds", seeds}, {"max_rel_err", max_err}, {"pass", max_err <= 1e-4}};
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << std::endl;
    return max_err <= 1e-4 ? 0 : 1;
}

int cmd_train_toy(int steps, double lr, const std::string& optimizer, int batch, int samples,
                  std::uint64_t seed, const std::string& csv_path, const std::string& json_path) {
    ToyTrainConfig cfg;
    cfg.steps = steps;
    cfg.learning_rate = lr;
    cfg.batch_size = batch;
    cfg.seed = seed;
    cfg.optimizer = optimizer == "sgd" ? Optimizer::sgd : Optimizer::adamw;
    ToyDataset ds = make_toy_dataset(samples, cfg);
    TrainResult result = train_toy(cfg, ds);

    if (!csv_path.empty()) {
        std::ofstream f(csv_path);
        f << "step,loss\n";
        for (std::size_t i = 0; i < result.losses.size(); ++i)
            f << i << "," << result.losses[i] << "\n";
    }
    json out{{"steps", steps},
             {"initial_loss", result.losses.front()},
             {"final_loss", result.losses.back()},
             {"drop_pct", 100.0 * (1.0 - result.losses.back() / result.losses.front())}};
    if (!json_path.empty()) {
        std::ofstream f(json_path);
        f << out.dump(2) << "\n";
    }
    std::cout << out.dump(2) << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-agent debate engine with pluggable history compression"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run debates over a JSONL dataset");
    std::string config_path, dataset_path, strategy = "text", backend = "mock";
    std::string mock_script_path, transcript_path, report_path;
    int parallelism = 1;
    run->add_option("--config", config_path, "key = value config file");
    run->add_option("--dataset", dataset_path, "JSONL dataset: {id, question, answer} per line")
        ->required();
    run->add_option("--strategy", strategy, "text|summary|visual");
    run->add_option("--backend", backend, "http|mock");
    run->add_option("--mock-script", mock_script_path, "scripted responses for the mock backend");
    run->add_option("--transcript", transcript_path, "write JSONL transcript here");
    run->add_option("--report", report_path, "write JSON report here");
    run->add_option("--parallelism", parallelism, "concurrent items");

    auto* cost = app.add_subcommand("cost", "closed-form token cost model");
    auto* cost_predict = cost->add_subcommand("predict", "per-round cost curves");
    int agents = 3, rounds = 5, vision_tokens = 256, pages = 1;
    double avg_tokens = 658.0, summary_tokens = 1200.0;
    std::string cost_csv;
    cost_predict->add_option("--agents", agents);
    cost_predict->add_option("--rounds", rounds);
    cost_predict->add_option("--avg-tokens", avg_tokens);
    cost_predict->add_option("--summary-tokens", summary_tokens);
    cost_predict->add_option("--vision-tokens", vision_tokens);
    cost_predict->add_option("--pages", pages);
    cost_predict->add_option("--csv", cost_csv);

    auto* render = app.add_subcommand("render", "rasterize transcript histories to PNG pages");
    std::string render_transcript, render_out = "renders";
    int resolution = 1024;
    render->add_option("--transcript", render_transcript)->required();
    render->add_option("--out-dir", render_out);
    render->add_option("--resolution", resolution);

    auto* theory = app.add_subcommand("theory", "concentration bound and bottleneck checks");
    auto* theory_verify = theory->add_subcommand("verify", "run the verification sweep");
    long long trials = 100000;
    std::uint64_t theory_seed = 0;
    std::string theory_csv, theory_json;
    theory_verify->add_option("--trials", trials);
    theory_verify->add_option("--seed", theory_seed);
    theory_verify->add_option("--csv", theory_csv);
    theory_verify->add_option("--json", theory_json);

    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
    int gc_seeds = 20;
    std::string gc_json;
    gradcheck_cmd->add_option("--seeds", gc_seeds);
    gradcheck_cmd->add_option("--json", gc_json);

    auto* train_cmd = app.add_subcommand("train-toy", "train the adapter on the synthetic task");
    int steps = 2000, batch = 32, samples = 64;
    double lr = 1e-3;
    std::string optimizer = "adamw", train_csv, train_json;
    std::uint64_t train_seed = 0;
    train_cmd->add_option("--steps", steps);
    train_cmd->add_option("--lr", lr);
    train_cmd->add_option("--optimizer", optimizer, "sgd|adamw");
    train_cmd->add_option("--batch", batch);
    train_cmd->add_option("--samples", samples);
    train_cmd->add_option("--seed", train_seed);
    train_cmd->add_option("--csv", train_csv);
    train_cmd->add_option("--json", train_json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_debate_run(config_path, dataset_path, strategy, backend, mock_script_path,
                                  transcript_path, report_path, parallelism);
        if (cost_predict->parsed())
            return cmd_cost_predict(agents, rounds, avg_tokens, summary_tokens, vision_tokens,
                                    pages, cost_csv);
        if (render->parsed()) return cmd_render(render_transcript, render_out, resolution);
        if (theory_verify->parsed())
            return cmd_theory_verify(trials, theory_seed, theory_csv, theory_json);
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(gc_seeds, gc_json);
        if (train_cmd->parsed())
            return cmd_train_toy(steps, lr, optimizer, batch, samples, train_seed, train_csv,
                                 train_json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    std::cerr << "no subcommand" << std::endl;
    return 2;
}
