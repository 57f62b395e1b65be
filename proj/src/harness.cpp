#include "debatekit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

#include "debatekit/errors.hpp"
#include "debatekit/theory.hpp"

namespace debatekit {

using nlohmann::json;

Dataset load_dataset(const std::string& path, AnswerMode mode) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open dataset: " + path);

    Dataset ds;
    ds.name = path;
    ds.answer_mode = mode;
    std::set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw UsageError("dataset line " + std::to_string(line_no) +
                             ": invalid JSON: " + e.what());
        }
        if (!record.contains("id") || !record.contains("question") || !record.contains("answer"))
            throw UsageError("dataset line " + std::to_string(line_no) +
                             ": missing field id, question, or answer");
        Query q;
        q.id = record["id"].is_string() ? record["id"].get<std::string>() : record["id"].dump();
        q.text = record["question"].get<std::string>();
        std::string answer = record["answer"].is_string() ? record["answer"].get<std::string>()
                                                          : record["answer"].dump();
        // GSM8K keeps the rationale in the answer field, final value after ####
        auto marker = answer.rfind("####");
        if (marker != std::string::npos) answer = answer.substr(marker + 4);
        q.gold_answer = canonicalize_answer(answer);
        if (q.text.empty())
            throw UsageError("dataset line " + std::to_string(line_no) + ": empty question");
        if (!seen_ids.insert(q.id).second)
            throw UsageError("dataset line " + std::to_string(line_no) + ": duplicate id " + q.id);
        ds.items.push_back(std::move(q));
    }
    return ds;
}

BenchmarkReport run_benchmark(const DebateConfig& config, const Dataset& dataset,
                              ChatBackendIface& backend,
                              const std::vector<StrategyConfig>& strategies, int parallelism,
                              const Tokenizer& tokenizer) {
    if (strategies.empty()) throw UsageError("run_benchmark: no strategies given");
    if (parallelism < 1) throw UsageError("run_benchmark: parallelism must be >= 1");
    config.validate();

    DebateConfig item_config = config;
    item_config.answer_mode = dataset.answer_mode;

    BenchmarkReport report;
    for (const auto& strategy_config : strategies) {
        StrategyResult row;
        row.strategy = to_string(strategy_config.kind);
        row.items.resize(dataset.items.size());

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                std::size_t idx = next.fetch_add(1);
                if (idx >= dataset.items.size()) return;
                const Query& query = dataset.items[idx];
                ItemResult item;
                item.query_id = query.id;
                try {
                    auto strategy = make_strategy(strategy_config, &backend);
                    item.outcome =
                        run_debate(item_config, query, backend, *strategy, tokenizer);
                    if (item.outcome.aborted) {
                        item.failed = true;
                        item.error = "backend failure, partial transcript";
                    } else if (query.gold_answer) {
                        item.correct = item.outcome.consensus == *query.gold_answer;
                    }
                } catch (const std::exception& e) {
                    item.failed = true;
                    item.error = e.what();
                }
                row.items[idx] = std::move(item);
            }
        };
        int threads = std::min<int>(parallelism, static_cast<int>(dataset.items.size()));
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }

        int scored = 0, correct = 0;
        for (const auto& item : row.items) {
            if (item.failed) {
                ++row.failures;
                continue;
            }
            row.total_input_tokens += item.outcome.measured_input_tokens;
            row.history_tokens += item.outcome.measured_history_tokens;
            row.wall_time_s += item.outcome.wall_time_seconds;
            const auto& curve = item.outcome.per_round_context_tokens;
            if (row.per_round_context_tokens.size() < curve.size())
                row.per_round_context_tokens.resize(curve.size(), 0);
            for (std::size_t r = 0; r < curve.size(); ++r)
                row.per_round_context_tokens[r] += curve[r];
            ++scored;
            if (item.correct) ++correct;
        }
        row.accuracy_pct = scored > 0 ? 100.0 * correct / scored : 0.0;
        report.rows.push_back(std::move(row));
    }
    return report;
}

CostCurve predict_costs(int num_agents, int num_rounds, double avg_solution_tokens,
                        double summary_tokens_per_round, int vision_tokens, int pages) {
    if (num_agents < 1 || num_rounds < 1) throw UsageError("predict_costs: bad config");
    CostCurve curve;
    double ft_cum = 0.0, s_cum = 0.0, v_cum = 0.0;
    for (int r = 1; r <= num_rounds; ++r) {
        double ft = round_cost(num_agents, r, avg_solution_tokens);
        double s = num_agents * summary_tokens_per_round;
        double v = double(num_agents) * vision_tokens * pages;
        curve.full_text_per_round.push_back(ft);
        curve.summary_per_round.push_back(s);
        curve.visual_per_round.push_back(v);
        ft_cum += ft;
        s_cum += s;
        v_cum += v;
        curve.full_text_cumulative.push_back(ft_cum);
        curve.summary_cumulative.push_back(s_cum);
        curve.visual_cumulative.push_back(v_cum);
    }
    return curve;
}

double fit_growth_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw UsageError("fit_growth_exponent: need >= 2 matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0)
            throw UsageError("fit_growth_exponent: log-log fit needs positive values");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = double(x.size());
    double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-12) throw UsageError("fit_growth_exponent: degenerate x values");
    return (n * sxy - sx * sy) / denom;
}

std::vector<double> convergence_spread(const std::vector<int>& k_values, int rounds,
                                       double p_start, double p_limit, double decay) {
    if (k_values.empty() || rounds < 1) throw UsageError("convergence_spread: empty sweep");
    if (!(p_start > 0.5 && p_limit >= p_start && p_limit <= 1.0 && decay > 0.0 && decay < 1.0))
        throw UsageError("convergence_spread: need 0.5 < p_start <= p_limit <= 1, decay in (0,1)");
    std::vector<double> spreads;
    for (int r = 1; r <= rounds; ++r) {
        double p_r = p_limit - (p_limit - p_start) * std::pow(decay, r - 1);
        double lo = 1.0, hi = 0.0;
        for (int k : k_values) {
            double acc = majority_success_exact(k, p_r);
            lo = std::min(lo, acc);
            hi = std::max(hi, acc);
        }
        spreads.push_back(hi - lo);
    }
    return spreads;
}

}  // namespace debatekit
